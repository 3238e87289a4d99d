#include "depthduet/config_file.hpp"

#include <fstream>
#include <sstream>

#include "depthduet/errors.hpp"

namespace depthduet {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

KvMap parse_kv_text(const std::string& text) {
  KvMap kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + " is not key=value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + " has an empty key");
    kv[key] = value;
  }
  return kv;
}

KvMap load_kv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_kv_text(buf.str());
}

std::string to_kv_text(const KvMap& kv) {
  std::ostringstream out;
  for (const auto& [k, v] : kv) out << k << "=" << v << "\n";
  return out.str();
}

void apply_overrides(KvMap& kv, const std::vector<std::string>& overrides) {
  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("override is not key=value: " + item);
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
}

std::string KvReader::get_string(const std::string& key, const std::string& fallback) {
  consumed_[key] = true;
  const auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

std::int64_t KvReader::get_int(const std::string& key, std::int64_t fallback) {
  consumed_[key] = true;
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    size_t pos = 0;
    const std::int64_t v = std::stoll(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' expects an integer, got '" + it->second + "'");
  }
}

double KvReader::get_double(const std::string& key, double fallback) {
  consumed_[key] = true;
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  try {
    size_t pos = 0;
    const double v = std::stod(it->second, &pos);
    if (pos != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "' expects a number, got '" + it->second + "'");
  }
}

bool KvReader::get_bool(const std::string& key, bool fallback) {
  consumed_[key] = true;
  const auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const std::string& v = it->second;
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("config key '" + key + "' expects a boolean, got '" + v + "'");
}

void KvReader::reject_unknown() const {
  for (const auto& [key, value] : kv_) {
    (void)value;
    if (!consumed_.count(key)) throw ConfigError("unknown config key '" + key + "'");
  }
}

}  // namespace depthduet
