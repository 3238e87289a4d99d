#ifndef DEPTHDUET_CONFIG_FILE_HPP
#define DEPTHDUET_CONFIG_FILE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace depthduet {

// Flat UTF-8 `key=value` lines, '#' comments, later assignments win.
using KvMap = std::map<std::string, std::string>;

KvMap parse_kv_text(const std::string& text);
KvMap load_kv_file(const std::string& path);
std::string to_kv_text(const KvMap& kv);

// Applies `key=value` override strings (CLI wins over file values).
void apply_overrides(KvMap& kv, const std::vector<std::string>& overrides);

// Typed readers; consumed keys are recorded so unknown ones can be rejected.
class KvReader {
 public:
  explicit KvReader(const KvMap& kv) : kv_(kv) {}

  bool has(const std::string& key) const { return kv_.count(key) > 0; }

  std::string get_string(const std::string& key, const std::string& fallback);
  std::int64_t get_int(const std::string& key, std::int64_t fallback);
  double get_double(const std::string& key, double fallback);
  bool get_bool(const std::string& key, bool fallback);

  // Throws ConfigError naming the first key never consumed by a getter.
  void reject_unknown() const;

 private:
  const KvMap& kv_;
  std::map<std::string, bool> consumed_;
};

}  // namespace depthduet

#endif  // DEPTHDUET_CONFIG_FILE_HPP
