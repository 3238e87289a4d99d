#include "depthduet/plot.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "depthduet/errors.hpp"
#include "depthduet/image.hpp"
#include "depthduet/png_io.hpp"

namespace depthduet {

namespace {

// 5x7 bitmap font, bit 4..0 = left..right.
struct Glyph {
  char ch;
  std::uint8_t rows[7];
};

const Glyph kFont[] = {
    {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
    {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}},
    {'D', {0x1E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x1E}},
    {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}},
    {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}},
    {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
    {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
    {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
    {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}},
    {'N', {0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11}},
    {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
    {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}},
    {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
    {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}},
    {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}},
    {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x0A, 0x04, 0x04, 0x04, 0x04}},
    {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {'_', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1F}},
    {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}},
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
};

const std::uint8_t* glyph_rows(char c) {
  c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (const Glyph& g : kFont)
    if (g.ch == c) return g.rows;
  return kFont[sizeof(kFont) / sizeof(kFont[0]) - 1].rows;  // space
}

struct Color {
  float r, g, b;
};

const Color kPalette[] = {
    {0.85f, 0.10f, 0.10f}, {0.10f, 0.45f, 0.85f}, {0.10f, 0.60f, 0.20f},
    {0.85f, 0.55f, 0.05f}, {0.55f, 0.15f, 0.70f}, {0.05f, 0.60f, 0.60f},
    {0.45f, 0.30f, 0.10f}, {0.15f, 0.15f, 0.15f},
};

void put_pixel(RgbImage& img, int x, int y, Color c) {
  if (x < 0 || y < 0 || x >= img.width || y >= img.height) return;
  img.at(y, x, 0) = c.r;
  img.at(y, x, 1) = c.g;
  img.at(y, x, 2) = c.b;
}

void draw_line(RgbImage& img, int x0, int y0, int x1, int y1, Color c) {
  const int dx = std::abs(x1 - x0), dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1, sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    put_pixel(img, x0, y0, c);
    if (x0 == x1 && y0 == y1) break;
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

void draw_text(RgbImage& img, int x, int y, const std::string& text, Color c) {
  for (char ch : text) {
    const std::uint8_t* rows = glyph_rows(ch);
    for (int r = 0; r < 7; ++r)
      for (int b = 0; b < 5; ++b)
        if (rows[r] & (1 << (4 - b))) put_pixel(img, x + b, y + r, c);
    x += 6;
  }
}

std::string tick_label(double exponent) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "1E%d", static_cast<int>(exponent));
  return buf;
}

}  // namespace

LossCsv parse_loss_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open loss CSV: " + path);
  std::string line;
  if (!std::getline(in, line)) throw FormatError("loss CSV is empty: " + path);

  LossCsv csv;
  {
    std::istringstream header(line);
    std::string col;
    bool first = true;
    while (std::getline(header, col, ',')) {
      if (first) {
        if (col != "step")
          throw FormatError("loss CSV must start with a 'step' column, got '" + col + "'");
        first = false;
      } else {
        csv.columns.push_back(col);
      }
    }
    if (csv.columns.empty()) throw FormatError("loss CSV has no value columns");
  }
  csv.series.resize(csv.columns.size());

  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> values;
    while (std::getline(row, cell, ',')) {
      try {
        values.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw FormatError("loss CSV line " + std::to_string(lineno) + ": bad number '" + cell +
                          "'");
      }
    }
    if (values.size() != csv.columns.size() + 1)
      throw FormatError("loss CSV line " + std::to_string(lineno) + " has " +
                        std::to_string(values.size()) + " cells, expected " +
                        std::to_string(csv.columns.size() + 1));
    csv.steps.push_back(values[0]);
    for (size_t i = 0; i < csv.columns.size(); ++i) csv.series[i].push_back(values[i + 1]);
  }
  if (csv.steps.empty()) throw FormatError("loss CSV has no data rows: " + path);
  return csv;
}

void render_loss_plot(const std::string& csv_path, const std::string& out_png, int width,
                      int height) {
  const LossCsv csv = parse_loss_csv(csv_path);

  RgbImage img(height, width);
  std::fill(img.values.begin(), img.values.end(), 1.0f);

  const int left = 58, right = width - 16, top = 16, bottom = height - 34;
  const Color axis{0.0f, 0.0f, 0.0f};
  const Color grid{0.85f, 0.85f, 0.85f};

  // log10 range over all finite positive values (floored at 1e-8)
  double lo = 1e300, hi = -1e300;
  for (const auto& s : csv.series) {
    for (double v : s) {
      if (!std::isfinite(v)) continue;
      const double lv = std::log10(std::max(v, 1e-8));
      lo = std::min(lo, lv);
      hi = std::max(hi, lv);
    }
  }
  if (lo > hi) {
    lo = -1;
    hi = 1;
  }
  if (hi - lo < 0.5) {
    hi += 0.25;
    lo -= 0.25;
  }
  const double step_lo = csv.steps.front(), step_hi = std::max(csv.steps.back(), step_lo + 1.0);

  auto x_of = [&](double step) {
    return left + static_cast<int>((step - step_lo) / (step_hi - step_lo) * (right - left));
  };
  auto y_of = [&](double value) {
    const double lv = std::log10(std::max(value, 1e-8));
    return bottom - static_cast<int>((lv - lo) / (hi - lo) * (bottom - top));
  };

  for (double e = std::ceil(lo); e <= std::floor(hi); e += 1.0) {
    const int y = bottom - static_cast<int>((e - lo) / (hi - lo) * (bottom - top));
    draw_line(img, left, y, right, y, grid);
    draw_text(img, 6, y - 3, tick_label(e), axis);
  }
  draw_line(img, left, top, left, bottom, axis);
  draw_line(img, left, bottom, right, bottom, axis);
  draw_text(img, (left + right) / 2 - 12, height - 12, "STEP", axis);

  for (size_t s = 0; s < csv.series.size(); ++s) {
    const Color c = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    int px = -1, py = -1;
    for (size_t i = 0; i < csv.steps.size(); ++i) {
      const double v = csv.series[s][i];
      if (!std::isfinite(v)) continue;
      const int x = x_of(csv.steps[i]);
      const int y = y_of(v);
      if (px >= 0) draw_line(img, px, py, x, y, c);
      px = x;
      py = y;
    }
    // legend
    const int ly = top + 4 + static_cast<int>(s) * 11;
    draw_line(img, right - 110, ly + 3, right - 96, ly + 3, c);
    draw_text(img, right - 92, ly, csv.columns[s], axis);
  }

  save_rgb_png(img, out_png);
}

}  // namespace depthduet
