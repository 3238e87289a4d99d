#ifndef DEPTHDUET_PLOT_HPP
#define DEPTHDUET_PLOT_HPP

#include <string>
#include <vector>

namespace depthduet {

struct LossCsv {
  std::vector<std::string> columns;       // without the leading "step"
  std::vector<double> steps;
  std::vector<std::vector<double>> series;  // one vector per column
};

LossCsv parse_loss_csv(const std::string& path);

// Renders all series of a loss-trace CSV as colored polylines on a log10 y
// axis, with a legend, and writes an 8-bit RGB PNG.
void render_loss_plot(const std::string& csv_path, const std::string& out_png, int width = 1000,
                      int height = 640);

}  // namespace depthduet

#endif  // DEPTHDUET_PLOT_HPP
