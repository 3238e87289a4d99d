#ifndef DEPTHDUET_PNG_IO_HPP
#define DEPTHDUET_PNG_IO_HPP

#include <string>

#include "depthduet/image.hpp"

namespace depthduet {

// KITTI depth-completion file convention: single-channel 16-bit PNG,
// meters = raw / 256, raw 0 = no measurement. Bit-exact round trip.
DepthImage load_depth_png(const std::string& path);
void save_depth_png(const DepthImage& depth, const std::string& path);

// 8-bit RGB PNG, values mapped to [0,1] via /255.
RgbImage load_rgb_png(const std::string& path);
void save_rgb_png(const RgbImage& img, const std::string& path);

}  // namespace depthduet

#endif  // DEPTHDUET_PNG_IO_HPP
