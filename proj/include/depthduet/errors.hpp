#ifndef DEPTHDUET_ERRORS_HPP
#define DEPTHDUET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace depthduet {

// Failure taxonomy. Each class maps to one documented CLI exit code so that
// scripted callers can tell failure modes apart (see exit_code()).
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad config key/value, unknown flag, task/model mismatch.
struct ConfigError : Error {
  using Error::Error;
};

// Missing file, unwritable path.
struct IoError : Error {
  using Error::Error;
};

// A file exists but has the wrong format (bit depth, channels, manifest syntax).
struct FormatError : Error {
  using Error::Error;
};

// Image/tensor dimension mismatch, indivisible input sizes.
struct ShapeError : Error {
  using Error::Error;
};

// Value outside its documented range (depth beyond 16-bit headroom, bad density).
struct RangeError : Error {
  using Error::Error;
};

// Checkpoint format_version mismatch or corrupt container.
struct VersionError : Error {
  using Error::Error;
};

// Empty dataset or empty domain pool requested with nonzero probability.
struct DatasetError : Error {
  using Error::Error;
};

// Non-finite loss/output during training or an empty metric evaluation.
struct NumericError : Error {
  using Error::Error;
};

inline int exit_code(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const IoError*>(&e)) return 3;
  if (dynamic_cast<const FormatError*>(&e)) return 4;
  if (dynamic_cast<const ShapeError*>(&e)) return 5;
  if (dynamic_cast<const RangeError*>(&e)) return 6;
  if (dynamic_cast<const VersionError*>(&e)) return 7;
  if (dynamic_cast<const DatasetError*>(&e)) return 8;
  if (dynamic_cast<const NumericError*>(&e)) return 9;
  return 1;
}

}  // namespace depthduet

#endif  // DEPTHDUET_ERRORS_HPP
