#ifndef QTRACK_ERRORS_HPP
#define QTRACK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qtrack {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Point-mass distributions have no density; callers must use support
// membership instead.
class DensityUndefinedError : public Error {
 public:
  explicit DensityUndefinedError(const std::string& what) : Error(what) {}
};

// Thrown by combinatorial matching operations when a busy period exceeds
// the configured cap.
class BusyPeriodTooLargeError : public Error {
 public:
  BusyPeriodTooLargeError(int size, int cap)
      : Error("busy period of size " + std::to_string(size) +
              " exceeds cap " + std::to_string(cap)),
        size(size),
        cap(cap) {}
  int size;
  int cap;
};

class DimensionMismatchError : public Error {
 public:
  explicit DimensionMismatchError(const std::string& what) : Error(what) {}
};

class MissingAccuraciesError : public Error {
 public:
  explicit MissingAccuraciesError(const std::string& what) : Error(what) {}
};

// Configuration file problems. `location` is a JSON-pointer-like path to
// the offending field, empty for file-level problems.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, const std::string& location = "")
      : Error(location.empty() ? what : what + " (at " + location + ")"),
        location(location) {}
  std::string location;
};

}  // namespace qtrack

#endif  // QTRACK_ERRORS_HPP
