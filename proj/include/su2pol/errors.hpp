#pragma once

#include <stdexcept>
#include <string>

namespace su2pol {

// Measured intensities that cannot come from any physical state/evolution
// (window violations, negative delta quantities beyond numerical dust, ...).
class InconsistentDataError : public std::runtime_error {
 public:
  explicit InconsistentDataError(const std::string& what) : std::runtime_error(what) {}
};

// Antipodal points on the Bloch sphere have no unique connecting great-circle arc.
class AmbiguousGeodesicError : public std::invalid_argument {
 public:
  explicit AmbiguousGeodesicError(const std::string& what) : std::invalid_argument(what) {}
};

// Malformed trace / path files.
class FileFormatError : public std::runtime_error {
 public:
  explicit FileFormatError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace su2pol
