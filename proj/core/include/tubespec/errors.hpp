#ifndef TUBESPEC_ERRORS_HPP
#define TUBESPEC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tubespec {

/// Base class for all tubespec errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the operation (point outside
/// the parameter range, invalid mode index, too-coarse sampling, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// The tube weight h_eps became non-positive: eps is too large for the
/// curvature of the surface and the tube degenerates.
class DegenerateTubeError : public Error {
public:
  using Error::Error;
};

/// Requested an assembly the geometry kind does not support.
class UnsupportedGeometryError : public Error {
public:
  using Error::Error;
};

/// A projection was requested for an identically zero field.
class ZeroFieldError : public Error {
public:
  using Error::Error;
};

/// The shifted factorization failed repeatedly; no usable spectral shift
/// was found.
class ShiftError : public Error {
public:
  using Error::Error;
};

/// Dense-reference problem size exceeds the configured cap.
class DimensionCapError : public Error {
public:
  using Error::Error;
};

/// Malformed configuration file or option value.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// File could not be read or written; message carries the path.
class IoError : public Error {
public:
  using Error::Error;
};

} // namespace tubespec

#endif
