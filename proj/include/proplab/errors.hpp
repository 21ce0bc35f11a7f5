#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace proplab {

// Base for everything the library throws on bad input or failed numerics.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

// Geodesic is not unique (antipodal pair on the sphere) or the pair lies
// outside the region where the lattice kernel is defined.
class InjectivityError : public Error {
 public:
  using Error::Error;
};

// Coherent state requested too close to the edge of a truncated grid.
class BoundaryContamination : public DomainError {
 public:
  using DomainError::DomainError;
};

class StencilTooWide : public Error {
 public:
  using Error::Error;
};

class CalibrationFailed : public Error {
 public:
  CalibrationFailed(const std::string& what, double c, double residual)
      : Error(what), c_(c), residual_(residual) {}
  double density() const { return c_; }
  double residual() const { return residual_; }

 private:
  double c_;
  double residual_;
};

class DiscretizationTooCoarse : public Error {
 public:
  DiscretizationTooCoarse(const std::string& what, std::vector<double> spectrum)
      : Error(what), spectrum_(std::move(spectrum)) {}
  const std::vector<double>& spectrum() const { return spectrum_; }

 private:
  std::vector<double> spectrum_;
};

class GateFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace proplab
