#pragma once

#include <cstddef>
#include <vector>

#include "proplab/geometry.hpp"
#include "proplab/quadrature.hpp"

namespace proplab {

struct CalibrationResult {
  double c = 0.0;
  double residual = 0.0;
  std::size_t probe_count = 0;
  ModelSpec model;  // copy carrying measure_density = c
};

// Idempotency tolerance used to validate calibration: 1e-6 flat, 1e-4
// sphere, 1e-2 truncated hyperbolic.
double default_idempotency_tolerance(ModelName m);

// (Omega * Omega)(x, y) by quadrature on the grid. The grid weights must
// already include the density.
Amplitude convolve_on_grid(const ModelSpec& m, const QuadratureGrid& grid, const PhasePoint& x, const PhasePoint& y);

// c = Omega(x,x) / sum_z w_z |Omega(x,z)|^2 at the first probe's x, then the
// maximum |(Omega*Omega)(x,y) - Omega(x,y)| over all probes. Throws
// CalibrationFailed if that exceeds `tolerance` (negative = model default).
CalibrationResult calibrate_measure(const ModelSpec& m, const QuadratureGrid& grid,
                                    const std::vector<ProbePair>& probes, double tolerance = -1.0);

// Exact Gaussian convolution of a flat kernel with itself under dz/(2 pi hbar),
// obtained by completing the square.
Amplitude analytic_convolution_flat(ModelName flat, const PhasePoint& x, const PhasePoint& y, double hbar);

// Closed-form densities where one is known: 1/(2 pi hbar) flat,
// (N+1)/(4 pi R^2) sphere, 1/(4 pi hbar) hyperbolic.
double analytic_density(const ModelSpec& m);

}  // namespace proplab
