#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "proplab/geometry.hpp"
#include "proplab/quadrature.hpp"

namespace proplab {

struct AxiomTolerances {
  double normalization = 1e-12;
  double hermiticity = 1e-12;
  double idempotency = 1e-6;
  double first_jet = 1e-6;
};

AxiomTolerances default_tolerances(ModelName m);

struct AxiomReport {
  std::string model;
  double normalization_max_err = 0.0;
  double hermiticity_max_err = 0.0;
  double idempotency_max_err = 0.0;
  double first_jet_max_err = 0.0;
  std::size_t probe_count = 0;
  std::size_t idempotency_probe_count = 0;
  std::size_t jet_probe_count = 0;
  AxiomTolerances tol;
  bool normalization_pass = false;
  bool hermiticity_pass = false;
  bool idempotency_pass = false;
  bool first_jet_pass = false;

  int passed() const {
    return int(normalization_pass) + int(hermiticity_pass) + int(idempotency_pass) + int(first_jet_pass);
  }
  bool all_pass() const { return passed() == 4; }
};

// A kernel with its connection and measure density, not necessarily
// normalized on the diagonal.
struct Propagator {
  KernelFn kernel;
  std::function<ConnectionOneForm(const PhasePoint&)> theta;
  std::function<double(const PhasePoint&)> density;  // d mu = density(z) dp dq
};

Propagator propagator_of(const ModelSpec& m);

struct AxiomCheckOptions {
  std::size_t idempotency_probes = 50;
  std::size_t jet_probes = 20;
  double jet_step = 0.0;  // 0 = 1e-3 sqrt(hbar)
};

// Axioms (i)-(iv) for a calibrated model. The grid's own density is replaced
// by the model's.
AxiomReport check_axioms(const ModelSpec& m, const QuadratureGrid& grid, const std::vector<ProbePair>& probes,
                         const AxiomTolerances& tol, const AxiomCheckOptions& opt = {});

// Same checks for a bare propagator. Grid weights are taken as dp dq and
// multiplied by the propagator density. The idempotency error is measured
// relative to sqrt(|k(x,x) k(y,y)|), which is 1 for normalized kernels.
AxiomReport check_axioms(const Propagator& prop, double hbar, const QuadratureGrid& grid,
                         const std::vector<ProbePair>& probes, const AxiomTolerances& tol,
                         const AxiomCheckOptions& opt = {});

// Omega = Omega' / sqrt(f(x) f(y)), d mu = f d mu', theta = theta' - d log sqrt f,
// with f(x) = raw(x, x). `samples` are the points where positivity of f is
// checked; d log f is differenced with step h.
Propagator normalize_propagator(const Propagator& raw, std::span<const PhasePoint> samples, double h = 1e-5);

}  // namespace proplab
