#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "proplab/geometry.hpp"

namespace proplab {

struct JetReport {
  PhasePoint point;
  Amplitude oneform_p;
  Amplitude oneform_q;
  // covariant second derivatives of log Omega(x, .) at x, index 0 = p
  std::array<std::array<Amplitude, 2>, 2> hessian{};
  ConnectionOneForm ref_oneform;
  std::array<double, 2> ref_quadratic{};  // -g_ii / (2 hbar)
  double residual_first = 0.0;
  double residual_second_diag = 0.0;
  // max deviation of the whole Hessian from -g/(2 hbar), mixed entry included
  double residual_second_full = 0.0;
  Amplitude mixed_term;
  bool has_second = false;
};

// Richardson-extrapolated central gradient of y -> log k(x, y) at y = x.
std::array<Amplitude, 2> log_gradient(const KernelFn& k, const PhasePoint& x, double h);

// Default differencing step 1e-3 sqrt(hbar).
double default_jet_step(const ModelSpec& m);

JetReport extract_first_jet(const ModelSpec& m, const PhasePoint& x, double h);
JetReport extract_second_jet(const ModelSpec& m, const PhasePoint& x, double h);

enum class CochainKind { Additive, Multiplicative };

struct CochainSample {
  int arity = 2;
  std::function<Amplitude(std::span<const PhasePoint>)> values;
  CochainKind kind = CochainKind::Additive;
  bool normalized = true;
  bool even_perm_invariant = true;
};

// n! X_n ... X_1 of the cochain at the total diagonal (m, ..., m), by
// central differences with one Richardson step. n = arity - 1 in {1, 2}.
Amplitude vanest_degree_n(const CochainSample& c, const PhasePoint& x, std::span<const PhasePoint> directions, double h);

// Three-point cocycle log[Omega(x,y) Omega(y,z) Omega(z,x)] as a cochain.
CochainSample cocycle_cochain(const ModelSpec& m);

struct CurvatureValue {
  Amplitude value;      // dp^dq coefficient from the cocycle
  Amplitude reference;  // (i/hbar) times the dp^dq coefficient of d(theta)/(i/hbar)
};

CurvatureValue curvature_from_cocycle(const ModelSpec& m, const PhasePoint& x, double h);

}  // namespace proplab
