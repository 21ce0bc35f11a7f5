#include <doctest.h>

#include <cmath>
#include <numbers>

#include "proplab/axioms.hpp"
#include "proplab/errors.hpp"
#include "proplab/models.hpp"

using namespace proplab;
using std::numbers::pi;

namespace {

AxiomReport run(ModelName name, double hbar, int n, ModelOptions o = {}) {
  const auto m = make_model(name, hbar, o);
  const auto g = default_grid(m, n);
  const auto probes = probe_pairs(default_probe_box(m), 200);
  const std::vector<ProbePair> head(probes.begin(), probes.begin() + 50);
  double c = analytic_density(m);
  try {
    c = calibrate_measure(m, g, head).c;
  } catch (const CalibrationFailed& e) {
    c = e.density();
  }
  return check_axioms(m.with_density(c), g, probes, default_tolerances(name));
}

}  // namespace

TEST_CASE("all four axioms hold for the four models") {
  CHECK(run(ModelName::FlatPQ, 1.0, 64).all_pass());
  CHECK(run(ModelName::FlatSymmetric, 1.0, 64).all_pass());
  CHECK(run(ModelName::Sphere, 0.5, 64).all_pass());
  const auto h = run(ModelName::Hyperbolic, 1.0, 200);
  CHECK(h.all_pass());
  CHECK(h.idempotency_max_err < 1e-2);
}

TEST_CASE("uncorrected sphere sign fails idempotency and the first jet") {
  ModelOptions o;
  o.sphere_sign = SphereSign::Verbatim;
  const auto r = run(ModelName::Sphere, 0.5, 64, o);
  CHECK(r.normalization_pass);
  CHECK(r.hermiticity_pass);
  CHECK_FALSE(r.first_jet_pass);
  CHECK_FALSE(r.idempotency_pass);
  CHECK(r.passed() == 2);
}

TEST_CASE("default tolerances") {
  CHECK(default_tolerances(ModelName::FlatPQ).idempotency == 1e-6);
  CHECK(default_tolerances(ModelName::Sphere).idempotency == 1e-4);
  CHECK(default_tolerances(ModelName::Hyperbolic).idempotency == 1e-2);
  CHECK(default_tolerances(ModelName::Sphere).normalization == 1e-12);
}

TEST_CASE("normalizing a rescaled kernel restores the axioms") {
  // Omega'(x,y) = f(x)^{1/2} f(y)^{1/2} Omega(x,y) with f = 1 + p^2, and the
  // measure divided by f
  const double hbar = 1.0;
  const auto m = make_model(ModelName::FlatPQ, hbar);
  Propagator raw;
  auto f = [](const PhasePoint& z) { return 1.0 + z.p * z.p; };
  raw.kernel = [m, f](const PhasePoint& x, const PhasePoint& y) {
    return std::sqrt(f(x) * f(y)) * m.omega_kernel(x, y);
  };
  // the raw kernel's own jet: theta + d log sqrt f
  raw.theta = [m](const PhasePoint& x) {
    auto t = m.theta(x);
    t.coeff_p += x.p / (1.0 + x.p * x.p);
    return t;
  };
  raw.density = [f](const PhasePoint& x) { return 1.0 / (2.0 * pi * f(x)); };
  const auto g = default_grid(m, 64);
  const auto probes = probe_pairs(default_probe_box(m), 100);
  const auto pts = probe_points(default_probe_box(m), 20);
  const auto before = check_axioms(raw, hbar, g, probes, default_tolerances(ModelName::FlatPQ));
  CHECK_FALSE(before.normalization_pass);
  const Propagator norm = normalize_propagator(raw, pts);
  const auto after = check_axioms(norm, hbar, g, probes, default_tolerances(ModelName::FlatPQ));
  CHECK(after.normalization_pass);
  CHECK(after.hermiticity_pass);
  CHECK(after.idempotency_max_err < 1e-6);
  CHECK(after.first_jet_max_err < 1e-6);
  CHECK(std::abs(norm.theta({0.5, 0.1}).coeff_p) < 1e-8);
}
