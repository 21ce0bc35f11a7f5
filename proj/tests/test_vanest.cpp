#include <doctest.h>

#include <cmath>
#include <vector>

#include "proplab/quadrature.hpp"
#include "proplab/vanest.hpp"

using namespace proplab;

TEST_CASE("first jet recovers theta for every model") {
  for (auto name : {ModelName::FlatSymmetric, ModelName::FlatPQ, ModelName::Sphere, ModelName::Hyperbolic}) {
    const double hbar = name == ModelName::Sphere ? 0.5 : 1.0;
    const auto m = make_model(name, hbar);
    for (const auto& x : probe_points(default_probe_box(m), 20)) {
      const auto j = extract_first_jet(m, x, default_jet_step(m));
      CHECK(j.residual_first < 1e-6);
      // theta is known by hand: (i/hbar) p dq, or its symmetric gauge
      const Amplitude i{0.0, 1.0};
      const Amplitude tq = name == ModelName::FlatSymmetric ? i * x.p / (2 * hbar) : i * x.p / hbar;
      CHECK(std::abs(j.oneform_q - tq) < 1e-6);
    }
  }
}

TEST_CASE("verbatim sphere kernel misses the first jet by at least 0.4") {
  ModelOptions o;
  o.sphere_sign = SphereSign::Verbatim;
  const double hbar = 0.5;
  const auto m = make_model(ModelName::Sphere, hbar, o);
  const PhasePoint x{std::sqrt(hbar) / 2.0, 0.0};
  CHECK(extract_first_jet(m, x, default_jet_step(m)).residual_first >= 0.4);
  const auto c = make_model(ModelName::Sphere, hbar);
  CHECK(extract_first_jet(c, x, default_jet_step(c)).residual_first < 1e-6);
}

TEST_CASE("second jet: diagonal -g_ii / 2 hbar") {
  for (auto name : {ModelName::FlatSymmetric, ModelName::Sphere, ModelName::Hyperbolic}) {
    const auto m = make_model(name, name == ModelName::Sphere ? 0.5 : 1.0);
    for (const auto& x : probe_points(default_probe_box(m), 10)) {
      const auto j = extract_second_jet(m, x, default_jet_step(m));
      CHECK(j.has_second);
      CHECK(j.residual_second_diag < 1e-4);
      const auto g = m.metric(x);
      CHECK(j.ref_quadratic[0] == doctest::Approx(-g.g_pp / (2 * m.hbar())));
    }
  }
  const auto s = make_model(ModelName::FlatSymmetric, 1.0);
  CHECK(extract_second_jet(s, {0.3, 0.4}, default_jet_step(s)).residual_second_full < 1e-6);
  // FlatPQ has a mixed term -i/(2 hbar) from the p dq gauge
  const auto pq = make_model(ModelName::FlatPQ, 1.0);
  const auto j = extract_second_jet(pq, {0.3, 0.4}, default_jet_step(pq));
  CHECK(std::abs(j.mixed_term - Amplitude(0.0, 0.5)) < 1e-5);
}

TEST_CASE("degree-1 van Est map of a coboundary is the differential") {
  // c(x0, x1) = f(x1) - f(x0), f = p^2 q
  CochainSample c;
  c.arity = 2;
  c.values = [](std::span<const PhasePoint> x) {
    auto f = [](const PhasePoint& z) { return Amplitude(z.p * z.p * z.q); };
    return f(x[1]) - f(x[0]);
  };
  const PhasePoint x{0.7, -0.4};
  const std::vector<PhasePoint> dp{{1.0, 0.0}}, dq{{0.0, 1.0}};
  CHECK(std::abs(vanest_degree_n(c, x, dp, 1e-3) - 2 * 0.7 * -0.4) < 1e-9);
  CHECK(std::abs(vanest_degree_n(c, x, dq, 1e-3) - 0.49) < 1e-9);
}

TEST_CASE("curvature of the cocycle is i/hbar dp^dq") {
  for (auto name : {ModelName::FlatSymmetric, ModelName::FlatPQ, ModelName::Sphere, ModelName::Hyperbolic}) {
    const double hbar = name == ModelName::Sphere ? 0.5 : 1.0;
    const auto m = make_model(name, hbar);
    for (const auto& x : probe_points(default_probe_box(m), 5)) {
      const auto v = curvature_from_cocycle(m, x, 1e-2 * std::sqrt(hbar));
      CHECK(std::abs(v.value - Amplitude(0.0, 1.0 / hbar)) < 1e-5 / hbar);
      CHECK(std::abs(v.reference - Amplitude(0.0, 1.0 / hbar)) < 1e-9);
    }
  }
}

TEST_CASE("log gradient of a Gaussian") {
  const KernelFn k = [](const PhasePoint& x, const PhasePoint& y) {
    return std::exp(Amplitude(-(y.p - x.p) * (y.p - x.p), 3.0 * y.q));
  };
  const auto g = log_gradient(k, {0.2, 0.1}, 1e-3);
  CHECK(std::abs(g[0]) < 1e-10);
  CHECK(std::abs(g[1] - Amplitude(0.0, 3.0)) < 1e-10);
}
