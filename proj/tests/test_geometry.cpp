#include <doctest.h>

#include <cmath>
#include <numbers>

#include "proplab/errors.hpp"
#include "proplab/geometry.hpp"

using namespace proplab;
using std::numbers::pi;

namespace {

// spin coherent state overlap from two-component spinors, written
// independently of the library formula
Amplitude spinor_overlap(const PhasePoint& x, const PhasePoint& y, double R) {
  const double tx = std::acos(x.p / R), ty = std::acos(y.p / R);
  const double fx = x.q / R, fy = y.q / R;
  const Amplitude ax = std::cos(tx / 2), bx = std::polar(std::sin(tx / 2), fx);
  const Amplitude ay = std::cos(ty / 2), by = std::polar(std::sin(ty / 2), fy);
  return std::conj(ax) * ay + std::conj(bx) * by;
}

}  // namespace

TEST_CASE("model names round trip") {
  for (auto m : {ModelName::FlatSymmetric, ModelName::FlatPQ, ModelName::Sphere, ModelName::Hyperbolic})
    CHECK(parse_model_name(to_string(m)) == m);
  CHECK(parse_model_name("flat_pq") == ModelName::FlatPQ);
  CHECK_THROWS_AS(parse_model_name("torus"), InvalidArgument);
}

TEST_CASE("flat kernels match hand-computed values") {
  const auto pq = make_model(ModelName::FlatPQ, 1.0);
  const auto sym = make_model(ModelName::FlatSymmetric, 1.0);
  const PhasePoint x{0.3, -0.2}, y{1.1, 0.5};
  // |dz|^2 = 0.64 + 0.49 = 1.13
  const double mod = std::exp(-1.13 / 4.0);
  const Amplitude a = pq.omega_kernel(x, y), b = sym.omega_kernel(x, y);
  CHECK(std::abs(a - std::polar(mod, (0.3 + 1.1) * 0.7 / 2.0)) < 1e-15);
  CHECK(std::abs(b - std::polar(mod, (0.3 * 0.5 - (-0.2) * 1.1) / 2.0)) < 1e-15);
}

TEST_CASE("diagonal is one and kernels are conjugate symmetric") {
  const PhasePoint pts[] = {{0.1, 0.2}, {0.3, 0.9}, {0.6, 1.7}};
  for (auto name : {ModelName::FlatSymmetric, ModelName::FlatPQ, ModelName::Sphere, ModelName::Hyperbolic}) {
    const auto m = make_model(name, 0.5);
    for (const auto& x : pts)
      for (const auto& y : pts) {
        CHECK(std::abs(m.omega_kernel(x, x) - 1.0) < 1e-14);
        CHECK(std::abs(m.omega_kernel(x, y) - std::conj(m.omega_kernel(y, x))) < 1e-14);
        CHECK(std::abs(m.omega_kernel(x, y)) <= 1.0 + 1e-14);
      }
  }
}

TEST_CASE("sphere kernel is a power of the spinor overlap") {
  for (int N : {1, 2, 3, 5}) {
    const double hbar = 1.0 / N, R = sphere_radius(hbar);
    CHECK(sphere_degree(hbar) == N);
    CHECK(R * R == doctest::Approx(N * hbar / 2.0));
    const auto m = make_model(ModelName::Sphere, hbar);
    const PhasePoint x{0.2 * R, 0.4 * R}, y{-0.5 * R, 2.5 * R};
    // Omega(x, y) = <y|x>^N up to the chart gauge exp(i N dphi / 2)
    const Amplitude ref = std::pow(std::polar(1.0, (y.q - x.q) / (2 * R)) * spinor_overlap(y, x, R), N);
    CHECK(std::abs(m.omega_kernel(x, y) - ref) < 1e-13);
    // |Omega| = cos^N(d / 2R)
    CHECK(std::abs(m.omega_kernel(x, y)) == doctest::Approx(std::pow(std::cos(m.geodesic_distance(x, y) / (2 * R)), N)));
  }
}

TEST_CASE("verbatim sphere sign differs from the corrected one") {
  ModelOptions o;
  o.sphere_sign = SphereSign::Verbatim;
  const auto v = make_model(ModelName::Sphere, 0.5, o);
  const auto c = make_model(ModelName::Sphere, 0.5);
  CHECK_FALSE(v.sign_corrected());
  CHECK(c.sign_corrected());
  const PhasePoint x{0.1, 0.2}, y{0.3, 0.7};
  CHECK(std::abs(v.omega_kernel(x, y) - c.omega_kernel(x, y)) > 1e-3);
}

TEST_CASE("closed-form transport agrees with quadrature of theta") {
  const PhasePoint pairs[][2] = {{{0.1, 0.2}, {0.4, -0.3}}, {{-0.2, 0.5}, {0.3, 1.4}}, {{0.6, 0.1}, {0.2, 0.9}}};
  for (auto name : {ModelName::FlatSymmetric, ModelName::FlatPQ, ModelName::Sphere, ModelName::Hyperbolic}) {
    const auto m = make_model(name, 0.5);
    for (const auto& pr : pairs) {
      PhasePoint a = pr[0], b = pr[1];
      if (name == ModelName::Hyperbolic) a.p += 1.0, b.p += 1.0;
      CHECK(std::abs(m.geodesic_transport_phase(a, b) - transport_phase_by_quadrature(m, a, b)) < 1e-10);
    }
  }
}

TEST_CASE("geodesic distances") {
  const auto s = make_model(ModelName::Sphere, 0.5);
  const double R = sphere_radius(0.5);
  // along a meridian the distance is R times the colatitude difference
  const PhasePoint a{0.3 * R, 0.0}, b{-0.4 * R, 0.0};
  CHECK(s.geodesic_distance(a, b) == doctest::Approx(R * (std::acos(-0.4) - std::acos(0.3))).epsilon(1e-13));
  CHECK_THROWS_AS(s.geodesic_distance({0.0, 0.0}, {0.0, pi * R}), InjectivityError);

  const auto h = make_model(ModelName::Hyperbolic, 1.0);
  // y = 1/p; d = arccosh(1 + |dz|^2 / 2 y1 y2)
  const PhasePoint u{1.0, 0.0}, w{0.5, 1.0};
  CHECK(h.geodesic_distance(u, w) == doctest::Approx(std::acosh(1.0 + (1.0 + 1.0) / (2.0 * 1.0 * 2.0))));
  CHECK_THROWS_AS(h.geodesic_distance({-1.0, 0.0}, u), DomainError);
}

TEST_CASE("sphere metric and connection") {
  const auto s = make_model(ModelName::Sphere, 0.25);
  const double R = sphere_radius(0.25);
  const auto g = s.metric({0.5 * R, 1.0});
  CHECK(g.g_pp * g.g_qq == doctest::Approx(1.0));  // Darboux chart: area form dp dq
  CHECK(g.g_qq == doctest::Approx(0.75));
  CHECK_THROWS_AS(s.metric({R, 0.0}), DomainError);
  const auto t = s.theta({0.5 * R, 1.0});
  CHECK(std::abs(t.coeff_q - Amplitude(0.0, 0.5 * R / 0.25)) < 1e-15);
}

TEST_CASE("geodesic_point endpoints") {
  const auto m = make_model(ModelName::Hyperbolic, 1.0);
  const PhasePoint a{1.0, 0.0}, b{2.0, 1.0};
  const auto p0 = geodesic_point(m, a, b, 0.0), p1 = geodesic_point(m, a, b, 1.0);
  CHECK(p0.p == doctest::Approx(a.p));
  CHECK(p1.q == doctest::Approx(b.q));
  const auto mid = geodesic_point(m, a, b, 0.5);
  CHECK(m.geodesic_distance(a, mid) == doctest::Approx(0.5 * m.geodesic_distance(a, b)).epsilon(1e-9));
}
