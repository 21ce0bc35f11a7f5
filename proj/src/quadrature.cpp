#include "proplab/quadrature.hpp"

#include <gsl/gsl_integration.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include "proplab/errors.hpp"

namespace proplab {

namespace {
constexpr double kPi = std::numbers::pi;
}

Rule1D gauss_legendre(int n) { return gauss_legendre(n, -1.0, 1.0); }

Rule1D gauss_legendre(int n, double a, double b) {
  if (n < 1) throw InvalidArgument("Gauss-Legendre rule needs at least one node");
  std::unique_ptr<gsl_integration_glfixed_table, decltype(&gsl_integration_glfixed_table_free)> tab(
      gsl_integration_glfixed_table_alloc(static_cast<size_t>(n)), gsl_integration_glfixed_table_free);
  if (!tab) throw Error("gsl_integration_glfixed_table_alloc failed");
  Rule1D r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = 0, w = 0;
    gsl_integration_glfixed_point(a, b, static_cast<size_t>(i), &x, &w, tab.get());
    r.nodes[i] = x;
    r.weights[i] = w;
  }
  return r;
}

bool Truncation::contains(const PhasePoint& x) const {
  switch (kind) {
    case TruncationKind::Disk:
      return std::hypot(x.p - center.p, x.q - center.q) <= radius;
    case TruncationKind::SphereChart:
      return x.p >= p_min && x.p <= p_max;
    default:
      return x.p >= p_min && x.p <= p_max && x.q >= q_min && x.q <= q_max;
  }
}

double Truncation::margin(const PhasePoint& x) const {
  switch (kind) {
    case TruncationKind::Disk:
      return radius - std::hypot(x.p - center.p, x.q - center.q);
    case TruncationKind::SphereChart:
      // the sphere has no boundary; the chart edges are the poles
      return std::numeric_limits<double>::infinity();
    default:
      return std::min({x.p - p_min, p_max - x.p, x.q - q_min, q_max - x.q});
  }
}

QuadratureGrid QuadratureGrid::with_density(double c) const {
  if (!(c > 0.0)) throw InvalidArgument("measure density must be positive");
  QuadratureGrid g = *this;
  const double s = c / density;
  for (double& w : g.weights) w *= s;
  g.density = c;
  return g;
}

double QuadratureGrid::weight_sum() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

QuadratureGrid rectangle_grid(double p_min, double p_max, double q_min, double q_max, int np, int nq) {
  if (!(p_max > p_min) || !(q_max > q_min)) throw InvalidArgument("empty rectangle");
  const Rule1D rp = gauss_legendre(np, p_min, p_max), rq = gauss_legendre(nq, q_min, q_max);
  QuadratureGrid g;
  g.nodes.reserve(static_cast<std::size_t>(np) * nq);
  g.weights.reserve(g.nodes.capacity());
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < nq; ++j) {
      g.nodes.push_back({rp.nodes[i], rq.nodes[j]});
      g.weights.push_back(rp.weights[i] * rq.weights[j]);
    }
  g.domain = {TruncationKind::Rectangle, p_min, p_max, q_min, q_max, {}, 0.0, (p_max - p_min) * (q_max - q_min)};
  g.n1 = np;
  g.n2 = nq;
  return g;
}

QuadratureGrid disk_grid(PhasePoint center, double radius, int nr, int ntheta) {
  if (!(radius > 0.0) || ntheta < 1) throw InvalidArgument("bad disk grid");
  const Rule1D rr = gauss_legendre(nr, 0.0, radius);
  QuadratureGrid g;
  const double dth = 2.0 * kPi / ntheta;
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < ntheta; ++j) {
      const double th = (j + 0.5) * dth;
      g.nodes.push_back({center.p + rr.nodes[i] * std::cos(th), center.q + rr.nodes[i] * std::sin(th)});
      g.weights.push_back(rr.weights[i] * rr.nodes[i] * dth);
    }
  g.domain = {TruncationKind::Disk,
              center.p - radius,
              center.p + radius,
              center.q - radius,
              center.q + radius,
              center,
              radius,
              kPi * radius * radius};
  g.n1 = nr;
  g.n2 = ntheta;
  return g;
}

QuadratureGrid sphere_grid(const ModelSpec& sphere, int np, int nq) {
  if (sphere.name() != ModelName::Sphere) throw InvalidArgument("sphere_grid needs the sphere model");
  if (nq < 1) throw InvalidArgument("bad sphere grid");
  const double r = sphere_radius(sphere.hbar());
  const Rule1D rp = gauss_legendre(np, -r, r);
  const double len = 2.0 * kPi * r, dq = len / nq;
  QuadratureGrid g;
  for (int i = 0; i < np; ++i)
    for (int j = 0; j < nq; ++j) {
      g.nodes.push_back({rp.nodes[i], j * dq});
      g.weights.push_back(rp.weights[i] * dq);
    }
  g.domain = {TruncationKind::SphereChart, -r, r, 0.0, len, {}, 0.0, 2.0 * r * len};
  g.n1 = np;
  g.n2 = nq;
  return g;
}

QuadratureGrid hyperbolic_grid(double p_min, double p_max, double q_max, double q_scale, int np, int nq) {
  if (!(p_min > 0.0) || !(p_max > p_min) || !(q_max > 0.0) || !(q_scale > 0.0))
    throw InvalidArgument("bad hyperbolic truncation");
  const Rule1D ru = gauss_legendre(np, std::log(p_min), std::log(p_max));
  const double vmax = std::asinh(q_max / q_scale);
  const Rule1D rv = gauss_legendre(nq, -vmax, vmax);
  QuadratureGrid g;
  for (int i = 0; i < np; ++i) {
    const double p = std::exp(ru.nodes[i]);
    for (int j = 0; j < nq; ++j) {
      g.nodes.push_back({p, q_scale * std::sinh(rv.nodes[j])});
      g.weights.push_back(ru.weights[i] * p * rv.weights[j] * q_scale * std::cosh(rv.nodes[j]));
    }
  }
  g.domain = {TruncationKind::HyperbolicStrip, p_min, p_max, -q_max, q_max, {}, 0.0, 2.0 * q_max * (p_max - p_min)};
  g.n1 = np;
  g.n2 = nq;
  return g;
}

QuadratureGrid default_grid(const ModelSpec& m, int n) {
  const double s = std::sqrt(m.hbar());
  switch (m.name()) {
    case ModelName::FlatPQ:
    case ModelName::FlatSymmetric:
      return rectangle_grid(-10 * s, 10 * s, -10 * s, 10 * s, n, n);
    case ModelName::Sphere:
      return sphere_grid(m, n, n);
    case ModelName::Hyperbolic:
      return hyperbolic_grid(s / 2000.0, 2000.0 * s, 2000.0 * s, s, n, n);
  }
  throw InvalidArgument("unknown model");
}

double halton(std::size_t index, unsigned base) {
  double f = 1.0, r = 0.0;
  while (index > 0) {
    f /= base;
    r += f * static_cast<double>(index % base);
    index /= base;
  }
  return r;
}

ProbeBox default_probe_box(const ModelSpec& m) {
  const double s = std::sqrt(m.hbar());
  switch (m.name()) {
    case ModelName::FlatPQ:
    case ModelName::FlatSymmetric:
      return {-2 * s, 2 * s, -2 * s, 2 * s};
    case ModelName::Sphere: {
      const double r = sphere_radius(m.hbar());
      return {-0.8 * r, 0.8 * r, 0.0, 2.0 * kPi * r};
    }
    case ModelName::Hyperbolic:
      return {0.7 * s, 1.4 * s, -0.5 * s, 0.5 * s};
  }
  throw InvalidArgument("unknown model");
}

std::vector<PhasePoint> probe_points(const ProbeBox& b, std::size_t count, std::size_t offset) {
  std::vector<PhasePoint> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t i = offset + k + 1;
    out.push_back({b.p_min + (b.p_max - b.p_min) * halton(i, 2), b.q_min + (b.q_max - b.q_min) * halton(i, 3)});
  }
  return out;
}

std::vector<ProbePair> probe_pairs(const ProbeBox& b, std::size_t count) {
  std::vector<ProbePair> out;
  out.reserve(count);
  for (std::size_t k = 1; k <= count; ++k) {
    const PhasePoint x{b.p_min + (b.p_max - b.p_min) * halton(k, 2), b.q_min + (b.q_max - b.q_min) * halton(k, 3)};
    const PhasePoint y{b.p_min + (b.p_max - b.p_min) * halton(k, 5), b.q_min + (b.q_max - b.q_min) * halton(k, 7)};
    out.push_back({x, y});
  }
  return out;
}

}  // namespace proplab
