#include "proplab/vanest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "proplab/errors.hpp"

namespace proplab {

namespace {

PhasePoint shift(const PhasePoint& x, double dp, double dq) { return {x.p + dp, x.q + dq}; }

// log Omega(x, y) with the stencil sanity checks: the kernel must stay away
// from zero and from the negative real axis so the log is single valued
Amplitude log_kernel(const ModelSpec& m, const PhasePoint& x, const PhasePoint& y) {
  if (!m.domain().contains(y)) throw DomainError("differencing stencil leaves the chart");
  const Amplitude w = m.geometry().omega(x, y);
  if (std::abs(w) < 1e-3 || std::abs(std::arg(w)) > 0.5 * std::numbers::pi)
    throw StencilTooWide("kernel too small or phase wraps within the stencil");
  return m.geometry().log_omega(x, y);
}

Amplitude richardson2(Amplitude coarse, Amplitude fine) { return (4.0 * fine - coarse) / 3.0; }

std::array<Amplitude, 2> gradient(const ModelSpec& m, const PhasePoint& x, double h) {
  auto d = [&](double s) {
    std::array<Amplitude, 2> g;
    g[0] = (log_kernel(m, x, shift(x, s, 0)) - log_kernel(m, x, shift(x, -s, 0))) / (2.0 * s);
    g[1] = (log_kernel(m, x, shift(x, 0, s)) - log_kernel(m, x, shift(x, 0, -s))) / (2.0 * s);
    return g;
  };
  const auto a = d(h), b = d(0.5 * h);
  return {richardson2(a[0], b[0]), richardson2(a[1], b[1])};
}

std::array<std::array<Amplitude, 2>, 2> raw_hessian(const ModelSpec& m, const PhasePoint& x, double h) {
  const Amplitude l0 = log_kernel(m, x, x);
  auto d = [&](double s) {
    std::array<std::array<Amplitude, 2>, 2> H;
    H[0][0] = (log_kernel(m, x, shift(x, s, 0)) - 2.0 * l0 + log_kernel(m, x, shift(x, -s, 0))) / (s * s);
    H[1][1] = (log_kernel(m, x, shift(x, 0, s)) - 2.0 * l0 + log_kernel(m, x, shift(x, 0, -s))) / (s * s);
    H[0][1] = H[1][0] = (log_kernel(m, x, shift(x, s, s)) - log_kernel(m, x, shift(x, s, -s)) -
                         log_kernel(m, x, shift(x, -s, s)) + log_kernel(m, x, shift(x, -s, -s))) /
                        (4.0 * s * s);
    return H;
  };
  const auto a = d(h), b = d(0.5 * h);
  std::array<std::array<Amplitude, 2>, 2> out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out[i][j] = richardson2(a[i][j], b[i][j]);
  return out;
}

void check_step(double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("differencing step must be positive");
}

}  // namespace

std::array<Amplitude, 2> log_gradient(const KernelFn& k, const PhasePoint& x, double h) {
  check_step(h);
  auto lk = [&](const PhasePoint& y) {
    const Amplitude w = k(x, y);
    if (std::abs(w) < 1e-3 || std::abs(std::arg(w)) > 0.5 * std::numbers::pi)
      throw StencilTooWide("kernel too small or phase wraps within the stencil");
    return std::log(w);
  };
  auto d = [&](double s) {
    return std::array<Amplitude, 2>{(lk(shift(x, s, 0)) - lk(shift(x, -s, 0))) / (2.0 * s),
                                    (lk(shift(x, 0, s)) - lk(shift(x, 0, -s))) / (2.0 * s)};
  };
  const auto a = d(h), b = d(0.5 * h);
  return {richardson2(a[0], b[0]), richardson2(a[1], b[1])};
}

double default_jet_step(const ModelSpec& m) { return 1e-3 * std::sqrt(m.hbar()); }

JetReport extract_first_jet(const ModelSpec& m, const PhasePoint& x, double h) {
  check_step(h);
  for (double s : {4 * h, -4 * h})
    if (!m.domain().contains(shift(x, s, 0)) || !m.domain().contains(shift(x, 0, s)))
      throw DomainError("jet point closer than 4h to the chart edge");
  JetReport r;
  r.point = x;
  const auto g = gradient(m, x, h);
  r.oneform_p = g[0];
  r.oneform_q = g[1];
  r.ref_oneform = m.theta(x);
  r.residual_first = std::max(std::abs(g[0] - r.ref_oneform.coeff_p), std::abs(g[1] - r.ref_oneform.coeff_q));
  return r;
}

JetReport extract_second_jet(const ModelSpec& m, const PhasePoint& x, double h) {
  check_step(h);
  for (double s : {6 * h, -6 * h})
    if (!m.domain().contains(shift(x, s, s)) || !m.domain().contains(shift(x, s, -s)))
      throw DomainError("jet point closer than 6h to the chart edge");
  JetReport r = extract_first_jet(m, x, h);
  const auto H = raw_hessian(m, x, h);
  const MetricAtPoint g = m.metric(x);
  const std::array<Amplitude, 2> d1{r.oneform_p, r.oneform_q};
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      Amplitude c = H[i][j];
      for (int k = 0; k < 2; ++k) c -= g.christoffel[k][i][j] * d1[k];
      r.hessian[i][j] = c;
    }
  const double hb = m.hbar();
  r.ref_quadratic = {-g.g_pp / (2.0 * hb), -g.g_qq / (2.0 * hb)};
  r.residual_second_diag =
      std::max(std::abs(r.hessian[0][0] - r.ref_quadratic[0]), std::abs(r.hessian[1][1] - r.ref_quadratic[1]));
  r.mixed_term = 0.5 * (r.hessian[0][1] + r.hessian[1][0]);
  r.residual_second_full = std::max(r.residual_second_diag, std::abs(r.mixed_term + g.g_pq / (2.0 * hb)));
  r.has_second = true;
  return r;
}

Amplitude vanest_degree_n(const CochainSample& c, const PhasePoint& x, std::span<const PhasePoint> dirs, double h) {
  check_step(h);
  const int n = c.arity - 1;
  if (n != 1 && n != 2) throw InvalidArgument("van Est differentiation implemented for degrees 1 and 2");
  if (static_cast<int>(dirs.size()) != n) throw InvalidArgument("need one direction per differentiated argument");
  if (!c.normalized || !c.even_perm_invariant)
    throw InvalidArgument("cochain must be normalized and invariant under even permutations");

  auto val = [&](const std::vector<PhasePoint>& pts) {
    const Amplitude v = c.values(pts);
    return c.kind == CochainKind::Multiplicative ? std::log(v) : v;
  };
  {
    const std::vector<PhasePoint> diag(c.arity, x);
    const Amplitude d = val(diag);
    if (std::abs(d) > 1e-12) throw InvalidArgument("cochain is not normalized on the diagonal");
  }
  auto at = [&](double t, const PhasePoint& v) { return PhasePoint{x.p + t * v.p, x.q + t * v.q}; };

  auto diff = [&](double s) -> Amplitude {
    if (n == 1) return (val({x, at(s, dirs[0])}) - val({x, at(-s, dirs[0])})) / (2.0 * s);
    return (val({x, at(s, dirs[0]), at(s, dirs[1])}) - val({x, at(s, dirs[0]), at(-s, dirs[1])}) -
            val({x, at(-s, dirs[0]), at(s, dirs[1])}) + val({x, at(-s, dirs[0]), at(-s, dirs[1])})) /
           (4.0 * s * s);
  };
  const double nfact = n == 1 ? 1.0 : 2.0;
  return nfact * richardson2(diff(h), diff(0.5 * h));
}

CochainSample cocycle_cochain(const ModelSpec& m) {
  CochainSample c;
  c.arity = 3;
  c.kind = CochainKind::Additive;
  c.values = [m](std::span<const PhasePoint> v) {
    for (const auto& pt : v)
      if (!m.domain().contains(pt)) throw DomainError("cocycle stencil leaves the chart");
    const auto& g = m.geometry();
    // a sum of logs is a log of the product and avoids branch jumps
    return g.log_omega(v[0], v[1]) + g.log_omega(v[1], v[2]) + g.log_omega(v[2], v[0]);
  };
  return c;
}

CurvatureValue curvature_from_cocycle(const ModelSpec& m, const PhasePoint& x, double h) {
  const CochainSample c = cocycle_cochain(m);
  const std::array<PhasePoint, 2> dirs{PhasePoint{1.0, 0.0}, PhasePoint{0.0, 1.0}};
  CurvatureValue out;
  out.value = vanest_degree_n(c, x, dirs, h);
  // d theta = (d_p theta_q - d_q theta_p) dp^dq
  const double s = h;
  const Amplitude dq_p = (m.theta(shift(x, s, 0)).coeff_q - m.theta(shift(x, -s, 0)).coeff_q) / (2.0 * s);
  const Amplitude dp_q = (m.theta(shift(x, 0, s)).coeff_p - m.theta(shift(x, 0, -s)).coeff_p) / (2.0 * s);
  out.reference = dq_p - dp_q;
  return out;
}

}  // namespace proplab
