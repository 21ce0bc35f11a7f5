#include "proplab/bergman.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "proplab/errors.hpp"
#include "proplab/quadrature.hpp"

namespace proplab {

namespace {
constexpr double kPi = std::numbers::pi;
}

Cplx SectionBasis::section(int a, Cplx z) const {
  Cplx za = 1.0;
  for (int i = 0; i < a; ++i) za *= z;
  return scales[a] * za / std::sqrt(norms[a]);
}

double monomial_norm_exact(int k, int a) {
  return kPi * std::exp(std::lgamma(a + 1.0) + std::lgamma(k - a + 1.0) - std::lgamma(k + 2.0));
}

double monomial_norm_quadrature(int k, int a, int quad_n) {
  // int |z|^{2a} (1+|z|^2)^{-k} dA/(1+|z|^2)^2 = pi int_0^1 u^a (1-u)^{k-a} du
  const Rule1D r = gauss_legendre(quad_n, 0.0, 1.0);
  double s = 0.0;
  for (int i = 0; i < quad_n; ++i) s += r.weights[i] * std::pow(r.nodes[i], a) * std::pow(1.0 - r.nodes[i], k - a);
  return kPi * s;
}

Cplx BergmanKernel::B(Cplx x, Cplx y) const {
  Cplx s = 0.0;
  for (int a = 0; a <= basis_.degree; ++a) s += std::conj(basis_.section(a, x)) * basis_.section(a, y);
  return s;
}

double BergmanKernel::diag(Cplx z) const { return B(z, z).real() * basis_.hermitian_weight(z); }

Cplx BergmanKernel::omega(Cplx x, Cplx y) const {
  return B(x, y) / std::sqrt(B(x, x).real() * B(y, y).real());
}

BergmanKernel build_cp1_bergman(int k, int quad_n) {
  if (k < 1) throw InvalidArgument("degree must be at least 1");
  if (2 * quad_n < k + 1) throw InvalidArgument("quadrature too coarse for degree-k moments");
  SectionBasis b;
  b.degree = k;
  for (int a = 0; a <= k; ++a) {
    const double n = monomial_norm_quadrature(k, a, quad_n);
    if (!(n > 0.0)) throw Error("ill-conditioned Gram matrix");
    b.norms.push_back(n);
    b.scales.push_back(1.0);
  }
  b.hermitian_weight = [k](Cplx z) { return std::pow(1.0 + std::norm(z), -k); };
  return BergmanKernel(std::move(b));
}

BergmanKernel perturb_basis(const BergmanKernel& K, int index, double scale) {
  SectionBasis b = K.basis();
  if (index < 0 || index > b.degree) throw InvalidArgument("basis index out of range");
  b.scales[index] *= scale;
  return BergmanKernel(std::move(b));
}

LemmaReport check_lemma_berg(const BergmanKernel& K, const std::vector<Cplx>& probes, double h) {
  if (probes.empty()) throw InvalidArgument("no probes");
  LemmaReport rep;
  double lo = INFINITY, hi = -INFINITY, mean = 0.0;
  const auto& w = K.basis().hermitian_weight;
  const Cplx ex{1.0, 0.0}, ey{0.0, 1.0};
  for (Cplx x : probes) {
    if (!std::isfinite(std::abs(x)) || std::abs(x) > 1e6) throw DomainError("stencil leaves the affine chart");
    const double d = K.diag(x);
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    mean += d / probes.size();

    auto dlog = [&](Cplx dir) {
      auto diff = [&](double s) { return (std::log(K.omega(x, x + s * dir)) - std::log(K.omega(x, x - s * dir))) / (2.0 * s); };
      return (4.0 * diff(0.5 * h) - diff(h)) / 3.0;
    };
    auto dlogh = [&](Cplx dir) {
      auto diff = [&](double s) { return (std::log(w(x + s * dir)) - std::log(w(x - s * dir))) / (2.0 * s); };
      return (4.0 * diff(0.5 * h) - diff(h)) / 3.0;
    };
    // (d - dbar) phi = -i phi_y dx + i phi_x dy
    const double hx = dlogh(ex), hy = dlogh(ey);
    const Cplx theta_x = -0.5 * Cplx(0.0, -hy), theta_y = -0.5 * Cplx(0.0, hx);
    const double def = std::max(std::abs(dlog(ex) - theta_x), std::abs(dlog(ey) - theta_y));
    rep.defects.push_back(def);
    rep.max_defect = std::max(rep.max_defect, def);
  }
  rep.diag_variation = (hi - lo) / mean;
  return rep;
}

double truncated_bargmann_deviation(int k, double hbar, double r, double s, int quad_n) {
  if (k < 0 || !(hbar > 0.0) || !(s > 0.0)) throw InvalidArgument("bad Bargmann parameters");
  // ||z^a e^{-|z|^2/(2 s hbar)}||^2 = 2 pi int t^{2a+1} e^{-t^2/(s hbar)} dt; substitute
  // v = t^2/(s hbar) and integrate v^a e^{-v} on a generous interval
  const double vmax = std::max(60.0, 4.0 * (k + 10));
  const Rule1D rule = gauss_legendre(quad_n, 0.0, vmax);
  const double x = r * r / (s * hbar);
  double num = 0.0;
  for (int a = 0; a <= k; ++a) {
    double m = 0.0;
    for (int i = 0; i < quad_n; ++i)
      m += rule.weights[i] * std::exp(a * std::log(rule.nodes[i]) - rule.nodes[i]);
    // |Psi_a|^2 / ||Psi_a||^2 with the common factor pi s hbar dropped
    num += std::exp(a * std::log(std::max(x, 1e-300)) - x) / m;
  }
  // untruncated diag with the same factor dropped is exactly 1
  return std::abs(num - 1.0);
}

}  // namespace proplab
