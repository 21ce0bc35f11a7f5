#include <doctest.h>

#include <cmath>
#include <numbers>

#include "proplab/bergman.hpp"

using namespace proplab;
using std::numbers::pi;

namespace {

std::vector<Cplx> probes() {
  std::vector<Cplx> z;
  for (double r : {0.0, 0.3, 1.0, 2.5, 8.0})
    for (int a = 0; a < 4; ++a) z.push_back(std::polar(r, 0.4 + 1.5 * a));
  return z;
}

}  // namespace

TEST_CASE("monomial norms: closed form and quadrature agree") {
  CHECK(monomial_norm_exact(1, 0) == doctest::Approx(pi / 2));
  CHECK(monomial_norm_exact(2, 1) == doctest::Approx(pi / 6));
  for (int k : {1, 2, 4, 7})
    for (int a = 0; a <= k; ++a)
      CHECK(monomial_norm_quadrature(k, a, 64) == doctest::Approx(monomial_norm_exact(k, a)).epsilon(1e-12));
}

TEST_CASE("CP1 Bergman diagonal is constant") {
  for (int k : {1, 2, 4}) {
    const auto K = build_cp1_bergman(k, 64);
    // sum_a |z|^{2a} (k+1)!/(pi a!(k-a)!) / (1+|z|^2)^k = (k+1)/pi
    for (const auto& z : probes()) CHECK(K.diag(z) == doctest::Approx((k + 1) / pi).epsilon(1e-12));
    const auto r = check_lemma_berg(K, probes());
    CHECK(r.diag_variation < 1e-8);
    CHECK(r.max_defect < 1e-6);
  }
}

TEST_CASE("normalized kernel is the Fubini-Study overlap") {
  const int k = 3;
  const auto K = build_cp1_bergman(k, 64);
  const Cplx x{0.3, -0.5}, y{1.2, 0.4};
  // (1 + conj(x) y)^k / ((1+|x|^2)(1+|y|^2))^{k/2}
  const Cplx ref = std::pow(1.0 + std::conj(x) * y, k) / std::pow((1.0 + std::norm(x)) * (1.0 + std::norm(y)), k / 2.0);
  CHECK(std::abs(K.omega(x, y) - ref) < 1e-12);
  CHECK(std::abs(K.B(x, y) - std::conj(K.B(y, x))) < 1e-12);
}

TEST_CASE("a non-unitary basis change breaks both the diagonal and the lemma") {
  for (int k : {1, 2, 4}) {
    const auto P = perturb_basis(build_cp1_bergman(k, 64), 0, 1.5);
    const auto r = check_lemma_berg(P, probes());
    CHECK(r.diag_variation > 1e-2);
    CHECK(r.max_defect > 1e-2);
  }
}

TEST_CASE("truncated Bargmann space") {
  const int k = 32;
  const double hbar = 1.0, r = std::sqrt(2.0 * hbar * k) / 2.0;
  CHECK(truncated_bargmann_deviation(k, hbar, r, 2.0) < 1e-6);
  // the literal basis truncates the Poisson weight at a smaller mean and
  // misses the target at this radius
  CHECK(truncated_bargmann_deviation(k, hbar, r, 1.0) > 1e-6);
  // far outside the radius both are visibly truncated
  CHECK(truncated_bargmann_deviation(k, hbar, 3.0 * r, 2.0) > 1e-2);
}
