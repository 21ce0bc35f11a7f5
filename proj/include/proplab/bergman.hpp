#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace proplab {

using Cplx = std::complex<double>;

// Polynomials of degree <= k in the affine coordinate z of CP^1, i.e.
// sections of O(k), with the Fubini-Study hermitian weight (1+|z|^2)^{-k}.
struct SectionBasis {
  int degree = 0;
  std::vector<double> norms;   // ||z^a||^2 under weight and FS area
  std::vector<double> scales;  // Psi_a = scales[a] z^a / sqrt(norms[a]); all 1 when orthonormal
  std::function<double(Cplx)> hermitian_weight;

  Cplx section(int a, Cplx z) const;
};

// pi a! (k-a)! / (k+1)!
double monomial_norm_exact(int k, int a);
// same integral by Gauss-Legendre in u = |z|^2 / (1 + |z|^2)
double monomial_norm_quadrature(int k, int a, int quad_n);

class BergmanKernel {
 public:
  explicit BergmanKernel(SectionBasis basis) : basis_(std::move(basis)) {}
  const SectionBasis& basis() const { return basis_; }
  // sum_a conj(Psi_a(x)) Psi_a(y) in the holomorphic trivialization
  Cplx B(Cplx x, Cplx y) const;
  // B(x,x) h(x): the trivialization-free diagonal density
  double diag(Cplx z) const;
  // B(x,y) / sqrt(B(x,x) B(y,y)): the normalized kernel in the unitary frame
  Cplx omega(Cplx x, Cplx y) const;

 private:
  SectionBasis basis_;
};

BergmanKernel build_cp1_bergman(int k, int quad_n);
// Non-unitary change of basis: Psi_index multiplied by `scale`.
BergmanKernel perturb_basis(const BergmanKernel& K, int index, double scale);

struct LemmaReport {
  double diag_variation = 0;  // (max - min) / mean of diag over probes
  double max_defect = 0;      // max |d_y log Omega|_{y=x} - theta|
  std::vector<double> defects;
};

// theta is the Chern connection form in the unitary frame,
// -(1/2)(d - dbar) log h. The defect equals (1/2)|(d - dbar) log diag| and
// vanishes exactly where diag is locally constant.
LemmaReport check_lemma_berg(const BergmanKernel& K, const std::vector<Cplx>& probes, double h = 1e-4);

// Flat truncated Bargmann space spanned by z^a exp(-|z|^2 / (2 s hbar)),
// a = 0..k, norms by radial quadrature. Returns |diag(z)/diag_untruncated - 1|
// at |z| = r. s = 1 is the literal z^a e^{-|z|^2/2hbar}; s = 2 is the
// normalization whose kernel has |Omega|^2 = exp(-|x-y|^2/2hbar) like the
// flat models.
double truncated_bargmann_deviation(int k, double hbar, double r, double s, int quad_n = 200);

}  // namespace proplab
