#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "proplab/geometry.hpp"
#include "proplab/quadrature.hpp"

namespace proplab {

using PhaseFunction = std::function<double(const PhasePoint&)>;

struct HilbertOptions {
  double phys_threshold = 0.5;
  // spectrum must lie in [-slack, 1 + slack]
  double spectrum_slack = 0.05;
  // grids up to this size get a full dense eigendecomposition; larger ones
  // go through a pivoted Cholesky factor first
  std::size_t dense_limit = 1200;
  // pivoted Cholesky stops once the trace of the remainder is below this
  double trace_tolerance = 1e-10;
  std::size_t max_rank = 4000;
};

class DiscreteHilbert {
 public:
  DiscreteHilbert(ModelSpec m, QuadratureGrid grid, HilbertOptions opt = {});

  const ModelSpec& model() const { return model_; }
  const QuadratureGrid& grid() const { return grid_; }
  // descending; in low-rank mode only the resolved eigenvalues are listed,
  // the unresolved rest lies in [0, residual_trace()]
  const std::vector<double>& spectrum() const { return spectrum_; }
  // N x rank_phys, orthonormal columns in weighted grid coordinates
  const Eigen::MatrixXcd& phys_basis() const { return basis_; }
  const std::vector<double>& phys_eigenvalues() const { return phys_eigs_; }
  int rank_phys() const { return static_cast<int>(basis_.cols()); }
  double max_eig_defect() const { return max_defect_; }
  double residual_trace() const { return residual_trace_; }
  bool low_rank() const { return low_rank_; }
  double threshold() const { return opt_.phys_threshold; }

  // sqrt(w_j) Omega(x, x_j)
  Eigen::VectorXcd kernel_row(const PhasePoint& x) const;
  // true if x is far enough from the truncation edge for its coherent state
  // not to feel the cut
  bool interior(const PhasePoint& x) const;

 private:
  ModelSpec model_;
  QuadratureGrid grid_;
  HilbertOptions opt_;
  std::vector<double> spectrum_;
  std::vector<double> phys_eigs_;
  Eigen::MatrixXcd basis_;
  double max_defect_ = 0.0;
  double residual_trace_ = 0.0;
  bool low_rank_ = false;
};

// W^{1/2} Omega W^{1/2}, entry (j, i) = sqrt(w_j) Omega(x_i, x_j) sqrt(w_i).
Eigen::MatrixXcd weighted_kernel_matrix(const ModelSpec& m, const QuadratureGrid& grid);

// Pivoted Cholesky of the weighted kernel matrix, columns built on demand.
// Returns L with A ~ L L^*; `residual` receives the trace of A - L L^*.
Eigen::MatrixXcd pivoted_cholesky(const ModelSpec& m, const QuadratureGrid& grid, double trace_tol,
                                  std::size_t max_rank, double* residual);

DiscreteHilbert build_discrete_hilbert(const ModelSpec& m, const QuadratureGrid& grid, HilbertOptions opt = {});

// Coefficients of |x> in the physical basis: U^* (sqrt(w_j) Omega(x, x_j))_j.
// Throws BoundaryContamination for points too near the truncation edge.
Eigen::VectorXcd coherent_state(const DiscreteHilbert& H, const PhasePoint& x);
// <y|x> reconstructed from the coherent states
Amplitude overlap(const DiscreteHilbert& H, const PhasePoint& y, const PhasePoint& x);

struct QuantizedObservable {
  std::string symbol;
  Eigen::MatrixXcd matrix;
};

// sum_i w_i f(x_i) |x_i><x_i| where |x_i> sqrt(w_i) is the projected nodal
// basis vector U^* e_i; equals U^* diag(f) U.
QuantizedObservable quantize(const DiscreteHilbert& H, const PhaseFunction& f, std::string symbol = "f");

// <x| A |x> / <x|x> for a coherent state
Amplitude coherent_expectation(const DiscreteHilbert& H, const Eigen::MatrixXcd& A, const PhasePoint& x);

// max over probes of |f(x) - sum_i w_i f(x_i) |Omega(x, x_i)|^2|
double special_observable_defect(const DiscreteHilbert& H, const PhaseFunction& f,
                                 const std::vector<PhasePoint>& probes);

// {f, g} = d_q f d_p g - d_p f d_q g by central differences, so {q, p} = 1
double poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, const PhasePoint& x, double h = 1e-5);

struct ScalingRow {
  double hbar = 0;
  std::size_t grid_n = 0;
  int rank_phys = 0;
  int interior_rank = 0;
  double max_eig_defect = 0;
  // ||[F, G] - i hbar Q({f,g})|| on the interior subspace
  double commutator_defect = 0;
  // same norm on the whole physical space, boundary states included
  double full_space_defect = 0;
  double defect_over_hbar() const { return commutator_defect / hbar; }
};

// Operator-norm defect of [Q(f), Q(g)] - i hbar Q({f, g}) for each hbar.
// The norm is taken on the span of physical eigenvectors with eigenvalue at
// least 1 - interior_tol: states that the truncation does not touch.
std::vector<ScalingRow> commutator_scaling_study(const std::vector<double>& hbars,
                                                 const std::function<DiscreteHilbert(double)>& family,
                                                 const PhaseFunction& f, const PhaseFunction& g,
                                                 double interior_tol = 1e-2);

// Complex dimension of the unital algebra generated by the matrices, from
// words up to max_len.
int generated_algebra_dimension(const std::vector<Eigen::MatrixXcd>& gens, int max_len = 6);

}  // namespace proplab
