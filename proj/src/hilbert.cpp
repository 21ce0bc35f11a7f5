#include "proplab/hilbert.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "proplab/errors.hpp"
#include "proplab/parallel.hpp"

namespace proplab {

Eigen::MatrixXcd weighted_kernel_matrix(const ModelSpec& m, const QuadratureGrid& grid) {
  const std::size_t n = grid.size();
  Eigen::MatrixXcd a(n, n);
  std::vector<double> sw(n);
  for (std::size_t i = 0; i < n; ++i) sw[i] = std::sqrt(grid.weights[i]);
  const auto& g = m.geometry();
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i)
      for (std::size_t j = i; j < n; ++j) a(j, i) = sw[j] * g.omega(grid.nodes[i], grid.nodes[j]) * sw[i];
  });
  // exact Hermitian symmetry by mirroring the lower triangle
  for (std::size_t i = 0; i < n; ++i) {
    a(i, i) = a(i, i).real();
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = std::conj(a(j, i));
  }
  return a;
}

Eigen::MatrixXcd pivoted_cholesky(const ModelSpec& m, const QuadratureGrid& grid, double trace_tol,
                                  std::size_t max_rank, double* residual) {
  const std::size_t n = grid.size();
  const auto& g = m.geometry();
  std::vector<double> sw(n);
  for (std::size_t i = 0; i < n; ++i) sw[i] = std::sqrt(grid.weights[i]);
  Eigen::VectorXd d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = grid.weights[i] * g.omega(grid.nodes[i], grid.nodes[i]).real();

  Eigen::MatrixXcd l(n, std::min<std::size_t>(64, n));
  std::size_t k = 0;
  Eigen::VectorXcd col(n);
  while (true) {
    const double tr = d.sum();
    if (tr < trace_tol || k == n) break;
    Eigen::Index piv = 0;
    const double dmax = d.maxCoeff(&piv);
    if (dmax <= 0.0) {
      if (dmax < -trace_tol) {
        throw DiscretizationTooCoarse("weighted kernel matrix is not positive semidefinite", {dmax});
      }
      break;
    }
    if (k >= max_rank) throw DiscretizationTooCoarse("pivoted Cholesky exceeded the rank cap", {tr});
    const PhasePoint xp = grid.nodes[piv];
    parallel_for(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t j = b; j < e; ++j) col[j] = sw[j] * g.omega(xp, grid.nodes[j]) * sw[piv];
    });
    if (k > 0) col.noalias() -= l.leftCols(k) * l.row(piv).leftCols(k).adjoint();
    col /= std::sqrt(dmax);
    if (k == static_cast<std::size_t>(l.cols())) l.conservativeResize(Eigen::NoChange, std::min<Eigen::Index>(2 * l.cols(), n));
    l.col(k) = col;
    d -= col.cwiseAbs2();
    d[piv] = 0.0;
    ++k;
  }
  if (residual) *residual = std::max(0.0, d.sum());
  return l.leftCols(k);
}

DiscreteHilbert::DiscreteHilbert(ModelSpec m, QuadratureGrid grid, HilbertOptions opt)
    : model_(std::move(m)), grid_(std::move(grid)), opt_(opt) {
  if (!model_.calibrated()) throw InvalidArgument("model has no measure density; calibrate first");
  grid_ = grid_.with_density(*model_.measure_density());
  const std::size_t n = grid_.size();
  if (n == 0) throw InvalidArgument("empty grid");

  Eigen::VectorXd evals;  // ascending
  Eigen::MatrixXcd evecs;
  bool dense_ok = false;
  if (n <= opt_.dense_limit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(weighted_kernel_matrix(model_, grid_));
    // the QL iteration occasionally stalls on the huge null space; the
    // low-rank route below handles that case too
    if (es.info() == Eigen::Success) {
      evals = es.eigenvalues();
      evecs = es.eigenvectors();
      dense_ok = true;
    }
  }
  if (!dense_ok) {
    low_rank_ = true;
    const Eigen::MatrixXcd l = pivoted_cholesky(model_, grid_, opt_.trace_tolerance, opt_.max_rank, &residual_trace_);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(l.adjoint() * l);
    if (es.info() != Eigen::Success) throw Error("Hermitian eigensolver failed");
    evals = es.eigenvalues();
    evecs.resize(n, evals.size());
    for (Eigen::Index k = 0; k < evals.size(); ++k) {
      const double s = evals[k];
      if (s > opt_.phys_threshold) evecs.col(k) = l * es.eigenvectors().col(k) / std::sqrt(s);
      else evecs.col(k).setZero();  // only the physical ones are kept
    }
  }

  spectrum_.assign(evals.data(), evals.data() + evals.size());
  std::reverse(spectrum_.begin(), spectrum_.end());
  for (double v : spectrum_) max_defect_ = std::max(max_defect_, std::min(std::abs(v), std::abs(v - 1.0)));
  max_defect_ = std::max(max_defect_, residual_trace_);

  const bool bad = std::any_of(spectrum_.begin(), spectrum_.end(), [&](double v) {
    return v < -opt_.spectrum_slack || v > 1.0 + opt_.spectrum_slack;
  });
  if (bad) {
    std::ostringstream os;
    os << "spectrum leaves [" << -opt_.spectrum_slack << ", " << 1.0 + opt_.spectrum_slack << "]: extremes "
       << spectrum_.back() << ", " << spectrum_.front();
    throw DiscretizationTooCoarse(os.str(), spectrum_);
  }

  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = evals.size() - 1; k >= 0; --k)
    if (evals[k] > opt_.phys_threshold) keep.push_back(k);
  basis_.resize(n, keep.size());
  for (std::size_t c = 0; c < keep.size(); ++c) {
    basis_.col(c) = evecs.col(keep[c]);
    phys_eigs_.push_back(evals[keep[c]]);
  }
}

Eigen::VectorXcd DiscreteHilbert::kernel_row(const PhasePoint& x) const {
  const std::size_t n = grid_.size();
  Eigen::VectorXcd v(n);
  const auto& g = model_.geometry();
  parallel_for(n, [&](std::size_t b, std::size_t e) {
    for (std::size_t j = b; j < e; ++j) v[j] = std::sqrt(grid_.weights[j]) * g.omega(x, grid_.nodes[j]);
  });
  return v;
}

bool DiscreteHilbert::interior(const PhasePoint& x) const {
  const Truncation& t = grid_.domain;
  switch (t.kind) {
    case TruncationKind::SphereChart:
      return true;
    case TruncationKind::HyperbolicStrip:
      return x.p >= t.p_min * std::exp(3.0) && x.p <= t.p_max * std::exp(-3.0) && std::abs(x.q) <= t.q_max / 20.0;
    default:
      return t.margin(x) >= 3.0 * std::sqrt(model_.hbar());
  }
}

DiscreteHilbert build_discrete_hilbert(const ModelSpec& m, const QuadratureGrid& grid, HilbertOptions opt) {
  return DiscreteHilbert(m, grid, opt);
}

Eigen::VectorXcd coherent_state(const DiscreteHilbert& H, const PhasePoint& x) {
  if (!H.model().domain().contains(x)) throw DomainError("coherent state outside the chart");
  if (!H.interior(x)) throw BoundaryContamination("coherent state too close to the truncation boundary");
  return H.phys_basis().adjoint() * H.kernel_row(x);
}

Amplitude overlap(const DiscreteHilbert& H, const PhasePoint& y, const PhasePoint& x) {
  return coherent_state(H, y).dot(coherent_state(H, x));
}

QuantizedObservable quantize(const DiscreteHilbert& H, const PhaseFunction& f, std::string symbol) {
  const auto& nodes = H.grid().nodes;
  Eigen::VectorXd fv(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) fv[i] = f(nodes[i]);
  const Eigen::MatrixXcd& u = H.phys_basis();
  return {std::move(symbol), u.adjoint() * (fv.asDiagonal() * u)};
}

Amplitude coherent_expectation(const DiscreteHilbert& H, const Eigen::MatrixXcd& A, const PhasePoint& x) {
  const Eigen::VectorXcd a = coherent_state(H, x);
  return a.dot(A * a) / a.squaredNorm();
}

double special_observable_defect(const DiscreteHilbert& H, const PhaseFunction& f,
                                 const std::vector<PhasePoint>& probes) {
  const auto& grid = H.grid();
  const auto& g = H.model().geometry();
  std::vector<double> fv(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) fv[i] = f(grid.nodes[i]);
  double worst = 0.0;
  for (const auto& x : probes) {
    if (!H.interior(x)) throw BoundaryContamination("probe too close to the truncation boundary");
    const double s = parallel_sum<double>(grid.size(), [&](std::size_t i) {
      return grid.weights[i] * fv[i] * std::norm(g.omega(x, grid.nodes[i]));
    });
    worst = std::max(worst, std::abs(f(x) - s));
  }
  return worst;
}

double poisson_bracket(const PhaseFunction& f, const PhaseFunction& g, const PhasePoint& x, double h) {
  auto dp = [&](const PhaseFunction& u) { return (u({x.p + h, x.q}) - u({x.p - h, x.q})) / (2.0 * h); };
  auto dq = [&](const PhaseFunction& u) { return (u({x.p, x.q + h}) - u({x.p, x.q - h})) / (2.0 * h); };
  return dq(f) * dp(g) - dp(f) * dq(g);
}

namespace {

double op_norm(const Eigen::MatrixXcd& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
  return svd.singularValues()(0);
}

}  // namespace

std::vector<ScalingRow> commutator_scaling_study(const std::vector<double>& hbars,
                                                 const std::function<DiscreteHilbert(double)>& family,
                                                 const PhaseFunction& f, const PhaseFunction& g, double interior_tol) {
  std::vector<ScalingRow> rows;
  for (double hb : hbars) {
    const DiscreteHilbert H = family(hb);
    if (H.rank_phys() < 3) throw Error("physical space too small for a meaningful operator norm");
    const PhaseFunction br = [&](const PhasePoint& x) { return poisson_bracket(f, g, x); };
    const Eigen::MatrixXcd F = quantize(H, f).matrix, G = quantize(H, g).matrix, B = quantize(H, br).matrix;
    const Eigen::MatrixXcd D = F * G - G * F - Amplitude(0.0, hb) * B;
    int k = 0;
    for (double v : H.phys_eigenvalues())
      if (v >= 1.0 - interior_tol) ++k;
    ScalingRow r;
    r.hbar = hb;
    r.grid_n = H.grid().n1;
    r.rank_phys = H.rank_phys();
    r.interior_rank = k;
    r.max_eig_defect = H.max_eig_defect();
    r.commutator_defect = op_norm(D.topLeftCorner(k, k));
    r.full_space_defect = op_norm(D);
    rows.push_back(r);
  }
  return rows;
}

int generated_algebra_dimension(const std::vector<Eigen::MatrixXcd>& gens, int max_len) {
  if (gens.empty()) return 1;
  const Eigen::Index d = gens.front().rows();
  std::vector<Eigen::MatrixXcd> words{Eigen::MatrixXcd::Identity(d, d)};
  std::vector<Eigen::MatrixXcd> frontier = words;
  for (int len = 1; len <= max_len; ++len) {
    std::vector<Eigen::MatrixXcd> next;
    for (const auto& w : frontier)
      for (const auto& g : gens) next.push_back(g * w);
    words.insert(words.end(), next.begin(), next.end());
    frontier = std::move(next);
  }
  Eigen::MatrixXcd stack(d * d, words.size());
  for (std::size_t c = 0; c < words.size(); ++c) {
    Eigen::MatrixXcd w = words[c];
    const double nrm = w.norm();
    if (nrm > 0) w /= nrm;
    stack.col(c) = Eigen::Map<const Eigen::VectorXcd>(w.data(), d * d);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(stack);
  qr.setThreshold(1e-8);
  return static_cast<int>(qr.rank());
}

}  // namespace proplab
