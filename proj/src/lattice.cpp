#include "proplab/lattice.hpp"

#include <boost/math/special_functions/jacobi.hpp>
#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <numbers>

#include "proplab/errors.hpp"
#include "proplab/parallel.hpp"

namespace proplab {

// weighted F applied from the left: out_j = w_j sum_i v_i F(z_i, z_j)
class Stepper {
 public:
  virtual ~Stepper() = default;
  virtual std::vector<Amplitude> apply(const std::vector<Amplitude>& v) const = 0;
};

namespace {

constexpr double kPi = std::numbers::pi;

double injectivity_radius(const ModelSpec& m) {
  if (m.name() == ModelName::Sphere) return 0.999 * kPi * sphere_radius(m.hbar());
  return std::numeric_limits<double>::infinity();
}

void require_tube(const QuadratureGrid& grid, const ModelSpec& model, const PhasePoint& x) {
  const Truncation& t = grid.domain;
  if (!t.contains(x)) throw DomainError("endpoint outside the quadrature grid");
  switch (t.kind) {
    case TruncationKind::SphereChart:
      return;
    case TruncationKind::HyperbolicStrip:
      if (x.p < t.p_min * std::exp(3.0) || x.p > t.p_max * std::exp(-3.0) || std::abs(x.q) > t.q_max / 20.0)
        throw DomainError("quadrature tube too narrow around endpoint");
      return;
    default:
      if (t.margin(x) < 3.0 * model.length_scale()) throw DomainError("quadrature tube too narrow around endpoint");
  }
}

constexpr std::size_t kCacheLimit = 5000;  // 5000^2 complex = 400 MB

class DirectStepper final : public Stepper {
 public:
  DirectStepper(const LatticeKernel& L, const QuadratureGrid& g) : L_(L), g_(g) {
    const std::size_t n = g_.size();
    if (n > kCacheLimit) return;
    // column j holds F(z_i, z_j) w_j
    mat_.resize(n * n);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t j = b; j < e; ++j)
        for (std::size_t i = 0; i < n; ++i) mat_[j * n + i] = L_.F_or_zero(g_.nodes[i], g_.nodes[j]) * g_.weights[j];
    });
  }
  std::vector<Amplitude> apply(const std::vector<Amplitude>& v) const override {
    const std::size_t n = g_.size();
    std::vector<Amplitude> out(n);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t j = b; j < e; ++j) {
        Amplitude s = 0.0;
        if (!mat_.empty()) {
          const Amplitude* col = &mat_[j * n];
          for (std::size_t i = 0; i < n; ++i) s += v[i] * col[i];
          out[j] = s;
        } else {
          for (std::size_t i = 0; i < n; ++i)
            if (v[i] != 0.0) s += v[i] * L_.F_or_zero(g_.nodes[i], g_.nodes[j]);
          out[j] = s * g_.weights[j];
        }
      }
    });
    return out;
  }

 private:
  const LatticeKernel& L_;
  const QuadratureGrid& g_;
  std::vector<Amplitude> mat_;
};

// Sphere grids are rows of constant p with equispaced q. Rotation about the
// axis is an isometry preserving the connection, so F(z_ak, z_bl) depends on
// (a, b, l - k) only.
class AzimuthalStepper final : public Stepper {
 public:
  AzimuthalStepper(const LatticeKernel& L, const QuadratureGrid& g) : g_(g), np_(g.n1), nq_(g.n2) {
    const std::size_t width = 2 * nq_ - 1;
    dq_ = g.nodes[1].q - g.nodes[0].q;
    table_.resize(np_ * np_ * width);
    parallel_for(np_ * np_, [&](std::size_t b, std::size_t e) {
      for (std::size_t ab = b; ab < e; ++ab) {
        const double pa = g_.nodes[(ab / np_) * nq_].p, pb = g_.nodes[(ab % np_) * nq_].p;
        for (std::size_t t = 0; t < width; ++t) {
          const double shift = (static_cast<double>(t) - static_cast<double>(nq_ - 1)) * dq_;
          table_[ab * width + t] = L.F_or_zero({pa, 0.0}, {pb, shift});
        }
      }
    });
  }

  static bool fits(const QuadratureGrid& g) {
    if (g.domain.kind != TruncationKind::SphereChart || g.n1 * g.n2 != g.size() || g.n2 < 2) return false;
    const double dq = g.nodes[1].q - g.nodes[0].q;
    for (std::size_t a = 0; a < g.n1; ++a)
      for (std::size_t k = 0; k < g.n2; ++k) {
        const PhasePoint& z = g.nodes[a * g.n2 + k];
        if (z.p != g.nodes[a * g.n2].p || std::abs(z.q - static_cast<double>(k) * dq) > 1e-12 * (1.0 + z.q)) return false;
      }
    return true;
  }

  std::vector<Amplitude> apply(const std::vector<Amplitude>& v) const override {
    const std::size_t n = g_.size(), width = 2 * nq_ - 1;
    std::vector<Amplitude> out(n);
    parallel_for(n, [&](std::size_t b, std::size_t e) {
      for (std::size_t j = b; j < e; ++j) {
        const std::size_t bb = j / nq_, l = j % nq_;
        Amplitude s = 0.0;
        for (std::size_t a = 0; a < np_; ++a) {
          const Amplitude* row = &table_[(a * np_ + bb) * width + (l + nq_ - 1)];
          const Amplitude* va = &v[a * nq_];
          // row[-k] = G(a, b, l - k)
          for (std::size_t k = 0; k < nq_; ++k) s += va[k] * *(row - k);
        }
        out[j] = s * g_.weights[j];
      }
    });
    return out;
  }

 private:
  const QuadratureGrid& g_;
  std::size_t np_, nq_;
  double dq_ = 0;
  std::vector<Amplitude> table_;
};

std::unique_ptr<Stepper> make_stepper(const LatticeKernel& L, const QuadratureGrid& g, LatticeBackend backend) {
  const bool az = AzimuthalStepper::fits(g);
  if (backend == LatticeBackend::Azimuthal) {
    if (!az || L.model().name() != ModelName::Sphere)
      throw InvalidArgument("azimuthal backend needs the sphere model on a sphere grid");
    return std::make_unique<AzimuthalStepper>(L, g);
  }
  if (backend == LatticeBackend::Auto && az && L.model().name() == ModelName::Sphere)
    return std::make_unique<AzimuthalStepper>(L, g);
  return std::make_unique<DirectStepper>(L, g);
}

Amplitude close_chain(const LatticeKernel& L, const QuadratureGrid& g, const std::vector<Amplitude>& v,
                      const PhasePoint& end) {
  return parallel_sum<Amplitude>(g.size(), [&](std::size_t j) {
    return v[j] == 0.0 ? Amplitude(0.0) : v[j] * L.F_or_zero(g.nodes[j], end);
  });
}

}  // namespace

LatticeKernel::LatticeKernel(ModelSpec model) : model_(std::move(model)), valid_radius_(injectivity_radius(model_)) {}

Amplitude LatticeKernel::F(const PhasePoint& x, const PhasePoint& y) const {
  const double d = model_.geodesic_distance(x, y);
  if (!(d < valid_radius_)) throw InjectivityError("pair outside the lattice kernel's injectivity radius");
  return std::exp(-d * d / (4.0 * model_.hbar())) * model_.geodesic_transport_phase(x, y);
}

Amplitude LatticeKernel::F_or_zero(const PhasePoint& x, const PhasePoint& y) const {
  try {
    return F(x, y);
  } catch (const InjectivityError&) {
    return 0.0;
  }
}

LatticeKernel lattice_kernel(const ModelSpec& model) { return LatticeKernel(model); }

LatticeConvolver::LatticeConvolver(const LatticeKernel& L, QuadratureGrid grid, LatticeBackend backend)
    : L_(L), grid_(std::move(grid)) {
  if (grid_.size() == 0) throw InvalidArgument("empty grid");
  step_ = make_stepper(L_, grid_, backend);
}

LatticeConvolver::~LatticeConvolver() = default;

std::vector<Amplitude> LatticeConvolver::upto(int n_max, const PhasePoint& m, const PhasePoint& mp) const {
  if (n_max < 1) throw InvalidArgument("convolution needs n >= 1");
  require_tube(grid_, L_.model(), m);
  require_tube(grid_, L_.model(), mp);

  std::vector<Amplitude> v(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) v[i] = L_.F_or_zero(m, grid_.nodes[i]) * grid_.weights[i];

  std::vector<Amplitude> out;
  for (int n = 1; n <= n_max; ++n) {
    if (n > 1) v = step_->apply(v);
    const Amplitude num = close_chain(L_, grid_, v, mp);
    const Amplitude cn = close_chain(L_, grid_, v, m);
    if (!(std::abs(cn) > 1e-300)) throw DomainError("normalization C_n underflowed");
    out.push_back(num / cn);
  }
  return out;
}

std::vector<Amplitude> convolve_upto(const LatticeKernel& L, int n_max, const QuadratureGrid& grid,
                                     const PhasePoint& m, const PhasePoint& mp, LatticeBackend backend) {
  if (n_max < 1) throw InvalidArgument("convolution needs n >= 1");
  return LatticeConvolver(L, grid, backend).upto(n_max, m, mp);
}

Amplitude convolve_n(const LatticeKernel& L, int n, const QuadratureGrid& grid, const PhasePoint& m,
                     const PhasePoint& mp, LatticeBackend backend) {
  return convolve_upto(L, n, grid, m, mp, backend).back();
}

std::vector<LatticeRow> lattice_study(const LatticeKernel& L, const std::vector<int>& ns, const QuadratureGrid& grid,
                                      const PhasePoint& m, const PhasePoint& mp) {
  if (ns.empty()) throw InvalidArgument("no lattice depths requested");
  int top = 0;
  for (int n : ns) {
    if (n < 1) throw InvalidArgument("convolution needs n >= 1");
    top = std::max(top, n);
  }
  const auto vals = convolve_upto(L, top, grid, m, mp);
  const Amplitude exact = L.model().omega_kernel(m, mp);
  std::vector<LatticeRow> rows;
  for (int n : ns) {
    LatticeRow r;
    r.n = n;
    r.m = m;
    r.mp = mp;
    r.value = vals[n - 1];
    r.exact = exact;
    r.abs_error = std::abs(r.value - exact);
    rows.push_back(r);
  }
  return rows;
}

void write_lattice_csv(std::ostream& out, const std::vector<LatticeRow>& rows) {
  out << "n,m_p,m_q,mp_p,mp_q,abs_error\n";
  out << std::setprecision(17);
  for (const auto& r : rows)
    out << r.n << ',' << r.m.p << ',' << r.m.q << ',' << r.mp.p << ',' << r.mp.q << ',' << r.abs_error << '\n';
}

SphereSpectrum sphere_lattice_spectrum(double hbar, int lmax, int quad_n) {
  if (lmax < 0) throw InvalidArgument("lmax must be non-negative");
  SphereSpectrum S;
  S.degree = sphere_degree(hbar);
  S.radius = sphere_radius(hbar);
  const double R = S.radius;
  const double tmax = 0.999 * kPi;  // same cut as the kernel's injectivity radius
  const Rule1D rule = gauss_legendre(quad_n, 0.0, tmax);
  for (int l = 0; l <= lmax; ++l) {
    double s = 0.0;
    for (int i = 0; i < quad_n; ++i) {
      const double t = rule.nodes[i];
      const double g = std::exp(-R * R * t * t / (4.0 * hbar)) * std::pow(std::cos(0.5 * t), S.degree);
      s += rule.weights[i] * g *
           boost::math::jacobi(static_cast<unsigned>(l), 0.0, static_cast<double>(S.degree), std::cos(t)) *
           std::sin(t);
    }
    S.eigenvalues.push_back(2.0 * kPi * R * R * s);
  }
  return S;
}

double sphere_continuum_error(const SphereSpectrum& S, double distance, int n) {
  if (n < 1) throw InvalidArgument("convolution needs n >= 1");
  const double t = distance / S.radius;
  const double top = std::abs(S.eigenvalues.at(0));
  double num = 0.0, den = 0.0;
  for (std::size_t l = 0; l < S.eigenvalues.size(); ++l) {
    const double mult = (S.degree + 2.0 * l + 1.0) * std::pow(S.eigenvalues[l] / top, n + 1);
    num += mult * boost::math::jacobi(static_cast<unsigned>(l), 0.0, static_cast<double>(S.degree), std::cos(t));
    den += mult;
  }
  // |Omega| = cos(t/2)^N
  return std::pow(std::cos(0.5 * t), S.degree) * std::abs(num / den - 1.0);
}

}  // namespace proplab
