#pragma once

#include <memory>
#include <ostream>
#include <vector>

#include "proplab/geometry.hpp"
#include "proplab/quadrature.hpp"

namespace proplab {

// Short-time kernel F(m,m') = exp(-d^2/4 hbar) * transport phase along the
// unique geodesic.
class LatticeKernel {
 public:
  explicit LatticeKernel(ModelSpec model);

  const ModelSpec& model() const { return model_; }
  // pairs at distance >= valid_radius have no unique geodesic
  double valid_radius() const { return valid_radius_; }

  // throws InjectivityError outside valid_radius
  Amplitude F(const PhasePoint& x, const PhasePoint& y) const;
  // same, but 0 outside valid_radius; used inside convolutions
  Amplitude F_or_zero(const PhasePoint& x, const PhasePoint& y) const;

 private:
  ModelSpec model_;
  double valid_radius_;
};

LatticeKernel lattice_kernel(const ModelSpec& model);

// Direct caches the weighted F matrix when it fits in memory, otherwise
// evaluates rows on the fly. Azimuthal needs a sphere grid.
enum class LatticeBackend { Auto, Direct, Azimuthal };

class Stepper;

// Owns the grid operator so several endpoint pairs share one setup.
class LatticeConvolver {
 public:
  LatticeConvolver(const LatticeKernel& L, QuadratureGrid grid, LatticeBackend backend = LatticeBackend::Auto);
  ~LatticeConvolver();
  LatticeConvolver(const LatticeConvolver&) = delete;
  LatticeConvolver& operator=(const LatticeConvolver&) = delete;

  // normalized amplitudes for n = 1..n_max
  std::vector<Amplitude> upto(int n_max, const PhasePoint& m, const PhasePoint& mp) const;
  const QuadratureGrid& grid() const { return grid_; }

 private:
  LatticeKernel L_;
  QuadratureGrid grid_;
  std::unique_ptr<Stepper> step_;
};

// n intermediate integrations, i.e. n+1 factors of F between m and m',
// divided by the same quantity with m' = m.
Amplitude convolve_n(const LatticeKernel& L, int n, const QuadratureGrid& grid, const PhasePoint& m,
                     const PhasePoint& mp, LatticeBackend backend = LatticeBackend::Auto);

// All n in [1, n_max] from one chain of matrix-vector products.
std::vector<Amplitude> convolve_upto(const LatticeKernel& L, int n_max, const QuadratureGrid& grid,
                                     const PhasePoint& m, const PhasePoint& mp,
                                     LatticeBackend backend = LatticeBackend::Auto);

struct LatticeRow {
  int n = 0;
  PhasePoint m, mp;
  Amplitude value;
  Amplitude exact;
  double abs_error = 0;
};

std::vector<LatticeRow> lattice_study(const LatticeKernel& L, const std::vector<int>& ns, const QuadratureGrid& grid,
                                      const PhasePoint& m, const PhasePoint& mp);
void write_lattice_csv(std::ostream& out, const std::vector<LatticeRow>& rows);

// Sphere only. F is rotation covariant, so F-hat is diagonal on the spin
// j = N/2 + l components with eigenvalues
//   f_l = 2 pi R^2 int g(t) P_l^{(0,N)}(cos t) sin t dt,  g = F(m,y) Omega(y,m),
// and the normalized (n+1)-fold product is
//   Omega(m,m') sum_l f_l^{n+1} (N+2l+1) P_l(cos t) / sum_l f_l^{n+1} (N+2l+1).
// This gives the continuum error with no 2-d quadrature.
struct SphereSpectrum {
  int degree = 0;
  double radius = 0;
  std::vector<double> eigenvalues;  // f_l, l = 0..lmax
};
SphereSpectrum sphere_lattice_spectrum(double hbar, int lmax = 48, int quad_n = 400);
double sphere_continuum_error(const SphereSpectrum& S, double distance, int n);

}  // namespace proplab
