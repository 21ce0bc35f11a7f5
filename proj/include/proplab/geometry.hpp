#pragma once

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

namespace proplab {

using Amplitude = std::complex<double>;

struct PhasePoint {
  double p = 0.0;
  double q = 0.0;
};

using KernelFn = std::function<Amplitude(const PhasePoint&, const PhasePoint&)>;

enum class ModelName { FlatSymmetric, FlatPQ, Sphere, Hyperbolic };

std::string_view to_string(ModelName m);
ModelName parse_model_name(std::string_view s);

// Coefficients of the full 1-form a dp + b dq, already including the i/hbar.
struct ConnectionOneForm {
  Amplitude coeff_p;
  Amplitude coeff_q;
};

struct MetricAtPoint {
  double g_pp = 1.0;
  double g_pq = 0.0;
  double g_qq = 1.0;
  // christoffel[k][i][j] = Gamma^k_ij, index 0 = p, 1 = q
  std::array<std::array<std::array<double, 2>, 2>, 2> christoffel{};

  double g(int i, int j) const {
    if (i == 0 && j == 0) return g_pp;
    if (i == 1 && j == 1) return g_qq;
    return g_pq;
  }
};

struct ChartDomain {
  double p_min;
  double p_max;
  double q_min;
  double q_max;
  bool p_closed;     // endpoints of the p range belong to the chart
  bool q_periodic;   // q is an angle with period q_max - q_min
  bool contains(const PhasePoint& x) const;
};

// Which sign the sphere kernel uses in its second term. Verbatim reproduces
// the printed formula with the same exponential in both terms.
enum class SphereSign { Corrected, Verbatim };

struct ModelOptions {
  SphereSign sphere_sign = SphereSign::Corrected;
};

class Geometry;

// Immutable value handle. Copies share the underlying geometry; the only
// per-copy state is the measure density set by calibration.
class ModelSpec {
 public:
  ModelSpec(std::shared_ptr<const Geometry> geo, std::optional<double> density = std::nullopt);

  ModelName name() const;
  double hbar() const;
  const ChartDomain& domain() const;
  bool sign_corrected() const;

  ConnectionOneForm theta(const PhasePoint& x) const;
  MetricAtPoint metric(const PhasePoint& x) const;
  Amplitude omega_kernel(const PhasePoint& x, const PhasePoint& y) const;
  // log of omega_kernel without going through exp; exact where a closed
  // form exists, principal branch otherwise
  Amplitude log_omega(const PhasePoint& x, const PhasePoint& y) const;
  double geodesic_distance(const PhasePoint& x, const PhasePoint& y) const;
  Amplitude geodesic_transport_phase(const PhasePoint& x, const PhasePoint& y) const;

  std::optional<double> measure_density() const { return density_; }
  bool calibrated() const { return density_.has_value(); }
  ModelSpec with_density(double c) const;

  // Natural length scale of the model's Gaussian factor (sqrt(hbar) for the
  // planar models, comparable for the others).
  double length_scale() const;

  const Geometry& geometry() const { return *geo_; }

 private:
  std::shared_ptr<const Geometry> geo_;
  std::optional<double> density_;
};

class Geometry {
 public:
  virtual ~Geometry() = default;
  virtual ModelName name() const = 0;
  virtual double hbar() const = 0;
  virtual const ChartDomain& domain() const = 0;
  virtual ConnectionOneForm theta(const PhasePoint& x) const = 0;
  virtual MetricAtPoint metric(const PhasePoint& x) const = 0;
  virtual Amplitude log_omega(const PhasePoint& x, const PhasePoint& y) const = 0;
  virtual Amplitude omega(const PhasePoint& x, const PhasePoint& y) const { return std::exp(log_omega(x, y)); }
  virtual double distance(const PhasePoint& x, const PhasePoint& y) const = 0;
  virtual Amplitude transport_phase(const PhasePoint& x, const PhasePoint& y) const = 0;
  virtual double length_scale() const = 0;
  virtual bool sign_corrected() const { return true; }
};

ModelSpec make_model(ModelName name, double hbar, ModelOptions opts = {});

// Sphere helpers: radius of the Darboux chart and the kernel degree 1/hbar.
double sphere_radius(double hbar);
int sphere_degree(double hbar);

// theta integrated along the model geodesic from x to y by 64-point
// Gauss-Legendre, returned as exp of the integral. Used to cross-check the
// closed-form transport phases.
Amplitude transport_phase_by_quadrature(const ModelSpec& m, const PhasePoint& x, const PhasePoint& y,
                                        int nodes = 64);

// Point on the model geodesic from x to y at parameter t in [0,1].
PhasePoint geodesic_point(const ModelSpec& m, const PhasePoint& x, const PhasePoint& y, double t);

}  // namespace proplab
