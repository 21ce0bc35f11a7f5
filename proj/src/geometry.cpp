#include "proplab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "proplab/errors.hpp"
#include "proplab/quadrature.hpp"

namespace proplab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;
const Amplitude kI{0.0, 1.0};

void require_in(const ChartDomain& d, const PhasePoint& x) {
  if (!d.contains(x)) throw DomainError("point (" + std::to_string(x.p) + ", " + std::to_string(x.q) + ") outside chart");
}

double wrap_angle(double a) {
  a = std::remainder(a, 2.0 * kPi);
  return a;
}

class FlatBase : public Geometry {
 public:
  explicit FlatBase(double hbar) : hbar_(hbar), dom_{-kInf, kInf, -kInf, kInf, false, false} {}
  double hbar() const override { return hbar_; }
  const ChartDomain& domain() const override { return dom_; }
  MetricAtPoint metric(const PhasePoint&) const override { return {}; }
  double distance(const PhasePoint& x, const PhasePoint& y) const override {
    require_in(dom_, x);
    require_in(dom_, y);
    return std::hypot(y.p - x.p, y.q - x.q);
  }
  double length_scale() const override { return std::sqrt(hbar_); }

 protected:
  double hbar_;
  ChartDomain dom_;
};

class FlatSymmetric final : public FlatBase {
 public:
  using FlatBase::FlatBase;
  ModelName name() const override { return ModelName::FlatSymmetric; }
  ConnectionOneForm theta(const PhasePoint& x) const override {
    return {-kI * x.q / (2.0 * hbar_), kI * x.p / (2.0 * hbar_)};
  }
  Amplitude log_omega(const PhasePoint& x, const PhasePoint& y) const override {
    const double dp = y.p - x.p, dq = y.q - x.q;
    return {-(dp * dp + dq * dq) / (4.0 * hbar_), (x.p * y.q - x.q * y.p) / (2.0 * hbar_)};
  }
  // straight segment: integral of (p dq - q dp)/2 is (p q' - q p')/2
  Amplitude transport_phase(const PhasePoint& x, const PhasePoint& y) const override {
    return std::polar(1.0, (x.p * y.q - x.q * y.p) / (2.0 * hbar_));
  }
};

class FlatPQ final : public FlatBase {
 public:
  using FlatBase::FlatBase;
  ModelName name() const override { return ModelName::FlatPQ; }
  ConnectionOneForm theta(const PhasePoint& x) const override { return {0.0, kI * x.p / hbar_}; }
  Amplitude log_omega(const PhasePoint& x, const PhasePoint& y) const override {
    const double dp = y.p - x.p, dq = y.q - x.q;
    return {-(dp * dp + dq * dq) / (4.0 * hbar_), (x.p + y.p) * dq / (2.0 * hbar_)};
  }
  Amplitude transport_phase(const PhasePoint& x, const PhasePoint& y) const override {
    return std::polar(1.0, (x.p + y.p) * (y.q - x.q) / (2.0 * hbar_));
  }
};

// Round sphere of radius R in Darboux coordinates p = R cos(theta), q = R phi.
// Degree N = 1/hbar and R^2 = N hbar / 2, so the chart area 4 pi R^2 = 2 pi hbar N.
class Sphere final : public Geometry {
 public:
  Sphere(double hbar, SphereSign sign)
      : hbar_(hbar), n_(sphere_degree(hbar)), r_(sphere_radius(hbar)), sign_(sign),
        dom_{-r_, r_, 0.0, 2.0 * kPi * r_, true, true} {}
  ModelName name() const override { return ModelName::Sphere; }
  double hbar() const override { return hbar_; }
  const ChartDomain& domain() const override { return dom_; }
  bool sign_corrected() const override { return sign_ == SphereSign::Corrected; }
  double length_scale() const override { return std::sqrt(hbar_); }

  ConnectionOneForm theta(const PhasePoint& x) const override { return {0.0, kI * x.p / hbar_}; }

  MetricAtPoint metric(const PhasePoint& x) const override {
    require_in(dom_, x);
    const double r2 = r_ * r_;
    const double u = 1.0 - x.p * x.p / r2;
    if (u <= 0.0) throw DomainError("sphere metric is singular at the poles");
    MetricAtPoint m;
    m.g_pp = 1.0 / u;
    m.g_qq = u;
    m.g_pq = 0.0;
    m.christoffel[0][0][0] = x.p / (r2 * u);
    m.christoffel[0][1][1] = x.p * u / r2;
    m.christoffel[1][0][1] = m.christoffel[1][1][0] = -x.p / (r2 * u);
    return m;
  }

  Amplitude base(const PhasePoint& x, const PhasePoint& y) const {
    require_in(dom_, x);
    require_in(dom_, y);
    const double zx = std::clamp(x.p / r_, -1.0, 1.0), zy = std::clamp(y.p / r_, -1.0, 1.0);
    const double half = (y.q - x.q) / (2.0 * r_);
    const double a = 0.5 * std::sqrt((1.0 + zy) * (1.0 + zx));
    const double b = 0.5 * std::sqrt((1.0 - zy) * (1.0 - zx));
    const Amplitude e = std::polar(1.0, half);
    return sign_ == SphereSign::Corrected ? a * e + b * std::conj(e) : (a + b) * e;
  }

  Amplitude omega(const PhasePoint& x, const PhasePoint& y) const override {
    const Amplitude s = base(x, y);
    Amplitude out = 1.0, acc = s;
    for (int k = n_; k > 0; k >>= 1) {
      if (k & 1) out *= acc;
      acc *= acc;
    }
    return out;
  }
  Amplitude log_omega(const PhasePoint& x, const PhasePoint& y) const override {
    return static_cast<double>(n_) * std::log(base(x, y));
  }

  std::array<double, 3> unit(const PhasePoint& x) const {
    const double z = std::clamp(x.p / r_, -1.0, 1.0);
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = x.q / r_;
    return {s * std::cos(phi), s * std::sin(phi), z};
  }

  // angle between the unit vectors; throws on antipodal pairs
  double angle(const PhasePoint& x, const PhasePoint& y) const {
    require_in(dom_, x);
    require_in(dom_, y);
    const auto a = unit(x), b = unit(y);
    const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    const double cx = a[1] * b[2] - a[2] * b[1];
    const double cy = a[2] * b[0] - a[0] * b[2];
    const double cz = a[0] * b[1] - a[1] * b[0];
    const double cr = std::sqrt(cx * cx + cy * cy + cz * cz);
    if (dot < 0.0 && cr < 1e-9) throw InjectivityError("antipodal points: sphere geodesic is not unique");
    return std::atan2(cr, dot);
  }

  double distance(const PhasePoint& x, const PhasePoint& y) const override { return r_ * angle(x, y); }

  // (1/hbar) int p dq along the great circle = (N/2) int z dphi
  //   = (N/2) (dphi - E), E the signed solid angle of (north, A, B).
  // dphi is taken from the chart coordinates, so the phase lives in the same
  // gauge as the kernel (anti-periodic in q for odd N).
  Amplitude transport_phase(const PhasePoint& x, const PhasePoint& y) const override {
    angle(x, y);  // antipodal check
    const auto a = unit(x), b = unit(y);
    const double triple = a[0] * b[1] - a[1] * b[0];  // north . (a x b)
    const double denom = 1.0 + a[2] + (a[0] * b[0] + a[1] * b[1] + a[2] * b[2]) + b[2];
    const double e = 2.0 * std::atan2(triple, denom);
    const double dphi = (y.q - x.q) / r_;
    return std::polar(1.0, 0.5 * n_ * (dphi - e));
  }

  int degree() const { return n_; }
  double radius() const { return r_; }

 private:
  double hbar_;
  int n_;
  double r_;
  SphereSign sign_;
  ChartDomain dom_;
};

// Upper half plane in y = hbar/p, metric hbar (dq^2 + dy^2)/y^2.
class Hyperbolic final : public Geometry {
 public:
  explicit Hyperbolic(double hbar) : hbar_(hbar), dom_{0.0, kInf, -kInf, kInf, false, false} {}
  ModelName name() const override { return ModelName::Hyperbolic; }
  double hbar() const override { return hbar_; }
  const ChartDomain& domain() const override { return dom_; }
  double length_scale() const override { return std::sqrt(hbar_); }
  ConnectionOneForm theta(const PhasePoint& x) const override { return {0.0, kI * x.p / hbar_}; }

  MetricAtPoint metric(const PhasePoint& x) const override {
    require_in(dom_, x);
    MetricAtPoint m;
    m.g_pp = hbar_ / (x.p * x.p);
    m.g_qq = x.p * x.p / hbar_;
    m.g_pq = 0.0;
    m.christoffel[0][0][0] = -1.0 / x.p;
    m.christoffel[0][1][1] = -x.p * x.p * x.p / (hbar_ * hbar_);
    m.christoffel[1][0][1] = m.christoffel[1][1][0] = 1.0 / x.p;
    return m;
  }

  Amplitude log_omega(const PhasePoint& x, const PhasePoint& y) const override {
    require_in(dom_, x);
    require_in(dom_, y);
    const double sh = std::sqrt(hbar_);
    const Amplitude w{sh / (2.0 * y.p) + sh / (2.0 * x.p), -(y.q - x.q) / (2.0 * sh)};
    return std::log(hbar_ / (x.p * y.p)) - 2.0 * std::log(w);
  }
  Amplitude omega(const PhasePoint& x, const PhasePoint& y) const override {
    require_in(dom_, x);
    require_in(dom_, y);
    const double sh = std::sqrt(hbar_);
    const Amplitude w{sh / (2.0 * y.p) + sh / (2.0 * x.p), -(y.q - x.q) / (2.0 * sh)};
    return (hbar_ / (x.p * y.p)) / (w * w);
  }

  double distance(const PhasePoint& x, const PhasePoint& y) const override {
    require_in(dom_, x);
    require_in(dom_, y);
    const double y1 = hbar_ / x.p, y2 = hbar_ / y.p;
    const double dq = y.q - x.q, dy = y2 - y1;
    // arccosh(1 + u) written to stay accurate for small u
    const double u = (dq * dq + dy * dy) / (2.0 * y1 * y2);
    return std::sqrt(hbar_) * std::log1p(u + std::sqrt(u * (u + 2.0)));
  }

  // (1/hbar) int p dq = int dq / y; on the semicircle q = c + r cos a,
  // y = r sin a this is -(a2 - a1). Vertical geodesics carry no phase.
  Amplitude transport_phase(const PhasePoint& x, const PhasePoint& y) const override {
    require_in(dom_, x);
    require_in(dom_, y);
    const double y1 = hbar_ / x.p, y2 = hbar_ / y.p;
    const double dq = y.q - x.q;
    if (std::abs(dq) <= 1e-14 * (y1 + y2)) return 1.0;
    const double c = ((y.q * y.q + y2 * y2) - (x.q * x.q + y1 * y1)) / (2.0 * dq);
    const double a1 = std::atan2(y1, x.q - c), a2 = std::atan2(y2, y.q - c);
    return std::polar(1.0, -(a2 - a1));
  }

 private:
  double hbar_;
  ChartDomain dom_;
};

}  // namespace

std::string_view to_string(ModelName m) {
  switch (m) {
    case ModelName::FlatSymmetric: return "flat-symmetric";
    case ModelName::FlatPQ: return "flat-pq";
    case ModelName::Sphere: return "sphere";
    case ModelName::Hyperbolic: return "hyperbolic";
  }
  return "?";
}

ModelName parse_model_name(std::string_view s) {
  if (s == "flat-symmetric" || s == "flat_symmetric" || s == "flatsymmetric") return ModelName::FlatSymmetric;
  if (s == "flat-pq" || s == "flat_pq" || s == "flatpq" || s == "flat") return ModelName::FlatPQ;
  if (s == "sphere") return ModelName::Sphere;
  if (s == "hyperbolic") return ModelName::Hyperbolic;
  throw InvalidArgument("unknown model '" + std::string(s) + "'");
}

bool ChartDomain::contains(const PhasePoint& x) const {
  if (!std::isfinite(x.p) || !std::isfinite(x.q)) return false;
  if (p_closed) {
    if (x.p < p_min || x.p > p_max) return false;
  } else if (x.p <= p_min || x.p >= p_max) {
    return false;
  }
  // periodic q: any real value names a point of the strip
  if (!q_periodic && (x.q <= q_min || x.q >= q_max)) return false;
  return true;
}

double sphere_radius(double) { return std::sqrt(0.5); }

int sphere_degree(double hbar) {
  if (!(hbar > 0.0)) throw InvalidArgument("hbar must be positive");
  const double inv = 1.0 / hbar;
  const double n = std::round(inv);
  if (n < 1.0 || std::abs(inv - n) > 1e-9 * n) throw InvalidArgument("sphere needs 1/hbar to be a positive integer");
  return static_cast<int>(n);
}

ModelSpec make_model(ModelName name, double hbar, ModelOptions opts) {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw InvalidArgument("hbar must be positive and finite");
  std::shared_ptr<const Geometry> g;
  switch (name) {
    case ModelName::FlatSymmetric: g = std::make_shared<FlatSymmetric>(hbar); break;
    case ModelName::FlatPQ: g = std::make_shared<FlatPQ>(hbar); break;
    case ModelName::Sphere: g = std::make_shared<Sphere>(hbar, opts.sphere_sign); break;
    case ModelName::Hyperbolic: g = std::make_shared<Hyperbolic>(hbar); break;
  }
  return ModelSpec(std::move(g));
}

ModelSpec::ModelSpec(std::shared_ptr<const Geometry> geo, std::optional<double> density)
    : geo_(std::move(geo)), density_(density) {
  if (density_ && !(*density_ > 0.0)) throw InvalidArgument("measure density must be positive");
}

ModelName ModelSpec::name() const { return geo_->name(); }
double ModelSpec::hbar() const { return geo_->hbar(); }
const ChartDomain& ModelSpec::domain() const { return geo_->domain(); }
bool ModelSpec::sign_corrected() const { return geo_->sign_corrected(); }
ConnectionOneForm ModelSpec::theta(const PhasePoint& x) const {
  require_in(domain(), x);
  return geo_->theta(x);
}
MetricAtPoint ModelSpec::metric(const PhasePoint& x) const { return geo_->metric(x); }
Amplitude ModelSpec::omega_kernel(const PhasePoint& x, const PhasePoint& y) const {
  require_in(domain(), x);
  require_in(domain(), y);
  return geo_->omega(x, y);
}
Amplitude ModelSpec::log_omega(const PhasePoint& x, const PhasePoint& y) const {
  require_in(domain(), x);
  require_in(domain(), y);
  return geo_->log_omega(x, y);
}
double ModelSpec::geodesic_distance(const PhasePoint& x, const PhasePoint& y) const { return geo_->distance(x, y); }
Amplitude ModelSpec::geodesic_transport_phase(const PhasePoint& x, const PhasePoint& y) const {
  return geo_->transport_phase(x, y);
}
ModelSpec ModelSpec::with_density(double c) const { return ModelSpec(geo_, c); }
double ModelSpec::length_scale() const { return geo_->length_scale(); }

PhasePoint geodesic_point(const ModelSpec& m, const PhasePoint& x, const PhasePoint& y, double t) {
  switch (m.name()) {
    case ModelName::FlatPQ:
    case ModelName::FlatSymmetric:
      return {x.p + t * (y.p - x.p), x.q + t * (y.q - x.q)};
    case ModelName::Sphere: {
      const auto& s = static_cast<const Sphere&>(m.geometry());
      const double om = s.angle(x, y);
      const auto a = s.unit(x), b = s.unit(y);
      std::array<double, 3> n{};
      if (om < 1e-14) {
        n = a;
      } else {
        const double wa = std::sin((1.0 - t) * om) / std::sin(om), wb = std::sin(t * om) / std::sin(om);
        for (int i = 0; i < 3; ++i) n[i] = wa * a[i] + wb * b[i];
      }
      const double r = s.radius();
      const double phi0 = x.q / r;
      // arcs shorter than pi sweep less than pi of azimuth, so a single
      // wrap keeps q continuous from x
      const double dphi = wrap_angle(std::atan2(n[1], n[0]) - phi0);
      return {r * std::clamp(n[2], -1.0, 1.0), x.q + r * dphi};
    }
    case ModelName::Hyperbolic: {
      const double h = m.hbar();
      const double y1 = h / x.p, y2 = h / y.p;
      const double dq = y.q - x.q;
      if (std::abs(dq) <= 1e-14 * (y1 + y2)) {
        const double yy = std::exp((1.0 - t) * std::log(y1) + t * std::log(y2));
        return {h / yy, x.q};
      }
      const double c = ((y.q * y.q + y2 * y2) - (x.q * x.q + y1 * y1)) / (2.0 * dq);
      const double r = std::hypot(x.q - c, y1);
      const double a1 = std::atan2(y1, x.q - c), a2 = std::atan2(y2, y.q - c);
      // arclength along the semicircle is sqrt(hbar) log tan(a/2)
      const double s = (1.0 - t) * std::log(std::tan(0.5 * a1)) + t * std::log(std::tan(0.5 * a2));
      const double a = 2.0 * std::atan(std::exp(s));
      return {h / (r * std::sin(a)), c + r * std::cos(a)};
    }
  }
  return x;
}

Amplitude transport_phase_by_quadrature(const ModelSpec& m, const PhasePoint& x, const PhasePoint& y, int nodes) {
  const auto rule = gauss_legendre(nodes);
  const double d = 1e-5;
  Amplitude acc = 0.0;
  for (int k = 0; k < nodes; ++k) {
    const double t = 0.5 * (rule.nodes[k] + 1.0);
    const PhasePoint c = geodesic_point(m, x, y, t);
    const PhasePoint a = geodesic_point(m, x, y, t - d), b = geodesic_point(m, x, y, t + d);
    const ConnectionOneForm th = m.geometry().theta(c);
    acc += 0.5 * rule.weights[k] * (th.coeff_p * (b.p - a.p) + th.coeff_q * (b.q - a.q)) / (2.0 * d);
  }
  Amplitude phase = std::exp(acc);
  if (m.name() == ModelName::Sphere) {
    // the path ends at y shifted by whole turns; each turn of the strip
    // gauge contributes (-1)^N
    const PhasePoint end = geodesic_point(m, x, y, 1.0);
    const double turns = std::round((y.q - end.q) / (2.0 * kPi * sphere_radius(m.hbar())));
    if (std::fmod(std::abs(turns) * sphere_degree(m.hbar()), 2.0) == 1.0) phase = -phase;
  }
  return phase;
}

}  // namespace proplab
