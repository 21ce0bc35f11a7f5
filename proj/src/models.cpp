#include "proplab/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "proplab/errors.hpp"
#include "proplab/parallel.hpp"

namespace proplab {

double default_idempotency_tolerance(ModelName m) {
  switch (m) {
    case ModelName::FlatPQ:
    case ModelName::FlatSymmetric:
      return 1e-6;
    case ModelName::Sphere:
      return 1e-4;
    case ModelName::Hyperbolic:
      return 1e-2;
  }
  return 1e-6;
}

Amplitude convolve_on_grid(const ModelSpec& m, const QuadratureGrid& grid, const PhasePoint& x, const PhasePoint& y) {
  const auto& g = m.geometry();
  return parallel_sum<Amplitude>(grid.size(), [&](std::size_t i) {
    const PhasePoint& z = grid.nodes[i];
    return grid.weights[i] * g.omega(x, z) * g.omega(z, y);
  });
}

CalibrationResult calibrate_measure(const ModelSpec& m, const QuadratureGrid& grid,
                                    const std::vector<ProbePair>& probes, double tolerance) {
  if (probes.empty()) throw InvalidArgument("calibration needs at least one probe");
  if (grid.size() == 0) throw InvalidArgument("empty quadrature grid");
  for (const auto& pr : probes)
    if (!m.domain().contains(pr.x) || !m.domain().contains(pr.y)) throw DomainError("calibration probe outside chart");
  if (tolerance < 0.0) tolerance = default_idempotency_tolerance(m.name());

  const QuadratureGrid raw = grid.with_density(1.0);
  const PhasePoint x0 = probes.front().x;
  const auto& g = m.geometry();
  const double mass = parallel_sum<double>(raw.size(), [&](std::size_t i) {
    return raw.weights[i] * std::norm(g.omega(x0, raw.nodes[i]));
  });
  if (!(mass > 0.0) || !std::isfinite(mass)) throw CalibrationFailed("kernel has no mass on the grid", 0.0, INFINITY);
  const double c = std::real(g.omega(x0, x0)) / mass;

  const ModelSpec cal = m.with_density(c);
  const QuadratureGrid wg = raw.with_density(c);
  double residual = 0.0;
  for (const auto& pr : probes) {
    const Amplitude lhs = convolve_on_grid(cal, wg, pr.x, pr.y);
    residual = std::max(residual, std::abs(lhs - g.omega(pr.x, pr.y)));
  }
  if (!(residual <= tolerance)) {
    std::ostringstream os;
    os << "calibration residual " << residual << " exceeds " << tolerance << " (c = " << c << ")";
    throw CalibrationFailed(os.str(), c, residual);
  }
  return {c, residual, probes.size(), cal};
}

Amplitude analytic_convolution_flat(ModelName flat, const PhasePoint& x, const PhasePoint& y, double hbar) {
  if (flat != ModelName::FlatPQ && flat != ModelName::FlatSymmetric)
    throw InvalidArgument("analytic convolution exists only for flat kernels");
  if (!(hbar > 0.0)) throw InvalidArgument("hbar must be positive");
  // integrand exponent: -|z|^2/(2 hbar) + b.z + e0, same b for both gauges
  const Amplitude i{0.0, 1.0};
  const Amplitude bp = ((x.p + y.p) + i * (y.q - x.q)) / (2.0 * hbar);
  const Amplitude bq = ((x.q + y.q) + i * (x.p - y.p)) / (2.0 * hbar);
  Amplitude e0 = -(x.p * x.p + x.q * x.q + y.p * y.p + y.q * y.q) / (4.0 * hbar);
  if (flat == ModelName::FlatPQ) e0 += i * (y.p * y.q - x.p * x.q) / (2.0 * hbar);
  // int exp(-|z|^2/2h + b.z) dz = 2 pi h exp(h b.b / 2)
  return std::exp(e0 + 0.5 * hbar * (bp * bp + bq * bq));
}

double analytic_density(const ModelSpec& m) {
  const double h = m.hbar();
  switch (m.name()) {
    case ModelName::FlatPQ:
    case ModelName::FlatSymmetric:
      return 1.0 / (2.0 * std::numbers::pi * h);
    case ModelName::Sphere: {
      const double r = sphere_radius(h);
      return (sphere_degree(h) + 1.0) / (4.0 * std::numbers::pi * r * r);
    }
    case ModelName::Hyperbolic:
      return 1.0 / (4.0 * std::numbers::pi * h);
  }
  return 0.0;
}

}  // namespace proplab
