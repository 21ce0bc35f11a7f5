#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "proplab/geometry.hpp"

namespace proplab {

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Gauss-Legendre nodes and weights on [-1, 1].
Rule1D gauss_legendre(int n);
// Same rule mapped to [a, b].
Rule1D gauss_legendre(int n, double a, double b);

enum class TruncationKind { Rectangle, Disk, HyperbolicStrip, SphereChart };

struct Truncation {
  TruncationKind kind = TruncationKind::Rectangle;
  double p_min = 0, p_max = 0, q_min = 0, q_max = 0;  // bounding box
  PhasePoint center{};                                // disks only
  double radius = 0;                                  // disks only
  double area = 0;                                    // Liouville area dp dq
  bool contains(const PhasePoint& x) const;
  // distance from x to the truncation boundary in the chart coordinates;
  // periodic directions never count as boundary
  double margin(const PhasePoint& x) const;
};

struct QuadratureGrid {
  std::vector<PhasePoint> nodes;
  // dp dq weights multiplied by `density`
  std::vector<double> weights;
  double density = 1.0;
  Truncation domain;
  // points per direction, for reporting
  std::size_t n1 = 0, n2 = 0;

  std::size_t size() const { return nodes.size(); }
  // copy whose weights carry the measure density c instead of the current one
  QuadratureGrid with_density(double c) const;
  double weight_sum() const;
};

// Gauss-Legendre in both directions over a rectangle.
QuadratureGrid rectangle_grid(double p_min, double p_max, double q_min, double q_max, int np, int nq);
// Gauss-Legendre in radius times trapezoid in angle.
QuadratureGrid disk_grid(PhasePoint center, double radius, int nr, int ntheta);
// Gauss-Legendre in p over [-R, R] times trapezoid in the periodic q.
QuadratureGrid sphere_grid(const ModelSpec& sphere, int np, int nq);
// Gauss-Legendre in log p over [p_min, p_max] and in v with q = s sinh(v),
// |q| <= q_max. The maps pack nodes where the rational kernel tails live.
QuadratureGrid hyperbolic_grid(double p_min, double p_max, double q_max, double q_scale, int np, int nq);

// Default grid for a model at per-direction resolution n. Flat models use a
// square of half-width 10 sqrt(hbar) (probe box plus an 8 sqrt(hbar) margin).
QuadratureGrid default_grid(const ModelSpec& m, int n);

// Halton low-discrepancy point in [0,1) for the given index and prime base.
double halton(std::size_t index, unsigned base);

// Box in the chart where probes are drawn; shrunk away from chart edges.
struct ProbeBox {
  double p_min, p_max, q_min, q_max;
};
ProbeBox default_probe_box(const ModelSpec& m);

struct ProbePair {
  PhasePoint x;
  PhasePoint y;
};

std::vector<PhasePoint> probe_points(const ProbeBox& box, std::size_t count, std::size_t offset = 0);
std::vector<ProbePair> probe_pairs(const ProbeBox& box, std::size_t count);

}  // namespace proplab
