#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "proplab/errors.hpp"

namespace proplab {

template <int D>
using Vec = std::array<double, D>;

using Value = std::complex<double>;

// Multi-point summand F(x_0, ..., x_n) on R^D together with the n-form it
// claims to represent. The jet takes the base point and n tangent vectors.
template <int D>
struct SummandF {
  int arity = 2;
  std::function<Value(std::span<const Vec<D>>)> eval;
  std::function<Value(const Vec<D>&, std::span<const Vec<D>>)> first_jet;
  bool diagonal_vanishing = true;
};

struct GateOptions {
  std::vector<double> box_lo;  // sample box for the gate; defaults to [0,1]^D
  std::vector<double> box_hi;
  int samples = 8;
  double h = 1e-3;
  double tol = 1e-6;  // relative to 1 + |jet|
};

namespace detail {

inline double gate_halton(std::size_t i, unsigned b) {
  double f = 1.0, r = 0.0;
  while (i > 0) {
    f /= b;
    r += f * static_cast<double>(i % b);
    i /= b;
  }
  return r;
}

template <int D>
Vec<D> axpy(const Vec<D>& x, double t, const Vec<D>& v) {
  Vec<D> out;
  for (int i = 0; i < D; ++i) out[i] = x[i] + t * v[i];
  return out;
}

// n! X_n ... X_1 F(x, ., ...) by central differences with one Richardson step
template <int D>
Value vanest(const SummandF<D>& F, const Vec<D>& x, std::span<const Vec<D>> dirs, double h) {
  const int n = F.arity - 1;
  auto diff = [&](double s) -> Value {
    if (n == 1) {
      const std::array<Vec<D>, 2> a{x, axpy<D>(x, s, dirs[0])}, b{x, axpy<D>(x, -s, dirs[0])};
      return (F.eval(a) - F.eval(b)) / (2.0 * s);
    }
    auto at = [&](double t1, double t2) {
      const std::array<Vec<D>, 3> p{x, axpy<D>(x, t1, dirs[0]), axpy<D>(x, t2, dirs[1])};
      return F.eval(p);
    };
    return (at(s, s) - at(s, -s) - at(-s, s) + at(-s, -s)) / (4.0 * s * s);
  };
  const double nf = n == 1 ? 1.0 : 2.0;
  return nf * (4.0 * diff(0.5 * h) - diff(h)) / 3.0;
}

}  // namespace detail

// Self-consistency gate: F vanishes on the diagonal and its finite-difference
// jet matches first_jet at sample points. Throws GateFailure otherwise.
template <int D>
void summand_gate(const SummandF<D>& F, const GateOptions& opt = {}) {
  const int n = F.arity - 1;
  if (n < 1 || n > 2) throw InvalidArgument("summands of arity 2 or 3 only");
  if (!F.eval || !F.first_jet) throw InvalidArgument("summand needs eval and first_jet");
  static const unsigned primes[] = {2, 3, 5, 7, 11, 13};
  for (int k = 1; k <= opt.samples; ++k) {
    Vec<D> x;
    for (int i = 0; i < D; ++i) {
      const double lo = i < static_cast<int>(opt.box_lo.size()) ? opt.box_lo[i] : 0.0;
      const double hi = i < static_cast<int>(opt.box_hi.size()) ? opt.box_hi[i] : 1.0;
      x[i] = lo + (hi - lo) * detail::gate_halton(k, primes[i % 6]);
    }
    const std::vector<Vec<D>> diag(F.arity, x);
    if (std::abs(F.eval(diag)) > 1e-12) throw GateFailure("summand does not vanish on the diagonal");
    // coordinate directions, and for 2-forms the (e_i, e_j) pairs with i < j
    std::vector<std::vector<Vec<D>>> dirsets;
    for (int i = 0; i < D; ++i) {
      Vec<D> ei{};
      ei[i] = 1.0;
      if (n == 1) dirsets.push_back({ei});
      for (int j = i + 1; j < D && n == 2; ++j) {
        Vec<D> ej{};
        ej[j] = 1.0;
        dirsets.push_back({ei, ej});
      }
    }
    for (const auto& dirs : dirsets) {
      const Value fd = detail::vanest<D>(F, x, dirs, opt.h);
      const Value ref = F.first_jet(x, dirs);
      if (std::abs(fd - ref) > opt.tol * (1.0 + std::abs(ref))) throw GateFailure("finite-difference jet disagrees with first_jet");
    }
  }
}

template <int D>
SummandF<D> make_summand(int arity, std::function<Value(std::span<const Vec<D>>)> eval,
                         std::function<Value(const Vec<D>&, std::span<const Vec<D>>)> jet, const GateOptions& opt = {}) {
  SummandF<D> F{arity, std::move(eval), std::move(jet), true};
  summand_gate(F, opt);
  return F;
}

// Convenience for arity-2 summands on the line: F(x, y) and jet f(x) dx.
SummandF<1> summand_1d(std::function<Value(double, double)> F, std::function<double(double)> f,
                       const GateOptions& opt = {});

Value riemann_sum_1d(const SummandF<1>& F, std::span<const double> partition);
std::vector<double> uniform_partition(double a, double b, std::size_t n);

template <int D>
struct Triangulation {
  std::vector<Vec<D>> vertices;
  std::vector<std::array<int, D + 1>> simplices;
  std::vector<int> orientation;  // +1 or -1 per simplex

  std::size_t size() const { return simplices.size(); }

  // Each interior facet must appear twice with opposite induced orientation.
  void check_orientation() const {
    std::map<std::array<int, D>, std::pair<int, int>> facets;  // count, signed sum
    for (std::size_t s = 0; s < simplices.size(); ++s) {
      const auto& sx = simplices[s];
      for (int omit = 0; omit <= D; ++omit) {
        std::array<int, D> f;
        for (int i = 0, j = 0; i <= D; ++i)
          if (i != omit) f[j++] = sx[i];
        // parity of the sort that canonicalizes f
        int parity = 0;
        for (int a = 0; a < D; ++a)
          for (int b = a + 1; b < D; ++b)
            if (f[a] > f[b]) parity ^= 1;
        std::sort(f.begin(), f.end());
        const int sign = orientation[s] * ((omit % 2) ? -1 : 1) * (parity ? -1 : 1);
        auto& e = facets[f];
        e.first += 1;
        e.second += sign;
      }
    }
    for (const auto& [f, e] : facets) {
      if (e.first > 2 || (e.first == 2 && e.second != 0))
        throw InvalidArgument("triangulation orientations are inconsistent");
    }
  }

  // Barycentric refinement. Each child is ordered (vertex, edge midpoint,
  // ..., barycenter) as in the canonical ordering of a subdivision, and its
  // orientation is the parent's times the sign of the permutation.
  Triangulation refine() const {
    Triangulation out;
    out.vertices = vertices;
    std::map<std::vector<int>, int> index;
    for (std::size_t v = 0; v < vertices.size(); ++v) index[{static_cast<int>(v)}] = static_cast<int>(v);
    auto vertex_of = [&](std::vector<int> face) {
      std::sort(face.begin(), face.end());
      auto it = index.find(face);
      if (it != index.end()) return it->second;
      Vec<D> c{};
      for (int v : face)
        for (int i = 0; i < D; ++i) c[i] += vertices[v][i] / face.size();
      const int id = static_cast<int>(out.vertices.size());
      out.vertices.push_back(c);
      index[face] = id;
      return id;
    };
    for (std::size_t s = 0; s < simplices.size(); ++s) {
      std::array<int, D + 1> perm;
      std::iota(perm.begin(), perm.end(), 0);
      do {
        int parity = 0;
        for (int a = 0; a <= D; ++a)
          for (int b = a + 1; b <= D; ++b)
            if (perm[a] > perm[b]) parity ^= 1;
        std::array<int, D + 1> child;
        std::vector<int> face;
        for (int k = 0; k <= D; ++k) {
          face.push_back(simplices[s][perm[k]]);
          child[k] = vertex_of(face);
        }
        out.simplices.push_back(child);
        out.orientation.push_back(orientation[s] * (parity ? -1 : 1));
      } while (std::next_permutation(perm.begin(), perm.end()));
    }
    return out;
  }

  Triangulation refine(int times) const {
    Triangulation t = *this;
    for (int i = 0; i < times; ++i) t = t.refine();
    return t;
  }

  template <typename Map>
  Triangulation mapped(Map phi) const {
    Triangulation t = *this;
    for (auto& v : t.vertices) v = phi(v);
    return t;
  }
};

// Sum of orientation * Omega over the ordered top simplices. Invariance of
// Omega under even permutations is sampled on up to `shuffles` simplices.
template <int D>
Value simplicial_riemann_sum(const SummandF<D>& Omega, const Triangulation<D>& T, int shuffles = 20) {
  if (Omega.arity != D + 1) throw InvalidArgument("summand arity must match the simplex dimension");
  T.check_orientation();
  std::array<Vec<D>, D + 1> pts;
  const std::size_t m = T.simplices.size();
  for (int k = 0; k < shuffles && m > 0 && D >= 2; ++k) {
    const std::size_t s = (static_cast<std::size_t>(k) * 2654435761u) % m;
    for (int i = 0; i <= D; ++i) pts[i] = T.vertices[T.simplices[s][i]];
    const Value v0 = Omega.eval(pts);
    std::rotate(pts.begin(), pts.begin() + 1, pts.begin() + 3);  // 3-cycle, even
    const Value v1 = Omega.eval(pts);
    if (std::abs(v0 - v1) > 1e-12 * (1.0 + std::abs(v0))) throw InvalidArgument("summand is not invariant under even permutations");
  }
  Value sum = 0.0;
  for (std::size_t s = 0; s < m; ++s) {
    for (int i = 0; i <= D; ++i) pts[i] = T.vertices[T.simplices[s][i]];
    sum += static_cast<double>(T.orientation[s]) * Omega.eval(pts);
  }
  return sum;
}

// F pulled back along phi: R^A -> R^B. The jet is phi^*(first_jet), with
// the differential of phi taken by central differences. The gate runs on
// the result.
template <int A, int B>
SummandF<A> pullback_summand(const SummandF<B>& F, std::function<Vec<B>(const Vec<A>&)> phi,
                             const GateOptions& opt = {}, double dh = 1e-6) {
  SummandF<A> out;
  out.arity = F.arity;
  out.eval = [F, phi](std::span<const Vec<A>> xs) {
    std::vector<Vec<B>> ys;
    ys.reserve(xs.size());
    for (const auto& x : xs) ys.push_back(phi(x));
    return F.eval(ys);
  };
  out.first_jet = [F, phi, dh](const Vec<A>& x, std::span<const Vec<A>> vs) {
    std::vector<Vec<B>> pushed;
    for (const auto& v : vs) {
      const Vec<B> a = phi(detail::axpy<A>(x, dh, v)), b = phi(detail::axpy<A>(x, -dh, v));
      Vec<B> w;
      for (int i = 0; i < B; ++i) w[i] = (a[i] - b[i]) / (2.0 * dh);
      pushed.push_back(w);
    }
    return F.first_jet(phi(x), pushed);
  };
  summand_gate(out, opt);
  return out;
}

struct RateRow {
  int level = 0;
  std::size_t n = 0;
  double h = 0;
  double error = 0;
  double fitted_order = 0;  // log2 of the error ratio to the previous level; 0 on the first
};

// Uniform partitions of [a, b] with n0 * 2^level intervals.
std::vector<RateRow> convergence_study(const SummandF<1>& F, double a, double b, Value oracle, std::size_t n0,
                                       int levels);

// Unit disk: hexagon reference triangulation (6 triangles around the
// origin), barycentrically refined `times` times in the reference domain,
// vertices then pushed radially onto the disk.
Triangulation<2> disk_triangulation(int refinements);
Triangulation<2> unit_square();
Triangulation<1> interval_triangulation(std::span<const double> partition);

// Plain text: "dim nverts nsimplices", then one vertex per line, then one
// simplex per line as dim+1 indices with an optional trailing orientation.
// '#' starts a comment.
Triangulation<2> load_triangulation_2d(std::istream& in);
Triangulation<1> load_triangulation_1d(std::istream& in);

// 1/2 det(v1 - v0, v2 - v0): represents dx ^ dy
SummandF<2> area_summand();

}  // namespace proplab
