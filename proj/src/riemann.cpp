#include "proplab/riemann.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace proplab {

SummandF<1> summand_1d(std::function<Value(double, double)> F, std::function<double(double)> f,
                       const GateOptions& opt) {
  return make_summand<1>(
      2, [F](std::span<const Vec<1>> x) { return F(x[0][0], x[1][0]); },
      [f](const Vec<1>& x, std::span<const Vec<1>> v) { return Value(f(x[0]) * v[0][0]); }, opt);
}

Value riemann_sum_1d(const SummandF<1>& F, std::span<const double> partition) {
  if (F.arity != 2) throw InvalidArgument("1-d Riemann sums need a two-point summand");
  Value s = 0.0;
  for (std::size_t i = 0; i + 1 < partition.size(); ++i) {
    const std::array<Vec<1>, 2> pts{Vec<1>{partition[i]}, Vec<1>{partition[i + 1]}};
    s += F.eval(pts);
  }
  return s;
}

std::vector<double> uniform_partition(double a, double b, std::size_t n) {
  if (n == 0) throw InvalidArgument("partition needs at least one interval");
  std::vector<double> x(n + 1);
  for (std::size_t i = 0; i <= n; ++i) x[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n);
  x[n] = b;
  return x;
}

std::vector<RateRow> convergence_study(const SummandF<1>& F, double a, double b, Value oracle, std::size_t n0,
                                       int levels) {
  std::vector<RateRow> rows;
  for (int l = 0; l < levels; ++l) {
    const std::size_t n = n0 << l;
    const auto part = uniform_partition(a, b, n);
    RateRow r;
    r.level = l;
    r.n = n;
    r.h = (b - a) / static_cast<double>(n);
    r.error = std::abs(riemann_sum_1d(F, part) - oracle);
    if (l > 0 && r.error > 0.0 && rows.back().error > 0.0) r.fitted_order = std::log2(rows.back().error / r.error);
    rows.push_back(r);
  }
  return rows;
}

Triangulation<2> unit_square() {
  Triangulation<2> t;
  t.vertices = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  t.simplices = {{0, 1, 2}, {0, 2, 3}};
  t.orientation = {1, 1};
  return t;
}

Triangulation<1> interval_triangulation(std::span<const double> partition) {
  Triangulation<1> t;
  for (double x : partition) t.vertices.push_back({x});
  for (std::size_t i = 0; i + 1 < partition.size(); ++i) {
    t.simplices.push_back({static_cast<int>(i), static_cast<int>(i + 1)});
    t.orientation.push_back(1);
  }
  return t;
}

Triangulation<2> disk_triangulation(int refinements) {
  Triangulation<2> hex;
  hex.vertices.push_back({0.0, 0.0});
  for (int k = 0; k < 6; ++k) {
    const double a = k * std::numbers::pi / 3.0;
    hex.vertices.push_back({std::cos(a), std::sin(a)});
  }
  for (int k = 0; k < 6; ++k) {
    hex.simplices.push_back({0, 1 + k, 1 + (k + 1) % 6});
    hex.orientation.push_back(1);
  }
  const Triangulation<2> fine = hex.refine(refinements);
  // radial push: the hexagon gauge |x|_hex becomes the Euclidean radius
  return fine.mapped([](const Vec<2>& x) {
    const double r = std::hypot(x[0], x[1]);
    if (r == 0.0) return x;
    const double a = std::atan2(x[1], x[0]);
    const double sector = std::fmod(a + 2.0 * std::numbers::pi, std::numbers::pi / 3.0) - std::numbers::pi / 6.0;
    const double gauge = r * std::cos(sector) / std::cos(std::numbers::pi / 6.0);
    return Vec<2>{x[0] * gauge / r, x[1] * gauge / r};
  });
}

namespace {

template <int D>
Triangulation<D> load_triangulation(std::istream& in) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    lines.push_back(line);
  }
  if (lines.empty()) throw InvalidArgument("empty triangulation file");
  std::istringstream head(lines[0]);
  int dim = 0;
  std::size_t nv = 0, ns = 0;
  if (!(head >> dim >> nv >> ns)) throw InvalidArgument("bad triangulation header");
  if (dim != D) throw InvalidArgument("triangulation dimension mismatch");
  if (lines.size() < 1 + nv + ns) throw InvalidArgument("truncated triangulation file");
  Triangulation<D> t;
  for (std::size_t i = 0; i < nv; ++i) {
    std::istringstream ls(lines[1 + i]);
    Vec<D> v;
    for (int k = 0; k < D; ++k)
      if (!(ls >> v[k])) throw InvalidArgument("bad vertex line");
    t.vertices.push_back(v);
  }
  for (std::size_t i = 0; i < ns; ++i) {
    std::istringstream ls(lines[1 + nv + i]);
    std::array<int, D + 1> s;
    for (int k = 0; k <= D; ++k) {
      if (!(ls >> s[k])) throw InvalidArgument("bad simplex line");
      if (s[k] < 0 || static_cast<std::size_t>(s[k]) >= nv) throw InvalidArgument("simplex index out of range");
    }
    int o = 1;
    if (ls >> o) {
      if (o != 1 && o != -1) throw InvalidArgument("orientation must be 1 or -1");
    }
    t.simplices.push_back(s);
    t.orientation.push_back(o);
  }
  t.check_orientation();
  return t;
}

}  // namespace

Triangulation<2> load_triangulation_2d(std::istream& in) { return load_triangulation<2>(in); }
Triangulation<1> load_triangulation_1d(std::istream& in) { return load_triangulation<1>(in); }

SummandF<2> area_summand() {
  return make_summand<2>(
      3,
      [](std::span<const Vec<2>> v) {
        const double ax = v[1][0] - v[0][0], ay = v[1][1] - v[0][1];
        const double bx = v[2][0] - v[0][0], by = v[2][1] - v[0][1];
        return Value(0.5 * (ax * by - ay * bx));
      },
      [](const Vec<2>&, std::span<const Vec<2>> d) { return Value(d[0][0] * d[1][1] - d[0][1] * d[1][0]); });
}

}  // namespace proplab
