#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "proplab/riemann.hpp"

using namespace proplab;
using std::numbers::pi;

namespace {

SummandF<1> midpoint_sin() {
  return summand_1d([](double x, double y) { return Value(std::sin(0.5 * (x + y)) * (y - x)); },
                    [](double x) { return std::sin(x); });
}

}  // namespace

TEST_CASE("telescoping summand is exact on any partition") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  std::vector<double> part{0.0, 2.0};
  for (int i = 0; i < 500; ++i) part.push_back(u(gen));
  std::sort(part.begin(), part.end());
  const auto F = summand_1d([](double x, double y) { return Value(std::exp(y) - std::exp(x)); },
                            [](double x) { return std::exp(x); });
  CHECK(std::abs(riemann_sum_1d(F, part) - (std::exp(2.0) - 1.0)) < 1e-14 * std::exp(2.0));
}

TEST_CASE("summands sharing a jet have the same limit") {
  const auto a = midpoint_sin();
  const auto b = summand_1d([](double x, double y) { return Value(std::cos(x) - std::cos(y)); },
                            [](double x) { return std::sin(x); });
  const auto part = uniform_partition(0.0, 1.0, 4000);
  CHECK(std::abs(riemann_sum_1d(a, part) - riemann_sum_1d(b, part)) < 1e-7);
  CHECK(std::abs(riemann_sum_1d(b, part) - (1.0 - std::cos(1.0))) < 1e-14);
}

TEST_CASE("the gate rejects inconsistent summands") {
  CHECK_THROWS_AS(summand_1d([](double x, double y) { return Value(2.0 * (y - x)); }, [](double) { return 1.0; }),
                  GateFailure);
  CHECK_THROWS_AS(summand_1d([](double x, double y) { return Value(1.0 + y - x); }, [](double) { return 1.0; }),
                  GateFailure);
}

TEST_CASE("convergence orders") {
  const auto left = summand_1d([](double x, double y) { return Value(x * (y - x)); }, [](double x) { return x; });
  const auto lr = convergence_study(left, 0.0, 1.0, 0.5, 8, 5);
  CHECK(lr.back().fitted_order == doctest::Approx(1.0).epsilon(1e-6));
  const auto mr = convergence_study(midpoint_sin(), 0.0, 1.0, 1.0 - std::cos(1.0), 8, 5);
  CHECK(mr.back().fitted_order == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("area summand on triangulations") {
  const auto area = area_summand();
  CHECK(std::abs(simplicial_riemann_sum(area, unit_square()) - 1.0) < 1e-15);
  // exact on any refinement of a polygon
  CHECK(std::abs(simplicial_riemann_sum(area, unit_square().refine(2)) - 1.0) < 1e-14);
  double prev = 1.0;
  for (int lev = 0; lev <= 4; ++lev) {
    const auto T = disk_triangulation(lev);
    CHECK(T.size() == 6u * static_cast<std::size_t>(std::pow(6, lev)));
    const double err = std::abs(simplicial_riemann_sum(area, T).real() - pi);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 2e-2);
}

TEST_CASE("orientation checks") {
  auto T = unit_square();
  T.orientation[0] = -T.orientation[0];
  CHECK_THROWS_AS(T.check_orientation(), InvalidArgument);
  CHECK_NOTHROW(unit_square().refine(1).check_orientation());
}

TEST_CASE("triangulation file format") {
  std::istringstream in("# square\n2 4 2\n0 0\n1 0\n1 1\n0 1\n0 1 2\n0 2 3 1\n");
  const auto T = load_triangulation_2d(in);
  CHECK(T.vertices.size() == 4u);
  CHECK(std::abs(simplicial_riemann_sum(area_summand(), T) - 1.0) < 1e-15);
  std::istringstream bad("2 3 1\n0 0\n1 0\n");
  CHECK_THROWS(load_triangulation_2d(bad));
}

TEST_CASE("pullback: substitution and Green") {
  const auto dx = summand_1d([](double x, double y) { return Value(std::sin(y - x)); }, [](double) { return 1.0; });
  const auto pb = pullback_summand<1, 1>(dx, [](const Vec<1>& t) { return Vec<1>{t[0] * t[0]}; });
  CHECK(std::abs(riemann_sum_1d(pb, uniform_partition(0.0, 1.0, 200)) - 1.0) < 1e-3);

  GateOptions g2;
  g2.box_lo = {-1.0, -1.0};
  g2.box_hi = {1.0, 1.0};
  const auto xdy = make_summand<2>(
      2, [](std::span<const Vec<2>> v) { return Value(0.5 * (v[0][0] + v[1][0]) * (v[1][1] - v[0][1])); },
      [](const Vec<2>& x, std::span<const Vec<2>> d) { return Value(x[0] * d[0][1]); }, g2);
  GateOptions g1;
  g1.box_hi = {2.0 * pi};
  const auto circ =
      pullback_summand<1, 2>(xdy, [](const Vec<1>& t) { return Vec<2>{std::cos(t[0]), std::sin(t[0])}; }, g1);
  CHECK(std::abs(riemann_sum_1d(circ, uniform_partition(0.0, 2.0 * pi, 400)) - pi) < 1e-3);
}
