#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "proplab/errors.hpp"
#include "proplab/parallel.hpp"
#include "proplab/stochastic.hpp"

using namespace proplab;

TEST_CASE("ensembles are reproducible and paths independent of each other") {
  const auto E = generate_ensemble(50, 64, 11);
  const auto F = generate_ensemble(50, 64, 11);
  CHECK(E.increments(7) == F.increments(7));
  CHECK(E.increments(7) != E.increments(8));
  CHECK(generate_ensemble(50, 64, 12).increments(7) != E.increments(7));
  const auto g = generate_ensemble(3, 8, 1, 2.5).path(0);
  CHECK(g.size() == 9u);
  CHECK(g[0] == 2.5);
  CHECK_THROWS_AS(E.increments(50), InvalidArgument);
}

TEST_CASE("coarsening sums the fine increments of the same path") {
  const auto E = generate_ensemble(4, 64, 3);
  const auto C = E.coarsened(8);
  CHECK(C.n_steps() == 8u);
  const auto fine = E.path(2), coarse = C.path(2);
  for (std::size_t k = 0; k <= 8; ++k) CHECK(coarse[k] == doctest::Approx(fine[8 * k]).epsilon(1e-14));
  CHECK_THROWS_AS(E.coarsened(5), InvalidArgument);
}

TEST_CASE("f = x: midpoint minus left sum is half the quadratic variation") {
  CHECK(quadratic_variation_identity_defect(generate_ensemble(200, 512, 5)) < 1e-12);
}

TEST_CASE("test functions") {
  const auto s = test_function("sin");
  CHECK(s.f(0.3) == std::sin(0.3));
  CHECK(s.fprime(0.3) == std::cos(0.3));
  CHECK(test_function("x2").fprime(1.5) == 3.0);
  CHECK_THROWS_AS(test_function("tan"), InvalidArgument);
}

TEST_CASE("the gap shrinks like sqrt(dt)") {
  const auto E = generate_ensemble(2000, 1024, 9);
  const auto rows = gap_study(E, test_function("sin"), {16, 64, 256, 1024});
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].l2_gap < rows[i - 1].l2_gap);
  // E (D - R)^2 ~ c dt for a Brownian path; fourfold refinement halves the gap
  CHECK(rows[3].l2_gap / rows[2].l2_gap == doctest::Approx(0.5).epsilon(0.1));
  CHECK(rows[3].ci95 < 0.1 * rows[3].l2_gap);
  // f = 1 has no correction at all
  CHECK(gap_study(E, test_function("one"), {64})[0].l2_gap == 0.0);
}

TEST_CASE("endpoint moments") {
  const auto m = ensemble_moments(generate_ensemble(10000, 16, 2024));
  CHECK(std::abs(m.mean_end) < 0.03);
  CHECK(std::abs(m.var_end - 1.0) < 0.042);
  CHECK(m.mean_qv == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("Holder diagnostic separates 0.3 from 0.6") {
  const auto rows = holder_diagnostic(generate_ensemble(500, 1024, 4), {0.3, 0.6});
  CHECK(rows[0].violation_fraction < 0.05);
  CHECK(rows[1].violation_fraction > 0.95);
  CHECK_THROWS_AS(holder_diagnostic(generate_ensemble(5, 8, 1), {1.5}), InvalidArgument);
}

TEST_CASE("statistics are independent of the thread count") {
  const auto E = generate_ensemble(300, 256, 77);
  set_thread_count(1);
  const auto a = gap_study(E, test_function("x2"), {32, 256});
  set_thread_count(4);
  const auto b = gap_study(E, test_function("x2"), {32, 256});
  set_thread_count(0);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].l2_gap == b[i].l2_gap);
  std::ostringstream os;
  write_gap_csv(os, a);
  CHECK(os.str().rfind("n_steps,n_paths,f_name,l2_gap,ci95\n32,300,x2,", 0) == 0);
}
