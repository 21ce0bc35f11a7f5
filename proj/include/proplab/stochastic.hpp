#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

namespace proplab {

// Brownian paths on [0,1]. Increments are regenerated on demand from a
// generator seeded by (seed, path), so nothing is stored and the values do
// not depend on which thread draws them. A coarse ensemble sums `stride`
// consecutive fine increments, so every level sees the same paths.
class PathEnsemble {
 public:
  PathEnsemble(std::size_t n_paths, std::size_t n_steps, std::uint64_t seed, double gamma0 = 0.0,
               std::size_t stride = 1);

  std::size_t n_paths() const { return n_paths_; }
  std::size_t n_steps() const { return n_steps_; }
  double dt() const { return 1.0 / static_cast<double>(n_steps_); }
  std::uint64_t seed() const { return seed_; }
  double gamma0() const { return gamma0_; }

  // n_steps increments of one path
  std::vector<double> increments(std::size_t path) const;
  // n_steps + 1 positions starting at gamma0
  std::vector<double> path(std::size_t path) const;
  // same paths sampled every `factor` steps
  PathEnsemble coarsened(std::size_t factor) const;

 private:
  std::size_t n_paths_, n_steps_;
  std::uint64_t seed_;
  double gamma0_;
  std::size_t stride_;
};

PathEnsemble generate_ensemble(std::size_t n_paths, std::size_t n_steps, std::uint64_t seed, double gamma0 = 0.0);

struct TestFunction {
  std::string name;
  std::function<double(double)> f;
  std::function<double(double)> fprime;
};
// "one", "x", "x2", "sin"
TestFunction test_function(const std::string& name);

struct GapRow {
  std::size_t n_steps = 0;
  std::size_t n_paths = 0;
  std::string f_name;
  double l2_gap = 0;  // sqrt(mean (D - R)^2)
  double ci95 = 0;    // half-width, delta method on the mean square
  double mean_D = 0;
  double mean_R = 0;
};

// D = sum f(mid) dgamma - sum f(left) dgamma, R = (1/2) sum f'(left) dt.
GapRow stratonovich_ito_gap(const PathEnsemble& E, const TestFunction& f);
// One pass over the finest paths, every level in `steps` (each dividing
// E.n_steps()).
std::vector<GapRow> gap_study(const PathEnsemble& E, const TestFunction& f, const std::vector<std::size_t>& steps);

// max over paths of |D - QV/2| / max(1, QV/2) for f(x) = x
double quadratic_variation_identity_defect(const PathEnsemble& E);

struct HolderRow {
  double exponent = 0;
  double violation_fraction = 0;
};
// A path violates exponent a when some dyadic-lag increment has
// |dgamma| / lag^a > C.
std::vector<HolderRow> holder_diagnostic(const PathEnsemble& E, const std::vector<double>& exponents, double C = 4.0);

struct EnsembleMoments {
  double mean_end = 0;
  double var_end = 0;
  double mean_qv = 0;
};
EnsembleMoments ensemble_moments(const PathEnsemble& E);

void write_gap_csv(std::ostream& out, const std::vector<GapRow>& rows);

}  // namespace proplab
