#include "proplab/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <random>

#include "proplab/errors.hpp"
#include "proplab/parallel.hpp"

namespace proplab {

PathEnsemble::PathEnsemble(std::size_t n_paths, std::size_t n_steps, std::uint64_t seed, double gamma0,
                           std::size_t stride)
    : n_paths_(n_paths), n_steps_(n_steps), seed_(seed), gamma0_(gamma0), stride_(stride) {
  if (n_paths == 0 || n_steps == 0 || stride == 0) throw InvalidArgument("ensemble needs paths and steps");
}

PathEnsemble generate_ensemble(std::size_t n_paths, std::size_t n_steps, std::uint64_t seed, double gamma0) {
  return PathEnsemble(n_paths, n_steps, seed, gamma0);
}

std::vector<double> PathEnsemble::increments(std::size_t path) const {
  if (path >= n_paths_) throw InvalidArgument("path index out of range");
  std::seed_seq seq{static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32),
                    static_cast<std::uint32_t>(path), static_cast<std::uint32_t>(path >> 32)};
  std::mt19937_64 gen(seq);
  std::normal_distribution<double> normal;
  const double sdt = std::sqrt(1.0 / static_cast<double>(n_steps_ * stride_));
  std::vector<double> dw(n_steps_, 0.0);
  for (std::size_t k = 0; k < n_steps_; ++k)
    for (std::size_t s = 0; s < stride_; ++s) dw[k] += sdt * normal(gen);
  return dw;
}

std::vector<double> PathEnsemble::path(std::size_t i) const {
  const auto dw = increments(i);
  std::vector<double> g(n_steps_ + 1);
  g[0] = gamma0_;
  for (std::size_t k = 0; k < n_steps_; ++k) g[k + 1] = g[k] + dw[k];
  return g;
}

PathEnsemble PathEnsemble::coarsened(std::size_t factor) const {
  if (factor == 0 || n_steps_ % factor != 0) throw InvalidArgument("coarsening factor must divide n_steps");
  return PathEnsemble(n_paths_, n_steps_ / factor, seed_, gamma0_, stride_ * factor);
}

TestFunction test_function(const std::string& name) {
  if (name == "one") return {name, [](double) { return 1.0; }, [](double) { return 0.0; }};
  if (name == "x") return {name, [](double x) { return x; }, [](double) { return 1.0; }};
  if (name == "x2") return {name, [](double x) { return x * x; }, [](double x) { return 2.0 * x; }};
  if (name == "sin") return {name, [](double x) { return std::sin(x); }, [](double x) { return std::cos(x); }};
  throw InvalidArgument("unknown test function: " + name);
}

namespace {

struct Moments {
  double s1 = 0, s2 = 0, d = 0, r = 0;
  Moments& operator+=(const Moments& o) {
    s1 += o.s1;
    s2 += o.s2;
    d += o.d;
    r += o.r;
    return *this;
  }
};

struct LevelMoments {
  std::vector<Moments> m;
  LevelMoments& operator+=(const LevelMoments& o) {
    if (m.empty()) m.resize(o.m.size());
    for (std::size_t i = 0; i < o.m.size(); ++i) m[i] += o.m[i];
    return *this;
  }
};

Moments path_gap(const std::vector<double>& g, std::size_t stride, const TestFunction& f) {
  const std::size_t n = (g.size() - 1) / stride;
  const double dt = 1.0 / static_cast<double>(n);
  double mid = 0, left = 0, r = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = g[k * stride], b = g[(k + 1) * stride], dg = b - a;
    mid += f.f(0.5 * (a + b)) * dg;
    left += f.f(a) * dg;
    r += f.fprime(a);
  }
  const double D = mid - left, R = 0.5 * r * dt;
  const double e2 = (D - R) * (D - R);
  return {e2, e2 * e2, D, R};
}

GapRow finish(const Moments& m, std::size_t n_steps, std::size_t n_paths, const std::string& name) {
  const double np = static_cast<double>(n_paths);
  GapRow row;
  row.n_steps = n_steps;
  row.n_paths = n_paths;
  row.f_name = name;
  const double ms = m.s1 / np;
  row.l2_gap = std::sqrt(ms);
  const double var = n_paths > 1 ? std::max(0.0, (m.s2 / np - ms * ms) * np / (np - 1.0)) : 0.0;
  const double se = std::sqrt(var / np);
  row.ci95 = row.l2_gap > 0.0 ? 1.96 * se / (2.0 * row.l2_gap) : 0.0;
  row.mean_D = m.d / np;
  row.mean_R = m.r / np;
  return row;
}

}  // namespace

GapRow stratonovich_ito_gap(const PathEnsemble& E, const TestFunction& f) {
  return gap_study(E, f, {E.n_steps()}).front();
}

std::vector<GapRow> gap_study(const PathEnsemble& E, const TestFunction& f, const std::vector<std::size_t>& steps) {
  if (steps.empty()) throw InvalidArgument("no step counts requested");
  for (std::size_t s : steps)
    if (s == 0 || E.n_steps() % s != 0) throw InvalidArgument("step counts must divide the finest resolution");
  const LevelMoments total = parallel_sum<LevelMoments>(E.n_paths(), [&](std::size_t i) {
    const auto g = E.path(i);
    LevelMoments lm;
    for (std::size_t s : steps) lm.m.push_back(path_gap(g, E.n_steps() / s, f));
    return lm;
  });
  std::vector<GapRow> rows;
  for (std::size_t k = 0; k < steps.size(); ++k) rows.push_back(finish(total.m[k], steps[k], E.n_paths(), f.name));
  return rows;
}

double quadratic_variation_identity_defect(const PathEnsemble& E) {
  const TestFunction id = test_function("x");
  double worst = 0.0;
  for (std::size_t i = 0; i < E.n_paths(); ++i) {
    const auto g = E.path(i);
    double qv = 0.0;
    for (std::size_t k = 0; k + 1 < g.size(); ++k) qv += (g[k + 1] - g[k]) * (g[k + 1] - g[k]);
    const double D = path_gap(g, 1, id).d;
    worst = std::max(worst, std::abs(D - 0.5 * qv) / std::max(1.0, 0.5 * qv));
  }
  return worst;
}

std::vector<HolderRow> holder_diagnostic(const PathEnsemble& E, const std::vector<double>& exponents, double C) {
  for (double a : exponents)
    if (!(a > 0.0 && a < 1.0)) throw InvalidArgument("Holder exponents must lie in (0,1)");
  std::vector<double> count(exponents.size(), 0.0);
  for (std::size_t i = 0; i < E.n_paths(); ++i) {
    const auto g = E.path(i);
    const std::size_t n = E.n_steps();
    std::vector<bool> hit(exponents.size(), false);
    for (std::size_t lag = 1; lag <= n; lag *= 2) {
      double big = 0.0;
      for (std::size_t k = 0; k + lag <= n; ++k) big = std::max(big, std::abs(g[k + lag] - g[k]));
      const double h = static_cast<double>(lag) / static_cast<double>(n);
      for (std::size_t a = 0; a < exponents.size(); ++a)
        if (big / std::pow(h, exponents[a]) > C) hit[a] = true;
    }
    for (std::size_t a = 0; a < exponents.size(); ++a) count[a] += hit[a] ? 1.0 : 0.0;
  }
  std::vector<HolderRow> rows;
  for (std::size_t a = 0; a < exponents.size(); ++a)
    rows.push_back({exponents[a], count[a] / static_cast<double>(E.n_paths())});
  return rows;
}

EnsembleMoments ensemble_moments(const PathEnsemble& E) {
  double s = 0, s2 = 0, qv = 0;
  for (std::size_t i = 0; i < E.n_paths(); ++i) {
    const auto dw = E.increments(i);
    double end = 0, q = 0;
    for (double d : dw) {
      end += d;
      q += d * d;
    }
    s += end;
    s2 += end * end;
    qv += q;
  }
  const double n = static_cast<double>(E.n_paths());
  EnsembleMoments m;
  m.mean_end = s / n;
  m.var_end = n > 1 ? (s2 - s * s / n) / (n - 1.0) : 0.0;
  m.mean_qv = qv / n;
  return m;
}

void write_gap_csv(std::ostream& out, const std::vector<GapRow>& rows) {
  out << "n_steps,n_paths,f_name,l2_gap,ci95\n" << std::setprecision(17);
  for (const auto& r : rows) out << r.n_steps << ',' << r.n_paths << ',' << r.f_name << ',' << r.l2_gap << ',' << r.ci95 << '\n';
}

}  // namespace proplab
