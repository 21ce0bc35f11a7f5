// One line per acceptance criterion. Exit status is nonzero if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "proplab/experiments.hpp"
#include "proplab/parallel.hpp"
#include "proplab/report.hpp"
#include "proplab/vanest.hpp"

using namespace proplab;

namespace {

struct Timed {
  ExperimentResult res;
  double seconds;
};

Timed timed(ExperimentConfig c) {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentResult r = run_experiment(c);
  return {std::move(r), std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()};
}

ExperimentConfig cfg(const std::string& cmd, ModelName m = ModelName::FlatPQ, double hbar = 1.0) {
  ExperimentConfig c;
  c.command = cmd;
  c.model = m;
  c.hbar = hbar;
  c.deterministic = true;
  return c;
}

const Assertion* find(const ExperimentResult& r, const std::string& name) {
  for (const auto& a : r.assertions)
    if (a.name == name) return &a;
  return nullptr;
}

bool ok(const ExperimentResult& r, const std::string& name) {
  const Assertion* a = find(r, name);
  return a && a->passed;
}

double val(const ExperimentResult& r, const std::string& name) {
  const Assertion* a = find(r, name);
  return a ? a->value : NAN;
}

int failures = 0;

void report(int id, bool pass, const std::string& what) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  failures += pass ? 0 : 1;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

const std::vector<ModelName> kModels{ModelName::FlatPQ, ModelName::FlatSymmetric, ModelName::Sphere,
                                     ModelName::Hyperbolic};

double model_hbar(ModelName m) { return m == ModelName::Sphere ? 0.5 : 1.0; }

void axiom_suite() {
  bool pass = true;
  std::string detail;
  for (auto m : kModels) {
    const auto t = timed(cfg("check", m, model_hbar(m)));
    const bool p = t.res.passed() && t.seconds < 60.0;
    pass = pass && p;
    detail += std::string(to_string(m)) + fmt(" idem=%.1e t=%.2fs; ", val(t.res, "axiom_iii_idempotency"), t.seconds);
  }
  report(1, pass, detail);
}

void first_jet() {
  bool pass = true;
  double worst = 0;
  for (auto m : kModels) {
    const auto r = run_experiment(cfg("jets", m, model_hbar(m)));
    pass = pass && ok(r, "first_jet");
    worst = std::max(worst, val(r, "first_jet"));
  }
  report(2, pass, fmt("max first-jet residual %.2e over 4 models x 20 points", worst));
}

void second_jet() {
  bool pass = true;
  double worst = 0;
  for (auto m : {ModelName::FlatSymmetric, ModelName::Sphere, ModelName::Hyperbolic}) {
    const auto r = run_experiment(cfg("jets", m, model_hbar(m)));
    pass = pass && ok(r, "second_jet_diagonal");
    worst = std::max(worst, val(r, "second_jet_diagonal"));
    if (m == ModelName::FlatSymmetric) pass = pass && ok(r, "second_jet_full_form");
  }
  const auto fs = run_experiment(cfg("jets", ModelName::FlatSymmetric));
  report(3, pass, fmt("max diagonal residual %.2e; flat-symmetric full form %.2e", worst,
                      val(fs, "second_jet_full_form")));
}

void sign_regression() {
  const double hbar = 0.5;
  const PhasePoint x{std::sqrt(hbar) / 2.0, 0.0};
  ModelOptions o;
  o.sphere_sign = SphereSign::Verbatim;
  const auto v = make_model(ModelName::Sphere, hbar, o);
  const auto c = make_model(ModelName::Sphere, hbar);
  const double ev = extract_first_jet(v, x, default_jet_step(v)).residual_first;
  const double ec = extract_first_jet(c, x, default_jet_step(c)).residual_first;
  report(4, ev >= 0.4 && ec < 1e-6, fmt("verbatim error %.3f (>= 0.4), corrected %.2e", ev, ec));
}

void hilbert() {
  bool pass = true;
  std::string detail;
  for (int k : {2, 3, 4}) {
    auto c = cfg("hilbert", ModelName::Sphere, 1.0 / k);
    c.grid_n = 64;
    const auto r = run_experiment(c);
    pass = pass && r.passed();
    detail += fmt("k=%.0f rank=%.0f recon=%.1e; ", k, val(r, "rank_phys"), val(r, "coherent_reconstruction"));
  }
  report(5, pass, detail);
}

void quantization() {
  const auto r = run_experiment(cfg("star", ModelName::FlatPQ));
  report(6, r.passed(),
         fmt("identity %.1e, canon %.1e, commutator %.1e rel, max defect/hbar %.1e", val(r, "identity_quantization"),
             val(r, "canonical_linear"), val(r, "commutator_expectation"), val(r, "commutator_scaling_bounded")));
}

void bergman() {
  const auto r = run_experiment(cfg("bergman"));
  bool pass = true;
  double diag = 0, unp = 0, per = INFINITY;
  for (int k : {1, 2, 4}) {
    const std::string t = "k" + std::to_string(k);
    pass = pass && ok(r, t + "_diag_constant") && ok(r, t + "_lemma_unperturbed") && ok(r, t + "_lemma_perturbed");
    diag = std::max(diag, val(r, t + "_diag_constant"));
    unp = std::max(unp, val(r, t + "_lemma_unperturbed"));
    per = std::min(per, val(r, t + "_lemma_perturbed"));
  }
  report(7, pass, fmt("diag variation %.1e, defect %.1e unperturbed, %.2f perturbed", diag, unp, per));
}

void riemann() {
  const auto r = run_experiment(cfg("riemann"));
  report(8, r.passed(),
         fmt("limit spread %.1e, telescoping %.1e, disk %.1e, Green %.1e", val(r, "summand_independence"),
             val(r, "telescoping_exact"), val(r, "disk_area"), val(r, "pullback_green")));
}

void lattice() {
  const auto f = run_experiment(cfg("lattice", ModelName::FlatPQ));
  const auto s = run_experiment(cfg("lattice", ModelName::Sphere, 0.5));
  std::string errs;
  for (const auto& e : s.results["errors"]) errs += fmt("%.2e ", e.get<double>());
  report(9, f.passed() && s.passed(),
         fmt("flat max error %.1e; ", val(f, "flat_fixed_point")) + "sphere n=1..8: " + errs);
}

void stochastic() {
  const auto t = timed(cfg("stochastic"));
  const auto& r = t.res;
  const bool pass = ok(r, "sin_gap_decreasing") && ok(r, "sin_final_gap") && ok(r, "identity_D_equals_half_QV") &&
                    t.seconds < 120.0;
  report(10, pass, fmt("final sin gap %.4f, QV identity %.1e, %.1fs", val(r, "sin_final_gap"),
                       val(r, "identity_D_equals_half_QV"), t.seconds));
}

std::string csv_of(const ExperimentConfig& c, unsigned threads) {
  set_thread_count(threads);
  std::ostringstream os;
  write_csv(os, run_experiment(c).table);
  return os.str();
}

void determinism() {
  std::vector<ExperimentConfig> runs;
  for (const auto& cmd : experiment_commands()) {
    ModelName m = ModelName::FlatPQ;
    if (cmd == "hilbert" || cmd == "lattice" || cmd == "star") m = ModelName::Sphere;
    if (cmd == "calibrate") m = ModelName::Hyperbolic;
    runs.push_back(cfg(cmd, m, m == ModelName::Sphere ? 0.5 : 1.0));
  }
  int same = 0;
  std::string diff;
  for (const auto& c : runs) {
    if (csv_of(c, 1) == csv_of(c, 3)) ++same;
    else diff += " " + c.command;
  }
  set_thread_count(0);
  report(11, same == static_cast<int>(runs.size()),
         fmt("%.0f/%.0f commands byte-identical across 1 and 3 threads", same, runs.size()) + diff);
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> criteria{axiom_suite, first_jet, second_jet, sign_regression,
                                                    hilbert,     quantization, bergman, riemann,
                                                    lattice,     stochastic,   determinism};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), false, std::string("threw: ") + e.what());
    }
  }
  std::printf("%d of %zu criteria failed\n", failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
