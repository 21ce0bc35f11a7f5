#include "proplab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <set>

#include "proplab/axioms.hpp"
#include "proplab/bergman.hpp"
#include "proplab/errors.hpp"
#include "proplab/hilbert.hpp"
#include "proplab/lattice.hpp"
#include "proplab/models.hpp"
#include "proplab/quadrature.hpp"
#include "proplab/riemann.hpp"
#include "proplab/stochastic.hpp"
#include "proplab/vanest.hpp"

namespace proplab {

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

json cplx(Amplitude z) { return json::array({z.real(), z.imag()}); }

void add(ExperimentResult& r, std::string name, bool ok, double value, double threshold, std::string detail = "") {
  r.assertions.push_back({std::move(name), ok, value, threshold, std::move(detail)});
}

ModelSpec model_of(const ExperimentConfig& cfg) {
  ModelOptions o;
  o.sphere_sign = cfg.uncorrected_sign ? SphereSign::Verbatim : SphereSign::Corrected;
  return make_model(cfg.model, cfg.hbar, o);
}

int grid_n_of(const ExperimentConfig& cfg) {
  return cfg.grid_n > 0 ? cfg.grid_n : default_grid_n(cfg.command, cfg.model);
}

QuadratureGrid grid_of(const ExperimentConfig& cfg, const ModelSpec& m, int n) {
  if (!cfg.truncation) return default_grid(m, n);
  const TruncationBounds& b = *cfg.truncation;
  if (!(b.p_max > b.p_min) || !(b.q_max > b.q_min)) throw ConfigError("truncation bounds must be increasing");
  switch (m.name()) {
    case ModelName::FlatPQ:
    case ModelName::FlatSymmetric:
      return rectangle_grid(b.p_min, b.p_max, b.q_min, b.q_max, n, n);
    case ModelName::Hyperbolic:
      if (!(b.p_min > 0.0)) throw ConfigError("hyperbolic truncation needs p_min > 0");
      if (b.q_min != -b.q_max) throw ConfigError("hyperbolic truncation must be symmetric in q");
      return hyperbolic_grid(b.p_min, b.p_max, b.q_max, m.length_scale(), n, n);
    case ModelName::Sphere:
      break;
  }
  throw ConfigError("the sphere is compact; truncation does not apply");
}

AxiomTolerances tolerances_of(const ExperimentConfig& cfg) {
  AxiomTolerances t = default_tolerances(cfg.model);
  const auto& o = cfg.tolerances;
  if (o.normalization) t.normalization = *o.normalization;
  if (o.hermiticity) t.hermiticity = *o.hermiticity;
  if (o.idempotency) t.idempotency = *o.idempotency;
  if (o.first_jet) t.first_jet = *o.first_jet;
  return t;
}

// calibration that records failure instead of throwing
CalibrationResult calibrate_or_keep(const ModelSpec& m, const QuadratureGrid& g, const std::vector<ProbePair>& probes,
                                    double tol, bool* ok) {
  try {
    *ok = true;
    return calibrate_measure(m, g, probes, tol);
  } catch (const CalibrationFailed& e) {
    *ok = false;
    return {e.density(), e.residual(), probes.size(), m.with_density(e.density())};
  }
}

std::vector<ProbePair> first_n(const std::vector<ProbePair>& v, std::size_t n) {
  return {v.begin(), v.begin() + static_cast<std::ptrdiff_t>(std::min(n, v.size()))};
}

// ---------------------------------------------------------------- calibrate

ExperimentResult run_calibrate(const ExperimentConfig& cfg) {
  ExperimentResult r;
  const ModelSpec m = model_of(cfg);
  const int n = grid_n_of(cfg);
  const QuadratureGrid g = grid_of(cfg, m, n);
  const auto probes = probe_pairs(default_probe_box(m), 50);
  const double tol = tolerances_of(cfg).idempotency;
  bool ok = false;
  const CalibrationResult cal = calibrate_or_keep(m, g, probes, tol, &ok);
  const double ref = analytic_density(m);
  const double rel = std::abs(cal.c / ref - 1.0);
  add(r, "idempotency_residual", ok, cal.residual, tol);
  if (m.name() == ModelName::Sphere) add(r, "density_matches_rank", rel < 1e-6, rel, 1e-6, "c 4 pi R^2 = N + 1");
  r.results = {{"c", cal.c}, {"analytic_c", ref}, {"relative_difference", rel}, {"residual", cal.residual},
               {"probe_count", probes.size()}, {"grid_n", n}};
  r.table.columns = {"model", "hbar", "grid_n", "c", "analytic_c", "residual"};
  r.table.rows.push_back({std::string(to_string(m.name())), cfg.hbar, std::int64_t(n), cal.c, ref, cal.residual});
  return r;
}

// -------------------------------------------------------------------- check

ExperimentResult run_check(const ExperimentConfig& cfg) {
  ExperimentResult r;
  const ModelSpec m = model_of(cfg);
  const int n = grid_n_of(cfg);
  const QuadratureGrid g = grid_of(cfg, m, n);
  const auto probes = probe_pairs(default_probe_box(m), 1000);
  const AxiomTolerances tol = tolerances_of(cfg);
  bool ok = false;
  const CalibrationResult cal = calibrate_or_keep(m, g, first_n(probes, 50), tol.idempotency, &ok);
  const AxiomReport a = check_axioms(cal.model, g, probes, tol);
  add(r, "axiom_i_normalization", a.normalization_pass, a.normalization_max_err, tol.normalization);
  add(r, "axiom_ii_hermiticity", a.hermiticity_pass, a.hermiticity_max_err, tol.hermiticity);
  add(r, "axiom_iii_idempotency", a.idempotency_pass, a.idempotency_max_err, tol.idempotency);
  add(r, "axiom_iv_first_jet", a.first_jet_pass, a.first_jet_max_err, tol.first_jet);
  r.results = {{"model", a.model},
               {"c", cal.c},
               {"calibration_residual", cal.residual},
               {"calibration_ok", ok},
               {"grid_n", n},
               {"probe_count", a.probe_count},
               {"idempotency_probe_count", a.idempotency_probe_count},
               {"jet_probe_count", a.jet_probe_count},
               {"axioms_passed", a.passed()}};
  r.table.columns = {"axiom", "max_err", "tolerance", "passed"};
  auto row = [&](const char* name, double e, double t, bool p) {
    r.table.rows.push_back({std::string(name), e, t, std::int64_t(p)});
  };
  row("normalization", a.normalization_max_err, tol.normalization, a.normalization_pass);
  row("hermiticity", a.hermiticity_max_err, tol.hermiticity, a.hermiticity_pass);
  row("idempotency", a.idempotency_max_err, tol.idempotency, a.idempotency_pass);
  row("first_jet", a.first_jet_max_err, tol.first_jet, a.first_jet_pass);
  return r;
}

// --------------------------------------------------------------------- jets

ExperimentResult run_jets(const ExperimentConfig& cfg) {
  ExperimentResult r;
  const ModelSpec m = model_of(cfg);
  const auto pts = probe_points(default_probe_box(m), 20);
  const double h = default_jet_step(m);
  const double tol1 = tolerances_of(cfg).first_jet;
  double e1 = 0, e2 = 0, efull = 0, mixed = 0;
  r.table.columns = {"p", "q", "residual_first", "residual_second_diag", "residual_second_full", "mixed_re", "mixed_im"};
  for (const auto& x : pts) {
    const JetReport j = extract_second_jet(m, x, h);
    e1 = std::max(e1, j.residual_first);
    e2 = std::max(e2, j.residual_second_diag);
    efull = std::max(efull, j.residual_second_full);
    mixed = std::max(mixed, std::abs(j.mixed_term));
    r.table.rows.push_back({x.p, x.q, j.residual_first, j.residual_second_diag, j.residual_second_full,
                            j.mixed_term.real(), j.mixed_term.imag()});
  }
  add(r, "first_jet", e1 < tol1, e1, tol1, "d_y log Omega at the diagonal vs theta");
  add(r, "second_jet_diagonal", e2 < 1e-4, e2, 1e-4, "covariant Hessian diagonal vs -g_ii/(2 hbar)");
  if (m.name() == ModelName::FlatSymmetric)
    add(r, "second_jet_full_form", efull < 1e-6, efull, 1e-6, "whole Hessian including the mixed entry");
  r.results = {{"points", pts.size()},
               {"step", h},
               {"max_residual_first", e1},
               {"max_residual_second_diag", e2},
               {"max_residual_second_full", efull},
               {"max_abs_mixed_term", mixed}};
  return r;
}

// ---------------------------------------------------------------- curvature

ExperimentResult run_curvature(const ExperimentConfig& cfg) {
  ExperimentResult r;
  const ModelSpec m = model_of(cfg);
  const auto pts = probe_points(default_probe_box(m), 20);
  const double h = 10.0 * default_jet_step(m);
  const Amplitude exact(0.0, 1.0 / cfg.hbar);
  double worst = 0, worst_ref = 0;
  r.table.columns = {"p", "q", "value_re", "value_im", "reference_im"};
  for (const auto& x : pts) {
    const CurvatureValue v = curvature_from_cocycle(m, x, h);
    worst = std::max(worst, std::abs(v.value - exact));
    worst_ref = std::max(worst_ref, std::abs(v.value - v.reference));
    r.table.rows.push_back({x.p, x.q, v.value.real(), v.value.imag(), v.reference.imag()});
  }
  const double tol = 1e-5 * std::abs(exact);
  add(r, "curvature_equals_i_over_hbar", worst < tol, worst, tol);
  add(r, "curvature_equals_dtheta", worst_ref < tol, worst_ref, tol);
  r.results = {{"points", pts.size()}, {"step", h}, {"expected", cplx(exact)}, {"max_error", worst}};
  return r;
}

// ------------------------------------------------------------------ hilbert

QuadratureGrid flat_disk(double hbar, double radius, int n) {
  const int nr = n, nt = std::max(16, static_cast<int>(std::ceil(2.0 * n * radius / (radius + 3.0 * std::sqrt(hbar)))));
  return disk_grid({0.0, 0.0}, radius, nr, 2 * nt);
}

ExperimentResult run_hilbert(const ExperimentConfig& cfg) {
  ExperimentResult r;
  const ModelSpec m = model_of(cfg);
  const int n = grid_n_of(cfg);
  QuadratureGrid g;
  ModelSpec cal = m;
  std::vector<ProbePair> pairs;
  if (m.name() == ModelName::Sphere) {
    g = sphere_grid(m, n, n);
    bool ok = false;
    cal = calibrate_or_keep(m, g, probe_pairs(default_probe_box(m), 50), 1e-4, &ok).model;
    pairs = probe_pairs(default_probe_box(m), 100);
  } else if (m.name() == ModelName::Hyperbolic) {
    throw ConfigError("hilbert supports the flat and sphere models");
  } else {
    // disk of Liouville area 20 pi hbar, i.e. A / (2 pi hbar) = 10
    const double R = std::sqrt(20.0 * cfg.hbar);
    g = flat_disk(cfg.hbar, R, n);
    cal = m.with_density(analytic_density(m));
    const double s = 0.4 * std::sqrt(cfg.hbar);
    pairs = probe_pairs({-s, s, -s, s}, 100);
  }
  const DiscreteHilbert H = build_discrete_hilbert(cal, g);
  double recon = 0.0, diag = 0.0;
  for (const auto& pr : pairs) {
    recon = std::max(recon, std::abs(overlap(H, pr.y, pr.x) - cal.omega_kernel(pr.x, pr.y)));
    diag = std::max(diag, std::abs(overlap(H, pr.x, pr.x) - 1.0));
  }
  if (m.name() == ModelName::Sphere) {
    const int expect = sphere_degree(cfg.hbar) + 1;
    add(r, "rank_phys", H.rank_phys() == expect, H.rank_phys(), expect, "1/hbar + 1");
    add(r, "eigenvalue_clustering", H.max_eig_defect() < 0.05, H.max_eig_defect(), 0.05);
    add(r, "coherent_reconstruction", recon < 1e-4, recon, 1e-4, "|<y|x> - Omega(x,y)| over 100 pairs");
  } else {
    add(r, "rank_phys", std::abs(H.rank_phys() - 10) <= 2, H.rank_phys(), 10, "A/(2 pi hbar) = 10, within 2");
  }
  r.results = {{"grid_nodes", g.size()},
               {"rank_phys", H.rank_phys()},
               {"max_eig_defect", H.max_eig_defect()},
               {"low_rank", H.low_rank()},
               {"max_reconstruction_error", recon},
               {"max_diagonal_error", diag},
               {"threshold", H.threshold()}};
  r.table.columns = {"index", "eigenvalue"};
  const std::size_t shown = std::min<std::size_t>(H.spectrum().size(), H.rank_phys() + 8);
  for (std::size_t i = 0; i < shown; ++i) r.table.rows.push_back({std::int64_t(i), H.spectrum()[i]});
  return r;
}

// --------------------------------------------------------------------- star

double max_abs_entry(const Eigen::MatrixXcd& A) { return A.size() == 0 ? 0.0 : A.cwiseAbs().maxCoeff(); }

ExperimentResult run_star_flat(const ExperimentConfig& cfg, const ModelSpec& m, int n) {
  ExperimentResult r;
  const double R = std::sqrt(20.0);  // fixed disk: A / (2 pi hbar) = 10 at hbar = 1
  auto family = [&](double hb) {
    const ModelSpec mh = make_model(m.name(), hb);
    const int nh = static_cast<int>(std::ceil(n / std::sqrt(hb)));
    return build_discrete_hilbert(mh.with_density(analytic_density(mh)), flat_disk(hb, R, nh));
  };
  const PhaseFunction fq = [](const PhasePoint& x) { return x.q; };
  const PhaseFunction fp = [](const PhasePoint& x) { return x.p; };
  const PhaseFunction flin = [](const PhasePoint& x) { return 0.5 + x.p - 2.0 * x.q; };
  const PhaseFunction fq2 = [](const PhasePoint& x) { return x.q * x.q; };

  const DiscreteHilbert H = family(cfg.hbar);
  const auto one = quantize(H, [](const PhasePoint&) { return 1.0; }, "1");
  const double id_err = max_abs_entry(one.matrix - Eigen::MatrixXcd::Identity(H.rank_phys(), H.rank_phys()));
  add(r, "identity_quantization", id_err < 1e-10, id_err, 1e-10, "Q(1) = 1 on the physical space");

  const double s = 0.4 * std::sqrt(cfg.hbar);
  const auto probes = probe_points({-s, s, -s, s}, 10);
  double canon = 0.0;
  for (const auto& f : {fq, fp, flin}) canon = std::max(canon, special_observable_defect(H, f, probes));
  add(r, "canonical_linear", canon < 1e-3, canon, 1e-3, "f(x) = <x|Q(f)|x> for linear f");
  const double q2 = special_observable_defect(H, fq2, probes);

  const auto Q = quantize(H, fq, "q"), P = quantize(H, fp, "p");
  const Eigen::MatrixXcd C = Q.matrix * P.matrix - P.matrix * Q.matrix;
  double comm = 0.0;
  for (const auto& x : probes) {
    const Amplitude e = coherent_expectation(H, C, x);
    comm = std::max(comm, std::abs(e - Amplitude(0.0, cfg.hbar)) / cfg.hbar);
  }
  add(r, "commutator_expectation", comm < 0.05, comm, 0.05, "<x|[Q(q),Q(p)]|x> vs i hbar, relative");

  const std::vector<double> hbars{1.0, 0.5, 0.25};
  const auto rows = commutator_scaling_study(hbars, family, fq, fp, 1e-4);
  double worst = 0.0;
  for (const auto& row : rows) worst = std::max(worst, row.defect_over_hbar());
  add(r, "commutator_scaling_bounded", worst < 0.05, worst, 0.05, "defect/hbar at every hbar");

  r.results = {{"rank_phys", H.rank_phys()},
               {"identity_error", id_err},
               {"canonical_linear_defect", canon},
               {"q_squared_defect", q2},
               {"q_squared_defect_over_hbar", q2 / cfg.hbar},
               {"commutator_relative_error", comm}};
  r.table.columns = {"hbar", "grid_n", "rank_phys", "max_eig_defect", "commutator_defect", "full_space_defect"};
  for (const auto& row : rows)
    r.table.rows.push_back({row.hbar, std::int64_t(row.grid_n), std::int64_t(row.rank_phys), row.max_eig_defect,
                            row.commutator_defect, row.full_space_defect});
  return r;
}

ExperimentResult run_star_sphere(const ExperimentConfig& cfg, int n) {
  ExperimentResult r;
  auto family = [&](double hb) {
    const ModelSpec mh = make_model(ModelName::Sphere, hb);
    const QuadratureGrid g = sphere_grid(mh, n, n);
    return build_discrete_hilbert(mh.with_density(analytic_density(mh)), g);
  };
  const double R = sphere_radius(cfg.hbar);
  const PhaseFunction fp = [](const PhasePoint& x) { return x.p; };
  const PhaseFunction fq = [](const PhasePoint& x) { return x.q; };
  const DiscreteHilbert H = family(cfg.hbar);
  const auto one = quantize(H, [](const PhasePoint&) { return 1.0; }, "1");
  const double id_err = max_abs_entry(one.matrix - Eigen::MatrixXcd::Identity(H.rank_phys(), H.rank_phys()));
  add(r, "identity_quantization", id_err < 1e-10, id_err, 1e-10);

  const int dim = generated_algebra_dimension({quantize(H, fq).matrix, quantize(H, fp).matrix});
  const int full = H.rank_phys() * H.rank_phys();
  add(r, "irreducible_algebra", dim == full, dim, full, "algebra generated by Q(q), Q(p)");

  // x-coordinate of the embedded sphere; {p, g} is computed numerically
  const PhaseFunction gx = [R](const PhasePoint& x) {
    return std::sqrt(std::max(0.0, R * R - x.p * x.p)) * std::cos(x.q / R);
  };
  std::vector<double> hbars;
  for (int N : {2, 3, 4}) hbars.push_back(1.0 / N);
  const auto rows = commutator_scaling_study(hbars, family, fp, gx, 1.0);
  double worst = 0.0;
  r.table.columns = {"hbar", "grid_n", "rank_phys", "max_eig_defect", "commutator_defect", "expected_over_hbar"};
  for (const auto& row : rows) {
    const double N = std::round(1.0 / row.hbar);
    const double expect = 2.0 * N / ((N + 2.0) * (N + 2.0));
    worst = std::max(worst, std::abs(row.defect_over_hbar() - expect) / expect);
    r.table.rows.push_back({row.hbar, std::int64_t(row.grid_n), std::int64_t(row.rank_phys), row.max_eig_defect,
                            row.commutator_defect, expect});
  }
  add(r, "commutator_scaling_matches_spin", worst < 0.05, worst, 0.05, "defect/hbar vs 2N/(N+2)^2, relative");
  r.results = {{"rank_phys", H.rank_phys()}, {"identity_error", id_err}, {"algebra_dimension", dim}};
  return r;
}

ExperimentResult run_star(const ExperimentConfig& cfg) {
  const ModelSpec m = model_of(cfg);
  const int n = grid_n_of(cfg);
  if (m.name() == ModelName::Sphere) return run_star_sphere(cfg, n);
  if (m.name() == ModelName::Hyperbolic) throw ConfigError("star supports the flat and sphere models");
  return run_star_flat(cfg, m, n);
}

// ------------------------------------------------------------------ bergman

ExperimentResult run_bergman(const ExperimentConfig& cfg) {
  ExperimentResult r;
  std::vector<Cplx> probes;
  for (double rad : {0.0, 0.5, 1.0, 2.0, 10.0})
    for (int a = 0; a < 3; ++a) probes.push_back(std::polar(rad, 0.7 + 2.1 * a));
  r.table.columns = {"k", "diag_variation", "lemma_defect_unperturbed", "lemma_defect_perturbed"};
  json per_k = json::array();
  for (int k : {1, 2, 4}) {
    const BergmanKernel K = build_cp1_bergman(k, 64);
    const LemmaReport u = check_lemma_berg(K, probes);
    const LemmaReport p = check_lemma_berg(perturb_basis(K, 0, 1.5), probes);
    const std::string tag = "k" + std::to_string(k);
    add(r, tag + "_diag_constant", u.diag_variation < 1e-8, u.diag_variation, 1e-8);
    add(r, tag + "_lemma_unperturbed", u.max_defect < 1e-6, u.max_defect, 1e-6);
    add(r, tag + "_lemma_perturbed", p.max_defect > 1e-2, p.max_defect, 1e-2, "converse: defect must appear");
    per_k.push_back({{"k", k}, {"diag_variation", u.diag_variation}, {"lemma_defect_unperturbed", u.max_defect},
                     {"lemma_defect_perturbed", p.max_defect}, {"perturbed_diag_variation", p.diag_variation}});
    r.table.rows.push_back({std::int64_t(k), u.diag_variation, u.max_defect, p.max_defect});
  }
  const int kb = 32;
  const double rad = std::sqrt(2.0 * cfg.hbar * kb) / 2.0;
  const double dev_flat = truncated_bargmann_deviation(kb, cfg.hbar, rad, 2.0);
  const double dev_literal = truncated_bargmann_deviation(kb, cfg.hbar, rad, 1.0);
  add(r, "truncated_bargmann_constancy", dev_flat < 1e-6, dev_flat, 1e-6,
      "basis z^a exp(-|z|^2/4hbar), matching the flat kernel");
  r.results = {{"kernels", per_k},
               {"bargmann", {{"k", kb},
                             {"radius", rad},
                             {"deviation_flat_normalization", dev_flat},
                             {"deviation_literal_basis", dev_literal}}}};
  return r;
}

// ------------------------------------------------------------------ riemann

double richardson_limit(const std::function<double(std::size_t)>& S, std::size_t n) {
  const double a = S(n / 4), b = S(n / 2), c = S(n);
  const double r1 = 2.0 * b - a, r2 = 2.0 * c - b;  // removes the 1/n term
  return (4.0 * r2 - r1) / 3.0;                      // then the 1/n^2 term
}

ExperimentResult run_riemann(const ExperimentConfig& cfg) {
  ExperimentResult r;
  r.table.columns = {"check", "value", "oracle", "error"};
  auto row = [&](const std::string& name, double v, double o) {
    r.table.rows.push_back({name, v, o, std::abs(v - o)});
  };

  struct Integrand {
    std::string name;
    std::function<double(double)> f;
    double exact;
  };
  const std::vector<Integrand> ints{{"x2", [](double x) { return x * x; }, 1.0 / 3.0},
                                    {"cos", [](double x) { return std::cos(x); }, std::sin(1.0)},
                                    {"exp", [](double x) { return std::exp(x); }, std::exp(1.0) - 1.0}};
  double spread = 0.0, raw_spread = 0.0;
  json variants = json::array();
  for (const auto& in : ints) {
    const auto f = in.f;
    std::vector<std::pair<std::string, SummandF<1>>> Fs{
        {"left", summand_1d([f](double x, double y) { return Value(f(x) * (y - x)); }, f)},
        {"midpoint", summand_1d([f](double x, double y) { return Value(f(0.5 * (x + y)) * (y - x)); }, f)},
        {"trapezoid", summand_1d([f](double x, double y) { return Value(0.5 * (f(x) + f(y)) * (y - x)); }, f)},
        {"midpoint_plus_square",
         summand_1d([f](double x, double y) { return Value(f(0.5 * (x + y)) * (y - x) + (y - x) * (y - x)); }, f)},
        {"exponential", summand_1d([f](double x, double y) { return Value(std::expm1(f(0.5 * (x + y)) * (y - x))); }, f)}};
    std::vector<double> lim, raw;
    for (const auto& [name, F] : Fs) {
      auto S = [&F = F](std::size_t n) { return riemann_sum_1d(F, uniform_partition(0.0, 1.0, n)).real(); };
      lim.push_back(richardson_limit(S, 10000));
      raw.push_back(S(10000));
      row("limit_" + in.name + "_" + name, lim.back(), in.exact);
      variants.push_back({{"integrand", in.name}, {"summand", name}, {"sum_n10000", raw.back()}, {"limit", lim.back()}});
    }
    for (std::size_t i = 0; i < lim.size(); ++i)
      for (std::size_t j = i + 1; j < lim.size(); ++j) {
        spread = std::max(spread, std::abs(lim[i] - lim[j]));
        raw_spread = std::max(raw_spread, std::abs(raw[i] - raw[j]));
      }
  }
  add(r, "summand_independence", spread < 1e-6, spread, 1e-6, "pairwise difference of limits estimated at n = 10^4");

  // telescoping on an irregular partition
  std::mt19937_64 gen(cfg.seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> part{0.0, 1.0};
  for (int i = 0; i < 999; ++i) part.push_back(u(gen));
  std::sort(part.begin(), part.end());
  const auto tele = summand_1d([](double x, double y) { return Value(std::sin(y) - std::sin(x)); },
                               [](double x) { return std::cos(x); });
  const double tv = riemann_sum_1d(tele, part).real();
  const double terr = std::abs(tv - std::sin(1.0));
  add(r, "telescoping_exact", terr < 1e-14, terr, 1e-14);
  row("telescoping", tv, std::sin(1.0));

  const auto area = area_summand();
  const double sq = simplicial_riemann_sum(area, unit_square()).real();
  add(r, "unit_square_area", std::abs(sq - 1.0) < 1e-15, std::abs(sq - 1.0), 1e-15);
  row("unit_square", sq, 1.0);
  std::vector<double> derr;
  bool improving = true;
  for (int lev = 0; lev <= 4; ++lev) {
    const double a = simplicial_riemann_sum(area, disk_triangulation(lev)).real();
    derr.push_back(std::abs(a - kPi));
    if (lev > 0) improving = improving && derr[lev] < derr[lev - 1];
    row("disk_area_level_" + std::to_string(lev), a, kPi);
  }
  add(r, "disk_area", derr[4] < 2e-2, derr[4], 2e-2, "4 barycentric refinements");
  add(r, "disk_area_improving", improving, derr[4], derr[3], "error shrinks at every level");

  // substitution: a summand for dx pulled back along t -> t^2
  GateOptions gate1;
  const auto dx = summand_1d([](double x, double y) { return Value(std::sin(y - x)); }, [](double) { return 1.0; });
  const auto pb = pullback_summand<1, 1>(dx, [](const Vec<1>& t) { return Vec<1>{t[0] * t[0]}; }, gate1);
  const double sub = riemann_sum_1d(pb, uniform_partition(0.0, 1.0, 200)).real();
  add(r, "pullback_substitution", std::abs(sub - 1.0) < 1e-3, std::abs(sub - 1.0), 1e-3);
  row("pullback_substitution", sub, 1.0);

  // Green: x dy around the unit circle
  GateOptions gate2;
  gate2.box_lo = {-1.0, -1.0};
  gate2.box_hi = {1.0, 1.0};
  const auto xdy = make_summand<2>(
      2, [](std::span<const Vec<2>> v) { return Value(0.5 * (v[0][0] + v[1][0]) * (v[1][1] - v[0][1])); },
      [](const Vec<2>& x, std::span<const Vec<2>> d) { return Value(x[0] * d[0][1]); }, gate2);
  GateOptions gate3;
  gate3.box_hi = {2.0 * kPi};
  const auto circ = pullback_summand<1, 2>(
      xdy, [](const Vec<1>& t) { return Vec<2>{std::cos(t[0]), std::sin(t[0])}; }, gate3);
  const double green = riemann_sum_1d(circ, uniform_partition(0.0, 2.0 * kPi, 400)).real();
  add(r, "pullback_green", std::abs(green - kPi) < 1e-3, std::abs(green - kPi), 1e-3);
  row("pullback_green", green, kPi);

  // convergence orders
  const auto fx = [](double x) { return x; };
  const auto left = summand_1d([fx](double x, double y) { return Value(fx(x) * (y - x)); }, fx);
  const auto mid = summand_1d([fx](double x, double y) { return Value(std::sin(0.5 * (x + y)) * (y - x)); },
                              [](double x) { return std::sin(x); });
  const auto lr = convergence_study(left, 0.0, 1.0, 0.5, 16, 6);
  const auto mr = convergence_study(mid, 0.0, 1.0, 1.0 - std::cos(1.0), 16, 6);
  r.results = {{"limit_spread", spread},
               {"raw_spread_n10000", raw_spread},
               {"variants", variants},
               {"left_order", lr.back().fitted_order},
               {"midpoint_order", mr.back().fitted_order}};
  return r;
}

// ------------------------------------------------------------------ lattice

ExperimentResult run_lattice(const ExperimentConfig& cfg) {
  ExperimentResult r;
  const ModelSpec m = model_of(cfg);
  const int n = grid_n_of(cfg);
  const LatticeKernel L(m);
  if (m.name() == ModelName::FlatPQ || m.name() == ModelName::FlatSymmetric) {
    const QuadratureGrid g = grid_of(cfg, m, n);
    const LatticeConvolver C(L, g);
    const auto pairs = probe_pairs(default_probe_box(m), 20);
    const double qtol = 1e-6;
    double worst = 0, herm = 0;
    r.table.columns = {"n", "m_p", "m_q", "mp_p", "mp_q", "abs_error"};
    for (const auto& pr : pairs) {
      const auto v = C.upto(4, pr.x, pr.y);
      const auto w = C.upto(4, pr.y, pr.x);
      const Amplitude ex = m.omega_kernel(pr.x, pr.y);
      for (int k : {1, 2, 4}) {
        const double e = std::abs(v[k - 1] - ex);
        worst = std::max(worst, e);
        herm = std::max(herm, std::abs(std::conj(v[k - 1]) - w[k - 1]));
        r.table.rows.push_back({std::int64_t(k), pr.x.p, pr.x.q, pr.y.p, pr.y.q, e});
      }
    }
    add(r, "flat_fixed_point", worst < 5 * qtol, worst, 5 * qtol, "n in {1,2,4}, 20 endpoint pairs");
    add(r, "hermiticity", herm < qtol, herm, qtol);
    r.results = {{"grid_n", n}, {"max_error", worst}, {"max_hermiticity_defect", herm}, {"quadrature_tolerance", qtol}};
    return r;
  }
  if (m.name() != ModelName::Sphere) throw ConfigError("lattice supports the flat and sphere models");
  const double R = sphere_radius(cfg.hbar);
  const double d = 0.3;
  const PhasePoint a{0.1, 0.2};
  const PhasePoint b{R * std::cos(std::acos(a.p / R) + d / R), a.q};
  const QuadratureGrid g = sphere_grid(m, n, n);
  const auto rows = lattice_study(L, {1, 2, 3, 4, 5, 6, 7, 8}, g, a, b);
  const SphereSpectrum S = sphere_lattice_spectrum(cfg.hbar);
  r.table.columns = {"n", "m_p", "m_q", "mp_p", "mp_q", "abs_error", "continuum_error"};
  bool strict = true, cstrict = true;
  json errs = json::array(), cont = json::array();
  double prev = INFINITY, cprev = INFINITY;
  for (const auto& row : rows) {
    const double ce = sphere_continuum_error(S, d, row.n);
    strict = strict && row.abs_error < prev;
    cstrict = cstrict && ce < cprev;
    prev = row.abs_error;
    cprev = ce;
    errs.push_back(row.abs_error);
    cont.push_back(ce);
    r.table.rows.push_back({std::int64_t(row.n), a.p, a.q, b.p, b.q, row.abs_error, ce});
  }
  add(r, "sphere_strictly_decreasing", strict, rows.back().abs_error, rows.front().abs_error, "n = 1..8 on the grid");
  add(r, "sphere_improves", rows.back().abs_error < rows.front().abs_error, rows.back().abs_error,
      rows.front().abs_error, "error(8) < error(1)");
  r.results = {{"grid_n", n},
               {"distance", d},
               {"errors", errs},
               {"continuum_errors", cont},
               {"continuum_strictly_decreasing", cstrict},
               {"eigenvalue_ratio", S.eigenvalues.at(1) / S.eigenvalues.at(0)}};
  return r;
}

// --------------------------------------------------------------- stochastic

ExperimentResult run_stochastic(const ExperimentConfig& cfg) {
  ExperimentResult r;
  const std::size_t paths = 10000, fine = 4096;
  const PathEnsemble E = generate_ensemble(paths, fine, cfg.seed);
  std::vector<std::size_t> steps;
  for (std::size_t s = 64; s <= fine; s *= 2) steps.push_back(s);
  std::vector<GapRow> all;
  json fits = json::object();
  for (const char* fn : {"sin", "x", "x2"}) {
    const auto rows = gap_study(E, test_function(fn), steps);
    if (std::string(fn) == "sin") {
      bool dec = true;
      for (std::size_t i = 1; i < rows.size(); ++i) dec = dec && rows[i].l2_gap < rows[i - 1].l2_gap;
      add(r, "sin_gap_decreasing", dec, rows.back().l2_gap, rows.front().l2_gap);
      add(r, "sin_final_gap", rows.back().l2_gap < 0.02, rows.back().l2_gap, 0.02);
    }
    // least-squares slope of log gap against log dt
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& row : rows) {
      const double x = std::log(1.0 / row.n_steps), y = std::log(row.l2_gap);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double k = static_cast<double>(rows.size());
    fits[fn] = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  const double qv = quadratic_variation_identity_defect(E);
  add(r, "identity_D_equals_half_QV", qv < 1e-12, qv, 1e-12, "f(x) = x, relative");
  const auto hold = holder_diagnostic(E.coarsened(4), {0.3, 0.6});
  add(r, "holder_0.3", hold[0].violation_fraction < 0.05, hold[0].violation_fraction, 0.05);
  add(r, "holder_0.6", hold[1].violation_fraction > 0.95, hold[1].violation_fraction, 0.95);
  const auto mo = ensemble_moments(E);
  const double se = 1.0 / std::sqrt(static_cast<double>(paths));
  add(r, "endpoint_mean", std::abs(mo.mean_end) < 3 * se, std::abs(mo.mean_end), 3 * se);
  add(r, "endpoint_variance", std::abs(mo.var_end - 1.0) < 3 * std::sqrt(2.0) * se, std::abs(mo.var_end - 1.0),
      3 * std::sqrt(2.0) * se);
  r.results = {{"n_paths", paths},
               {"finest_steps", fine},
               {"fitted_rate", fits},
               {"qv_identity_defect", qv},
               {"holder", {{"0.3", hold[0].violation_fraction}, {"0.6", hold[1].violation_fraction}}},
               {"mean_end", mo.mean_end},
               {"var_end", mo.var_end}};
  r.table.columns = {"n_steps", "n_paths", "f_name", "l2_gap", "ci95"};
  for (const auto& row : all)
    r.table.rows.push_back({std::int64_t(row.n_steps), std::int64_t(row.n_paths), row.f_name, row.l2_gap, row.ci95});
  return r;
}

}  // namespace

const std::vector<std::string>& experiment_commands() {
  static const std::vector<std::string> c{"calibrate", "check", "jets",    "curvature", "hilbert",
                                          "star",      "bergman", "riemann", "lattice",   "stochastic"};
  return c;
}

int default_grid_n(const std::string& command, ModelName model) {
  if (command == "lattice") return model == ModelName::Sphere ? 96 : 48;
  if (command == "hilbert") return model == ModelName::Sphere ? 64 : 24;
  if (command == "star") return model == ModelName::Sphere ? 32 : 16;
  switch (model) {
    case ModelName::FlatPQ:
    case ModelName::FlatSymmetric:
      return 64;
    case ModelName::Sphere:
      return 64;
    case ModelName::Hyperbolic:
      return 200;
  }
  return 64;
}

bool ExperimentResult::passed() const {
  return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
}

std::vector<std::string> ExperimentResult::failures() const {
  std::vector<std::string> f;
  for (const auto& a : assertions)
    if (!a.passed) f.push_back(a.name);
  return f;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  static const std::map<std::string, ExperimentResult (*)(const ExperimentConfig&)> table{
      {"calibrate", run_calibrate}, {"check", run_check},     {"jets", run_jets},
      {"curvature", run_curvature}, {"hilbert", run_hilbert}, {"star", run_star},
      {"bergman", run_bergman},     {"riemann", run_riemann}, {"lattice", run_lattice},
      {"stochastic", run_stochastic}};
  const auto it = table.find(cfg.command);
  if (it == table.end()) throw ConfigError("unknown command: " + cfg.command);
  if (!(cfg.hbar > 0.0)) throw ConfigError("hbar must be positive");
  ExperimentResult r = it->second(cfg);
  r.command = cfg.command;
  return r;
}

// ------------------------------------------------------------------- config

namespace {

template <typename T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("wrong type for key '" + key + "'");
  }
}

void reject_unknown(const json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

}  // namespace

ExperimentConfig config_from_json(const json& j, ExperimentConfig c) {
  reject_unknown(j,
                 {"command", "model", "hbar", "grid_n", "truncation", "tolerances", "seed", "output_dir",
                  "uncorrected_sign", "threads", "deterministic"},
                 "config");
  if (j.contains("command")) {
    c.command = get_as<std::string>(j["command"], "command");
    const auto& cmds = experiment_commands();
    if (std::find(cmds.begin(), cmds.end(), c.command) == cmds.end()) throw ConfigError("unknown command: " + c.command);
  }
  if (j.contains("model")) {
    try {
      c.model = parse_model_name(get_as<std::string>(j["model"], "model"));
    } catch (const InvalidArgument& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains("hbar")) {
    c.hbar = get_as<double>(j["hbar"], "hbar");
    if (!(c.hbar > 0.0)) throw ConfigError("hbar must be positive");
  }
  if (j.contains("grid_n")) {
    c.grid_n = get_as<int>(j["grid_n"], "grid_n");
    if (c.grid_n < 0) throw ConfigError("grid_n must be non-negative");
  }
  if (j.contains("truncation")) {
    const json& t = j["truncation"];
    if (t.is_null()) {
      c.truncation.reset();
    } else {
      reject_unknown(t, {"p_min", "p_max", "q_min", "q_max"}, "truncation");
      for (const char* k : {"p_min", "p_max", "q_min", "q_max"})
        if (!t.contains(k)) throw ConfigError(std::string("truncation needs ") + k);
      c.truncation = TruncationBounds{get_as<double>(t["p_min"], "p_min"), get_as<double>(t["p_max"], "p_max"),
                                      get_as<double>(t["q_min"], "q_min"), get_as<double>(t["q_max"], "q_max")};
    }
  }
  if (j.contains("tolerances")) {
    const json& t = j["tolerances"];
    reject_unknown(t, {"normalization", "hermiticity", "idempotency", "first_jet"}, "tolerances");
    auto opt = [&](const char* k, std::optional<double>& dst) {
      if (t.contains(k)) {
        dst = get_as<double>(t[k], k);
        if (!(*dst > 0.0)) throw ConfigError(std::string("tolerance ") + k + " must be positive");
      }
    };
    opt("normalization", c.tolerances.normalization);
    opt("hermiticity", c.tolerances.hermiticity);
    opt("idempotency", c.tolerances.idempotency);
    opt("first_jet", c.tolerances.first_jet);
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<std::int64_t>() >= 0))
      throw ConfigError("seed must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("output_dir")) c.output_dir = get_as<std::string>(j["output_dir"], "output_dir");
  if (j.contains("uncorrected_sign")) c.uncorrected_sign = get_as<bool>(j["uncorrected_sign"], "uncorrected_sign");
  if (j.contains("threads")) {
    if (!j["threads"].is_number_unsigned() && !(j["threads"].is_number_integer() && j["threads"].get<std::int64_t>() >= 0))
      throw ConfigError("threads must be a non-negative integer");
    c.threads = j["threads"].get<unsigned>();
  }
  if (j.contains("deterministic")) c.deterministic = get_as<bool>(j["deterministic"], "deterministic");
  return c;
}

json config_to_json(const ExperimentConfig& c) {
  json tol = json::object();
  if (c.tolerances.normalization) tol["normalization"] = *c.tolerances.normalization;
  if (c.tolerances.hermiticity) tol["hermiticity"] = *c.tolerances.hermiticity;
  if (c.tolerances.idempotency) tol["idempotency"] = *c.tolerances.idempotency;
  if (c.tolerances.first_jet) tol["first_jet"] = *c.tolerances.first_jet;
  json j = {{"command", c.command},
            {"model", std::string(to_string(c.model))},
            {"hbar", c.hbar},
            {"grid_n", c.grid_n > 0 ? c.grid_n : default_grid_n(c.command, c.model)},
            {"tolerances", tol},
            {"seed", c.seed},
            {"output_dir", c.output_dir},
            {"uncorrected_sign", c.uncorrected_sign},
            {"threads", c.threads},
            {"deterministic", c.deterministic}};
  if (c.truncation)
    j["truncation"] = {{"p_min", c.truncation->p_min},
                       {"p_max", c.truncation->p_max},
                       {"q_min", c.truncation->q_min},
                       {"q_max", c.truncation->q_max}};
  else
    j["truncation"] = nullptr;
  return j;
}

}  // namespace proplab
