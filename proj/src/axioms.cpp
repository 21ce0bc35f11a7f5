#include "proplab/axioms.hpp"

#include <algorithm>
#include <cmath>

#include "proplab/errors.hpp"
#include "proplab/models.hpp"
#include "proplab/parallel.hpp"
#include "proplab/vanest.hpp"

namespace proplab {

AxiomTolerances default_tolerances(ModelName m) {
  AxiomTolerances t;
  t.idempotency = default_idempotency_tolerance(m);
  return t;
}

Propagator propagator_of(const ModelSpec& m) {
  if (!m.calibrated()) throw InvalidArgument("model has no measure density; calibrate first");
  const double c = *m.measure_density();
  return {[m](const PhasePoint& x, const PhasePoint& y) { return m.omega_kernel(x, y); },
          [m](const PhasePoint& x) { return m.theta(x); }, [c](const PhasePoint&) { return c; }};
}

namespace {

AxiomReport run_checks(const Propagator& prop, double hbar, const QuadratureGrid& grid,
                       const std::vector<ProbePair>& probes, const AxiomTolerances& tol, const AxiomCheckOptions& opt,
                       const std::vector<double>& weights, const std::function<JetReport(const PhasePoint&)>* model_jet) {
  if (probes.empty()) throw InvalidArgument("no probes");
  for (const auto& pr : probes)
    if (!grid.domain.contains(pr.x) || !grid.domain.contains(pr.y)) throw DomainError("probe outside the truncation");
  AxiomReport r;
  r.tol = tol;
  r.probe_count = probes.size();
  const auto& k = prop.kernel;

  for (const auto& pr : probes) {
    r.normalization_max_err = std::max({r.normalization_max_err, std::abs(k(pr.x, pr.x) - 1.0), std::abs(k(pr.y, pr.y) - 1.0)});
    r.hermiticity_max_err = std::max(r.hermiticity_max_err, std::abs(std::conj(k(pr.x, pr.y)) - k(pr.y, pr.x)));
  }

  const std::size_t ni = std::min(opt.idempotency_probes, probes.size());
  for (std::size_t a = 0; a < ni; ++a) {
    const auto& pr = probes[a];
    const Amplitude conv = parallel_sum<Amplitude>(grid.size(), [&](std::size_t i) {
      const PhasePoint& z = grid.nodes[i];
      return weights[i] * k(pr.x, z) * k(z, pr.y);
    });
    const double scale = std::sqrt(std::abs(k(pr.x, pr.x) * k(pr.y, pr.y)));
    r.idempotency_max_err = std::max(r.idempotency_max_err, std::abs(conv - k(pr.x, pr.y)) / scale);
  }
  r.idempotency_probe_count = ni;

  const std::size_t nj = std::min(opt.jet_probes, probes.size());
  const double h = opt.jet_step > 0.0 ? opt.jet_step : 1e-3 * std::sqrt(hbar);
  for (std::size_t a = 0; a < nj; ++a) {
    const PhasePoint& x = probes[a].x;
    double err = 0.0;
    if (model_jet) {
      err = (*model_jet)(x).residual_first;
    } else {
      // line-bundle form: d_y log Omega at the diagonal minus theta
      const auto g = log_gradient(k, x, h);
      const ConnectionOneForm th = prop.theta(x);
      err = std::max(std::abs(g[0] - th.coeff_p), std::abs(g[1] - th.coeff_q));
    }
    r.first_jet_max_err = std::max(r.first_jet_max_err, err);
  }
  r.jet_probe_count = nj;

  r.normalization_pass = r.normalization_max_err < tol.normalization;
  r.hermiticity_pass = r.hermiticity_max_err < tol.hermiticity;
  r.idempotency_pass = r.idempotency_max_err < tol.idempotency;
  r.first_jet_pass = r.first_jet_max_err < tol.first_jet;
  return r;
}

}  // namespace

AxiomReport check_axioms(const ModelSpec& m, const QuadratureGrid& grid, const std::vector<ProbePair>& probes,
                         const AxiomTolerances& tol, const AxiomCheckOptions& opt) {
  if (!m.calibrated()) throw InvalidArgument("model has no measure density; calibrate first");
  const QuadratureGrid wg = grid.with_density(*m.measure_density());
  const Propagator prop = propagator_of(m);
  const double h = opt.jet_step > 0.0 ? opt.jet_step : default_jet_step(m);
  const std::function<JetReport(const PhasePoint&)> jet = [&](const PhasePoint& x) {
    return extract_first_jet(m, x, h);
  };
  AxiomReport r = run_checks(prop, m.hbar(), wg, probes, tol, opt, wg.weights, &jet);
  r.model = std::string(to_string(m.name()));
  if (m.name() == ModelName::Sphere && !m.sign_corrected()) r.model += " (verbatim sign)";
  return r;
}

AxiomReport check_axioms(const Propagator& prop, double hbar, const QuadratureGrid& grid,
                         const std::vector<ProbePair>& probes, const AxiomTolerances& tol, const AxiomCheckOptions& opt) {
  std::vector<double> w(grid.size());
  const QuadratureGrid raw = grid.with_density(1.0);
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = raw.weights[i] * prop.density(raw.nodes[i]);
  AxiomReport r = run_checks(prop, hbar, raw, probes, tol, opt, w, nullptr);
  r.model = "propagator";
  return r;
}

Propagator normalize_propagator(const Propagator& raw, std::span<const PhasePoint> samples, double h) {
  if (!(h > 0.0)) throw InvalidArgument("differencing step must be positive");
  auto f = [k = raw.kernel](const PhasePoint& x) {
    const Amplitude v = k(x, x);
    if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v.real())))
      throw DomainError("raw kernel is not real on the diagonal");
    return v.real();
  };
  for (const auto& x : samples)
    if (!(f(x) > 0.0)) throw DomainError("raw kernel diagonal must be strictly positive");

  Propagator out;
  out.kernel = [k = raw.kernel, f](const PhasePoint& x, const PhasePoint& y) {
    const double fx = f(x), fy = f(y);
    if (!(fx > 0.0) || !(fy > 0.0)) throw DomainError("raw kernel diagonal must be strictly positive");
    return k(x, y) / std::sqrt(fx * fy);
  };
  out.density = [d = raw.density, f](const PhasePoint& x) { return f(x) * d(x); };
  out.theta = [t = raw.theta, f, h](const PhasePoint& x) {
    ConnectionOneForm th = t(x);
    const double dlp = (std::log(f({x.p + h, x.q})) - std::log(f({x.p - h, x.q}))) / (2.0 * h);
    const double dlq = (std::log(f({x.p, x.q + h})) - std::log(f({x.p, x.q - h}))) / (2.0 * h);
    th.coeff_p -= 0.5 * dlp;
    th.coeff_q -= 0.5 * dlq;
    return th;
  };
  return out;
}

}  // namespace proplab
