#include "spme/kolmogorov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spme/errors.hpp"
#include "spme/parallel.hpp"

namespace spme {

double apply_N0(const CylinderFunction& phi, const SpectralField& x, const PsiSpec& psi,
                const SamplerConfig& cfg, const DstPlan& plan) {
  if (phi.outer.kind == OuterFunction::Kind::Constant) return 0.0;
  const int n = cfg.n_modes;
  const size_t p = phi.directions.size();

  const std::vector<double> t = phi.coordinates(x);
  const std::vector<double> grad = phi.outer.gradient(t);
  const std::vector<double> hess = phi.outer.hessian(t);

  // Drift term: -sum_i df_i <g_i, Psi(x)>_L2.
  GridField g = plan.inverse(x);
  psi.value_array(g.values, g.values);
  const SpectralField psi_hat = plan.forward(g, n);
  double drift = 0.0;
  for (size_t i = 0; i < p; ++i) {
    double ip = 0.0;
    const std::vector<double>& gi = phi.directions[i].coeff;
    const size_t kmax = std::min(gi.size(), psi_hat.coeff.size());
    for (size_t k = 0; k < kmax; ++k) ip += gi[k] * psi_hat.coeff[k];
    drift -= grad[i] * ip;
  }

  // Trace term: 1/2 sum_k sigma_k^2 sum_ij d2f_ij <e_k, g_i>_H <e_k, g_j>_H.
  const std::vector<double> sigma = noise_amplitudes(cfg);
  double trace = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double mu = eigenvalue(k, cfg.length);
    double acc = 0.0;
    for (size_t i = 0; i < p; ++i) {
      const double gik = (static_cast<int>(phi.directions[i].coeff.size()) >= k)
                             ? phi.directions[i].coeff[static_cast<size_t>(k - 1)] / mu
                             : 0.0;
      if (gik == 0.0) continue;
      for (size_t j = 0; j < p; ++j) {
        const double gjk = (static_cast<int>(phi.directions[j].coeff.size()) >= k)
                               ? phi.directions[j].coeff[static_cast<size_t>(k - 1)] / mu
                               : 0.0;
        acc += hess[i * p + j] * gik * gjk;
      }
    }
    trace += sigma[static_cast<size_t>(k - 1)] * sigma[static_cast<size_t>(k - 1)] * acc;
  }
  return 0.5 * trace + drift;
}

double truncated_trace_tail_ratio(const SamplerConfig& cfg, int tail_modes) {
  const std::vector<double> sigma = noise_amplitudes(cfg);
  double retained = 0.0;
  for (double s : sigma) retained += s * s;
  double tail = 0.0;
  const double expo =
      cfg.noise_convention == NoiseConvention::HCylindrical ? 1.0 - cfg.gamma : -cfg.gamma;
  for (int k = cfg.n_modes + 1; k <= cfg.n_modes + tail_modes; ++k)
    tail += std::pow(eigenvalue(k, cfg.length), expo);
  return retained > 0.0 ? tail / retained : 0.0;
}

bool ResidualReport::all_pass() const { return failures() == 0; }

int ResidualReport::failures() const {
  int f = 0;
  for (const auto& e : entries)
    if (!e.pass) ++f;
  return f;
}

namespace {

void check_sample_compatibility(const SamplerConfig& samples, const SamplerConfig& evaluator) {
  if (samples.noise_convention != evaluator.noise_convention)
    throw ConventionMismatch("sample set recorded with noise_convention=" +
                             to_string(samples.noise_convention) + " but evaluator expects " +
                             to_string(evaluator.noise_convention));
  if (samples.n_modes != evaluator.n_modes)
    throw ConventionMismatch("sample set has n_modes=" + std::to_string(samples.n_modes) +
                             ", evaluator expects " + std::to_string(evaluator.n_modes));
  if (samples.gamma != evaluator.gamma)
    throw ConventionMismatch("sample set has cov.gamma mismatch with evaluator");
  if (samples.length != evaluator.length)
    throw ConventionMismatch("sample set has domain.length mismatch with evaluator");
}

}  // namespace

ResidualReport invariance_residual(const SampleSet& samples,
                                   const std::vector<CylinderFunction>& battery,
                                   const PsiSpec& psi, const SamplerConfig& evaluator_cfg,
                                   double z, double bias_constant, int threads) {
  if (samples.size() < 1) throw ConfigError("invariance_residual: empty sample set");
  check_sample_compatibility(samples.config, evaluator_cfg);

  const long count = samples.size();
  const size_t nphi = battery.size();
  std::vector<std::vector<double>> values(nphi, std::vector<double>(static_cast<size_t>(count)));

  const DstPlan plan(evaluator_cfg.domain());
  parallel_for(static_cast<size_t>(count), threads, [&](size_t i) {
    const SpectralField& x = samples.states[i];
    for (size_t f = 0; f < nphi; ++f)
      values[f][i] = apply_N0(battery[f], x, psi, evaluator_cfg, plan);
  });

  ResidualReport rep;
  rep.battery_id = kBatteryId;
  rep.sample_count = count;
  rep.z = z;
  rep.bias_constant = bias_constant;
  rep.dt = samples.config.dt;
  rep.tail_ratio = truncated_trace_tail_ratio(evaluator_cfg, 3 * evaluator_cfg.n_modes);
  for (size_t f = 0; f < nphi; ++f) {
    const BatchMeans bm = batch_means(values[f]);
    ResidualEntry e;
    e.id = battery[f].id;
    e.estimate = bm.mean;
    e.se = bm.se;
    e.threshold = z * bm.se + bias_constant * samples.config.dt;
    e.pass = std::abs(bm.mean) <= e.threshold;
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

BiasCalibration calibrate_invariance_bias(const SamplerConfig& cfg, const ResolventConfig& rcfg,
                                          double z, int threads) {
  const PsiSpec lin = PsiSpec::linear(1.0);
  const SampleSet samples = sample_invariant(lin, cfg, rcfg);
  const std::vector<CylinderFunction> battery = make_battery_v1(cfg);
  ResidualReport rep = invariance_residual(samples, battery, lin, cfg, z, 0.0, threads);
  double c = 0.0;
  for (const auto& e : rep.entries)
    c = std::max(c, (std::abs(e.estimate) - z * e.se) / cfg.dt);
  BiasCalibration out;
  out.constant = 2.0 * std::max(c, 0.0);
  out.linear_report = std::move(rep);
  return out;
}

bool ExcessivityReport::all_pass() const {
  for (const auto& e : entries)
    if (!e.pass) return false;
  return true;
}

namespace {

bool outer_nonnegative(const OuterFunction& f) {
  switch (f.kind) {
    case OuterFunction::Kind::Constant:
    case OuterFunction::Kind::GaussianBump:
      return true;
    case OuterFunction::Kind::DampedPoly:
      for (int b : f.powers)
        if (b % 2 != 0) return false;
      return true;
    case OuterFunction::Kind::Trig:
      return false;
  }
  return false;
}

}  // namespace

ExcessivityReport excessivity_check(const SampleSet& samples,
                                    const std::vector<CylinderFunction>& battery,
                                    const PsiSpec& psi, const ResolventConfig& rcfg,
                                    double horizon, double lambda_nu, long max_restarts,
                                    double z, int threads) {
  if (samples.size() < 2) throw ConfigError("excessivity_check: need at least 2 samples");
  SamplerConfig cfg = samples.config;
  const long steps = std::lround(horizon / cfg.dt);
  if (steps < 1) throw ConfigError("excessivity_check: horizon must be at least one dt");
  cfg.n_steps = steps;
  cfg.burn_in = 0;

  std::vector<const CylinderFunction*> nonneg;
  for (const auto& phi : battery)
    if (outer_nonnegative(phi.outer)) nonneg.push_back(&phi);
  if (nonneg.empty()) throw ConfigError("excessivity_check: battery has no nonnegative member");

  const long restarts = std::min<long>(max_restarts, samples.size());
  const long stride = samples.size() / restarts;

  std::vector<std::vector<double>> phi0(nonneg.size(), std::vector<double>(static_cast<size_t>(restarts)));
  std::vector<std::vector<double>> phit(nonneg.size(), std::vector<double>(static_cast<size_t>(restarts)));

  parallel_for(static_cast<size_t>(restarts), threads, [&](size_t i) {
    const SpectralField& start = samples.states[static_cast<size_t>(static_cast<long>(i) * stride)];
    GalerkinChain chain(psi, cfg, rcfg, static_cast<std::uint32_t>(i));
    chain.set_field(start);
    chain.advance(steps);
    for (size_t f = 0; f < nonneg.size(); ++f) {
      phi0[f][i] = nonneg[f]->value(start);
      phit[f][i] = nonneg[f]->value(chain.current());
    }
  });

  ExcessivityReport rep;
  rep.lambda_nu = lambda_nu;
  rep.horizon = horizon;
  rep.restarts = restarts;
  const double growth = std::exp(lambda_nu * horizon);
  for (size_t f = 0; f < nonneg.size(); ++f) {
    ExcessivityEntry e;
    e.id = nonneg[f]->id;
    e.lhs = mean_of(phit[f]);
    const double mean0 = mean_of(phi0[f]);
    e.rhs = growth * mean0;
    std::vector<double> paired(static_cast<size_t>(restarts));
    for (long i = 0; i < restarts; ++i)
      paired[static_cast<size_t>(i)] = phit[f][static_cast<size_t>(i)] - growth * phi0[f][static_cast<size_t>(i)];
    e.paired_mean = mean_of(paired);
    e.paired_se = std::sqrt(variance_of(paired) / static_cast<double>(restarts));
    e.pass = e.paired_mean <= z * e.paired_se;
    e.lambda_consistent =
        (e.lhs > 0.0 && mean0 > 0.0) ? std::max(0.0, std::log(e.lhs / mean0) / horizon) : 0.0;
    rep.max_lambda_consistent = std::max(rep.max_lambda_consistent, e.lambda_consistent);
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

MartingaleReport martingale_residual(const SpectralField& x0, const CylinderFunction& phi,
                                     double t, long ensemble, const PsiSpec& psi,
                                     const SamplerConfig& cfg, const ResolventConfig& rcfg,
                                     double z, double bias_constant, int threads) {
  if (ensemble < 2) throw ConfigError("martingale_residual: ensemble must be >= 2");
  const long steps = std::lround(t / cfg.dt);
  SamplerConfig run = cfg;
  run.n_steps = std::max<long>(steps, 1);
  run.burn_in = 0;

  std::vector<double> residuals(static_cast<size_t>(ensemble));
  parallel_for(static_cast<size_t>(ensemble), threads, [&](size_t path) {
    GalerkinChain chain(psi, run, rcfg, static_cast<std::uint32_t>(path));
    chain.set_field(x0);
    const DstPlan& plan = chain.plan();
    const double phi0 = phi.value(x0);
    double integral = 0.0;
    double prev = apply_N0(phi, x0, psi, run, plan);
    for (long s = 0; s < steps; ++s) {
      chain.step();
      const double cur = apply_N0(phi, chain.current(), psi, run, plan);
      integral += 0.5 * run.dt * (prev + cur);
      prev = cur;
    }
    residuals[path] = phi.value(chain.current()) - phi0 - integral;
  });

  MartingaleReport rep;
  rep.paths = ensemble;
  rep.t = t;
  rep.dt = cfg.dt;
  rep.estimate = mean_of(residuals);
  rep.se = std::sqrt(variance_of(residuals) / static_cast<double>(ensemble));
  rep.threshold = z * rep.se + bias_constant * cfg.dt;
  rep.pass = std::abs(rep.estimate) <= rep.threshold;
  return rep;
}

MartingaleSweep martingale_dt_sweep(const SpectralField& x0, const CylinderFunction& phi,
                                    double t, long ensemble, const PsiSpec& psi,
                                    SamplerConfig cfg, const ResolventConfig& rcfg,
                                    const std::vector<double>& dts, double z,
                                    double bias_constant, int threads) {
  MartingaleSweep sweep;
  sweep.dts = dts;
  for (double dt : dts) {
    cfg.dt = dt;
    sweep.reports.push_back(
        martingale_residual(x0, phi, t, ensemble, psi, cfg, rcfg, z, bias_constant, threads));
  }
  // least-squares slope of log|residual| against log dt
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(dts.size());
  for (size_t i = 0; i < dts.size(); ++i) {
    const double lx = std::log(dts[i]);
    const double ly = std::log(std::max(std::abs(sweep.reports[i].estimate), 1e-300));
    sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
  }
  sweep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return sweep;
}

LyapunovReport lyapunov_functional(const SampleSet& samples, const PsiSpec& psi,
                                   const ResolventConfig& rcfg, double t_max,
                                   long paths_per_state, long max_states,
                                   std::uint64_t bootstrap_seed, int threads) {
  if (!(t_max >= 5.0))
    throw ConfigError("lyapunov_functional requires T_max >= 5 so the e^{-t} tail is < 1%");
  if (samples.size() < 1) throw ConfigError("lyapunov_functional: empty sample set");
  psi.require_r_at_least(2.0);

  SamplerConfig cfg = samples.config;
  const long steps = std::lround(t_max / cfg.dt);
  cfg.n_steps = steps;
  cfg.burn_in = 0;
  const long states = std::min<long>(max_states, samples.size());
  const long stride = samples.size() / states;
  // observe the integrand roughly every 0.02 time units
  const long obs_stride = std::max<long>(1, std::lround(0.02 / cfg.dt));
  const double r = psi.growth_r();

  std::vector<double> g_est(static_cast<size_t>(states));
  std::vector<double> l2_pow(static_cast<size_t>(states));

  parallel_for(static_cast<size_t>(states), threads, [&](size_t i) {
    const SpectralField& start = samples.states[static_cast<size_t>(static_cast<long>(i) * stride)];
    DstPlan plan(cfg.domain());
    auto integrand = [&](const SpectralField& x) {
      GridField g = plan.inverse(x);
      const double phi_val = phi_energy(psi, g).value;
      psi.value_array(g.values, g.values);
      return phi_val + grid::h10_seminorm_sq_fd(g);
    };
    double acc = 0.0;
    for (long p = 0; p < paths_per_state; ++p) {
      GalerkinChain chain(psi, cfg, rcfg,
                          static_cast<std::uint32_t>(static_cast<long>(i) * paths_per_state + p));
      chain.set_field(start);
      double integral = 0.0;
      double prev = integrand(start);  // weight e^{-0} = 1
      double t_prev = 0.0;
      long pos = 0;
      while (pos < steps) {
        const long chunk = std::min(obs_stride, steps - pos);
        chain.advance(chunk);
        pos += chunk;
        const double t_cur = static_cast<double>(pos) * cfg.dt;
        const double cur = std::exp(-t_cur) * integrand(chain.current());
        integral += 0.5 * (t_cur - t_prev) * (prev + cur);
        prev = cur;
        t_prev = t_cur;
      }
      acc += integral;
    }
    g_est[i] = acc / static_cast<double>(paths_per_state);
    const GridField g0 = DstPlan(cfg.domain()).inverse(start);
    double lr = 0.0;
    for (double v : g0.values) lr += std::abs(v) * std::abs(v);
    lr *= cfg.domain().spacing();
    l2_pow[i] = std::pow(lr, 0.5 * (r + 1.0));  // |x|_{L2}^{r+1}
  });

  LyapunovReport rep;
  rep.states = states;
  rep.paths_per_state = paths_per_state;
  rep.t_max = t_max;
  std::vector<double> ratios;
  for (long i = 0; i < states; ++i) {
    if (l2_pow[static_cast<size_t>(i)] < 1e-12) continue;  // degenerate-point convention
    ratios.push_back(g_est[static_cast<size_t>(i)] / l2_pow[static_cast<size_t>(i)]);
  }
  if (ratios.empty()) throw ConfigError("lyapunov_functional: all sampled states were ~0");
  rep.ratios = ratios;
  rep.min_ratio = *std::min_element(ratios.begin(), ratios.end());

  // percentile bootstrap over states for the min
  RngStream rng(bootstrap_seed, stream_id::make(stream_id::kBootstrap, 0));
  const int resamples = 1000;
  std::vector<double> mins(resamples);
  for (int b = 0; b < resamples; ++b) {
    double m = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < ratios.size(); ++i) {
      const size_t pick = static_cast<size_t>(rng.raw64() % ratios.size());
      m = std::min(m, ratios[pick]);
    }
    mins[static_cast<size_t>(b)] = m;
  }
  rep.ci_lower = percentile(mins, 0.025);
  rep.ci_upper = percentile(mins, 0.975);
  rep.pass = rep.min_ratio > 0.0 && rep.ci_lower > 0.0;
  return rep;
}

}  // namespace spme
