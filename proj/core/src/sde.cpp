#include "spme/sde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "spme/errors.hpp"

namespace spme {

std::string to_string(NoiseConvention c) {
  return c == NoiseConvention::HCylindrical ? "H" : "L2";
}

NoiseConvention noise_convention_from_string(const std::string& s) {
  if (s == "H" || s == "h" || s == "H_cylindrical") return NoiseConvention::HCylindrical;
  if (s == "L2" || s == "l2" || s == "L2_cylindrical") return NoiseConvention::L2Cylindrical;
  throw ConfigError("unknown noise convention '" + s + "' (expected H or L2)");
}

void SamplerConfig::validate() const {
  if (n_modes < 1) throw ConfigError("sde.n_modes must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("sde.dt must be positive");
  if (n_steps < 1) throw ConfigError("sde.n_steps must be >= 1");
  if (effective_burn_in() >= n_steps) throw ConfigError("sde.burn_in must be < sde.n_steps");
  if (thinning < 1) throw ConfigError("sde.thinning must be >= 1");
  if (effective_grid_points() < 4 * n_modes)
    throw ConfigError("sde.grid_points must be >= 4 * n_modes to control aliasing");
  if (!(length > 0.0)) throw ConfigError("domain.length must be positive");
  CovarianceSpec{gamma}.validate();
}

std::vector<double> noise_amplitudes(const SamplerConfig& cfg) {
  std::vector<double> sigma(static_cast<size_t>(cfg.n_modes));
  const double expo =
      cfg.noise_convention == NoiseConvention::HCylindrical ? 0.5 * (1.0 - cfg.gamma) : -0.5 * cfg.gamma;
  for (int k = 1; k <= cfg.n_modes; ++k)
    sigma[static_cast<size_t>(k - 1)] = std::pow(eigenvalue(k, cfg.length), expo);
  return sigma;
}

int conventions_agree_count(const SamplerConfig& cfg) {
  int agree = 0;
  for (int k = 1; k <= cfg.n_modes; ++k)
    if (std::abs(eigenvalue(k, cfg.length) - 1.0) < 1e-12) ++agree;
  return agree;
}

GalerkinChain::GalerkinChain(PsiSpec psi, SamplerConfig cfg, ResolventConfig rcfg,
                             std::uint32_t chain_index)
    : psi_(std::move(psi)),
      cfg_(cfg),
      rcfg_(rcfg),
      plan_(cfg.domain()),
      sigma_(noise_amplitudes(cfg)),
      rng_(cfg.seed, stream_id::make(stream_id::kChain, chain_index)) {
  cfg_.validate();
  rcfg_.validate();
  state_.field = SpectralField::zeros(cfg_.length, cfg_.n_modes);
  if (cfg_.initial_amplitude != 0.0)
    for (int k = 1; k <= cfg_.n_modes; ++k)
      state_.field.coeff[static_cast<size_t>(k - 1)] =
          cfg_.initial_amplitude / static_cast<double>(k);
  state_.step = 0;
  state_.rng = rng_.state();
}

ChainState GalerkinChain::state() const { return state_; }

void GalerkinChain::set_field(const SpectralField& x) {
  if (x.modes() != cfg_.n_modes)
    throw DimensionError("GalerkinChain::set_field: mode count mismatch");
  state_.field = x;
  state_.field.length = cfg_.length;
}

void GalerkinChain::step() {
  const double root_dt = std::sqrt(cfg_.dt);
  SpectralField noisy = state_.field;
  for (int k = 0; k < cfg_.n_modes; ++k)
    noisy.coeff[static_cast<size_t>(k)] += root_dt * sigma_[static_cast<size_t>(k)] * rng_.gaussian();
  const GridField g = plan_.inverse(noisy);
  YosidaResult solve;
  try {
    solve = resolvent(psi_, g, cfg_.dt, rcfg_);
  } catch (const SolverError& e) {
    throw SolverError("chain step " + std::to_string(state_.step + 1) + ": " + e.what(),
                      e.last_residual, e.iterations);
  }
  state_.field = plan_.forward(solve.resolvent, cfg_.n_modes);
  ++state_.step;
  state_.rng = rng_.state();
}

void GalerkinChain::advance(long steps) {
  for (long i = 0; i < steps; ++i) step();
}

EnsembleStats SampleSet::mode_stats(int batches) const {
  EnsembleStats st;
  st.count = size();
  const int n = config.n_modes;
  st.mode_mean.resize(static_cast<size_t>(n));
  st.mode_variance.resize(static_cast<size_t>(n));
  st.mode_mean_se.resize(static_cast<size_t>(n));
  st.mode_variance_se.resize(static_cast<size_t>(n));
  std::vector<double> series(static_cast<size_t>(st.count));
  for (int k = 0; k < n; ++k) {
    for (long i = 0; i < st.count; ++i)
      series[static_cast<size_t>(i)] = states[static_cast<size_t>(i)].coeff[static_cast<size_t>(k)];
    const BatchMeans bm = batch_means(series, batches);
    st.mode_mean[static_cast<size_t>(k)] = bm.mean;
    st.mode_mean_se[static_cast<size_t>(k)] = bm.se;
    for (long i = 0; i < st.count; ++i) series[static_cast<size_t>(i)] *= series[static_cast<size_t>(i)];
    const BatchMeans bm2 = batch_means(series, batches);
    st.mode_variance[static_cast<size_t>(k)] = bm2.mean - bm.mean * bm.mean;
    st.mode_variance_se[static_cast<size_t>(k)] = bm2.se;
  }
  return st;
}

SampleSet sample_invariant(const PsiSpec& psi, const SamplerConfig& cfg,
                           const ResolventConfig& rcfg) {
  cfg.validate();
  GalerkinChain chain(psi, cfg, rcfg);
  SampleSet out;
  out.config = cfg;
  out.steps.reserve(static_cast<size_t>(cfg.retained()));
  out.states.reserve(static_cast<size_t>(cfg.retained()));
  const long burn = cfg.effective_burn_in();
  for (long s = 1; s <= cfg.n_steps; ++s) {
    chain.step();
    if (s > burn && (s - burn) % cfg.thinning == 0) {
      out.steps.push_back(s);
      out.states.push_back(chain.current());
    }
  }
  return out;
}

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void SampleSet::write_csv(std::ostream& os) const {
  os << "# spme-samples v1\n";
  os << "# rng.algorithm=" << RngStream::kAlgorithm << "\n";
  os << "# cov.gamma=" << fmt17(config.gamma) << "\n";
  os << "# domain.length=" << fmt17(config.length) << "\n";
  os << "# sde.burn_in=" << config.effective_burn_in() << "\n";
  os << "# sde.dt=" << fmt17(config.dt) << "\n";
  os << "# sde.grid_points=" << config.effective_grid_points() << "\n";
  os << "# sde.initial_amplitude=" << fmt17(config.initial_amplitude) << "\n";
  os << "# sde.n_modes=" << config.n_modes << "\n";
  os << "# sde.n_steps=" << config.n_steps << "\n";
  os << "# sde.noise_convention=" << to_string(config.noise_convention) << "\n";
  os << "# sde.seed=" << config.seed << "\n";
  os << "# sde.thinning=" << config.thinning << "\n";
  os << "step";
  for (int k = 1; k <= config.n_modes; ++k) os << ",x" << k;
  os << "\n";
  for (long i = 0; i < size(); ++i) {
    os << steps[static_cast<size_t>(i)];
    for (int k = 0; k < config.n_modes; ++k)
      os << ',' << fmt17(states[static_cast<size_t>(i)].coeff[static_cast<size_t>(k)]);
    os << "\n";
  }
}

SampleSet SampleSet::read_csv(std::istream& is) {
  SampleSet out;
  std::string line;
  if (!std::getline(is, line) || line.rfind("# spme-samples", 0) != 0)
    throw ConfigError("not a spme sample file (missing '# spme-samples' header)");
  std::map<std::string, std::string> meta;
  while (is.peek() == '#') {
    std::getline(is, line);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    std::string key = line.substr(2, eq - 2);
    meta[key] = line.substr(eq + 1);
  }
  auto need = [&meta](const std::string& key) {
    auto it = meta.find(key);
    if (it == meta.end()) throw ConfigError("sample file missing header key " + key);
    return it->second;
  };
  out.config.gamma = std::stod(need("cov.gamma"));
  out.config.length = std::stod(need("domain.length"));
  out.config.burn_in = std::stol(need("sde.burn_in"));
  out.config.dt = std::stod(need("sde.dt"));
  out.config.grid_points = std::stoi(need("sde.grid_points"));
  out.config.initial_amplitude = std::stod(need("sde.initial_amplitude"));
  out.config.n_modes = std::stoi(need("sde.n_modes"));
  out.config.n_steps = std::stol(need("sde.n_steps"));
  out.config.noise_convention = noise_convention_from_string(need("sde.noise_convention"));
  out.config.seed = std::stoull(need("sde.seed"));
  out.config.thinning = std::stoi(need("sde.thinning"));

  std::getline(is, line);  // column header
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::getline(ss, tok, ',');
    out.steps.push_back(std::stol(tok));
    SpectralField x = SpectralField::zeros(out.config.length, out.config.n_modes);
    for (int k = 0; k < out.config.n_modes; ++k) {
      if (!std::getline(ss, tok, ','))
        throw ConfigError("sample file row has too few columns");
      x.coeff[static_cast<size_t>(k)] = std::stod(tok);
    }
    out.states.push_back(std::move(x));
  }
  return out;
}

bool MomentReport::all_doubling_ok() const {
  for (const auto& e : entries)
    if (!e.doubling_ok) return false;
  return true;
}

MomentReport moment_report(const SampleSet& samples, const PsiSpec& psi) {
  if (samples.size() < 1) throw ConfigError("moment_report requires a nonempty sample set");
  const long n = samples.size();
  const double r = psi.growth_r();
  const DomainSpec dom = samples.config.domain();
  DstPlan plan(dom);
  const double h = dom.spacing();

  std::vector<std::vector<double>> series(4, std::vector<double>(static_cast<size_t>(n)));
  GridField g = GridField::zeros(dom);
  GridField w = GridField::zeros(dom);
  for (long i = 0; i < n; ++i) {
    const SpectralField& x = samples.states[static_cast<size_t>(i)];
    g = plan.inverse(x);
    // |Psi(x)|^2_{H1_0} = |Lap Psi(x)|^2_H, forward-difference quadrature
    psi.value_array(g.values, w.values);
    series[0][static_cast<size_t>(i)] = grid::h10_seminorm_sq_fd(w);
    // |grad(|x|^{(r+1)/2} sign x)|^2_{L2}
    for (int j = 0; j < dom.grid_points; ++j) {
      const double v = g.values[static_cast<size_t>(j)];
      w.values[static_cast<size_t>(j)] =
          (v >= 0.0 ? 1.0 : -1.0) * std::pow(std::abs(v), 0.5 * (r + 1.0));
    }
    series[1][static_cast<size_t>(i)] = grid::h10_seminorm_sq_fd(w);
    // |x|^{2r}_{L^{2r}}
    double l2r = 0.0;
    for (int j = 0; j < dom.grid_points; ++j)
      l2r += std::pow(std::abs(g.values[static_cast<size_t>(j)]), 2.0 * r);
    series[2][static_cast<size_t>(i)] = h * l2r;
    // |x|_H^{2r}
    series[3][static_cast<size_t>(i)] = std::pow(inner(x, x, NormKind::Hminus1), r);
  }

  const char* names[4] = {"psi_h10_sq", "signed_power_grad_sq", "l2r_norm", "h_norm_2r"};
  MomentReport rep;
  rep.count = n;
  for (int obs = 0; obs < 4; ++obs) {
    MomentEntry e;
    e.name = names[obs];
    const BatchMeans full = batch_means(series[static_cast<size_t>(obs)]);
    const BatchMeans half = batch_means(
        std::span<const double>(series[static_cast<size_t>(obs)].data(), static_cast<size_t>(n / 2)));
    e.mean = full.mean;
    e.se = full.se;
    e.half_sample_mean = half.mean;
    const double pooled = std::sqrt(full.se * full.se + half.se * half.se);
    e.doubling_rel_change =
        std::abs(full.mean - half.mean) / std::max(std::abs(full.mean), 1e-300);
    e.doubling_ok = std::abs(full.mean - half.mean) <= 3.0 * pooled;
    rep.entries.push_back(std::move(e));
  }
  return rep;
}

WilsonInterval ball_frequency(const SampleSet& samples, const SpectralField& center,
                              double radius, double z) {
  if (!(radius >= 0.0)) throw ConfigError("ball_frequency requires radius >= 0");
  long hits = 0;
  for (const SpectralField& x : samples.states) {
    const SpectralField d = subtract(x, center);
    if (norm(d, NormKind::Hminus1) <= radius) ++hits;
  }
  return wilson_interval(hits, samples.size(), z);
}

}  // namespace spme
