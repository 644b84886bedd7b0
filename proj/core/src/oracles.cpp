#include "spme/oracles.hpp"

#include <algorithm>
#include <cmath>

#include "spme/errors.hpp"

namespace spme {

bool OuVarianceReport::all_pass() const {
  for (const auto& m : modes)
    if (!m.pass) return false;
  return true;
}

OuVarianceReport ou_variance_check(double alpha, const SamplerConfig& cfg,
                                   const ResolventConfig& rcfg, double z) {
  const PsiSpec lin = PsiSpec::linear(alpha);
  const SampleSet samples = sample_invariant(lin, cfg, rcfg);
  const EnsembleStats stats = samples.mode_stats();
  const std::vector<double> sigma = noise_amplitudes(cfg);
  const DomainSpec dom = cfg.domain();

  OuVarianceReport rep;
  rep.retained = samples.size();
  rep.z = z;
  for (int k = 1; k <= cfg.n_modes; ++k) {
    const double muhat = grid::fd_eigenvalue(k, dom);
    const double rho = 1.0 / (1.0 + cfg.dt * alpha * muhat);
    const double s = sigma[static_cast<size_t>(k - 1)];
    const double exact = cfg.dt * s * s * rho * rho / (1.0 - rho * rho);
    OuModeCheck c;
    c.mode = k;
    c.empirical = stats.mode_variance[static_cast<size_t>(k - 1)];
    c.exact = exact;
    c.se = stats.mode_variance_se[static_cast<size_t>(k - 1)];
    c.pass = std::abs(c.empirical - c.exact) <= z * c.se;
    rep.modes.push_back(c);
  }
  return rep;
}

DensityKsReport scalar_density_ks(const PsiSpec& psi, const SamplerConfig& cfg,
                                  const ResolventConfig& rcfg, double threshold) {
  if (cfg.n_modes != 1)
    throw ConfigError("scalar_density_ks requires sde.n_modes = 1");
  const SampleSet samples = sample_invariant(psi, cfg, rcfg);

  std::vector<double> xs(static_cast<size_t>(samples.size()));
  for (long i = 0; i < samples.size(); ++i)
    xs[static_cast<size_t>(i)] = samples.states[static_cast<size_t>(i)].coeff[0];
  std::sort(xs.begin(), xs.end());

  // Tabulate the projected drift b(s) of the simulated system on a grid wide
  // enough to cover the samples, then build the stationary density
  // p ~ exp(2 B(s)/sigma^2), B' = b, by trapezoid quadrature.
  const double sigma = noise_amplitudes(cfg)[0];
  const double spread = std::max(std::abs(xs.front()), std::abs(xs.back()));
  const double s_max = std::max(1.5 * spread, 1e-6);
  const int grid_n = 4001;  // odd so s = 0 is a node
  const double ds = 2.0 * s_max / (grid_n - 1);
  const DstPlan plan(cfg.domain());

  auto drift = [&](double s) {
    SpectralField x = SpectralField::unit(cfg.length, 1, 1, s);
    const GridField g = plan.inverse(x);
    const GridField f = apply_F_grid(psi, g);
    return plan.forward(f, 1).coeff[0];
  };

  std::vector<double> b(static_cast<size_t>(grid_n));
  for (int i = 0; i < grid_n; ++i) b[static_cast<size_t>(i)] = drift(-s_max + ds * i);

  // B(s) = int_0^s b, anchored at the center node.
  std::vector<double> pot(static_cast<size_t>(grid_n), 0.0);
  const int mid = (grid_n - 1) / 2;
  for (int i = mid + 1; i < grid_n; ++i)
    pot[static_cast<size_t>(i)] = pot[static_cast<size_t>(i - 1)] +
                                  0.5 * ds * (b[static_cast<size_t>(i - 1)] + b[static_cast<size_t>(i)]);
  for (int i = mid - 1; i >= 0; --i)
    pot[static_cast<size_t>(i)] = pot[static_cast<size_t>(i + 1)] -
                                  0.5 * ds * (b[static_cast<size_t>(i)] + b[static_cast<size_t>(i + 1)]);

  std::vector<double> dens(static_cast<size_t>(grid_n));
  double pot_max = *std::max_element(pot.begin(), pot.end());
  for (int i = 0; i < grid_n; ++i)
    dens[static_cast<size_t>(i)] = std::exp(2.0 * (pot[static_cast<size_t>(i)] - pot_max) / (sigma * sigma));

  std::vector<double> cdf(static_cast<size_t>(grid_n), 0.0);
  for (int i = 1; i < grid_n; ++i)
    cdf[static_cast<size_t>(i)] = cdf[static_cast<size_t>(i - 1)] +
                                  0.5 * ds * (dens[static_cast<size_t>(i - 1)] + dens[static_cast<size_t>(i)]);
  const double total = cdf.back();
  for (double& c : cdf) c /= total;

  auto cdf_at = [&](double s) {
    if (s <= -s_max) return 0.0;
    if (s >= s_max) return 1.0;
    const double pos = (s + s_max) / ds;
    const int i = static_cast<int>(pos);
    const double frac = pos - i;
    return cdf[static_cast<size_t>(i)] * (1.0 - frac) + cdf[static_cast<size_t>(i + 1)] * frac;
  };

  double d = 0.0;
  const double n = static_cast<double>(xs.size());
  for (size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf_at(xs[i]);
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::abs(f - static_cast<double>(i) / n));
  }

  DensityKsReport rep;
  rep.ks_distance = d;
  rep.threshold = threshold;
  rep.samples = samples.size();
  rep.pass = d <= threshold;
  return rep;
}

}  // namespace spme
