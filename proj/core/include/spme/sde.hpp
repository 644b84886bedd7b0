#ifndef SPME_SDE_HPP
#define SPME_SDE_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "spme/dissipative.hpp"
#include "spme/rng.hpp"
#include "spme/stats.hpp"

namespace spme {

/// Which basis carries the unit-rate Brownian motions. H_cylindrical expands
/// the noise over the H-orthonormal basis sqrt(mu_k) e_k, L2_cylindrical over
/// the L2-orthonormal e_k; the per-mode amplitudes on L2 coefficients are
/// mu_k^{(1-gamma)/2} and mu_k^{-gamma/2} respectively.
enum class NoiseConvention { HCylindrical, L2Cylindrical };

std::string to_string(NoiseConvention c);
NoiseConvention noise_convention_from_string(const std::string& s);

struct SamplerConfig {
  int n_modes = 8;
  int grid_points = 0;  // 0 = choose 4*n_modes
  double dt = 1e-3;
  long n_steps = 100000;
  long burn_in = -1;    // -1 = 20% of n_steps
  int thinning = 1;
  std::uint64_t seed = 42;
  NoiseConvention noise_convention = NoiseConvention::HCylindrical;
  double gamma = 1.0;
  double length = 1.0;
  double initial_amplitude = 0.0;  // start state: amplitude/k on each mode

  int effective_grid_points() const { return grid_points > 0 ? grid_points : 4 * n_modes; }
  long effective_burn_in() const { return burn_in >= 0 ? burn_in : n_steps / 5; }
  long retained() const { return (n_steps - effective_burn_in()) / thinning; }
  DomainSpec domain() const { return DomainSpec{length, effective_grid_points()}; }
  void validate() const;
};

/// Per-mode noise amplitudes sigma_k on L2 coefficients.
std::vector<double> noise_amplitudes(const SamplerConfig& cfg);

/// Number of modes whose two convention amplitudes coincide (mu_k == 1); zero
/// on any domain with L != k*pi, flagged in reports.
int conventions_agree_count(const SamplerConfig& cfg);

struct ChainState {
  SpectralField field;
  long step = 0;
  RngStream::State rng;
};

/// One Markov chain of the drift-implicit Galerkin scheme:
///   xi' = P_n J_dt(xi + sqrt(dt) * sum_k sigma_k eta_k e_k).
/// The resolvent call is the grid solver, so each step is unconditionally
/// stable for monotone Psi. Deterministic given (seed, chain index).
class GalerkinChain {
 public:
  GalerkinChain(PsiSpec psi, SamplerConfig cfg, ResolventConfig rcfg,
                std::uint32_t chain_index = 0);

  void step();
  void advance(long steps);

  const SpectralField& current() const { return state_.field; }
  long step_index() const { return state_.step; }
  ChainState state() const;
  void set_field(const SpectralField& x);

  const DstPlan& plan() const { return plan_; }
  const SamplerConfig& config() const { return cfg_; }
  const std::vector<double>& sigma() const { return sigma_; }

 private:
  PsiSpec psi_;
  SamplerConfig cfg_;
  ResolventConfig rcfg_;
  DstPlan plan_;
  std::vector<double> sigma_;
  RngStream rng_;
  ChainState state_;
};

struct EnsembleStats {
  long count = 0;
  std::vector<double> mode_mean;
  std::vector<double> mode_variance;
  std::vector<double> mode_mean_se;      // batch-means SE of the mean
  std::vector<double> mode_variance_se;  // batch-means SE of the second moment
};

/// A retained, thinned set of chain states plus everything needed to
/// reproduce it. Persists as CSV with a config-echo header.
struct SampleSet {
  SamplerConfig config;
  std::vector<long> steps;
  std::vector<SpectralField> states;

  long size() const { return static_cast<long>(states.size()); }
  EnsembleStats mode_stats(int batches = 64) const;

  void write_csv(std::ostream& os) const;
  static SampleSet read_csv(std::istream& is);
};

/// Burn in, then collect every thinning-th state. Deterministic given seed.
SampleSet sample_invariant(const PsiSpec& psi, const SamplerConfig& cfg,
                           const ResolventConfig& rcfg);

struct MomentEntry {
  std::string name;
  double mean = 0.0;
  double se = 0.0;
  double half_sample_mean = 0.0;  // doubling diagnostic input
  double doubling_rel_change = 0.0;
  bool doubling_ok = false;
};

struct MomentReport {
  std::vector<MomentEntry> entries;
  long count = 0;
  bool all_doubling_ok() const;
};

/// Ergodic averages of |Psi(x)|^2_{H1_0} (= |Lap Psi(x)|^2_H), the gradient
/// moment of |x|^{(r+1)/2} sign x, |x|^{2r}_{L^{2r}} and |x|_H^{2r}, with
/// batch-means errors and a half-vs-full stabilization diagnostic.
MomentReport moment_report(const SampleSet& samples, const PsiSpec& psi);

/// Fraction of samples with |x - center|_H <= radius, with a Wilson interval.
WilsonInterval ball_frequency(const SampleSet& samples, const SpectralField& center,
                              double radius, double z = 1.96);

}  // namespace spme

#endif
