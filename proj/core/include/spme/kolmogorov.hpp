#ifndef SPME_KOLMOGOROV_HPP
#define SPME_KOLMOGOROV_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "spme/cylinder.hpp"
#include "spme/sde.hpp"

namespace spme {

/// N0 phi(x) = 1/2 sum_k w_k D2phi(b_k, b_k) + Dphi(x)(Lap Psi(x)) for the
/// n-mode system. The trace weights follow the sampler's noise convention
/// (H_cylindrical: b_k = sqrt(mu_k) e_k with w_k = lambda_k; equivalently
/// sigma_k^2 on L2 coordinates). The drift term is evaluated exactly as
/// -sum_i df_i <g_i, Psi(x)>_L2 -- no Laplacian is applied numerically.
double apply_N0(const CylinderFunction& phi, const SpectralField& x, const PsiSpec& psi,
                const SamplerConfig& cfg, const DstPlan& plan);

/// Covariance mass dropped by the n-mode truncation, relative to the retained
/// mass (diagnostic only; the cylinder directions live in E_n, so the dropped
/// trace-term contribution is identically zero for the battery itself).
double truncated_trace_tail_ratio(const SamplerConfig& cfg, int tail_modes);

struct ResidualEntry {
  std::string id;
  double estimate = 0.0;
  double se = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct ResidualReport {
  std::string battery_id;
  std::vector<ResidualEntry> entries;
  long sample_count = 0;
  double z = 3.0;
  double bias_constant = 0.0;
  double dt = 0.0;
  double tail_ratio = 0.0;
  bool all_pass() const;
  int failures() const;
};

/// Monte Carlo mean of N0 phi over an invariant sample set, per battery
/// member, with batch-means errors; pass iff |mean| <= z*SE + C*dt. Throws
/// ConventionMismatch if the sample set was recorded under a different noise
/// convention (or mismatched n/gamma/dt/length) than the evaluator config.
ResidualReport invariance_residual(const SampleSet& samples,
                                   const std::vector<CylinderFunction>& battery,
                                   const PsiSpec& psi, const SamplerConfig& evaluator_cfg,
                                   double z, double bias_constant, int threads = 1);

struct BiasCalibration {
  double constant = 0.0;
  ResidualReport linear_report;
};

/// Runs the alpha = 1 linear surrogate at the same discretization and returns
/// the smallest C (with a x2 safety factor) that makes every battery member
/// pass at the given z. This pins the O(dt) allowance from a system whose
/// stationary law is exactly known.
BiasCalibration calibrate_invariance_bias(const SamplerConfig& cfg, const ResolventConfig& rcfg,
                                          double z, int threads = 1);

struct ExcessivityEntry {
  std::string id;
  double lhs = 0.0;          // mean phi(X_t) over restarts
  double rhs = 0.0;          // e^{lambda t} * mean phi(X_0)
  double paired_mean = 0.0;  // mean of phi(X_t) - e^{lambda t} phi(X_0)
  double paired_se = 0.0;
  double lambda_consistent = 0.0;  // smallest lambda making this member pass
  bool pass = false;
};

struct ExcessivityReport {
  std::vector<ExcessivityEntry> entries;
  double lambda_nu = 0.0;
  double horizon = 0.0;
  long restarts = 0;
  double max_lambda_consistent = 0.0;
  bool all_pass() const;
};

/// Estimates int P_t phi d(nu_hat) by restarting chains from sampled states,
/// and asserts it is <= e^{lambda_nu t} int phi d(nu_hat) within z paired
/// standard errors, for every nonnegative battery member.
ExcessivityReport excessivity_check(const SampleSet& samples,
                                    const std::vector<CylinderFunction>& battery,
                                    const PsiSpec& psi, const ResolventConfig& rcfg,
                                    double horizon, double lambda_nu, long max_restarts,
                                    double z = 3.0, int threads = 1);

struct MartingaleReport {
  double estimate = 0.0;
  double se = 0.0;
  double threshold = 0.0;
  double t = 0.0;
  double dt = 0.0;
  long paths = 0;
  bool pass = false;
};

/// E[phi(X_t) - phi(x0) - int_0^t N0 phi(X_s) ds] over an ensemble of paths
/// from x0, the time integral by the trapezoid rule along each path.
MartingaleReport martingale_residual(const SpectralField& x0, const CylinderFunction& phi,
                                     double t, long ensemble, const PsiSpec& psi,
                                     const SamplerConfig& cfg, const ResolventConfig& rcfg,
                                     double z, double bias_constant, int threads = 1);

struct MartingaleSweep {
  std::vector<double> dts;
  std::vector<MartingaleReport> reports;
  double slope = 0.0;  // least-squares slope of log|residual| vs log dt
};

MartingaleSweep martingale_dt_sweep(const SpectralField& x0, const CylinderFunction& phi,
                                    double t, long ensemble, const PsiSpec& psi,
                                    SamplerConfig cfg, const ResolventConfig& rcfg,
                                    const std::vector<double>& dts, double z,
                                    double bias_constant, int threads = 1);

struct LyapunovReport {
  double min_ratio = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  long states = 0;
  long paths_per_state = 0;
  double t_max = 0.0;
  bool pass = false;  // min ratio > 0 with CI excluding 0
  std::vector<double> ratios;
};

/// Feynman-Kac estimate g(x) = E int_0^{T_max} e^{-s} (Phi + |Lap Psi|_H^2)(X_s^x) ds
/// per sampled state; reports min over states of g(x)/|x|^{r+1}_{L2} with a
/// percentile bootstrap CI (states with |x|_{L2} below floor are excluded).
LyapunovReport lyapunov_functional(const SampleSet& samples, const PsiSpec& psi,
                                   const ResolventConfig& rcfg, double t_max,
                                   long paths_per_state, long max_states,
                                   std::uint64_t bootstrap_seed = 7, int threads = 1);

}  // namespace spme

#endif
