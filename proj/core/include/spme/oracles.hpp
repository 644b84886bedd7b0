#ifndef SPME_ORACLES_HPP
#define SPME_ORACLES_HPP

#include <string>
#include <vector>

#include "spme/sde.hpp"

namespace spme {

struct OuModeCheck {
  int mode = 0;
  double empirical = 0.0;
  double exact = 0.0;
  double se = 0.0;
  bool pass = false;
};

struct OuVarianceReport {
  std::vector<OuModeCheck> modes;
  long retained = 0;
  double z = 3.0;
  bool all_pass() const;
};

/// Linear test drift Psi(s) = alpha*s: each mode of the chain is the exact
/// AR(1) recursion x' = rho (x + sqrt(dt) sigma eta) with
/// rho = 1/(1 + dt*alpha*muhat_k), whose stationary variance is
/// dt sigma^2 rho^2/(1 - rho^2). Checks every empirical mode variance against
/// that closed form within z batch-means standard errors.
OuVarianceReport ou_variance_check(double alpha, const SamplerConfig& cfg,
                                   const ResolventConfig& rcfg, double z = 3.0);

struct DensityKsReport {
  double ks_distance = 0.0;
  double threshold = 0.05;
  long samples = 0;
  bool pass = false;
};

/// n = 1 scalar-diffusion oracle: the empirical distribution of the single
/// coefficient is compared against the quadrature-normalized stationary
/// density p(s) proportional to exp(2 int_0^s b / sigma^2), with b the
/// projected drift of the simulated system, via the Kolmogorov-Smirnov
/// distance.
DensityKsReport scalar_density_ks(const PsiSpec& psi, const SamplerConfig& cfg,
                                  const ResolventConfig& rcfg, double threshold = 0.05);

}  // namespace spme

#endif
