#ifndef SPME_CONTROL_HPP
#define SPME_CONTROL_HPP

#include <vector>

#include "spme/dissipative.hpp"
#include "spme/sde.hpp"

namespace spme {

struct ControlProblem {
  SpectralField y0;
  SpectralField y1;
  double horizon = 1.0;   // T
  double rho = 0.0;       // feedback gain
  double eps = 1e-3;      // control-recovery regularization
  double ode_dt = 1e-3;
  double hit_tol = 1e-5;  // |z - y1|_H at which the target counts as reached
  int grid_points = 0;    // 0 -> 4 * n_modes

  int n_modes() const { return y0.modes(); }
  DomainSpec domain() const {
    return DomainSpec{y0.length, grid_points > 0 ? grid_points : 4 * n_modes()};
  }
  void validate() const;
};

/// rho must exceed |F(y1)|_H + |y0 - P_n y1|_H / T for guaranteed reaching.
double reaching_threshold(const ControlProblem& cp, const PsiSpec& psi);

/// Piecewise-constant field on [t_start, t_start + dt).
struct ControlSegment {
  double t_start = 0.0;
  double dt = 0.0;
  SpectralField value;
};

struct FeedbackSolution {
  std::vector<double> times;             // trajectory node times
  std::vector<SpectralField> trajectory; // z at the node times
  std::vector<ControlSegment> control;   // the selected v(t)
  double hitting_time = -1.0;
  bool hit = false;
  double final_distance = 0.0;
  double max_post_hit_distance = 0.0;
  SpectralField post_hit_selection;
  bool reaching_condition_ok = false;
};

/// Integrates z' = F_n z - rho sgn(z - P_n y1) with drift-implicit steps
/// (Galerkin resolvent) and the sign term explicit. Before the hit the
/// selection is -rho (z - y1)/|z - y1|_H; the hitting time is located inside
/// a step by bisection; afterwards the minimal-section value
/// Proj_{B(0,rho)}(-F_n y1) is applied. With smoothed_sgn the unit vector is
/// replaced by w/max(|w|_H, kappa), kappa = hit_tol (solver aid only; both
/// variants agree on T0 to O(ode_dt), see tests).
FeedbackSolution sgn_feedback_solve(const ControlProblem& cp, const PsiSpec& psi,
                                    const ResolventConfig& rcfg, bool smoothed_sgn = false);

struct RecoveredControl {
  std::vector<ControlSegment> u;  // coordinates in the control space E
  double mismatch = 0.0;          // |B u - v|_{L2(0,T;H)}
  double normal_equation_residual = 0.0;
  double eps = 0.0;
};

/// B is diagonal from the control space onto the H-orthonormal noise basis
/// with entries sqrt(lambda_k); the normal equations
/// B*(B u - v) + eps u = 0 decouple per mode and time node.
RecoveredControl recover_control(const FeedbackSolution& fs, const ControlProblem& cp,
                                 const CovarianceSpec& cov);

/// Map a control-space segment value to state-space L2 coordinates (B u).
SpectralField apply_B(const SpectralField& u, const CovarianceSpec& cov);

struct TerminalReport {
  double delta = 0.0;       // |y(T) - y1|_H
  double initial_gap = 0.0; // |y0 - y1|_H
  double horizon = 0.0;
};

/// Integrates y' = F_n(y) + B u with the recovered control and reports the
/// terminal miss distance.
TerminalReport forward_verify(const RecoveredControl& u, const ControlProblem& cp,
                              const PsiSpec& psi, const ResolventConfig& rcfg,
                              const CovarianceSpec& cov);

struct SupportReport {
  WilsonInterval interval;
  double alpha = 0.0;
  double target_distance = 0.0;  // |x1 - x0|_H
  long paths = 0;
  double horizon = 1.0;
};

/// Empirical frequency of |xi(1, x0) - x1|_H <= alpha over a path ensemble of
/// the noisy system, with a Wilson interval.
SupportReport support_experiment(const SpectralField& x0, const SpectralField& x1, double alpha,
                                 long ensemble, const PsiSpec& psi, const SamplerConfig& cfg,
                                 const ResolventConfig& rcfg, double z = 1.96, int threads = 1);

}  // namespace spme

#endif
