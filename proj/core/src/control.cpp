#include "spme/control.hpp"

#include <algorithm>
#include <cmath>

#include "spme/errors.hpp"
#include "spme/parallel.hpp"

namespace spme {

void ControlProblem::validate() const {
  if (y0.modes() != y1.modes() || y0.length != y1.length)
    throw ConfigError("control: y0 and y1 must live in the same E_n");
  if (!(horizon > 0.0)) throw ConfigError("control.T must be positive");
  if (!(eps > 0.0)) throw ConfigError("control.eps must be positive");
  if (!(ode_dt > 0.0 && ode_dt < horizon)) throw ConfigError("control.ode_dt must lie in (0, T)");
  if (!(hit_tol > 0.0)) throw ConfigError("control.hit_tol must be positive");
  domain().validate();
}

namespace {

SpectralField f_galerkin(const PsiSpec& psi, const SpectralField& xi, const DstPlan& plan) {
  GridField g = plan.inverse(xi);
  psi.value_array(g.values, g.values);
  SpectralField w = plan.forward(g, xi.modes());
  for (int k = 1; k <= xi.modes(); ++k)
    w.coeff[static_cast<size_t>(k - 1)] *= -eigenvalue(k, xi.length);
  return w;
}

// One drift-implicit step of z' = F_n(z) + v over tau.
SpectralField implicit_step(const PsiSpec& psi, const SpectralField& z, const SpectralField& v,
                            double tau, const DstPlan& plan, const ResolventConfig& rcfg) {
  SpectralField rhs = z;
  for (int k = 0; k < z.modes(); ++k) rhs.coeff[static_cast<size_t>(k)] += tau * v.coeff[static_cast<size_t>(k)];
  return resolvent_galerkin(psi, rhs, tau, plan, rcfg);
}

}  // namespace

double reaching_threshold(const ControlProblem& cp, const PsiSpec& psi) {
  const DstPlan plan(cp.domain());
  const GridField g1 = plan.inverse(cp.y1);
  const SpectralField f1 = apply_F(psi, g1, plan);
  const SpectralField gap = subtract(cp.y0, cp.y1);
  return norm(f1, NormKind::Hminus1) + norm(gap, NormKind::Hminus1) / cp.horizon;
}

FeedbackSolution sgn_feedback_solve(const ControlProblem& cp, const PsiSpec& psi,
                                    const ResolventConfig& rcfg, bool smoothed_sgn) {
  cp.validate();
  const DstPlan plan(cp.domain());
  FeedbackSolution out;
  out.reaching_condition_ok = cp.rho > reaching_threshold(cp, psi);

  SpectralField z = cp.y0;
  double t = 0.0;
  out.times.push_back(t);
  out.trajectory.push_back(z);

  auto dist_to_target = [&](const SpectralField& w) {
    return norm(subtract(w, cp.y1), NormKind::Hminus1);
  };
  auto pre_hit_v = [&](const SpectralField& w) {
    const SpectralField d = subtract(w, cp.y1);
    const double dn = norm(d, NormKind::Hminus1);
    const double denom = smoothed_sgn ? std::max(dn, cp.hit_tol) : dn;
    return scale(d, -cp.rho / denom);
  };

  // Minimal-section value once the target is reached.
  const SpectralField f_target = f_galerkin(psi, cp.y1, plan);
  const double nf = norm(f_target, NormKind::Hminus1);
  out.post_hit_selection = (nf <= cp.rho) ? scale(f_target, -1.0)
                                          : scale(f_target, -cp.rho / nf);

  bool hit = dist_to_target(z) <= cp.hit_tol;
  if (hit) {
    out.hit = true;
    out.hitting_time = 0.0;
  }

  while (t < cp.horizon - 1e-12) {
    const double dt = std::min(cp.ode_dt, cp.horizon - t);
    if (!hit) {
      const SpectralField v = pre_hit_v(z);
      SpectralField trial = implicit_step(psi, z, v, dt, plan, rcfg);
      const double d_now = dist_to_target(z);
      const double d_trial = dist_to_target(trial);
      // Event resolution: the distance decays at a strictly positive rate, so
      // a sign change of (distance - tol) inside the step is bracketed in tau.
      const bool crossing_possible = d_trial <= cp.hit_tol || d_trial >= d_now ||
                                     d_now <= 1.5 * cp.rho * dt;
      if (crossing_possible) {
        // locate the distance minimum over tau in (0, dt] by golden section
        auto dist_at = [&](double tau) {
          if (tau <= 0.0) return d_now;
          return dist_to_target(implicit_step(psi, z, v, tau, plan, rcfg));
        };
        double a = 0.0, b = dt;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = dist_at(x1), f2 = dist_at(x2);
        for (int it = 0; it < 60 && (b - a) > 1e-14; ++it) {
          if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1;
            x1 = b - gr * (b - a); f1 = dist_at(x1);
          } else {
            a = x1; x1 = x2; f1 = f2;
            x2 = a + gr * (b - a); f2 = dist_at(x2);
          }
        }
        const double tau_min = 0.5 * (a + b);
        const double d_min = dist_at(tau_min);
        if (d_min <= cp.hit_tol) {
          // earliest tau with distance <= tol, bisection on [0, tau_min]
          double lo = 0.0, hi = tau_min;
          for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            if (dist_at(mid) <= cp.hit_tol) hi = mid; else lo = mid;
          }
          const double tau_hit = hi;
          z = implicit_step(psi, z, v, tau_hit, plan, rcfg);
          t += tau_hit;
          out.control.push_back(ControlSegment{t - tau_hit, tau_hit, v});
          out.times.push_back(t);
          out.trajectory.push_back(z);
          out.hitting_time = t;
          hit = true;
          out.hit = true;
          continue;
        }
      }
      z = trial;
      out.control.push_back(ControlSegment{t, dt, v});
      t += dt;
    } else {
      z = implicit_step(psi, z, out.post_hit_selection, dt, plan, rcfg);
      out.control.push_back(ControlSegment{t, dt, out.post_hit_selection});
      t += dt;
      out.max_post_hit_distance = std::max(out.max_post_hit_distance, dist_to_target(z));
    }
    out.times.push_back(t);
    out.trajectory.push_back(z);
  }
  out.final_distance = dist_to_target(z);
  return out;
}

SpectralField apply_B(const SpectralField& u, const CovarianceSpec& cov) {
  // B maps the E-coordinate u_k to sqrt(lambda_k) times the H-orthonormal
  // basis vector; on L2 coefficients that is sqrt(lambda_k * mu_k) u_k.
  SpectralField out = u;
  for (int k = 1; k <= u.modes(); ++k) {
    const double mu = eigenvalue(k, u.length);
    out.coeff[static_cast<size_t>(k - 1)] *= std::sqrt(cov.lambda(k, u.length) * mu);
  }
  return out;
}

RecoveredControl recover_control(const FeedbackSolution& fs, const ControlProblem& cp,
                                 const CovarianceSpec& cov) {
  cov.validate();
  RecoveredControl out;
  out.eps = cp.eps;
  const int n = cp.n_modes();
  const double L = cp.y0.length;
  double mismatch_sq = 0.0;
  double worst_residual = 0.0;
  out.u.reserve(fs.control.size());
  for (const ControlSegment& seg : fs.control) {
    ControlSegment useg;
    useg.t_start = seg.t_start;
    useg.dt = seg.dt;
    useg.value = SpectralField::zeros(L, n);
    for (int k = 1; k <= n; ++k) {
      const double mu = eigenvalue(k, L);
      const double lam = cov.lambda(k, L);
      const double root = std::sqrt(lam);
      // H-orthonormal coordinate of v: v_k / sqrt(mu_k)
      const double v_h = seg.value.coeff[static_cast<size_t>(k - 1)] / std::sqrt(mu);
      const double u_k = root * v_h / (lam + cp.eps);
      useg.value.coeff[static_cast<size_t>(k - 1)] = u_k;
      const double miss = root * u_k - v_h;
      mismatch_sq += seg.dt * miss * miss;
      worst_residual = std::max(worst_residual, std::abs(root * miss + cp.eps * u_k));
    }
    out.u.push_back(std::move(useg));
  }
  out.mismatch = std::sqrt(mismatch_sq);
  out.normal_equation_residual = worst_residual;
  return out;
}

TerminalReport forward_verify(const RecoveredControl& u, const ControlProblem& cp,
                              const PsiSpec& psi, const ResolventConfig& rcfg,
                              const CovarianceSpec& cov) {
  cp.validate();
  const DstPlan plan(cp.domain());
  SpectralField y = cp.y0;
  for (const ControlSegment& seg : u.u) {
    const SpectralField bu = apply_B(seg.value, cov);
    y = implicit_step(psi, y, bu, seg.dt, plan, rcfg);
  }
  TerminalReport rep;
  rep.delta = norm(subtract(y, cp.y1), NormKind::Hminus1);
  rep.initial_gap = norm(subtract(cp.y0, cp.y1), NormKind::Hminus1);
  rep.horizon = cp.horizon;
  return rep;
}

SupportReport support_experiment(const SpectralField& x0, const SpectralField& x1, double alpha,
                                 long ensemble, const PsiSpec& psi, const SamplerConfig& cfg,
                                 const ResolventConfig& rcfg, double z, int threads) {
  if (!(alpha > 0.0)) throw ConfigError("support_experiment requires alpha > 0");
  if (ensemble < 1) throw ConfigError("support_experiment requires at least one path");
  SamplerConfig run = cfg;
  run.n_steps = std::lround(1.0 / run.dt);
  run.burn_in = 0;
  run.validate();

  std::vector<char> hits(static_cast<size_t>(ensemble), 0);
  parallel_for(static_cast<size_t>(ensemble), threads, [&](size_t path) {
    GalerkinChain chain(psi, run, rcfg, static_cast<std::uint32_t>(path));
    chain.set_field(x0);
    chain.advance(run.n_steps);
    const double d = norm(subtract(chain.current(), x1), NormKind::Hminus1);
    hits[path] = d <= alpha ? 1 : 0;
  });
  long count = 0;
  for (char h : hits) count += h;

  SupportReport rep;
  rep.interval = wilson_interval(count, ensemble, z);
  rep.alpha = alpha;
  rep.target_distance = norm(subtract(x1, x0), NormKind::Hminus1);
  rep.paths = ensemble;
  rep.horizon = 1.0;
  return rep;
}

}  // namespace spme
