#include "spme/dissipative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "spme/rng.hpp"

namespace spme {

namespace {

// Residual of y - eps*Lap_h Psi(y) = x measured in the discrete H-norm.
//
// Evaluated through the integrated form rho = (-Lap_h)^{-1}(y - x) + eps*Psi(y),
// whose forward-difference H1_0 seminorm equals |G|_H exactly but avoids the
// 1/h^2 roundoff amplification of forming Lap_h Psi(y) first. This keeps the
// measurable floor orders of magnitude below newton_tol.
double residual_hnorm(const PsiSpec& psi, const std::vector<double>& y, const GridField& x,
                      double eps, std::vector<double>& scratch_psi) {
  const int M = x.size();
  scratch_psi.resize(static_cast<size_t>(M));
  psi.value_array(y, scratch_psi);
  GridField diff = GridField::zeros(x.domain);
  for (int j = 0; j < M; ++j)
    diff.values[static_cast<size_t>(j)] = y[static_cast<size_t>(j)] - x.values[static_cast<size_t>(j)];
  GridField rho = grid::solve_neg_laplacian_fd(diff);
  for (int j = 0; j < M; ++j) rho.values[static_cast<size_t>(j)] += eps * scratch_psi[static_cast<size_t>(j)];
  return std::sqrt(grid::h10_seminorm_sq_fd(rho));
}

// G(y) nodewise (used only as the Newton right-hand side).
void residual_nodewise(const PsiSpec& psi, const std::vector<double>& y, const GridField& x,
                       double eps, std::vector<double>& psi_y, std::vector<double>& out) {
  const int M = x.size();
  const double inv_h2 = 1.0 / (x.domain.spacing() * x.domain.spacing());
  psi_y.resize(static_cast<size_t>(M));
  out.resize(static_cast<size_t>(M));
  psi.value_array(y, psi_y);
  for (int j = 0; j < M; ++j) {
    const double left = (j > 0) ? psi_y[static_cast<size_t>(j - 1)] : 0.0;
    const double right = (j < M - 1) ? psi_y[static_cast<size_t>(j + 1)] : 0.0;
    const double lap = (left - 2.0 * psi_y[static_cast<size_t>(j)] + right) * inv_h2;
    out[static_cast<size_t>(j)] = y[static_cast<size_t>(j)] - eps * lap - x.values[static_cast<size_t>(j)];
  }
}

// Monotone nodewise Gauss-Seidel on the substituted system
//   Psi^{-1}(w) - eps*Lap_h w = x,   w = Psi(y).
// Each nodal update solves a strictly increasing scalar equation by
// safeguarded bisection. Robust at the degeneracy, linear convergence.
std::vector<double> gauss_seidel_fallback(const PsiSpec& psi, const GridField& x, double eps,
                                          const ResolventConfig& cfg, double tol, int& sweeps,
                                          double& residual) {
  const int M = x.size();
  const double h = x.domain.spacing();
  const double c = 2.0 * eps / (h * h);
  const double o = eps / (h * h);
  std::vector<double> w(static_cast<size_t>(M));
  for (int j = 0; j < M; ++j) w[static_cast<size_t>(j)] = psi.value(x.values[static_cast<size_t>(j)]);

  auto update_node = [&](int j) {
    const double wl = (j > 0) ? w[static_cast<size_t>(j - 1)] : 0.0;
    const double wr = (j < M - 1) ? w[static_cast<size_t>(j + 1)] : 0.0;
    const double rhs = x.values[static_cast<size_t>(j)] + o * (wl + wr);
    auto g = [&](double v) { return psi.inverse(v) + c * v - rhs; };
    double lo = w[static_cast<size_t>(j)], hi = lo;
    if (g(lo) > 0.0) {
      double step = std::max(1.0, std::abs(lo));
      while (g(lo) > 0.0) { hi = lo; lo -= step; step *= 2.0; }
    } else {
      double step = std::max(1.0, std::abs(hi));
      while (g(hi) < 0.0) { lo = hi; hi += step; step *= 2.0; }
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      if (g(mid) > 0.0) hi = mid; else lo = mid;
    }
    w[static_cast<size_t>(j)] = 0.5 * (lo + hi);
  };

  std::vector<double> y(static_cast<size_t>(M)), scratch;
  const long max_sweeps = 200L * M + 10000L;
  for (long sweep = 0; sweep < max_sweeps; ++sweep) {
    for (int j = 0; j < M; ++j) update_node(j);
    for (int j = M - 1; j >= 0; --j) update_node(j);
    for (int j = 0; j < M; ++j) y[static_cast<size_t>(j)] = psi.inverse(w[static_cast<size_t>(j)]);
    residual = residual_hnorm(psi, y, x, eps, scratch);
    sweeps = static_cast<int>(sweep) + 1;
    if (residual <= tol) return y;
  }
  throw SolverError("resolvent fallback (Gauss-Seidel on w=Psi(y)) did not converge", residual,
                    cfg.max_iter);
}

}  // namespace

void ResolventConfig::validate() const {
  if (!(newton_tol > 0.0)) throw ConfigError("resolvent.newton_tol must be positive");
  if (max_iter < 1) throw ConfigError("resolvent.max_iter must be >= 1");
  if (!(damping > 0.0 && damping < 1.0)) throw ConfigError("resolvent.damping must lie in (0, 1)");
}

SpectralField apply_F(const PsiSpec& psi, const GridField& x, const DstPlan& plan) {
  GridField w = x;
  psi.value_array(x.values, w.values);
  SpectralField coeffs = plan.forward(w, x.size());
  return apply_laplacian(coeffs);
}

SpectralField apply_F(const PsiSpec& psi, const GridField& x) {
  DstPlan plan(x.domain);
  return apply_F(psi, x, plan);
}

GridField apply_F_grid(const PsiSpec& psi, const GridField& x) {
  GridField w = x;
  psi.value_array(x.values, w.values);
  return grid::apply_laplacian_fd(w);
}

YosidaResult resolvent(const PsiSpec& psi, const GridField& x, double eps,
                       const ResolventConfig& cfg) {
  cfg.validate();
  if (!(eps > 0.0)) throw ConfigError("resolvent requires eps > 0");
  const int M = x.size();
  const double h = x.domain.spacing();
  const double inv_h2 = 1.0 / (h * h);

  YosidaResult out;
  out.resolvent = x;  // initial guess y = x

  std::vector<double>& y = out.resolvent.values;
  std::vector<double> psi_y, g, deriv, trial(static_cast<size_t>(M)), scratch;
  std::vector<double> lower(static_cast<size_t>(M)), diag(static_cast<size_t>(M)),
      upper(static_cast<size_t>(M));

  double res = residual_hnorm(psi, y, x, eps, scratch);
  int stall_count = 0;
  bool fallback = cfg.force_fallback;

  int it = 0;
  for (; it < cfg.max_iter && !fallback; ++it) {
    if (res <= cfg.newton_tol) break;
    residual_nodewise(psi, y, x, eps, psi_y, g);
    deriv.resize(static_cast<size_t>(M));
    psi.derivative_array(y, deriv);
    for (int j = 0; j < M; ++j) {
      diag[static_cast<size_t>(j)] = 1.0 + 2.0 * eps * deriv[static_cast<size_t>(j)] * inv_h2;
      lower[static_cast<size_t>(j)] = (j > 0) ? -eps * deriv[static_cast<size_t>(j - 1)] * inv_h2 : 0.0;
      upper[static_cast<size_t>(j)] = (j < M - 1) ? -eps * deriv[static_cast<size_t>(j + 1)] * inv_h2 : 0.0;
    }
    std::vector<double> step(static_cast<size_t>(M));
    for (int j = 0; j < M; ++j) step[static_cast<size_t>(j)] = -g[static_cast<size_t>(j)];
    solve_tridiagonal(lower, diag, upper, step);

    double t = 1.0;
    double new_res = res;
    bool improved = false;
    while (t > 1e-12) {
      for (int j = 0; j < M; ++j)
        trial[static_cast<size_t>(j)] = y[static_cast<size_t>(j)] + t * step[static_cast<size_t>(j)];
      new_res = residual_hnorm(psi, trial, x, eps, scratch);
      if (new_res < res) {
        improved = true;
        break;
      }
      t *= cfg.damping;
    }
    if (!improved) {
      fallback = true;
      break;
    }
    stall_count = (new_res > 0.99 * res) ? stall_count + 1 : 0;
    if (stall_count >= 4) fallback = true;
    y = trial;
    res = new_res;
  }

  if (!fallback && res > cfg.newton_tol)
    throw SolverError("resolvent Newton did not reach tolerance (eps=" + std::to_string(eps) + ")",
                      res, it);

  if (fallback && res > cfg.newton_tol) {
    int sweeps = 0;
    y = gauss_seidel_fallback(psi, x, eps, cfg, cfg.newton_tol, sweeps, res);
    out.used_fallback = true;
    it = sweeps;
  }

  out.iterations = it;
  out.residual = res;
  out.yosida = GridField::zeros(x.domain);
  for (int j = 0; j < M; ++j)
    out.yosida.values[static_cast<size_t>(j)] =
        (y[static_cast<size_t>(j)] - x.values[static_cast<size_t>(j)]) / eps;
  return out;
}

YosidaResult yosida(const PsiSpec& psi, const GridField& x, double eps,
                    const ResolventConfig& cfg) {
  return resolvent(psi, x, eps, cfg);
}

double moreau_envelope(const PsiSpec& psi, const GridField& x, double eps,
                       const ResolventConfig& cfg) {
  const YosidaResult r = resolvent(psi, x, eps, cfg);
  GridField diff = GridField::zeros(x.domain);
  for (int j = 0; j < x.size(); ++j)
    diff.values[static_cast<size_t>(j)] =
        x.values[static_cast<size_t>(j)] - r.resolvent.values[static_cast<size_t>(j)];
  const double dist2 = grid::inner_hminus1(diff, diff);
  return 0.5 * dist2 / eps + phi_energy(psi, r.resolvent).value;
}

namespace {

// Dense LU with partial pivoting for the small Galerkin Jacobians.
void solve_dense(std::vector<double>& a, std::vector<double>& b, int n) {
  std::vector<int> piv(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) piv[static_cast<size_t>(i)] = i;
  for (int col = 0; col < n; ++col) {
    int best = col;
    double mx = std::abs(a[static_cast<size_t>(col) * n + col]);
    for (int rsel = col + 1; rsel < n; ++rsel) {
      const double v = std::abs(a[static_cast<size_t>(rsel) * n + col]);
      if (v > mx) { mx = v; best = rsel; }
    }
    if (mx == 0.0) throw SolverError("singular Galerkin Jacobian", 0.0, 0);
    if (best != col) {
      for (int j = 0; j < n; ++j)
        std::swap(a[static_cast<size_t>(col) * n + j], a[static_cast<size_t>(best) * n + j]);
      std::swap(b[static_cast<size_t>(col)], b[static_cast<size_t>(best)]);
    }
    for (int rsel = col + 1; rsel < n; ++rsel) {
      const double f = a[static_cast<size_t>(rsel) * n + col] / a[static_cast<size_t>(col) * n + col];
      a[static_cast<size_t>(rsel) * n + col] = 0.0;
      for (int j = col + 1; j < n; ++j)
        a[static_cast<size_t>(rsel) * n + j] -= f * a[static_cast<size_t>(col) * n + j];
      b[static_cast<size_t>(rsel)] -= f * b[static_cast<size_t>(col)];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    double s = b[static_cast<size_t>(i)];
    for (int j = i + 1; j < n; ++j) s -= a[static_cast<size_t>(i) * n + j] * b[static_cast<size_t>(j)];
    b[static_cast<size_t>(i)] = s / a[static_cast<size_t>(i) * n + i];
  }
}

}  // namespace

SpectralField resolvent_galerkin(const PsiSpec& psi, const SpectralField& rhs, double eps,
                                 const DstPlan& plan, const ResolventConfig& cfg) {
  cfg.validate();
  if (!(eps > 0.0)) throw ConfigError("resolvent requires eps > 0");
  const int n = rhs.modes();
  const int M = plan.domain().grid_points;
  const double L = plan.domain().length;

  auto f_galerkin = [&](const SpectralField& xi) {
    GridField g = plan.inverse(xi);
    psi.value_array(g.values, g.values);
    SpectralField w = plan.forward(g, n);
    for (int k = 1; k <= n; ++k) w.coeff[static_cast<size_t>(k - 1)] *= -eigenvalue(k, L);
    return w;
  };
  auto residual = [&](const SpectralField& xi) {
    SpectralField f = f_galerkin(xi);
    SpectralField r = xi;
    for (int k = 0; k < n; ++k)
      r.coeff[static_cast<size_t>(k)] -= eps * f.coeff[static_cast<size_t>(k)] + rhs.coeff[static_cast<size_t>(k)];
    return r;
  };

  SpectralField xi = rhs;
  SpectralField r = residual(xi);
  double res = norm(r, NormKind::Hminus1);

  // Nodal basis columns for the Jacobian assembly.
  std::vector<GridField> basis;
  basis.reserve(static_cast<size_t>(n));
  for (int m = 1; m <= n; ++m)
    basis.push_back(plan.inverse(SpectralField::unit(L, n, m)));

  for (int it = 0; it < cfg.max_iter; ++it) {
    if (res <= cfg.newton_tol) {
      return xi;
    }
    // Jacobian of xi - eps*F_n(xi): entry (k,m) = delta + eps*mu_k*(h S^T D S)_km,
    // with D = diag(Psi'(xi)) on the grid; column m comes out of one forward DST.
    GridField g = plan.inverse(xi);
    std::vector<double> dpsi(static_cast<size_t>(M));
    psi.derivative_array(g.values, dpsi);
    std::vector<double> jac(static_cast<size_t>(n) * n, 0.0);
    GridField scaled = GridField::zeros(plan.domain());
    for (int m = 1; m <= n; ++m) {
      for (int j = 0; j < M; ++j)
        scaled.values[static_cast<size_t>(j)] =
            dpsi[static_cast<size_t>(j)] * basis[static_cast<size_t>(m - 1)].values[static_cast<size_t>(j)];
      const SpectralField col = plan.forward(scaled, n);
      for (int k = 1; k <= n; ++k)
        jac[static_cast<size_t>(k - 1) * n + (m - 1)] =
            ((k == m) ? 1.0 : 0.0) + eps * eigenvalue(k, L) * col.coeff[static_cast<size_t>(k - 1)];
    }
    std::vector<double> step(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) step[static_cast<size_t>(k)] = -r.coeff[static_cast<size_t>(k)];
    solve_dense(jac, step, n);

    double t = 1.0;
    bool improved = false;
    SpectralField trial = xi;
    while (t > 1e-12) {
      for (int k = 0; k < n; ++k)
        trial.coeff[static_cast<size_t>(k)] = xi.coeff[static_cast<size_t>(k)] + t * step[static_cast<size_t>(k)];
      SpectralField rt = residual(trial);
      const double nrt = norm(rt, NormKind::Hminus1);
      if (nrt < res) {
        xi = trial;
        r = rt;
        res = nrt;
        improved = true;
        break;
      }
      t *= cfg.damping;
    }
    if (!improved) break;
  }
  if (res > cfg.newton_tol)
    throw SolverError("Galerkin resolvent did not reach tolerance", res, cfg.max_iter);
  return xi;
}

bool PropertyReport::all_pass() const {
  for (const auto& c : checks)
    if (!c.pass) return false;
  return true;
}

const PropertyCheck* PropertyReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

GridField random_field(RngStream& rng, const DstPlan& plan, int n_modes, double amplitude) {
  SpectralField x = SpectralField::zeros(plan.domain().length, n_modes);
  for (int k = 1; k <= n_modes; ++k)
    x.coeff[static_cast<size_t>(k - 1)] = amplitude * rng.gaussian() / static_cast<double>(k);
  return plan.inverse(x);
}

GridField smooth_field(RngStream& rng, const DstPlan& plan, double amplitude) {
  SpectralField x = SpectralField::zeros(plan.domain().length, 3);
  for (int k = 1; k <= 3; ++k)
    x.coeff[static_cast<size_t>(k - 1)] =
        amplitude * rng.gaussian() / static_cast<double>(k * k);
  return plan.inverse(x);
}

struct MarginTracker {
  double worst = std::numeric_limits<double>::infinity();
  void feed(double margin) { worst = std::min(worst, margin); }
};

}  // namespace

PropertyReport property_battery(const PsiSpec& psi, const DomainSpec& dom, int n_modes,
                                std::uint64_t seed, int trials, const ResolventConfig& cfg,
                                double tolerance) {
  if (trials < 1) throw ConfigError("property_battery requires trials >= 1");
  dom.validate();
  DstPlan plan(dom);
  RngStream rng(seed, stream_id::make(stream_id::kScratch, 0));

  const std::vector<double> eps_contract = {1e-3, 1e-1, 1.0};
  const std::vector<double> eps_sweep = {1e-1, 1e-2, 1e-3, 1e-4};

  MarginTracker dis_spec, dis_grid, contract, lipschitz, conv_decrease, bound36, mono37,
      product38, moreau_chain, res_identity;

  for (int trial = 0; trial < trials; ++trial) {
    const GridField x = random_field(rng, plan, n_modes, 0.6);
    const GridField y = random_field(rng, plan, n_modes, 0.6);

    // <F(x)-F(y), x-y>_H <= 0, spectral route (exact identity with mu-weights).
    {
      SpectralField fx = apply_F(psi, x, plan);
      SpectralField fy = apply_F(psi, y, plan);
      SpectralField xs = plan.forward(x, dom.grid_points);
      SpectralField ys = plan.forward(y, dom.grid_points);
      const double v = inner(subtract(fx, fy), subtract(xs, ys), NormKind::Hminus1);
      dis_spec.feed(-v);
    }
    // Same inequality through the stencil route and the discrete H inner product.
    {
      GridField fx = apply_F_grid(psi, x);
      GridField fy = apply_F_grid(psi, y);
      GridField dxy = x;
      for (int j = 0; j < dom.grid_points; ++j)
        dxy.values[static_cast<size_t>(j)] -= y.values[static_cast<size_t>(j)];
      GridField df = fx;
      for (int j = 0; j < dom.grid_points; ++j)
        df.values[static_cast<size_t>(j)] -= fy.values[static_cast<size_t>(j)];
      dis_grid.feed(-grid::inner_hminus1(df, dxy));
    }

    for (double eps : eps_contract) {
      const YosidaResult rx = resolvent(psi, x, eps, cfg);
      const YosidaResult ry = resolvent(psi, y, eps, cfg);
      res_identity.feed(cfg.newton_tol - rx.residual);
      res_identity.feed(cfg.newton_tol - ry.residual);
      GridField dxy = x, dj = rx.resolvent, dfe = rx.yosida;
      for (int j = 0; j < dom.grid_points; ++j) {
        dxy.values[static_cast<size_t>(j)] -= y.values[static_cast<size_t>(j)];
        dj.values[static_cast<size_t>(j)] -= ry.resolvent.values[static_cast<size_t>(j)];
        dfe.values[static_cast<size_t>(j)] -= ry.yosida.values[static_cast<size_t>(j)];
      }
      const double dist = grid::norm_hminus1(dxy);
      contract.feed(dist - grid::norm_hminus1(dj));
      lipschitz.feed(dist / eps - grid::norm_hminus1(dfe));
    }

    // eps-sweep properties on x (3.6/3.7/3.8 hold for every grid field).
    {
      const GridField fx = apply_F_grid(psi, x);
      const double nf = grid::norm_hminus1(fx);
      double prev_norm = -std::numeric_limits<double>::infinity();
      for (double eps : eps_sweep) {
        const YosidaResult r = resolvent(psi, x, eps, cfg);
        const double nfe = grid::norm_hminus1(r.yosida);
        bound36.feed(nf - nfe);
        mono37.feed(nfe - prev_norm);
        product38.feed(grid::inner_hminus1(r.yosida, fx) - nfe * nfe);
        prev_norm = nfe;
      }
    }

    // Convergence F_eps -> F, monotone along the sweep on a smooth field.
    {
      const GridField xs = smooth_field(rng, plan, 1.0);
      const GridField fxs = apply_F_grid(psi, xs);
      double prev_gap = std::numeric_limits<double>::infinity();
      for (double eps : eps_sweep) {
        const YosidaResult r = resolvent(psi, xs, eps, cfg);
        GridField gap = r.yosida;
        for (int j = 0; j < dom.grid_points; ++j)
          gap.values[static_cast<size_t>(j)] -= fxs.values[static_cast<size_t>(j)];
        const double g = grid::norm_hminus1(gap);
        conv_decrease.feed(prev_gap - g);
        prev_gap = g;
      }
    }

    // Moreau chain on x: 0 <= Phi_{eps1} <= Phi_{eps2} <= Phi for eps1 >= eps2.
    {
      const double phi = phi_energy(psi, x).value;
      double prev = 0.0;
      for (double eps : eps_sweep) {
        const double pe = moreau_envelope(psi, x, eps, cfg);
        moreau_chain.feed(pe - prev);
        moreau_chain.feed(phi - pe);
        prev = pe;
      }
    }
  }

  const double dis_tol = 1e-10;
  PropertyReport rep;
  rep.trials = trials;
  rep.seed = seed;
  auto push = [&rep](const std::string& name, const MarginTracker& m, double tol) {
    rep.checks.push_back(PropertyCheck{name, m.worst, tol, m.worst >= -tol});
  };
  push("dissipativity_spectral", dis_spec, dis_tol);
  push("dissipativity_grid", dis_grid, dis_tol);
  push("resolvent_residual", res_identity, 0.0);
  push("resolvent_contraction", contract, tolerance);
  push("yosida_lipschitz", lipschitz, tolerance);
  push("yosida_convergence_decrease", conv_decrease, tolerance);
  push("yosida_norm_bound", bound36, tolerance);
  push("yosida_norm_monotone", mono37, tolerance);
  push("yosida_product_lower_bound", product38, tolerance);
  push("moreau_chain", moreau_chain, tolerance);
  return rep;
}

PropertyReport spectral_battery(const DomainSpec& dom, const CovarianceSpec& cov, int n_modes,
                                std::uint64_t seed, int trials, double tolerance) {
  dom.validate();
  cov.validate();
  DstPlan plan(dom);
  RngStream rng(seed, stream_id::make(stream_id::kScratch, 1));
  const int M = dom.grid_points;

  MarginTracker parseval, round_trip, pairing, projection, stencil, fastpath, trace;

  for (int trial = 0; trial < trials; ++trial) {
    GridField g = GridField::zeros(dom);
    for (int j = 0; j < M; ++j) g.values[static_cast<size_t>(j)] = rng.gaussian();
    const SpectralField full = plan.forward(g, M);
    parseval.feed(tolerance - std::abs(norm(full, NormKind::L2) - grid::norm_l2(g)));

    SpectralField x = SpectralField::zeros(dom.length, n_modes);
    SpectralField y = SpectralField::zeros(dom.length, n_modes);
    for (int k = 0; k < n_modes; ++k) {
      x.coeff[static_cast<size_t>(k)] = rng.gaussian();
      y.coeff[static_cast<size_t>(k)] = rng.gaussian();
    }
    const SpectralField back = plan.forward(plan.inverse(x), n_modes);
    double rt = 0.0;
    for (int k = 0; k < n_modes; ++k)
      rt = std::max(rt, std::abs(back.coeff[static_cast<size_t>(k)] - x.coeff[static_cast<size_t>(k)]));
    round_trip.feed(tolerance - rt);

    pairing.feed(tolerance - std::abs(inner(apply_laplacian(x), y, NormKind::Hminus1) +
                                      inner(x, y, NormKind::L2)));

    const int half = std::max(1, n_modes / 2);
    const SpectralField px = project(x, half);
    const SpectralField ppx = project(px, half);
    double idem = 0.0;
    for (int k = 0; k < half; ++k)
      idem = std::max(idem, std::abs(ppx.coeff[static_cast<size_t>(k)] - px.coeff[static_cast<size_t>(k)]));
    projection.feed(tolerance - idem);
    for (NormKind which : {NormKind::L2, NormKind::H10, NormKind::Hminus1})
      projection.feed(norm(x, which) - norm(px, which));

    // Lap_h vs spectral Lap on a smooth field: O(M^-2) agreement.
    {
      SpectralField sm = SpectralField::zeros(dom.length, std::min(3, n_modes));
      for (int k = 0; k < sm.modes(); ++k)
        sm.coeff[static_cast<size_t>(k)] = rng.gaussian() / static_cast<double>((k + 1) * (k + 1));
      const GridField smg = plan.inverse(sm);
      const GridField lap_fd = grid::apply_laplacian_fd(smg);
      const GridField lap_sp = plan.inverse(apply_laplacian(sm));
      GridField diff = lap_fd;
      for (int j = 0; j < M; ++j) diff.values[static_cast<size_t>(j)] -= lap_sp.values[static_cast<size_t>(j)];
      const double rel = grid::norm_l2(diff) / std::max(grid::norm_l2(lap_sp), 1e-30);
      const double budget = 40.0 / (static_cast<double>(M + 1) * (M + 1));
      stencil.feed(budget - rel);
    }

    if (plan.has_fast_path()) {
      const SpectralField fd = plan.forward_direct(g, M);
      const SpectralField ff = plan.forward_fast(g, M);
      double gap = 0.0;
      for (int k = 0; k < M; ++k)
        gap = std::max(gap, std::abs(fd.coeff[static_cast<size_t>(k)] - ff.coeff[static_cast<size_t>(k)]));
      fastpath.feed(tolerance - gap);
    } else {
      fastpath.feed(tolerance);
    }
  }

  {
    const auto t64 = cov.weighted_trace(dom.length, 64);
    const auto t512 = cov.weighted_trace(dom.length, 512);
    // partial sums must agree within the analytic tail bound of the shorter one
    trace.feed(t64.tail_bound - (t512.partial_sum - t64.partial_sum));
    trace.feed(t512.partial_sum - t64.partial_sum);  // monotone growth
  }

  PropertyReport rep;
  rep.trials = trials;
  rep.seed = seed;
  auto push = [&rep](const std::string& name, const MarginTracker& m, double tol) {
    rep.checks.push_back(PropertyCheck{name, m.worst, tol, m.worst >= -tol});
  };
  push("parseval", parseval, 0.0);
  push("round_trip", round_trip, 0.0);
  push("laplacian_pairing", pairing, 0.0);
  push("projection", projection, 1e-15);
  push("stencil_consistency", stencil, 0.0);
  push("fast_path_agreement", fastpath, 0.0);
  push("covariance_trace", trace, 1e-15);
  return rep;
}

}  // namespace spme
