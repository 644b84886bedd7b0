#ifndef SPME_DISSIPATIVE_HPP
#define SPME_DISSIPATIVE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "spme/nonlinearity.hpp"
#include "spme/spectral.hpp"

namespace spme {

struct ResolventConfig {
  double newton_tol = 1e-12;  // residual tolerance in the discrete H-norm
  int max_iter = 50;
  double damping = 0.5;       // backtracking factor in (0, 1)
  bool force_fallback = false;

  void validate() const;
};

/// J_eps x together with F_eps x = (J_eps x - x)/eps, exactly as stored.
struct YosidaResult {
  GridField resolvent;
  GridField yosida;
  int iterations = 0;
  double residual = 0.0;
  bool used_fallback = false;
};

/// F x = Laplace(Psi(x)) through the spectral route: pointwise Psi, DST, then
/// multiplication by -mu_k. Returns all representable modes.
SpectralField apply_F(const PsiSpec& psi, const GridField& x, const DstPlan& plan);
SpectralField apply_F(const PsiSpec& psi, const GridField& x);

/// Same operator through the 3-point stencil; this is the F the grid resolvent
/// inverts, m-dissipative in the discrete H-norm.
GridField apply_F_grid(const PsiSpec& psi, const GridField& x);

/// Solve y - eps * Lap_h Psi(y) = x by damped Newton with a tridiagonal
/// Jacobian (Thomas solves). On a Newton stall the solver switches to a
/// monotone nodewise Gauss-Seidel sweep on w = Psi(y); both paths agree to
/// 1e-10 (tested). Throws SolverError with the last residual on failure.
YosidaResult resolvent(const PsiSpec& psi, const GridField& x, double eps,
                       const ResolventConfig& cfg);

/// Convenience alias: the Yosida approximation is read off the same solve.
YosidaResult yosida(const PsiSpec& psi, const GridField& x, double eps,
                    const ResolventConfig& cfg);

/// Moreau envelope of Phi in the discrete H geometry:
/// Phi_eps(x) = |x - J_eps x|_H^2 / (2 eps) + Phi(J_eps x).
double moreau_envelope(const PsiSpec& psi, const GridField& x, double eps,
                       const ResolventConfig& cfg);

/// Galerkin resolvent on E_n: solve xi - eps * P_n F(xi) = rhs where F uses the
/// spectral Laplacian; dense n x n Newton. Used by the controllers.
SpectralField resolvent_galerkin(const PsiSpec& psi, const SpectralField& rhs, double eps,
                                 const DstPlan& plan, const ResolventConfig& cfg);

struct PropertyCheck {
  std::string name;
  double worst_margin = 0.0;  // >= -tolerance means pass
  double tolerance = 0.0;
  bool pass = false;
};

struct PropertyReport {
  std::vector<PropertyCheck> checks;
  int trials = 0;
  std::uint64_t seed = 0;
  bool all_pass() const;
  const PropertyCheck* find(const std::string& name) const;
};

/// Seeded random-field battery over the resolvent/Yosida properties:
/// dissipativity (both Laplacian routes), resolvent contraction, the
/// convergence/monotonicity/bound properties of F_eps, the product inequality
/// <F_eps(x), F(x)>_H >= |F_eps(x)|_H^2, the 1/eps Lipschitz bound, and the
/// Moreau chain 0 <= Phi_eps1 <= Phi_eps2 <= Phi for eps1 >= eps2.
PropertyReport property_battery(const PsiSpec& psi, const DomainSpec& dom, int n_modes,
                                std::uint64_t seed, int trials, const ResolventConfig& cfg,
                                double tolerance = 1e-9);

/// Transform/norm invariants of the spectral core on seeded random fields:
/// Parseval, forward-inverse round trip, the Laplacian pairing
/// <Lap x, y>_H = -<x, y>_L2, projection nonexpansivity in all three norms,
/// stencil-vs-spectral Laplacian agreement on smooth fields, fast-path
/// agreement when available, and the covariance trace bound.
PropertyReport spectral_battery(const DomainSpec& dom, const CovarianceSpec& cov, int n_modes,
                                std::uint64_t seed, int trials, double tolerance = 1e-12);

}  // namespace spme

#endif
