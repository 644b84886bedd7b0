#ifndef SPME_SPECTRAL_HPP
#define SPME_SPECTRAL_HPP

#include <cstddef>
#include <vector>

#include "spme/errors.hpp"

namespace spme {

/// Interval D = (0, L) with M uniformly spaced interior nodes xi_j = j h,
/// h = L/(M+1). Endpoints carry homogeneous Dirichlet data and are never stored.
struct DomainSpec {
  double length = 1.0;
  int grid_points = 0;

  double spacing() const { return length / (grid_points + 1); }
  double node(int j) const { return spacing() * static_cast<double>(j); }  // j in 1..M
  void validate() const;
};

/// Nodal values on the interior grid; the representation on which the
/// nonlinearity acts pointwise.
struct GridField {
  DomainSpec domain;
  std::vector<double> values;

  GridField() = default;
  GridField(DomainSpec dom, std::vector<double> vals);
  static GridField zeros(DomainSpec dom);
  int size() const { return static_cast<int>(values.size()); }
};

/// Coefficients against the L2-normalized Dirichlet sine basis
/// e_k(xi) = sqrt(2/L) sin(k pi xi / L). The state representation.
struct SpectralField {
  double length = 1.0;
  std::vector<double> coeff;

  SpectralField() = default;
  SpectralField(double len, std::vector<double> c) : length(len), coeff(std::move(c)) {}
  static SpectralField zeros(double length, int n);
  static SpectralField unit(double length, int n, int k, double amplitude = 1.0);
  int modes() const { return static_cast<int>(coeff.size()); }
};

/// mu_k = (k pi / L)^2, the k-th Dirichlet eigenvalue of -Laplace on (0, L).
double eigenvalue(int k, double length);

/// e_k(xi), L2-normalized: integral of e_k e_j over (0,L) is delta_kj.
double eigenfunction(int k, double length, double xi);

struct Mode {
  int index;
  double mu;
  double length;
  double eval(double xi) const { return eigenfunction(index, length, xi); }
};
Mode mode(int k, double length);

enum class NormKind { L2, H10, Hminus1 };

double norm(const SpectralField& x, NormKind which);
double inner(const SpectralField& x, const SpectralField& y, NormKind which);

/// P_n: diagonal truncation to the first n coefficients (orthogonal in every
/// diagonal norm). Fields shorter than n are zero-padded.
SpectralField project(const SpectralField& x, int n);

/// Spectral Laplacian: coefficient k multiplied by -mu_k.
SpectralField apply_laplacian(const SpectralField& x);

SpectralField add(const SpectralField& x, const SpectralField& y);
SpectralField subtract(const SpectralField& x, const SpectralField& y);
SpectralField scale(const SpectralField& x, double factor);

/// C = (-Laplace)^{-gamma}: diagonal with lambda_k = mu_k^{-gamma},
/// gamma in (1/2, 1].
struct CovarianceSpec {
  double gamma = 1.0;

  void validate() const;
  double lambda(int k, double length) const;

  /// Partial sum of K = sum_k alpha_k lambda_k with alpha_k = sup |e_k|^2 = 2/L,
  /// plus an analytic bound on the dropped tail (integral comparison).
  struct TraceEstimate {
    double partial_sum;
    double tail_bound;
    int terms;
  };
  TraceEstimate weighted_trace(double length, int terms) const;
};

SpectralField covariance_sqrt_apply(const SpectralField& x, const CovarianceSpec& c);

/// Grid <-> spectral transforms for one fixed domain. The direct paths are the
/// plain O(nM) quadrature sums; a radix-2 fast path is used automatically when
/// M+1 is a power of two (the two must agree to 1e-12, see tests).
class DstPlan {
 public:
  explicit DstPlan(DomainSpec dom);

  const DomainSpec& domain() const { return dom_; }

  /// x_k = h * sum_j g_j e_k(xi_j), k = 1..n (DST-I with quadrature weight
  /// h = L/(M+1)); recovers a pure mode exactly for n <= M.
  SpectralField forward(const GridField& g, int n) const;

  /// g_j = sum_k x_k e_k(xi_j); exact left inverse of forward for n <= M.
  GridField inverse(const SpectralField& x) const;

  bool has_fast_path() const { return fast_; }

  /// Force one specific path (used by the agreement tests).
  SpectralField forward_direct(const GridField& g, int n) const;
  GridField inverse_direct(const SpectralField& x) const;
  SpectralField forward_fast(const GridField& g, int n) const;
  GridField inverse_fast(const SpectralField& x) const;

 private:
  std::vector<double> full_sine_transform(const std::vector<double>& v) const;

  DomainSpec dom_;
  bool fast_ = false;
  bool table_ = false;
  std::vector<double> sine_;  // sin(pi k j / (M+1)), k-major, when tabulated
  double sin_at(int k, int j) const;
};

/// Convenience one-shot wrappers (build a plan internally).
SpectralField dst_forward(const GridField& g, int n);
GridField dst_inverse(const SpectralField& x, int grid_points);

/// Discrete norms and the 3-point Laplacian on grid fields. The H-norm here
/// uses the stencil eigenvalues mu_hat_k = (4/h^2) sin^2(k pi h / (2L)), i.e.
/// the norm in which the grid resolvent is exactly nonexpansive.
namespace grid {

double inner_l2(const GridField& f, const GridField& g);
double norm_l2(const GridField& f);

/// (Lap_h v)_j = (v_{j+1} - 2 v_j + v_{j-1}) / h^2 with Dirichlet ends.
GridField apply_laplacian_fd(const GridField& f);

/// Forward-difference H1_0 seminorm squared: h * sum_{j=0}^{M} ((v_{j+1}-v_j)/h)^2.
double h10_seminorm_sq_fd(const GridField& f);

double inner_hminus1(const GridField& f, const GridField& g);
double norm_hminus1(const GridField& f);

/// Stencil eigenvalue of -Lap_h for mode k.
double fd_eigenvalue(int k, const DomainSpec& dom);

/// Solve (-Lap_h) w = f (Thomas algorithm, O(M)).
GridField solve_neg_laplacian_fd(const GridField& f);

}  // namespace grid

/// Solve a tridiagonal system in place: diag[i] x[i] + lower[i] x[i-1] +
/// upper[i] x[i+1] = rhs[i]. No pivoting; intended for (column) diagonally
/// dominant systems.
void solve_tridiagonal(const std::vector<double>& lower, std::vector<double> diag,
                       const std::vector<double>& upper, std::vector<double>& rhs);

}  // namespace spme

#endif
