#ifndef SPME_NONLINEARITY_HPP
#define SPME_NONLINEARITY_HPP

#include <span>
#include <vector>

#include "spme/spectral.hpp"

namespace spme {

enum class PsiKind { PowerOdd, AffinePower, Linear, Custom };

/// The monotone nonlinearity Psi together with its derivative, antiderivative
/// and the growth data (r, kappa0, kappa1, C1) used by the validation checks:
///
///   kappa0 |s|^{r-1} <= Psi'(s) <= kappa1 |s|^{r-1} + C1.
///
/// Built-in kinds:
///   PowerOdd(m)        Psi(s) = s^m, m odd >= 3
///   AffinePower(a, m)  Psi(s) = a s + s^m, a >= 0, m odd >= 3
///   Linear(a)          Psi(s) = a s  (test drift; exempt from r > 1)
///   Custom(table)      piecewise-linear interpolant of a monotone table
class PsiSpec {
 public:
  static PsiSpec power_odd(int m);
  static PsiSpec affine_power(double alpha, int m);
  static PsiSpec linear(double alpha);
  static PsiSpec custom(std::vector<double> s, std::vector<double> psi);

  PsiKind kind() const { return kind_; }
  bool is_linear() const { return kind_ == PsiKind::Linear; }
  int power() const { return m_; }
  double alpha() const { return alpha_; }

  double value(double s) const;
  double derivative(double s) const;
  double antiderivative(double s) const;

  /// Inverse of Psi (all kinds are nondecreasing; built-ins are strictly
  /// increasing away from the degenerate point). Used by the w-substitution
  /// fallback in the resolvent solver.
  double inverse(double w) const;

  void value_array(std::span<const double> s, std::span<double> out) const;
  void derivative_array(std::span<const double> s, std::span<double> out) const;

  double growth_r() const { return r_; }
  double kappa0() const { return kappa0_; }
  double kappa1() const { return kappa1_; }
  double c1() const { return c1_; }

  /// Theorem-level experiments assume r >= 2; call before running them.
  void require_r_at_least(double r_min) const;

 private:
  PsiSpec() = default;

  PsiKind kind_ = PsiKind::PowerOdd;
  int m_ = 3;
  double alpha_ = 0.0;
  double r_ = 3.0;
  double kappa0_ = 3.0;
  double kappa1_ = 3.0;
  double c1_ = 0.0;
  // Custom kind: breakpoints, values, slopes, exact antiderivative at nodes.
  std::vector<double> ts_;
  std::vector<double> vs_;
  std::vector<double> slope_;
  std::vector<double> anti_;
};

/// Phi(x) = integral of PsiBar(x(xi)) over D, by the trapezoid rule on the
/// grid (boundary values vanish). lower_bound_slack is the defect in
/// Phi >= kappa0/(r(r+1)) |x|^{r+1}_{L^{r+1}}, nonnegative up to roundoff.
struct EnergyValue {
  double value = 0.0;
  double lower_bound_slack = 0.0;
  bool representable = true;
};

EnergyValue phi_energy(const PsiSpec& psi, const GridField& x);

struct H3Report {
  bool pass = false;
  double worst_lower_margin = 0.0;  // min over s of Psi'(s) - kappa0 |s|^{r-1}
  double worst_upper_margin = 0.0;  // min over s of kappa1 |s|^{r-1} + C1 - Psi'(s)
  double worst_lower_s = 0.0;
  double worst_upper_s = 0.0;
  int samples = 0;
};

/// Checks both growth inequalities on a uniform deterministic sample grid.
H3Report h3_validate(const PsiSpec& psi, double s_min, double s_max, int samples,
                     double tolerance = 1e-12);

}  // namespace spme

#endif
