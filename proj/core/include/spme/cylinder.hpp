#ifndef SPME_CYLINDER_HPP
#define SPME_CYLINDER_HPP

#include <string>
#include <vector>

#include "spme/sde.hpp"
#include "spme/spectral.hpp"

namespace spme {

/// Bounded outer functions f: R^p -> R with closed-form gradient and Hessian.
/// All catalog entries have uniformly bounded f, Df, D2f.
struct OuterFunction {
  enum class Kind { Constant, GaussianBump, DampedPoly, Trig };

  Kind kind = Kind::Constant;
  std::vector<double> center;   // GaussianBump: f = exp(-|t - c|^2)
  std::vector<int> powers;      // DampedPoly: f = prod t_i^{b_i} * exp(-|t|^2)
  std::vector<double> freq;     // Trig: f = prod trig(w_i t_i)
  std::vector<bool> use_cos;

  int arity() const;
  double value(const std::vector<double>& t) const;
  std::vector<double> gradient(const std::vector<double>& t) const;
  /// Row-major p x p Hessian.
  std::vector<double> hessian(const std::vector<double>& t) const;
};

/// phi(x) = f(<x, g_1>_H, ..., <x, g_p>_H) with directions g_i in E_n.
struct CylinderFunction {
  std::string id;
  OuterFunction outer;
  std::vector<SpectralField> directions;

  int arity() const { return static_cast<int>(directions.size()); }
  std::vector<double> coordinates(const SpectralField& x) const;
  double value(const SpectralField& x) const;

  /// Frechet derivative along h: Dphi(x)(h) = sum_i df_i <h, g_i>_H.
  double derivative(const SpectralField& x, const SpectralField& h) const;
  /// D2phi(x)(h, h).
  double second_derivative(const SpectralField& x, const SpectralField& h) const;
};

/// The fixed, versioned battery: >= 12 members spanning p in {1,2,3} with
/// low/mixed/high-mode directions and shifted centers. Directions are scaled
/// by the linear-surrogate stationary spread so coordinates are O(1), which
/// makes pass thresholds comparable across members. Member 0 is constant.
std::vector<CylinderFunction> make_battery_v1(const SamplerConfig& cfg);

inline constexpr const char* kBatteryId = "v1";

}  // namespace spme

#endif
