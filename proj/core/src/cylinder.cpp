#include "spme/cylinder.hpp"

#include <cmath>

#include "spme/errors.hpp"

namespace spme {

int OuterFunction::arity() const {
  switch (kind) {
    case Kind::Constant: return 0;
    case Kind::GaussianBump: return static_cast<int>(center.size());
    case Kind::DampedPoly: return static_cast<int>(powers.size());
    case Kind::Trig: return static_cast<int>(freq.size());
  }
  return 0;
}

namespace {

double int_pow(double t, int b) {
  double p = 1.0;
  for (int i = 0; i < b; ++i) p *= t;
  return p;
}

// Damped monomial pieces: m(t) = t^b e^{-t^2} and its first two derivatives.
void damped_piece(double t, int b, double& m, double& m1, double& m2) {
  const double e = std::exp(-t * t);
  const double tb = int_pow(t, b);
  const double tbm1 = (b >= 1) ? int_pow(t, b - 1) : 0.0;
  const double tbm2 = (b >= 2) ? int_pow(t, b - 2) : 0.0;
  m = tb * e;
  m1 = (static_cast<double>(b) * tbm1 - 2.0 * t * tb) * e;
  m2 = (static_cast<double>(b * (b - 1)) * tbm2 - 2.0 * (2.0 * b + 1.0) * tb +
        4.0 * t * t * tb) * e;
}

void trig_piece(double t, double w, bool cosine, double& m, double& m1, double& m2) {
  const double a = w * t;
  if (cosine) {
    m = std::cos(a);
    m1 = -w * std::sin(a);
    m2 = -w * w * std::cos(a);
  } else {
    m = std::sin(a);
    m1 = w * std::cos(a);
    m2 = -w * w * std::sin(a);
  }
}

}  // namespace

double OuterFunction::value(const std::vector<double>& t) const {
  switch (kind) {
    case Kind::Constant:
      return 1.0;
    case Kind::GaussianBump: {
      double q = 0.0;
      for (size_t i = 0; i < t.size(); ++i) q += (t[i] - center[i]) * (t[i] - center[i]);
      return std::exp(-q);
    }
    case Kind::DampedPoly: {
      double f = 1.0;
      for (size_t i = 0; i < t.size(); ++i) {
        double m, m1, m2;
        damped_piece(t[i], powers[i], m, m1, m2);
        f *= m;
      }
      return f;
    }
    case Kind::Trig: {
      double f = 1.0;
      for (size_t i = 0; i < t.size(); ++i) {
        double m, m1, m2;
        trig_piece(t[i], freq[i], use_cos[i], m, m1, m2);
        f *= m;
      }
      return f;
    }
  }
  return 0.0;
}

std::vector<double> OuterFunction::gradient(const std::vector<double>& t) const {
  const size_t p = t.size();
  std::vector<double> g(p, 0.0);
  switch (kind) {
    case Kind::Constant:
      break;
    case Kind::GaussianBump: {
      const double f = value(t);
      for (size_t i = 0; i < p; ++i) g[i] = -2.0 * (t[i] - center[i]) * f;
      break;
    }
    case Kind::DampedPoly:
    case Kind::Trig: {
      std::vector<double> m(p), m1(p);
      for (size_t i = 0; i < p; ++i) {
        double v, d1, d2;
        if (kind == Kind::DampedPoly) damped_piece(t[i], powers[i], v, d1, d2);
        else trig_piece(t[i], freq[i], use_cos[i], v, d1, d2);
        m[i] = v;
        m1[i] = d1;
      }
      for (size_t i = 0; i < p; ++i) {
        double prod = m1[i];
        for (size_t j = 0; j < p; ++j)
          if (j != i) prod *= m[j];
        g[i] = prod;
      }
      break;
    }
  }
  return g;
}

std::vector<double> OuterFunction::hessian(const std::vector<double>& t) const {
  const size_t p = t.size();
  std::vector<double> hess(p * p, 0.0);
  switch (kind) {
    case Kind::Constant:
      break;
    case Kind::GaussianBump: {
      const double f = value(t);
      for (size_t i = 0; i < p; ++i)
        for (size_t j = 0; j < p; ++j) {
          const double di = t[i] - center[i];
          const double dj = t[j] - center[j];
          hess[i * p + j] = (4.0 * di * dj - (i == j ? 2.0 : 0.0)) * f;
        }
      break;
    }
    case Kind::DampedPoly:
    case Kind::Trig: {
      std::vector<double> m(p), m1(p), m2(p);
      for (size_t i = 0; i < p; ++i) {
        double v, d1, d2;
        if (kind == Kind::DampedPoly) damped_piece(t[i], powers[i], v, d1, d2);
        else trig_piece(t[i], freq[i], use_cos[i], v, d1, d2);
        m[i] = v; m1[i] = d1; m2[i] = d2;
      }
      for (size_t i = 0; i < p; ++i)
        for (size_t j = 0; j < p; ++j) {
          double prod = (i == j) ? m2[i] : m1[i] * m1[j];
          for (size_t l = 0; l < p; ++l)
            if (l != i && l != j) prod *= m[l];
          hess[i * p + j] = prod;
        }
      break;
    }
  }
  return hess;
}

std::vector<double> CylinderFunction::coordinates(const SpectralField& x) const {
  std::vector<double> t(directions.size());
  for (size_t i = 0; i < directions.size(); ++i)
    t[i] = inner(x, directions[i], NormKind::Hminus1);
  return t;
}

double CylinderFunction::value(const SpectralField& x) const {
  if (outer.kind == OuterFunction::Kind::Constant) return 1.0;
  return outer.value(coordinates(x));
}

double CylinderFunction::derivative(const SpectralField& x, const SpectralField& h) const {
  if (outer.kind == OuterFunction::Kind::Constant) return 0.0;
  const std::vector<double> t = coordinates(x);
  const std::vector<double> g = outer.gradient(t);
  double s = 0.0;
  for (size_t i = 0; i < directions.size(); ++i)
    s += g[i] * inner(h, directions[i], NormKind::Hminus1);
  return s;
}

double CylinderFunction::second_derivative(const SpectralField& x, const SpectralField& h) const {
  if (outer.kind == OuterFunction::Kind::Constant) return 0.0;
  const std::vector<double> t = coordinates(x);
  const std::vector<double> hess = outer.hessian(t);
  const size_t p = directions.size();
  std::vector<double> hg(p);
  for (size_t i = 0; i < p; ++i) hg[i] = inner(h, directions[i], NormKind::Hminus1);
  double s = 0.0;
  for (size_t i = 0; i < p; ++i)
    for (size_t j = 0; j < p; ++j) s += hess[i * p + j] * hg[i] * hg[j];
  return s;
}

namespace {

// Direction probing mode k, scaled so that <x, g>_H has unit standard
// deviation under the stationary law of the alpha = 1 linear surrogate:
// Var(x_k) = lambda_k mu_k / (2 mu_k) under the H convention, and the H-inner
// product against e_k divides by mu_k.
SpectralField scaled_mode_direction(const SamplerConfig& cfg, int k) {
  const double mu = eigenvalue(k, cfg.length);
  const std::vector<double> sigma = noise_amplitudes(cfg);
  const double var_xk = sigma[static_cast<size_t>(k - 1)] * sigma[static_cast<size_t>(k - 1)] / (2.0 * mu);
  const double std_t = std::sqrt(var_xk) / mu;  // std of <x, e_k>_H = x_k / mu_k
  SpectralField g = SpectralField::zeros(cfg.length, cfg.n_modes);
  g.coeff[static_cast<size_t>(k - 1)] = 1.0 / std_t;
  return g;
}

SpectralField mix(const std::vector<SpectralField>& parts) {
  SpectralField out = parts.front();
  for (size_t i = 1; i < parts.size(); ++i) out = add(out, parts[i]);
  return scale(out, 1.0 / std::sqrt(static_cast<double>(parts.size())));
}

}  // namespace

std::vector<CylinderFunction> make_battery_v1(const SamplerConfig& cfg) {
  const int n = cfg.n_modes;
  if (n < 1) throw ConfigError("battery requires n_modes >= 1");
  const int lo = 1;
  const int mid = std::max(1, (n + 1) / 2);
  const int hi = n;

  const SpectralField g_lo = scaled_mode_direction(cfg, lo);
  const SpectralField g_mid = scaled_mode_direction(cfg, mid);
  const SpectralField g_hi = scaled_mode_direction(cfg, hi);
  const SpectralField g_mix = mix({g_lo, g_mid, g_hi});

  std::vector<CylinderFunction> battery;
  auto push = [&battery](const std::string& id, OuterFunction f,
                         std::vector<SpectralField> dirs) {
    battery.push_back(CylinderFunction{id, std::move(f), std::move(dirs)});
  };

  OuterFunction constant;
  constant.kind = OuterFunction::Kind::Constant;
  push("v1.00_const", constant, {g_lo});

  auto bump = [](std::vector<double> c) {
    OuterFunction f;
    f.kind = OuterFunction::Kind::GaussianBump;
    f.center = std::move(c);
    return f;
  };
  auto poly = [](std::vector<int> b) {
    OuterFunction f;
    f.kind = OuterFunction::Kind::DampedPoly;
    f.powers = std::move(b);
    return f;
  };
  auto trig = [](std::vector<double> w, std::vector<bool> c) {
    OuterFunction f;
    f.kind = OuterFunction::Kind::Trig;
    f.freq = std::move(w);
    f.use_cos = std::move(c);
    return f;
  };

  // p = 1: centered and shifted bumps, odd/even damped polynomials, trig.
  push("v1.01_bump_lo", bump({0.0}), {g_lo});
  push("v1.02_bump_lo_shift", bump({0.5}), {g_lo});
  push("v1.03_bump_mid", bump({0.0}), {g_mid});
  push("v1.04_bump_hi", bump({-0.4}), {g_hi});
  push("v1.05_poly1_lo", poly({1}), {g_lo});
  push("v1.06_poly2_mid", poly({2}), {g_mid});
  push("v1.07_sin_lo", trig({1.0}, {false}), {g_lo});
  push("v1.08_cos_hi", trig({0.7}, {true}), {g_hi});
  // p = 2
  push("v1.09_bump2", bump({0.0, 0.0}), {g_lo, g_hi});
  push("v1.10_bump2_shift", bump({0.3, -0.2}), {g_lo, g_mid});
  push("v1.11_poly11", poly({1, 1}), {g_lo, g_mid});
  push("v1.12_sincos", trig({1.0, 0.5}, {false, true}), {g_mid, g_hi});
  // p = 3
  push("v1.13_bump3", bump({0.0, 0.1, -0.1}), {g_lo, g_mid, g_hi});
  push("v1.14_poly111_mix", poly({1, 0, 1}), {g_lo, g_mix, g_hi});
  return battery;
}

}  // namespace spme
