#include "spme/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace spme {

namespace {

double odd_power(double s, int m) {
  // m odd and small; repeated multiply beats pow and keeps the sign exact.
  double p = s;
  for (int i = 1; i < m; ++i) p *= s;
  return p;
}

}  // namespace

PsiSpec PsiSpec::power_odd(int m) {
  if (m < 3 || m % 2 == 0)
    throw ConfigError("PowerOdd requires an odd exponent m >= 3 (got " + std::to_string(m) + ")");
  PsiSpec p;
  p.kind_ = PsiKind::PowerOdd;
  p.m_ = m;
  p.r_ = static_cast<double>(m);
  p.kappa0_ = p.kappa1_ = static_cast<double>(m);
  p.c1_ = 0.0;
  return p;
}

PsiSpec PsiSpec::affine_power(double alpha, int m) {
  if (alpha < 0.0) throw ConfigError("AffinePower requires alpha >= 0");
  if (m < 3 || m % 2 == 0)
    throw ConfigError("AffinePower requires an odd exponent m >= 3 (got " + std::to_string(m) + ")");
  PsiSpec p;
  p.kind_ = PsiKind::AffinePower;
  p.m_ = m;
  p.alpha_ = alpha;
  p.r_ = static_cast<double>(m);
  p.kappa0_ = p.kappa1_ = static_cast<double>(m);
  p.c1_ = alpha;
  return p;
}

PsiSpec PsiSpec::linear(double alpha) {
  if (!(alpha > 0.0)) throw ConfigError("Linear test drift requires alpha > 0");
  PsiSpec p;
  p.kind_ = PsiKind::Linear;
  p.alpha_ = alpha;
  p.m_ = 1;
  p.r_ = 1.0;
  p.kappa0_ = p.kappa1_ = alpha;
  p.c1_ = alpha;
  return p;
}

PsiSpec PsiSpec::custom(std::vector<double> s, std::vector<double> psi) {
  if (s.size() != psi.size() || s.size() < 2)
    throw ConfigError("Custom Psi table needs at least two (s, Psi) pairs");
  for (size_t i = 1; i < s.size(); ++i) {
    if (!(s[i] > s[i - 1])) throw ConfigError("Custom Psi table: s values must be strictly increasing");
    if (psi[i] < psi[i - 1]) throw ConfigError("Custom Psi table: values must be nondecreasing");
  }
  if (s.front() > 0.0 || s.back() < 0.0)
    throw ConfigError("Custom Psi table must bracket s = 0");
  PsiSpec p;
  p.kind_ = PsiKind::Custom;
  p.ts_ = std::move(s);
  p.vs_ = std::move(psi);
  const size_t n = p.ts_.size();
  p.slope_.resize(n - 1);
  for (size_t i = 0; i + 1 < n; ++i)
    p.slope_[i] = (p.vs_[i + 1] - p.vs_[i]) / (p.ts_[i + 1] - p.ts_[i]);
  // Antiderivative of the piecewise-linear interpolant at the nodes, anchored
  // so that PsiBar(0) = 0.
  p.anti_.assign(n, 0.0);
  for (size_t i = 0; i + 1 < n; ++i) {
    const double dt = p.ts_[i + 1] - p.ts_[i];
    p.anti_[i + 1] = p.anti_[i] + 0.5 * (p.vs_[i] + p.vs_[i + 1]) * dt;
  }
  // shift so the anchor is s = 0 rather than the first node
  double at0 = 0.0;
  {
    const auto& ts = p.ts_;
    size_t i = static_cast<size_t>(std::upper_bound(ts.begin(), ts.end(), 0.0) - ts.begin());
    i = std::clamp<size_t>(i, 1, n - 1) - 1;
    const double d = 0.0 - ts[i];
    at0 = p.anti_[i] + p.vs_[i] * d + 0.5 * p.slope_[i] * d * d;
  }
  for (double& a : p.anti_) a -= at0;
  // conservative growth metadata; h3_validate reports honest margins
  p.r_ = 2.0;
  p.kappa0_ = 0.0;
  p.kappa1_ = *std::max_element(p.slope_.begin(), p.slope_.end());
  p.c1_ = p.kappa1_;
  return p;
}

double PsiSpec::value(double s) const {
  switch (kind_) {
    case PsiKind::PowerOdd:
      return odd_power(s, m_);
    case PsiKind::AffinePower:
      return alpha_ * s + odd_power(s, m_);
    case PsiKind::Linear:
      return alpha_ * s;
    case PsiKind::Custom: {
      const size_t n = ts_.size();
      size_t i = static_cast<size_t>(std::upper_bound(ts_.begin(), ts_.end(), s) - ts_.begin());
      i = std::clamp<size_t>(i, 1, n - 1) - 1;
      return vs_[i] + slope_[i] * (s - ts_[i]);
    }
  }
  return 0.0;
}

double PsiSpec::derivative(double s) const {
  switch (kind_) {
    case PsiKind::PowerOdd:
      return static_cast<double>(m_) * odd_power(s, m_ - 1);
    case PsiKind::AffinePower:
      return alpha_ + static_cast<double>(m_) * odd_power(s, m_ - 1);
    case PsiKind::Linear:
      return alpha_;
    case PsiKind::Custom: {
      const size_t n = ts_.size();
      size_t i = static_cast<size_t>(std::upper_bound(ts_.begin(), ts_.end(), s) - ts_.begin());
      i = std::clamp<size_t>(i, 1, n - 1) - 1;
      return slope_[i];
    }
  }
  return 0.0;
}

double PsiSpec::antiderivative(double s) const {
  switch (kind_) {
    case PsiKind::PowerOdd:
      return odd_power(s, m_ + 1) / static_cast<double>(m_ + 1);
    case PsiKind::AffinePower:
      return 0.5 * alpha_ * s * s + odd_power(s, m_ + 1) / static_cast<double>(m_ + 1);
    case PsiKind::Linear:
      return 0.5 * alpha_ * s * s;
    case PsiKind::Custom: {
      const size_t n = ts_.size();
      size_t i = static_cast<size_t>(std::upper_bound(ts_.begin(), ts_.end(), s) - ts_.begin());
      i = std::clamp<size_t>(i, 1, n - 1) - 1;
      const double d = s - ts_[i];
      return anti_[i] + vs_[i] * d + 0.5 * slope_[i] * d * d;
    }
  }
  return 0.0;
}

double PsiSpec::inverse(double w) const {
  switch (kind_) {
    case PsiKind::PowerOdd: {
      const double a = std::pow(std::abs(w), 1.0 / static_cast<double>(m_));
      return w < 0.0 ? -a : a;
    }
    case PsiKind::Linear:
      return w / alpha_;
    case PsiKind::AffinePower: {
      // alpha s + s^m = w, strictly increasing; safeguarded Newton.
      double lo = -1.0, hi = 1.0;
      while (value(lo) > w) lo *= 2.0;
      while (value(hi) < w) hi *= 2.0;
      double s = 0.5 * (lo + hi);
      for (int it = 0; it < 200; ++it) {
        const double f = value(s) - w;
        if (f > 0.0) hi = s; else lo = s;
        const double d = derivative(s);
        double step = (d > 0.0) ? s - f / d : 0.5 * (lo + hi);
        if (!(step > lo && step < hi)) step = 0.5 * (lo + hi);
        if (std::abs(step - s) < 1e-16 * (1.0 + std::abs(s))) return step;
        s = step;
      }
      return s;
    }
    case PsiKind::Custom: {
      const size_t n = vs_.size();
      size_t i = static_cast<size_t>(std::upper_bound(vs_.begin(), vs_.end(), w) - vs_.begin());
      i = std::clamp<size_t>(i, 1, n - 1) - 1;
      if (slope_[i] == 0.0) return ts_[i];  // flat segment: pick the left end
      return ts_[i] + (w - vs_[i]) / slope_[i];
    }
  }
  return 0.0;
}

void PsiSpec::value_array(std::span<const double> s, std::span<double> out) const {
  switch (kind_) {
    case PsiKind::PowerOdd:
      if (m_ == 3) {
        for (size_t i = 0; i < s.size(); ++i) out[i] = s[i] * s[i] * s[i];
      } else {
        for (size_t i = 0; i < s.size(); ++i) out[i] = odd_power(s[i], m_);
      }
      return;
    case PsiKind::Linear:
      for (size_t i = 0; i < s.size(); ++i) out[i] = alpha_ * s[i];
      return;
    default:
      for (size_t i = 0; i < s.size(); ++i) out[i] = value(s[i]);
  }
}

void PsiSpec::derivative_array(std::span<const double> s, std::span<double> out) const {
  switch (kind_) {
    case PsiKind::PowerOdd:
      if (m_ == 3) {
        for (size_t i = 0; i < s.size(); ++i) out[i] = 3.0 * s[i] * s[i];
      } else {
        for (size_t i = 0; i < s.size(); ++i) out[i] = static_cast<double>(m_) * odd_power(s[i], m_ - 1);
      }
      return;
    case PsiKind::Linear:
      for (size_t i = 0; i < s.size(); ++i) out[i] = alpha_;
      return;
    default:
      for (size_t i = 0; i < s.size(); ++i) out[i] = derivative(s[i]);
  }
}

void PsiSpec::require_r_at_least(double r_min) const {
  if (r_ < r_min)
    throw ConfigError("this experiment requires growth exponent r >= " + std::to_string(r_min) +
                      " (configured Psi has r = " + std::to_string(r_) + ")");
}

EnergyValue phi_energy(const PsiSpec& psi, const GridField& x) {
  const double h = x.domain.spacing();
  const double r = psi.growth_r();
  double phi = 0.0;
  double lrp = 0.0;  // |x|^{r+1}_{L^{r+1}} by the same quadrature
  bool finite = true;
  for (double v : x.values) {
    if (!std::isfinite(v)) finite = false;
    phi += psi.antiderivative(v);
    lrp += std::pow(std::abs(v), r + 1.0);
  }
  phi *= h;
  lrp *= h;
  const double bound = psi.kappa0() / (r * (r + 1.0)) * lrp;
  return EnergyValue{phi, phi - bound, finite};
}

H3Report h3_validate(const PsiSpec& psi, double s_min, double s_max, int samples,
                     double tolerance) {
  if (samples < 2) throw ConfigError("h3_validate requires at least 2 samples");
  if (!(s_max > s_min)) throw ConfigError("h3_validate requires a nonempty interval");
  H3Report rep;
  rep.samples = samples;
  rep.worst_lower_margin = rep.worst_upper_margin = std::numeric_limits<double>::infinity();
  const double r = psi.growth_r();
  for (int i = 0; i < samples; ++i) {
    const double s = s_min + (s_max - s_min) * static_cast<double>(i) / (samples - 1);
    const double dp = psi.derivative(s);
    const double pw = std::pow(std::abs(s), r - 1.0);
    const double lower = dp - psi.kappa0() * pw;
    const double upper = psi.kappa1() * pw + psi.c1() - dp;
    if (lower < rep.worst_lower_margin) {
      rep.worst_lower_margin = lower;
      rep.worst_lower_s = s;
    }
    if (upper < rep.worst_upper_margin) {
      rep.worst_upper_margin = upper;
      rep.worst_upper_s = s;
    }
  }
  rep.pass = rep.worst_lower_margin >= -tolerance && rep.worst_upper_margin >= -tolerance;
  return rep;
}

}  // namespace spme
