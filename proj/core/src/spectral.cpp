#include "spme/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>

namespace spme {

namespace {

constexpr double kPi = std::numbers::pi;

bool is_power_of_two(unsigned v) { return v != 0 && (v & (v - 1)) == 0; }

// Full tables are cheap for the grid sizes used by the samplers; beyond that
// the transforms are oracle-resolution one-offs and recompute the sines.
constexpr int kSineTableMaxM = 600;

}  // namespace

void DomainSpec::validate() const {
  if (!(length > 0.0)) throw ConfigError("domain.length must be positive");
  if (grid_points < 1) throw ConfigError("domain.grid_points must be >= 1");
}

GridField::GridField(DomainSpec dom, std::vector<double> vals)
    : domain(dom), values(std::move(vals)) {
  if (static_cast<int>(values.size()) != domain.grid_points)
    throw DimensionError("GridField: value count " + std::to_string(values.size()) +
                         " does not match grid_points " + std::to_string(domain.grid_points));
}

GridField GridField::zeros(DomainSpec dom) {
  return GridField(dom, std::vector<double>(static_cast<size_t>(dom.grid_points), 0.0));
}

SpectralField SpectralField::zeros(double length, int n) {
  return SpectralField(length, std::vector<double>(static_cast<size_t>(n), 0.0));
}

SpectralField SpectralField::unit(double length, int n, int k, double amplitude) {
  SpectralField x = zeros(length, n);
  if (k < 1 || k > n) throw DimensionError("SpectralField::unit: mode index out of range");
  x.coeff[static_cast<size_t>(k - 1)] = amplitude;
  return x;
}

double eigenvalue(int k, double length) {
  const double w = static_cast<double>(k) * kPi / length;
  return w * w;
}

double eigenfunction(int k, double length, double xi) {
  return std::sqrt(2.0 / length) * std::sin(static_cast<double>(k) * kPi * xi / length);
}

Mode mode(int k, double length) { return Mode{k, eigenvalue(k, length), length}; }

double norm(const SpectralField& x, NormKind which) {
  return std::sqrt(std::max(0.0, inner(x, x, which)));
}

double inner(const SpectralField& x, const SpectralField& y, NormKind which) {
  if (x.length != y.length)
    throw DimensionError("inner: mismatched domain lengths");
  const size_t n = std::min(x.coeff.size(), y.coeff.size());
  double s = 0.0;
  switch (which) {
    case NormKind::L2:
      for (size_t k = 0; k < n; ++k) s += x.coeff[k] * y.coeff[k];
      break;
    case NormKind::H10:
      for (size_t k = 0; k < n; ++k)
        s += eigenvalue(static_cast<int>(k) + 1, x.length) * x.coeff[k] * y.coeff[k];
      break;
    case NormKind::Hminus1:
      for (size_t k = 0; k < n; ++k)
        s += x.coeff[k] * y.coeff[k] / eigenvalue(static_cast<int>(k) + 1, x.length);
      break;
  }
  return s;
}

SpectralField project(const SpectralField& x, int n) {
  SpectralField out = SpectralField::zeros(x.length, n);
  const size_t keep = std::min(x.coeff.size(), static_cast<size_t>(n));
  std::copy(x.coeff.begin(), x.coeff.begin() + static_cast<long>(keep), out.coeff.begin());
  return out;
}

SpectralField apply_laplacian(const SpectralField& x) {
  SpectralField out = x;
  for (size_t k = 0; k < out.coeff.size(); ++k)
    out.coeff[k] *= -eigenvalue(static_cast<int>(k) + 1, x.length);
  return out;
}

SpectralField add(const SpectralField& x, const SpectralField& y) {
  if (x.length != y.length) throw DimensionError("add: mismatched domain lengths");
  SpectralField out = SpectralField::zeros(x.length, static_cast<int>(std::max(x.coeff.size(), y.coeff.size())));
  for (size_t k = 0; k < x.coeff.size(); ++k) out.coeff[k] += x.coeff[k];
  for (size_t k = 0; k < y.coeff.size(); ++k) out.coeff[k] += y.coeff[k];
  return out;
}

SpectralField subtract(const SpectralField& x, const SpectralField& y) {
  return add(x, scale(y, -1.0));
}

SpectralField scale(const SpectralField& x, double factor) {
  SpectralField out = x;
  for (double& c : out.coeff) c *= factor;
  return out;
}

void CovarianceSpec::validate() const {
  if (!(gamma > 0.5 && gamma <= 1.0))
    throw ConfigError("cov.gamma must lie in (1/2, 1]");
}

double CovarianceSpec::lambda(int k, double length) const {
  return std::pow(eigenvalue(k, length), -gamma);
}

CovarianceSpec::TraceEstimate CovarianceSpec::weighted_trace(double length, int terms) const {
  const double alpha = 2.0 / length;  // sup |e_k|^2 for the L2-normalized basis
  double partial = 0.0;
  for (int k = 1; k <= terms; ++k) partial += alpha * lambda(k, length);
  // sum_{k>K} k^{-2g} <= K^{1-2g}/(2g-1) by integral comparison
  const double front = alpha * std::pow(kPi / length, -2.0 * gamma);
  const double tail = front * std::pow(static_cast<double>(terms), 1.0 - 2.0 * gamma) /
                      (2.0 * gamma - 1.0);
  return TraceEstimate{partial, tail, terms};
}

SpectralField covariance_sqrt_apply(const SpectralField& x, const CovarianceSpec& c) {
  c.validate();
  SpectralField out = x;
  for (size_t k = 0; k < out.coeff.size(); ++k)
    out.coeff[k] *= std::pow(eigenvalue(static_cast<int>(k) + 1, x.length), -0.5 * c.gamma);
  return out;
}

DstPlan::DstPlan(DomainSpec dom) : dom_(dom) {
  dom_.validate();
  const int M = dom_.grid_points;
  fast_ = is_power_of_two(static_cast<unsigned>(M + 1));
  table_ = M <= kSineTableMaxM;
  if (table_) {
    sine_.resize(static_cast<size_t>(M) * static_cast<size_t>(M));
    for (int k = 1; k <= M; ++k)
      for (int j = 1; j <= M; ++j)
        sine_[static_cast<size_t>(k - 1) * M + (j - 1)] =
            std::sin(kPi * static_cast<double>(k) * static_cast<double>(j) / (M + 1));
  }
}

double DstPlan::sin_at(int k, int j) const {
  const int M = dom_.grid_points;
  if (table_) return sine_[static_cast<size_t>(k - 1) * M + (j - 1)];
  return std::sin(kPi * static_cast<double>(k) * static_cast<double>(j) / (M + 1));
}

SpectralField DstPlan::forward(const GridField& g, int n) const {
  if (fast_ && n > dom_.grid_points / 4) return forward_fast(g, n);
  return forward_direct(g, n);
}

GridField DstPlan::inverse(const SpectralField& x) const {
  if (fast_ && x.modes() > dom_.grid_points / 4) return inverse_fast(x);
  return inverse_direct(x);
}

SpectralField DstPlan::forward_direct(const GridField& g, int n) const {
  const int M = dom_.grid_points;
  if (n > M)
    throw DimensionError("dst_forward: requested " + std::to_string(n) + " modes on " +
                         std::to_string(M) + " grid points");
  if (g.size() != M) throw DimensionError("dst_forward: grid size mismatch");
  const double weight = dom_.spacing() * std::sqrt(2.0 / dom_.length);
  SpectralField x = SpectralField::zeros(dom_.length, n);
  for (int k = 1; k <= n; ++k) {
    double s = 0.0;
    for (int j = 1; j <= M; ++j) s += g.values[static_cast<size_t>(j - 1)] * sin_at(k, j);
    x.coeff[static_cast<size_t>(k - 1)] = weight * s;
  }
  return x;
}

GridField DstPlan::inverse_direct(const SpectralField& x) const {
  const int M = dom_.grid_points;
  const int n = std::min(x.modes(), M);
  const double amp = std::sqrt(2.0 / dom_.length);
  GridField g = GridField::zeros(dom_);
  for (int j = 1; j <= M; ++j) {
    double s = 0.0;
    for (int k = 1; k <= n; ++k) s += x.coeff[static_cast<size_t>(k - 1)] * sin_at(k, j);
    g.values[static_cast<size_t>(j - 1)] = amp * s;
  }
  return g;
}

// DST-I of v (length M) through a complex FFT of the odd extension, length
// N = 2(M+1). Requires N to be a power of two.
std::vector<double> DstPlan::full_sine_transform(const std::vector<double>& v) const {
  const int M = dom_.grid_points;
  const int N = 2 * (M + 1);
  std::vector<std::complex<double>> y(static_cast<size_t>(N), 0.0);
  for (int j = 1; j <= M; ++j) {
    y[static_cast<size_t>(j)] = v[static_cast<size_t>(j - 1)];
    y[static_cast<size_t>(N - j)] = -v[static_cast<size_t>(j - 1)];
  }
  // Iterative radix-2 Cooley-Tukey.
  unsigned n = static_cast<unsigned>(N);
  for (unsigned i = 1, rev = 0; i < n; ++i) {
    unsigned bit = n >> 1;
    for (; rev & bit; bit >>= 1) rev ^= bit;
    rev ^= bit;
    if (i < rev) std::swap(y[i], y[rev]);
  }
  for (unsigned len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (unsigned i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (unsigned j = 0; j < len / 2; ++j) {
        const std::complex<double> u = y[i + j];
        const std::complex<double> t = y[i + j + len / 2] * w;
        y[i + j] = u + t;
        y[i + j + len / 2] = u - t;
        w *= wl;
      }
    }
  }
  // With the odd extension, Im(FFT)_k = -2 * sum_j v_j sin(pi k j/(M+1)).
  std::vector<double> s(static_cast<size_t>(M));
  for (int k = 1; k <= M; ++k) s[static_cast<size_t>(k - 1)] = -0.5 * y[static_cast<size_t>(k)].imag();
  return s;
}

SpectralField DstPlan::forward_fast(const GridField& g, int n) const {
  const int M = dom_.grid_points;
  if (!fast_) throw ConfigError("dst fast path requires M+1 to be a power of two");
  if (n > M)
    throw DimensionError("dst_forward: requested " + std::to_string(n) + " modes on " +
                         std::to_string(M) + " grid points");
  if (g.size() != M) throw DimensionError("dst_forward: grid size mismatch");
  const std::vector<double> s = full_sine_transform(g.values);
  const double weight = dom_.spacing() * std::sqrt(2.0 / dom_.length);
  SpectralField x = SpectralField::zeros(dom_.length, n);
  for (int k = 1; k <= n; ++k) x.coeff[static_cast<size_t>(k - 1)] = weight * s[static_cast<size_t>(k - 1)];
  return x;
}

GridField DstPlan::inverse_fast(const SpectralField& x) const {
  const int M = dom_.grid_points;
  if (!fast_) throw ConfigError("dst fast path requires M+1 to be a power of two");
  std::vector<double> padded(static_cast<size_t>(M), 0.0);
  const int n = std::min(x.modes(), M);
  for (int k = 0; k < n; ++k) padded[static_cast<size_t>(k)] = x.coeff[static_cast<size_t>(k)];
  const std::vector<double> s = full_sine_transform(padded);
  const double amp = std::sqrt(2.0 / dom_.length);
  GridField g = GridField::zeros(dom_);
  for (int j = 1; j <= M; ++j) g.values[static_cast<size_t>(j - 1)] = amp * s[static_cast<size_t>(j - 1)];
  return g;
}

SpectralField dst_forward(const GridField& g, int n) {
  return DstPlan(g.domain).forward(g, n);
}

GridField dst_inverse(const SpectralField& x, int grid_points) {
  DomainSpec dom{x.length, grid_points};
  return DstPlan(dom).inverse(x);
}

namespace grid {

double inner_l2(const GridField& f, const GridField& g) {
  if (f.size() != g.size()) throw DimensionError("grid::inner_l2: size mismatch");
  double s = 0.0;
  for (int j = 0; j < f.size(); ++j) s += f.values[static_cast<size_t>(j)] * g.values[static_cast<size_t>(j)];
  return f.domain.spacing() * s;
}

double norm_l2(const GridField& f) { return std::sqrt(std::max(0.0, inner_l2(f, f))); }

GridField apply_laplacian_fd(const GridField& f) {
  const int M = f.size();
  const double inv_h2 = 1.0 / (f.domain.spacing() * f.domain.spacing());
  GridField out = GridField::zeros(f.domain);
  for (int j = 0; j < M; ++j) {
    const double left = (j > 0) ? f.values[static_cast<size_t>(j - 1)] : 0.0;
    const double right = (j < M - 1) ? f.values[static_cast<size_t>(j + 1)] : 0.0;
    out.values[static_cast<size_t>(j)] = (left - 2.0 * f.values[static_cast<size_t>(j)] + right) * inv_h2;
  }
  return out;
}

double h10_seminorm_sq_fd(const GridField& f) {
  const int M = f.size();
  const double h = f.domain.spacing();
  double s = 0.0;
  double prev = 0.0;
  for (int j = 0; j < M; ++j) {
    const double d = f.values[static_cast<size_t>(j)] - prev;
    s += d * d;
    prev = f.values[static_cast<size_t>(j)];
  }
  s += prev * prev;  // last gap down to the right boundary zero
  return s / h;
}

double fd_eigenvalue(int k, const DomainSpec& dom) {
  const double h = dom.spacing();
  const double s = std::sin(0.5 * kPi * static_cast<double>(k) * h / dom.length);
  return 4.0 * s * s / (h * h);
}

GridField solve_neg_laplacian_fd(const GridField& f) {
  const int M = f.size();
  const double h = f.domain.spacing();
  const double d = 2.0 / (h * h);
  const double o = -1.0 / (h * h);
  std::vector<double> lower(static_cast<size_t>(M), o);
  std::vector<double> diag(static_cast<size_t>(M), d);
  std::vector<double> upper(static_cast<size_t>(M), o);
  std::vector<double> rhs = f.values;
  solve_tridiagonal(lower, std::move(diag), upper, rhs);
  return GridField(f.domain, std::move(rhs));
}

double inner_hminus1(const GridField& f, const GridField& g) {
  const GridField w = solve_neg_laplacian_fd(f);
  return inner_l2(w, g);
}

double norm_hminus1(const GridField& f) {
  return std::sqrt(std::max(0.0, inner_hminus1(f, f)));
}

}  // namespace grid

void solve_tridiagonal(const std::vector<double>& lower, std::vector<double> diag,
                       const std::vector<double>& upper, std::vector<double>& rhs) {
  const size_t n = rhs.size();
  if (n == 0) return;
  for (size_t i = 1; i < n; ++i) {
    const double m = lower[i] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
}

}  // namespace spme
