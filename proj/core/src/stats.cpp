#include "spme/stats.hpp"

#include <algorithm>
#include <cmath>

#include "spme/errors.hpp"

namespace spme {

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

BatchMeans batch_means(std::span<const double> series, int batches) {
  BatchMeans out;
  if (series.empty() || batches < 2) return out;
  const long block = static_cast<long>(series.size()) / batches;
  if (block < 1) {
    // fewer points than batches: fall back to iid standard error
    out.mean = mean_of(series);
    out.se = std::sqrt(variance_of(series) / static_cast<double>(series.size()));
    out.batches = static_cast<int>(series.size());
    out.used = static_cast<long>(series.size());
    return out;
  }
  std::vector<double> bm(static_cast<size_t>(batches));
  for (int b = 0; b < batches; ++b) {
    double s = 0.0;
    for (long i = 0; i < block; ++i) s += series[static_cast<size_t>(b * block + i)];
    bm[static_cast<size_t>(b)] = s / static_cast<double>(block);
  }
  out.mean = mean_of(bm);
  out.se = std::sqrt(variance_of(bm) / static_cast<double>(batches));
  out.batches = batches;
  out.used = static_cast<long>(block) * batches;
  return out;
}

WilsonInterval wilson_interval(long hits, long count, double z) {
  if (count < 1) throw ConfigError("wilson_interval requires count >= 1");
  WilsonInterval w;
  w.hits = hits;
  w.count = count;
  const double n = static_cast<double>(count);
  const double p = static_cast<double>(hits) / n;
  w.frequency = p;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = p + z2 / (2.0 * n);
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  w.lower = std::max(0.0, (center - half) / denom);
  w.upper = std::min(1.0, (center + half) / denom);
  return w;
}

double percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const size_t lo = static_cast<size_t>(pos);
  const size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] * (1.0 - frac) + values[hi] * frac;
}

}  // namespace spme
