#ifndef SPME_STATS_HPP
#define SPME_STATS_HPP

#include <span>
#include <vector>

namespace spme {

double mean_of(std::span<const double> v);
double variance_of(std::span<const double> v);  // unbiased

/// Autocorrelation-adjusted standard error of the mean by batch means: the
/// series is cut into `batches` equal blocks (tail remainder dropped) and the
/// spread of the block means estimates the error of the overall mean.
struct BatchMeans {
  double mean = 0.0;
  double se = 0.0;
  int batches = 0;
  long used = 0;
};
BatchMeans batch_means(std::span<const double> series, int batches = 64);

struct WilsonInterval {
  double frequency = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  long hits = 0;
  long count = 0;
};
WilsonInterval wilson_interval(long hits, long count, double z = 1.96);

/// q-th percentile (linear interpolation) of an unsorted copy, q in [0, 1].
double percentile(std::vector<double> values, double q);

}  // namespace spme

#endif
