#pragma once

#include <cstddef>
#include <span>

namespace fincontext {

/// Sample mean with a standard error.
struct MeanEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

/// Mean of a (possibly autocorrelated) series with a batch-means standard
/// error: the series is cut into `batches` contiguous blocks and the spread of
/// the block means gives the error. Falls back to the i.i.d. formula when
/// there are fewer values than batches.
MeanEstimate batch_mean(std::span<const double> values, std::size_t batches = 32);

/// Ratio sum(num) / sum(den) with a batch-means standard error computed from
/// per-block ratios.
MeanEstimate batch_ratio(std::span<const double> num, std::span<const double> den, std::size_t batches = 32);

}  // namespace fincontext
