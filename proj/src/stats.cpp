#include "fincontext/stats.hpp"

#include <cmath>
#include <vector>

#include "fincontext/entropy.hpp"
#include "fincontext/errors.hpp"

namespace fincontext {

namespace {

double spread_se(const std::vector<double>& block_values, double centre) {
  const auto b = static_cast<double>(block_values.size());
  if (block_values.size() < 2) return 0.0;
  CompensatedSum ss;
  for (double v : block_values) ss += (v - centre) * (v - centre);
  return std::sqrt(ss.value() / (b - 1.0) / b);
}

}  // namespace

MeanEstimate batch_mean(std::span<const double> values, std::size_t batches) {
  MeanEstimate out;
  out.n = values.size();
  if (values.empty()) return out;
  CompensatedSum total;
  for (double v : values) total += v;
  out.mean = total.value() / static_cast<double>(values.size());
  if (batches < 2) batches = 2;
  if (values.size() < batches) {
    out.se = spread_se(std::vector<double>(values.begin(), values.end()), out.mean);
    return out;
  }
  const std::size_t block = values.size() / batches;
  std::vector<double> means;
  for (std::size_t b = 0; b < batches; ++b) {
    CompensatedSum s;
    for (std::size_t i = b * block; i < (b + 1) * block; ++i) s += values[i];
    means.push_back(s.value() / static_cast<double>(block));
  }
  out.se = spread_se(means, out.mean);
  return out;
}

MeanEstimate batch_ratio(std::span<const double> num, std::span<const double> den, std::size_t batches) {
  if (num.size() != den.size()) throw PreconditionError("batch_ratio needs equally long series");
  MeanEstimate out;
  out.n = num.size();
  CompensatedSum sn, sd;
  for (std::size_t i = 0; i < num.size(); ++i) {
    sn += num[i];
    sd += den[i];
  }
  if (sd.value() == 0.0) return out;
  out.mean = sn.value() / sd.value();
  if (batches < 2) batches = 2;
  const std::size_t block = num.size() / batches;
  if (block == 0) return out;
  std::vector<double> ratios;
  for (std::size_t b = 0; b < batches; ++b) {
    CompensatedSum bn, bd;
    for (std::size_t i = b * block; i < (b + 1) * block; ++i) {
      bn += num[i];
      bd += den[i];
    }
    if (bd.value() > 0.0) ratios.push_back(bn.value() / bd.value());
  }
  out.se = spread_se(ratios, out.mean);
  return out;
}

}  // namespace fincontext
