#pragma once

#include <cmath>
#include <cstddef>

#include <Eigen/Core>

namespace fincontext {

/// -p log2 p with the 0 log 0 = 0 convention.
inline double plog2p(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

/// Neumaier-compensated running sum. Summation order is the caller's, so the
/// result is deterministic for a fixed iteration order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Shannon entropy (bits) of a probability vector.
template <typename Derived>
double entropy_bits(const Eigen::DenseBase<Derived>& p) {
  CompensatedSum acc;
  for (Eigen::Index i = 0; i < p.size(); ++i) acc += plog2p(p.derived().coeff(i));
  return acc.value();
}

/// Conditional entropy H(target | context) in bits from a joint table whose
/// columns are contexts and rows are target values, i.e. joint(y, c) = P(c, y).
/// Contexts of zero mass contribute nothing.
template <typename Derived>
double conditional_entropy_bits(const Eigen::MatrixBase<Derived>& joint) {
  CompensatedSum acc;
  for (Eigen::Index c = 0; c < joint.cols(); ++c) {
    const double mass = joint.col(c).sum();
    if (mass <= 0.0) continue;
    for (Eigen::Index y = 0; y < joint.rows(); ++y) {
      const double p = joint(y, c);
      if (p > 0.0) acc += -p * std::log2(p / mass);
    }
  }
  return acc.value();
}

/// Total-variation distance between two distributions.
template <typename A, typename B>
double total_variation(const Eigen::MatrixBase<A>& p, const Eigen::MatrixBase<B>& q) {
  return 0.5 * (p - q).cwiseAbs().sum();
}

}  // namespace fincontext
