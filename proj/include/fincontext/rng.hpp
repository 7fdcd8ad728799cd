#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Core>

namespace fincontext {

/// 64-bit FNV-1a hash.
std::uint64_t fnv1a64(std::string_view text);

/// SplitMix64 step. Used to expand a 64-bit seed into generator state and to
/// derive independent sub-seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Derive a sub-seed for a named purpose ("kernel", "sequence", ...).
///
/// The result is splitmix64(seed ^ fnv1a64(tag)), so the kernel and the
/// sequence drawn for one experiment seed never share a stream.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view tag);

/// xoshiro256** generator. Platform independent: every variate below is
/// produced from integer arithmetic plus std::log/std::sqrt/std::pow.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  std::uint64_t operator()() { return next(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return ~std::uint64_t{0}; }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  /// Uniform integer on [0, bound). bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);

  /// Standard normal (Marsaglia polar method).
  double normal();

  /// Gamma(shape, 1) by Marsaglia-Tsang; shape < 1 uses the U^(1/shape) boost.
  double gamma(double shape);

  /// Symmetric Dirichlet(alpha) of the given dimension, via normalized gammas.
  Eigen::VectorXd dirichlet(Eigen::Index dim, double alpha);

 private:
  std::uint64_t s_[4];
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace fincontext
