#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aifpong/rng.hpp"

namespace aifpong {

/// Smallest admissible count and the floor applied to q inside KL.
/// Learned parameters are logged and divided throughout, so zeros must be
/// impossible anywhere a count or a KL denominator can appear.
inline constexpr double kEpsilonFloor = 1e-16;

/// A categorical distribution: non-negative entries summing to 1 within 1e-12.
class Categorical {
 public:
  /// Validates on construction; throws std::invalid_argument on bad input.
  explicit Categorical(std::vector<double> probs);

  static Categorical uniform(std::size_t n);
  static Categorical one_hot(std::size_t n, std::size_t index);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

/// Dirichlet-style concentration parameters backing a learned Categorical.
/// Entries are kept at or above kEpsilonFloor at all times; updates that
/// would push an entry below the floor clamp to it.
class CountVector {
 public:
  explicit CountVector(std::vector<double> counts);
  explicit CountVector(std::size_t n, double value = kEpsilonFloor);

  std::size_t size() const { return counts_.size(); }
  double operator[](std::size_t i) const { return counts_[i]; }
  const std::vector<double>& values() const { return counts_; }

  /// counts[i] <- max(counts[i] + delta, floor). delta may be negative.
  void add(std::size_t i, double delta);

 private:
  std::vector<double> counts_;
};

/// probs[i] = counts[i] / sum(counts). Throws "empty support" on an empty
/// vector and rejects negative or non-finite entries.
Categorical normalize(std::span<const double> counts);
Categorical normalize(const CountVector& counts);

/// Shannon entropy in nats, with 0 log 0 := 0. Always in [0, log n].
double entropy(const Categorical& p);

/// Entropy of normalize(counts) without materializing the distribution,
/// via H = log S - (sum c_i log c_i) / S with S = sum c_i.
double entropy_of_counts(std::span<const double> counts);

/// KL(p || q) in nats. q entries are floored at kEpsilonFloor wherever
/// p > 0, keeping the result finite. Throws on mismatched support sizes.
double kl_divergence(const Categorical& p, const Categorical& q);

/// Raw-span KL with the same floor semantics; both spans must already be
/// normalized distributions of equal size. Used by inner loops.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// probs proportional to exp(precision * values), stabilized by
/// max-subtraction. precision must be positive; +infinity yields a one-hot
/// at the first maximal value (lowest index wins ties).
Categorical softmax(std::span<const double> values, double precision = 1.0);

/// Inverse-CDF draw. Deterministic given the generator state.
std::size_t sample(const Categorical& p, Rng& rng);

}  // namespace aifpong
