#include "aifpong/categorical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace aifpong {

namespace {

void check_finite_nonnegative(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite entry");
    if (x < 0.0) throw std::invalid_argument(std::string(what) + ": negative entry");
  }
}

}  // namespace

Categorical::Categorical(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("Categorical: empty support");
  check_finite_nonnegative(probs_, "Categorical");
  double sum = 0.0;
  for (double p : probs_) sum += p;
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("Categorical: probabilities sum to " + std::to_string(sum));
}

Categorical Categorical::uniform(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Categorical: empty support");
  return Categorical(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

Categorical Categorical::one_hot(std::size_t n, std::size_t index) {
  if (index >= n) throw std::invalid_argument("Categorical: one_hot index out of range");
  std::vector<double> p(n, 0.0);
  p[index] = 1.0;
  return Categorical(std::move(p));
}

CountVector::CountVector(std::vector<double> counts) : counts_(std::move(counts)) {
  if (counts_.empty()) throw std::invalid_argument("CountVector: empty support");
  for (double& c : counts_) {
    if (!std::isfinite(c)) throw std::invalid_argument("CountVector: non-finite entry");
    c = std::max(c, kEpsilonFloor);
  }
}

CountVector::CountVector(std::size_t n, double value)
    : CountVector(std::vector<double>(n, value)) {}

void CountVector::add(std::size_t i, double delta) {
  counts_[i] = std::max(counts_[i] + delta, kEpsilonFloor);
}

Categorical normalize(std::span<const double> counts) {
  if (counts.empty()) throw std::invalid_argument("empty support");
  check_finite_nonnegative(counts, "normalize");
  double sum = 0.0;
  for (double c : counts) sum += c;
  if (sum <= 0.0) throw std::invalid_argument("normalize: zero total mass");
  std::vector<double> probs(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) probs[i] = counts[i] / sum;
  return Categorical(std::move(probs));
}

Categorical normalize(const CountVector& counts) {
  return normalize(std::span<const double>(counts.values()));
}

double entropy(const Categorical& p) {
  double h = 0.0;
  for (double x : p.probs())
    if (x > 0.0) h -= x * std::log(x);
  return h < 0.0 ? 0.0 : h;  // guard against -0.0 from rounding
}

double entropy_of_counts(std::span<const double> counts) {
  double sum = 0.0, clogc = 0.0;
  for (double c : counts) {
    sum += c;
    if (c > 0.0) clogc += c * std::log(c);
  }
  if (sum <= 0.0) throw std::invalid_argument("entropy_of_counts: zero total mass");
  double h = std::log(sum) - clogc / sum;
  return h < 0.0 ? 0.0 : h;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw std::invalid_argument("kl_divergence: support mismatch");
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) d += p[i] * std::log(p[i] / std::max(q[i], kEpsilonFloor));
  }
  return d < 0.0 ? 0.0 : d;  // rounding can produce tiny negatives for p ~ q
}

double kl_divergence(const Categorical& p, const Categorical& q) {
  return kl_divergence(std::span<const double>(p.probs()), std::span<const double>(q.probs()));
}

Categorical softmax(std::span<const double> values, double precision) {
  if (values.empty()) throw std::invalid_argument("softmax: empty input");
  for (double v : values)
    if (std::isnan(v)) throw std::invalid_argument("softmax: NaN input");
  if (!(precision > 0.0)) throw std::invalid_argument("softmax: precision must be positive");

  std::vector<double> probs(values.size());
  if (std::isinf(precision)) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
      if (values[i] > values[best]) best = i;
    probs[best] = 1.0;
    return Categorical(std::move(probs));
  }

  double vmax = -std::numeric_limits<double>::infinity();
  for (double v : values) vmax = std::max(vmax, precision * v);
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    probs[i] = std::exp(precision * values[i] - vmax);
    sum += probs[i];
  }
  for (double& p : probs) p /= sum;
  return Categorical(std::move(probs));
}

std::size_t sample(const Categorical& p, Rng& rng) {
  double u = uniform01(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  return p.size() - 1;  // cumulative rounding fell short of 1
}

}  // namespace aifpong
