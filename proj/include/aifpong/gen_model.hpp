#pragma once

#include <array>
#include <span>
#include <vector>

#include "aifpong/categorical.hpp"
#include "aifpong/types.hpp"

namespace aifpong {

// The three observation modalities. The likelihood A is the identity on each
// of them, so observations double as exact factor states and no A matrix is
// stored anywhere.
enum class Modality : int { BallX = 0, BallY = 1, PaddleY = 2 };

inline constexpr std::array<int, 3> kModalityDims = {kBallXDim, kBallYDim, kPaddleYDim};

/// joint = bx * 64 + by * 8 + py, a bijection onto 0..2431.
int joint_index(int bx, int by, int py);
int joint_index(const Observation& obs);

struct FactorTriple {
  int bx, by, py;
};
FactorTriple factorize(int joint);

/// Dirichlet-count transition dynamics, one (dim x dim) count matrix per
/// modality and action. A column (fixed previous factor state) normalizes to
/// the predictive distribution over the next factor state. Counts start at
/// the floor, so unvisited columns read back as uniform.
class TransitionModel {
 public:
  TransitionModel();

  /// counts[m][u][next, prev] += lr for one observed factor transition.
  void update(Modality m, Action u, int prev, int next, double lr);

  /// Normalized column for (m, u, prev).
  Categorical predict(Modality m, Action u, int prev) const;

  /// Raw counts of the (m, u) matrix, laid out row-major by previous state:
  /// entry [prev * dim + next].
  std::span<const double> counts(Modality m, Action u) const;

  /// Writes normalized transition probabilities for (m, u) into out, same
  /// [prev * dim + next] layout. out is resized to dim * dim.
  void write_normalized(Modality m, Action u, std::vector<double>& out) const;

  /// Sum of column entropies over every (action, previous-state) column of
  /// this modality, in nats.
  double total_entropy(Modality m) const;

 private:
  // counts_[m][u] is dim*dim, [prev * dim + next]; row_sums_[m][u] is dim.
  std::array<std::array<std::vector<double>, kNumActions>, 3> counts_;
  std::array<std::array<std::vector<double>, kNumActions>, 3> row_sums_;
};

/// Learned outcome preferences, one count vector per modality. Only Hit
/// feedback adds mass; Miss and None leave the preferences untouched.
class PreferenceModel {
 public:
  PreferenceModel();

  void update(const Observation& obs, FeedbackKind fb, double eta);

  Categorical normalized(Modality m) const;
  std::span<const double> counts(Modality m) const;
  double total_entropy(Modality m) const;

 private:
  std::array<std::vector<double>, 3> counts_;
};

/// Fixed uniform priors over joint states (D) and actions (E).
struct Priors {
  Categorical d = Categorical::uniform(kJointStates);
  Categorical e = Categorical::uniform(kNumActions);
};

/// The full generative model shared by the planning agents: identity A,
/// learned B and C, fixed D and E.
class GenerativeModel {
 public:
  GenerativeModel(double lr = 1.0, double eta = 1.0);

  /// Accumulates one observed transition into every modality of B.
  void update_b(const Observation& prev, Action u, const Observation& next);
  /// Accumulates preference mass on Hit.
  void update_c(const Observation& obs, FeedbackKind fb);

  Categorical predict_factor(Modality m, Action u, int from) const;

  const TransitionModel& b() const { return b_; }
  const PreferenceModel& c() const { return c_; }
  const Priors& priors() const { return priors_; }
  double lr() const { return lr_; }
  double eta() const { return eta_; }

 private:
  TransitionModel b_;
  PreferenceModel c_;
  Priors priors_;
  double lr_;
  double eta_;
};

}  // namespace aifpong
