#include "aifpong/gen_model.hpp"

#include <stdexcept>

namespace aifpong {

namespace {

int modality_dim(Modality m) { return kModalityDims[static_cast<int>(m)]; }

int factor_of(const Observation& obs, Modality m) {
  switch (m) {
    case Modality::BallX: return obs.ball_x;
    case Modality::BallY: return obs.ball_y;
    case Modality::PaddleY: return obs.paddle_y;
  }
  throw std::invalid_argument("unknown modality");
}

void check_factor(Modality m, int value, const char* what) {
  if (value < 0 || value >= modality_dim(m))
    throw std::out_of_range(std::string(what) + ": factor index out of range");
}

}  // namespace

int joint_index(int bx, int by, int py) {
  if (bx < 0 || bx >= kBallXDim || by < 0 || by >= kBallYDim || py < 0 || py >= kPaddleYDim)
    throw std::out_of_range("joint_index: factor out of range");
  return bx * (kBallYDim * kPaddleYDim) + by * kPaddleYDim + py;
}

int joint_index(const Observation& obs) {
  return joint_index(obs.ball_x, obs.ball_y, obs.paddle_y);
}

FactorTriple factorize(int joint) {
  if (joint < 0 || joint >= kJointStates) throw std::out_of_range("factorize: joint out of range");
  return {joint / (kBallYDim * kPaddleYDim), (joint / kPaddleYDim) % kBallYDim,
          joint % kPaddleYDim};
}

TransitionModel::TransitionModel() {
  for (int m = 0; m < 3; ++m) {
    int dim = kModalityDims[m];
    for (int u = 0; u < kNumActions; ++u) {
      counts_[m][u].assign(static_cast<std::size_t>(dim) * dim, kEpsilonFloor);
      row_sums_[m][u].assign(dim, dim * kEpsilonFloor);
    }
  }
}

void TransitionModel::update(Modality m, Action u, int prev, int next, double lr) {
  check_factor(m, prev, "update_b");
  check_factor(m, next, "update_b");
  if (!(lr > 0.0)) throw std::invalid_argument("update_b: lr must be positive");
  int mi = static_cast<int>(m), ui = static_cast<int>(u), dim = modality_dim(m);
  counts_[mi][ui][static_cast<std::size_t>(prev) * dim + next] += lr;
  row_sums_[mi][ui][prev] += lr;
}

Categorical TransitionModel::predict(Modality m, Action u, int prev) const {
  check_factor(m, prev, "predict_factor");
  int mi = static_cast<int>(m), ui = static_cast<int>(u), dim = modality_dim(m);
  const double* row = counts_[mi][ui].data() + static_cast<std::size_t>(prev) * dim;
  return normalize(std::span<const double>(row, dim));
}

std::span<const double> TransitionModel::counts(Modality m, Action u) const {
  return counts_[static_cast<int>(m)][static_cast<int>(u)];
}

void TransitionModel::write_normalized(Modality m, Action u, std::vector<double>& out) const {
  int mi = static_cast<int>(m), ui = static_cast<int>(u), dim = modality_dim(m);
  const std::vector<double>& c = counts_[mi][ui];
  const std::vector<double>& sums = row_sums_[mi][ui];
  out.resize(c.size());
  for (int p = 0; p < dim; ++p) {
    double inv = 1.0 / sums[p];
    const double* src = c.data() + static_cast<std::size_t>(p) * dim;
    double* dst = out.data() + static_cast<std::size_t>(p) * dim;
    for (int n = 0; n < dim; ++n) dst[n] = src[n] * inv;
  }
}

double TransitionModel::total_entropy(Modality m) const {
  int mi = static_cast<int>(m), dim = modality_dim(m);
  double total = 0.0;
  for (int u = 0; u < kNumActions; ++u) {
    const double* c = counts_[mi][u].data();
    for (int p = 0; p < dim; ++p)
      total += entropy_of_counts(std::span<const double>(c + static_cast<std::size_t>(p) * dim,
                                                         dim));
  }
  return total;
}

PreferenceModel::PreferenceModel() {
  for (int m = 0; m < 3; ++m) counts_[m].assign(kModalityDims[m], kEpsilonFloor);
}

void PreferenceModel::update(const Observation& obs, FeedbackKind fb, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("update_c: eta must be positive");
  if (fb != FeedbackKind::Hit) return;
  for (int m = 0; m < 3; ++m)
    counts_[m][factor_of(obs, static_cast<Modality>(m))] += eta;
}

Categorical PreferenceModel::normalized(Modality m) const {
  return normalize(std::span<const double>(counts_[static_cast<int>(m)]));
}

std::span<const double> PreferenceModel::counts(Modality m) const {
  return counts_[static_cast<int>(m)];
}

double PreferenceModel::total_entropy(Modality m) const {
  return entropy_of_counts(std::span<const double>(counts_[static_cast<int>(m)]));
}

GenerativeModel::GenerativeModel(double lr, double eta) : lr_(lr), eta_(eta) {
  if (!(lr > 0.0)) throw std::invalid_argument("lr must be positive");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
}

void GenerativeModel::update_b(const Observation& prev, Action u, const Observation& next) {
  for (int m = 0; m < 3; ++m) {
    Modality mod = static_cast<Modality>(m);
    b_.update(mod, u, factor_of(prev, mod), factor_of(next, mod), lr_);
  }
}

void GenerativeModel::update_c(const Observation& obs, FeedbackKind fb) {
  c_.update(obs, fb, eta_);
}

Categorical GenerativeModel::predict_factor(Modality m, Action u, int from) const {
  return b_.predict(m, u, from);
}

}  // namespace aifpong
