#pragma once

#include <array>
#include <optional>
#include <utility>

#include "aifpong/agent.hpp"
#include "aifpong/categorical.hpp"
#include "aifpong/gen_model.hpp"

namespace aifpong {

struct Aif1Config {
  double gamma = 1.0;  // action precision; +infinity selects the argmin-G action
  double lr = 1.0;
  double eta = 1.0;
};

/// One-step expected-free-energy agent. With an identity likelihood the
/// ambiguity term vanishes, so G(u) is the risk: the KL between the
/// factorized one-step prediction and the learned preference, summed over
/// modalities. Actions are drawn from softmax(-gamma * G + log E).
class Aif1Agent : public PongAgent {
 public:
  explicit Aif1Agent(Aif1Config config = {});

  /// G(u) at the given observation: sum over modalities of
  /// KL[predict_factor(m, u, obs_m) || normalize(C_m)].
  double efe_one_step(const Observation& obs, Action u) const;

  std::array<double, kNumActions> efe(const Observation& obs) const;

  /// The action distribution softmax(-gamma * G + log E). An infinite gamma
  /// collapses it to a one-hot at the smallest G (lowest index on ties).
  Categorical action_distribution(const Observation& obs) const;

  Action act(const Observation& obs, Rng& rng) override;

  /// Feeds the cached (observation, action) pair and the successor into the
  /// model. Throws std::runtime_error if no act preceded this call.
  void learn(const Observation& next, FeedbackKind fb);

  void observe(const Observation& next, FeedbackKind fb) override { learn(next, fb); }

  void append_trace_samples(std::vector<TraceSample>& out) override;

  const GenerativeModel& model() const { return model_; }
  GenerativeModel& model() { return model_; }

 private:
  GenerativeModel model_;
  double gamma_;
  std::optional<std::pair<Observation, Action>> pending_;
};

}  // namespace aifpong
