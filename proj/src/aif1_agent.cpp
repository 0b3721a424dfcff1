#include "aifpong/aif1_agent.hpp"

#include <cmath>
#include <stdexcept>

namespace aifpong {

Aif1Agent::Aif1Agent(Aif1Config config)
    : model_(config.lr, config.eta), gamma_(config.gamma) {
  if (!(gamma_ > 0.0)) throw std::invalid_argument("gamma must be positive");
}

double Aif1Agent::efe_one_step(const Observation& obs, Action u) const {
  const int from[3] = {obs.ball_x, obs.ball_y, obs.paddle_y};
  double g = 0.0;
  for (int m = 0; m < 3; ++m) {
    Modality mod = static_cast<Modality>(m);
    g += kl_divergence(model_.predict_factor(mod, u, from[m]), model_.c().normalized(mod));
  }
  return g;
}

std::array<double, kNumActions> Aif1Agent::efe(const Observation& obs) const {
  std::array<double, kNumActions> g;
  for (int u = 0; u < kNumActions; ++u) g[u] = efe_one_step(obs, static_cast<Action>(u));
  return g;
}

Categorical Aif1Agent::action_distribution(const Observation& obs) const {
  std::array<double, kNumActions> g = efe(obs);
  if (std::isinf(gamma_)) {
    int best = 0;
    for (int u = 1; u < kNumActions; ++u)
      if (g[u] < g[best]) best = u;
    return Categorical::one_hot(kNumActions, best);
  }
  std::array<double, kNumActions> values;
  const Categorical& e = model_.priors().e;
  for (int u = 0; u < kNumActions; ++u) values[u] = -gamma_ * g[u] + std::log(e[u]);
  return softmax(std::span<const double>(values.data(), values.size()));
}

Action Aif1Agent::act(const Observation& obs, Rng& rng) {
  Action a = static_cast<Action>(sample(action_distribution(obs), rng));
  pending_ = {obs, a};
  return a;
}

void Aif1Agent::learn(const Observation& next, FeedbackKind fb) {
  if (!pending_) throw std::runtime_error("learn called before act");
  model_.update_b(pending_->first, pending_->second, next);
  model_.update_c(next, fb);
  pending_.reset();
}

void Aif1Agent::append_trace_samples(std::vector<TraceSample>& out) {
  static const char* b_names[3] = {"te_b_ballx", "te_b_bally", "te_b_paddley"};
  static const char* c_names[3] = {"te_c_ballx", "te_c_bally", "te_c_paddley"};
  for (int m = 0; m < 3; ++m) {
    out.push_back({b_names[m], model_.b().total_entropy(static_cast<Modality>(m))});
    out.push_back({c_names[m], model_.c().total_entropy(static_cast<Modality>(m))});
  }
}

}  // namespace aifpong
