#include "aifpong/cfl_agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aifpong {

CflAgent::CflAgent(CflConfig config) : config_(config) {
  if (config_.memory_horizon < 1)
    throw std::invalid_argument("memory horizon must be at least 1");
  if (std::isnan(config_.alpha) || config_.alpha <= 0.0)
    throw std::invalid_argument("alpha must be positive");
  cl_.assign(static_cast<std::size_t>(kJointStates) * kNumActions, kEpsilonFloor);
}

Categorical CflAgent::action_distribution(const Observation& obs) const {
  const long s = joint_index(obs);
  double ln_counts[kNumActions];
  for (int u = 0; u < kNumActions; ++u)
    ln_counts[u] = std::log(cl_[static_cast<std::size_t>(s) * kNumActions + u]);
  return softmax(std::span<const double>(ln_counts, kNumActions), config_.alpha);
}

Action CflAgent::act(const Observation& obs, Rng& rng) {
  Action a = static_cast<Action>(sample(action_distribution(obs), rng));
  buffer_.push_back({joint_index(obs), a, episode_steps_, kGammaPrior});
  if (buffer_.size() > static_cast<std::size_t>(config_.memory_horizon)) buffer_.pop_front();
  return a;
}

void CflAgent::observe(const Observation& /*next*/, FeedbackKind fb) {
  ++episode_steps_;
  on_feedback(fb, episode_steps_);
  double total = 0.0;
  for (const MemoryEntry& e : buffer_) total += e.gamma;
  gamma_history_.push_back(total / static_cast<double>(buffer_.size()));
}

void CflAgent::on_feedback(FeedbackKind fb, int episode_step) {
  if (buffer_.empty()) throw std::runtime_error("memory buffer is empty");
  if (fb == FeedbackKind::Hit) {
    for (MemoryEntry& e : buffer_)
      if (e.step < episode_step)
        e.gamma = std::clamp(kGammaPrior - 1.0 / (episode_step - e.step), 0.0, 1.0);
  }
  apply_update(episode_step);
}

void CflAgent::apply_update(int current_step) {
  if (buffer_.empty()) throw std::runtime_error("memory buffer is empty");
  const double scale = static_cast<double>(current_step) / static_cast<double>(buffer_.size());
  for (const MemoryEntry& e : buffer_)
    cl_[static_cast<std::size_t>(e.state) * kNumActions + static_cast<int>(e.action)] +=
        scale * (1.0 - 2.0 * e.gamma);
  // floor after summing so opposing contributions to one cell cancel first
  for (const MemoryEntry& e : buffer_) {
    double& cell =
        cl_[static_cast<std::size_t>(e.state) * kNumActions + static_cast<int>(e.action)];
    cell = std::max(cell, kEpsilonFloor);
  }
}

void CflAgent::begin_episode() {
  buffer_.clear();
  episode_steps_ = 0;
}

void CflAgent::end_episode() {
  buffer_.clear();
  episode_steps_ = 0;
}

void CflAgent::append_trace_samples(std::vector<TraceSample>& out) {
  out.push_back({"te_cl", cl_total_entropy()});
  double mean = kGammaPrior;
  if (gamma_history_.size() > traced_gamma_prefix_) {
    double total = 0.0;
    for (std::size_t i = traced_gamma_prefix_; i < gamma_history_.size(); ++i)
      total += gamma_history_[i];
    mean = total / static_cast<double>(gamma_history_.size() - traced_gamma_prefix_);
    traced_gamma_prefix_ = gamma_history_.size();
  }
  out.push_back({"gamma_mean", mean});
}

double CflAgent::cl_total_entropy() const {
  double h = 0.0;
  for (long s = 0; s < kJointStates; ++s)
    h += entropy_of_counts(
        std::span<const double>(&cl_[static_cast<std::size_t>(s) * kNumActions], kNumActions));
  return h;
}

}  // namespace aifpong
