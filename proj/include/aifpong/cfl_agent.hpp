#pragma once

#include <deque>
#include <span>
#include <vector>

#include "aifpong/agent.hpp"
#include "aifpong/categorical.hpp"
#include "aifpong/gen_model.hpp"

namespace aifpong {

/// Starting risk for every remembered state-action pair. Values above 0.5
/// make unrewarded pairs decay, values below 0.5 reinforce; hits rewrite the
/// risk of the pairs that led to them.
inline constexpr double kGammaPrior = 0.55;

struct CflConfig {
  int memory_horizon = 4;  // how many past state-action pairs stay in memory
  double alpha = 1.0;      // selection precision; +infinity takes the argmax
};

/// One remembered state-action pair. The step stamp counts completed
/// environment steps at act time, so the pair driving the step that returns
/// feedback at step k carries stamp k - 1.
struct MemoryEntry {
  long state = 0;
  Action action = Action::Up;
  int step = 0;
  double gamma = kGammaPrior;
};

/// Counterfactual-learning agent. Keeps a strictly positive 3 x 2432
/// state-action count table CL, samples actions from softmax(alpha * ln CL
/// column), and every environment step folds the remembered pairs back into
/// CL weighted by (1 - 2 * gamma) and the current episode step. A hit at
/// step T_goal lowers gamma to clamp(prior - 1 / (T_goal - t'), 0, 1) for
/// every remembered pair stamped t' < T_goal, so the most recent pairs gain
/// the most mass. There is no transition or preference model here; CL is
/// the entire learned state.
class CflAgent : public PongAgent {
 public:
  explicit CflAgent(CflConfig config = {});

  /// softmax over actions of alpha * ln counts[., joint_index(obs)]. At
  /// alpha = 1 this is exactly the normalized count column.
  Categorical action_distribution(const Observation& obs) const;

  /// Samples an action and pushes (state, action, step stamp, prior risk)
  /// into memory, evicting the oldest entry beyond the horizon.
  Action act(const Observation& obs, Rng& rng) override;

  /// Counts the completed step, reweights risks on feedback, applies the
  /// memory update, and records the mean buffered risk for the trace.
  void observe(const Observation& next, FeedbackKind fb) override;

  /// On Hit, rewrites gamma for every remembered pair stamped before
  /// episode_step, then applies the memory update with t-bar = episode_step.
  /// Miss and None leave the risks at the prior. Throws std::runtime_error
  /// when memory is empty.
  void on_feedback(FeedbackKind fb, int episode_step);

  /// CL[u, s] += current_step * (1 - 2 * gamma_e) / |memory| for each
  /// remembered pair, then floors the touched cells. Throws
  /// std::runtime_error when memory is empty.
  void apply_update(int current_step);

  void begin_episode() override;
  void end_episode() override;

  void append_trace_samples(std::vector<TraceSample>& out) override;

  /// Flat CL counts, laid out state-major: value for (s, u) at [s * 3 + u].
  std::span<const double> cl_counts() const { return cl_; }

  /// Sum over joint states of the entropy of the normalized action column.
  double cl_total_entropy() const;

  const std::deque<MemoryEntry>& memory() const { return buffer_; }

  /// Mean buffered risk recorded after every completed environment step,
  /// for the whole trial.
  const std::vector<double>& gamma_history() const { return gamma_history_; }

 private:
  CflConfig config_;
  std::vector<double> cl_;
  std::deque<MemoryEntry> buffer_;
  std::vector<double> gamma_history_;
  std::size_t traced_gamma_prefix_ = 0;  // history already folded into traces
  int episode_steps_ = 0;
};

}  // namespace aifpong
