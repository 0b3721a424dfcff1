#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "aifpong/agent.hpp"
#include "aifpong/categorical.hpp"
#include "aifpong/gen_model.hpp"

namespace aifpong {

/// Transition entries at or below this mass are skipped during the backward
/// pass. Learned columns concentrate far above it and floor-level leftovers
/// sit ten orders of magnitude below, so in practice this trades nothing for
/// a large speedup once the model sharpens.
inline constexpr double kSupportCutoff = 1e-6;

/// One independent state factor as the planner sees it: a dense
/// column-stochastic transition matrix per action (trans[u][prev * dim +
/// next]) plus a normalized preference over the factor's values.
struct PlannerFactor {
  int dim = 0;
  std::vector<std::vector<double>> trans;
  std::vector<double> pref;
};

/// Factorized planning problem. Factors are ordered outermost first, so the
/// joint state index is the mixed-radix number s = ((s_0 * d_1) + s_1) * d_2
/// + ... matching joint_index() when the factors are ball-x, ball-y,
/// paddle-y.
struct PlannerModel {
  int n_actions = 0;
  std::vector<PlannerFactor> factors;

  long n_states() const {
    long n = 1;
    for (const auto& f : factors) n *= f.dim;
    return n;
  }
};

/// Backward-recursion output. Level 0 is the current step (the root the
/// agent samples from) and level horizon-1 the terminal step. Both tables
/// are stored action-interleaved: value for (state s, action u) lives at
/// [s * n_actions + u].
struct EfeTable {
  int horizon = 0;
  int n_actions = 0;
  long n_states = 0;
  std::vector<std::vector<double>> g;
  std::vector<std::vector<double>> qu;
};

/// Fills `out` with G and Qu for every level. The terminal level's G(u, s)
/// is the risk of the one-step prediction: the KL between the factorized
/// successor distribution and the preference, summed over factors. Earlier
/// levels add the transition-weighted expectation of the next level's
/// Qu-averaged G. Qu is softmax(-precision * G) per state; an infinite
/// precision selects the minimum-G action outright (lowest index on ties).
/// Buffers in `out` are reused across calls.
void plan_backward(const PlannerModel& model, int horizon, double precision, EfeTable& out);

enum class ReplanMode : int { EveryStep, PerEpisode };

struct DpefeConfig {
  int horizon = 5;
  ReplanMode replan = ReplanMode::EveryStep;
  double precision = 1.0;  // action precision; +infinity selects argmin-G
  double lr = 1.0;
  double eta = 1.0;
};

/// Finite-horizon dynamic-programming agent. Each plan snapshots the learned
/// model, runs the backward recursion over all joint states, and actions are
/// sampled from the root table at the current observation. Replanning is
/// per-step by default (receding horizon); per-episode mode plans once on
/// the first act of each episode.
class DpefeAgent : public PongAgent {
 public:
  explicit DpefeAgent(DpefeConfig config = {});

  /// Rebuilds the plan from the current model state and returns it.
  const EfeTable& plan();

  const EfeTable& table() const { return table_; }
  long plans_built() const { return plans_built_; }

  Action act(const Observation& obs, Rng& rng) override;

  /// Feeds the cached (observation, action) pair and the successor into the
  /// model. Throws std::runtime_error if no act preceded this call.
  void learn(const Observation& next, FeedbackKind fb);

  void observe(const Observation& next, FeedbackKind fb) override { learn(next, fb); }

  void begin_episode() override;
  void end_episode() override;

  void append_trace_samples(std::vector<TraceSample>& out) override;

  const GenerativeModel& model() const { return model_; }
  GenerativeModel& model() { return model_; }

 private:
  void refresh_planner_model();

  GenerativeModel model_;
  DpefeConfig config_;
  PlannerModel planner_model_;
  EfeTable table_;
  bool table_valid_ = false;
  bool plan_pending_ = true;  // per-episode mode: plan on the next act
  long plans_built_ = 0;
  std::optional<std::pair<Observation, Action>> pending_;
};

}  // namespace aifpong
