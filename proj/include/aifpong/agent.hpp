#pragma once

#include <string>
#include <vector>

#include "aifpong/rng.hpp"
#include "aifpong/types.hpp"

namespace aifpong {

/// One named scalar emitted into the trace file (entropy totals, mean risk).
struct TraceSample {
  std::string param;
  double value = 0.0;
};

/// Minimal driver-facing surface shared by every decision scheme. The
/// harness alternates act / observe within an episode and brackets episodes
/// with begin_episode / end_episode. Learning happens inside observe.
class PongAgent {
 public:
  virtual ~PongAgent() = default;

  virtual Action act(const Observation& obs, Rng& rng) = 0;

  /// Called after every environment step with the successor observation and
  /// the step's feedback.
  virtual void observe(const Observation& next, FeedbackKind fb) = 0;

  virtual void begin_episode() {}
  virtual void end_episode() {}

  /// Appends this agent's current trace scalars (used by the harness at the
  /// trace sampling interval).
  virtual void append_trace_samples(std::vector<TraceSample>& out) = 0;
};

}  // namespace aifpong
