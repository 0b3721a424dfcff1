#pragma once

#include "aifpong/rng.hpp"
#include "aifpong/types.hpp"

namespace aifpong {

/// Full environment state, including the ball velocity the agent never sees.
struct EnvState {
  int ball_x = 37;
  int ball_y = 0;
  int paddle_y = 3;
  int vx = -1;  // -1 toward the paddle plane, +1 away
  int vy = 0;   // -1, 0, +1

  Observation observation() const { return {ball_x, ball_y, paddle_y}; }
};

struct EnvConfig {
  /// Paddle reach: a hit needs |ball_y - paddle_y| <= hit_halfwidth.
  int hit_halfwidth = 1;
  /// Episodes are cut off after this many steps and keep their hit count.
  int step_cap = 2000;
};

/// Grid Pong with a single paddle. The ball starts at the far wall (x = 37)
/// with a random height and vertical velocity, travels toward the paddle
/// plane, reflects off the top and bottom walls, and bounces off the back
/// wall after each successful hit. Dynamics are deterministic; randomness
/// enters only through reset().
class PongEnv {
 public:
  struct StepResult {
    Observation obs;
    FeedbackKind feedback = FeedbackKind::None;
    bool done = false;
  };

  explicit PongEnv(EnvConfig config = {});

  /// Serves a new ball. The paddle keeps its position from the previous
  /// episode (3 on a fresh environment).
  Observation reset(Rng& rng);

  /// Advances one tick: paddle moves first, then the ball. Throws
  /// std::runtime_error("episode finished") when called after done.
  StepResult step(Action a);

  const EnvState& state() const { return state_; }
  bool done() const { return done_; }
  int episode_steps() const { return episode_steps_; }
  int episode_hits() const { return episode_hits_; }

  /// Places the environment in an arbitrary valid mid-rally state with fresh
  /// step and hit counters. Intended for tests and replay reconstruction.
  void set_state(const EnvState& s);

 private:
  EnvConfig config_;
  EnvState state_;
  bool done_ = true;  // must reset() before the first step
  int episode_steps_ = 0;
  int episode_hits_ = 0;
};

}  // namespace aifpong
