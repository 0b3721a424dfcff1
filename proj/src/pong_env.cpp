#include "aifpong/pong_env.hpp"

#include <cstdlib>
#include <stdexcept>

namespace aifpong {

namespace {

int clamp_paddle(int y) { return y < 0 ? 0 : (y >= kPaddleYDim ? kPaddleYDim - 1 : y); }

int paddle_delta(Action a) {
  switch (a) {
    case Action::Up: return +1;
    case Action::Down: return -1;
    case Action::Stay: return 0;
  }
  throw std::invalid_argument("step: unknown action");
}

}  // namespace

PongEnv::PongEnv(EnvConfig config) : config_(config) {
  if (config_.hit_halfwidth < 0 || config_.hit_halfwidth > kBallYDim - 1)
    throw std::invalid_argument("hit_halfwidth must be in 0..7");
  if (config_.step_cap < 1) throw std::invalid_argument("step_cap must be >= 1");
}

Observation PongEnv::reset(Rng& rng) {
  state_.ball_x = kBallXDim - 1;
  state_.ball_y = uniform_int(rng, kBallYDim);
  state_.vy = uniform_int(rng, 3) - 1;
  state_.vx = -1;
  // paddle_y keeps its previous value
  done_ = false;
  episode_steps_ = 0;
  episode_hits_ = 0;
  return state_.observation();
}

PongEnv::StepResult PongEnv::step(Action a) {
  if (done_) throw std::runtime_error("episode finished");

  state_.paddle_y = clamp_paddle(state_.paddle_y + paddle_delta(a));

  int raw_y = state_.ball_y + state_.vy;
  if (raw_y < 0) {
    state_.ball_y = -raw_y;
    state_.vy = -state_.vy;
  } else if (raw_y > kBallYDim - 1) {
    state_.ball_y = 2 * (kBallYDim - 1) - raw_y;
    state_.vy = -state_.vy;
  } else {
    state_.ball_y = raw_y;
  }

  FeedbackKind feedback = FeedbackKind::None;
  if (state_.vx == -1 && state_.ball_x == 1) {
    // the ball would cross the paddle plane this tick
    if (std::abs(state_.ball_y - state_.paddle_y) <= config_.hit_halfwidth) {
      feedback = FeedbackKind::Hit;
      state_.vx = +1;  // rebound, ball_x stays at 1
      ++episode_hits_;
    } else {
      feedback = FeedbackKind::Miss;
      state_.ball_x = 0;
      done_ = true;
    }
  } else {
    state_.ball_x += state_.vx;
    if (state_.ball_x == kBallXDim - 1) state_.vx = -1;  // back-wall bounce
  }

  ++episode_steps_;
  if (!done_ && episode_steps_ >= config_.step_cap) done_ = true;

  return {state_.observation(), feedback, done_};
}

void PongEnv::set_state(const EnvState& s) {
  if (s.ball_x < 0 || s.ball_x >= kBallXDim || s.ball_y < 0 || s.ball_y >= kBallYDim ||
      s.paddle_y < 0 || s.paddle_y >= kPaddleYDim)
    throw std::invalid_argument("set_state: position out of range");
  if (s.vx != -1 && s.vx != 1) throw std::invalid_argument("set_state: vx must be -1 or +1");
  if (s.vy < -1 || s.vy > 1) throw std::invalid_argument("set_state: vy must be -1, 0 or +1");
  state_ = s;
  done_ = false;
  episode_steps_ = 0;
  episode_hits_ = 0;
}

}  // namespace aifpong
