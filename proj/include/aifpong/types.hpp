#pragma once

namespace aifpong {

// Grid geometry shared by the environment and the agents' state indexing.
// ball_x counts cells between the ball and the paddle plane (0 = plane),
// ball_y and paddle_y are vertical cells.
inline constexpr int kBallXDim = 38;
inline constexpr int kBallYDim = 8;
inline constexpr int kPaddleYDim = 8;
inline constexpr int kNumActions = 3;
inline constexpr int kJointStates = kBallXDim * kBallYDim * kPaddleYDim;  // 2432

enum class Action : int { Up = 0, Down = 1, Stay = 2 };

enum class FeedbackKind : int { Hit = 0, Miss = 1, None = 2 };

/// What the agent sees each step. Fully observable; velocities are not part of it.
struct Observation {
  int ball_x = 0;
  int ball_y = 0;
  int paddle_y = 0;
};

inline bool operator==(const Observation& a, const Observation& b) {
  return a.ball_x == b.ball_x && a.ball_y == b.ball_y && a.paddle_y == b.paddle_y;
}

}  // namespace aifpong
