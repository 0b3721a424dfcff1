#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aifpong/categorical.hpp"

namespace aifpong {

/// Outcome of one episode. Wall-clock labels are synthetic: the whole trial
/// is stretched to 1200 seconds and every step gets an equal share, so
/// end_time_s lands in (0, 1200].
struct EpisodeRecord {
  int episode_index = 0;
  int hits = 0;
  int steps = 0;
  double end_time_s = 0.0;
  bool is_ace = false;  // redundant with hits == 0, kept for the CSV surface
};

/// Assigns end_time_s to every record: each step lasts 1200 / (total steps)
/// seconds and an episode ends at its cumulative step count. Throws
/// std::invalid_argument on an empty trial or zero total steps.
void timestamp_episodes(std::vector<EpisodeRecord>& records);

struct BlockStats {
  int episodes = 0;
  double mean_hits = 0.0;
  double pct_aces = 0.0;  // episodes missing the first return
  double pct_long = 0.0;  // episodes with at least 3 hits
};

/// Mean hits per rally plus ace / long-rally percentages over a set of
/// episodes. Throws std::invalid_argument when empty.
BlockStats compute_stats(std::span<const EpisodeRecord> records);

struct RegressionResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r = 0.0;  // zero for a constant y, by convention
};

/// Ordinary least squares fit of y on x. Throws std::invalid_argument on a
/// size mismatch, fewer than two points, or a constant x.
RegressionResult linear_regression(std::span<const double> x, std::span<const double> y);

/// Minute bin for an episode end time: bin m covers (60m, 60(m+1)] seconds,
/// clamped to 0..19. Chosen so the bin 0-4 union is exactly the first
/// 300-second block.
int minute_bin(double end_time_s);

/// Per-trial digest: the first 5 minutes against the last 15, per-minute
/// bins, and regressions of the binned percentages (x = minute index) and
/// per-episode hits (x = end time in seconds). Blocks and bins with no
/// episodes are absent rather than zero, and a regression is absent when
/// fewer than two points support it.
struct TrialSummary {
  std::optional<BlockStats> first_block;  // episodes ending by 300 s
  std::optional<BlockStats> last_block;   // episodes ending after 300 s
  std::array<std::optional<BlockStats>, 20> minute_bins;
  std::optional<RegressionResult> aces_per_minute;
  std::optional<RegressionResult> long_per_minute;
  std::optional<RegressionResult> hits_per_episode;
};

TrialSummary summarize(std::span<const EpisodeRecord> records);

/// Sum of Shannon entropies over a collection of distributions.
double total_entropy(std::span<const Categorical> members);

/// Scales a total-entropy series by its maximum, mapping it into (0, 1]
/// with at least one exact 1. An all-zero series stays all zero. Throws
/// std::invalid_argument when empty or when any value is negative.
std::vector<double> normalize_trace(std::span<const double> te_series);

/// One traced parameter: sampled steps, raw total-entropy values, and the
/// max-normalized series.
struct EntropyTrace {
  std::string param;
  std::vector<long> steps;
  std::vector<double> te;
  std::vector<double> nte;
};

/// Readers for the harness's per-trial files. Both validate the header and
/// throw std::runtime_error with a line number on malformed input.
std::vector<EpisodeRecord> read_episode_csv(const std::string& path);
std::vector<EntropyTrace> read_trace_csv(const std::string& path);

}  // namespace aifpong
