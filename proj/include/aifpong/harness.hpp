#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aifpong/agent.hpp"
#include "aifpong/analysis.hpp"
#include "aifpong/dpefe_agent.hpp"

namespace aifpong {

inline constexpr const char* kVersion = "0.1.0";

enum class AgentKind : int { Aif1, Dpefe, Cfl };

const char* to_string(AgentKind kind);
AgentKind agent_kind_from_string(const std::string& name);

const char* to_string(ReplanMode mode);
ReplanMode replan_mode_from_string(const std::string& name);

/// Everything one experiment needs. `precision` is overloaded by scheme: it
/// is the action precision for the one-step agent, the planner precision for
/// the dynamic-programming agent, and the selection precision for the
/// counterfactual learner. memory_horizon only matters for CFL and
/// planning_horizon / replan only for DP, but all fields are validated
/// unconditionally so a misdirected override fails loudly.
struct ExperimentConfig {
  AgentKind agent = AgentKind::Cfl;
  int memory_horizon = 4;
  int planning_horizon = 5;
  int trials = 100;
  int episodes_per_trial = 70;
  std::uint64_t base_seed = 1;
  int hit_halfwidth = 1;
  int step_cap = 2000;
  double precision = 1.0;
  double lr = 1.0;
  double eta = 1.0;
  ReplanMode replan = ReplanMode::EveryStep;
  int trace_interval = 25;
  std::string out_dir = "runs/out";
};

/// Throws std::invalid_argument naming the offending field (by its config
/// surface name: trials, episodes, memory, horizon, seed, ...).
void validate(const ExperimentConfig& config);

/// Display name for summaries: "AIF-1", "DP-<horizon>" or "CFL-<memory>".
std::string agent_label(const ExperimentConfig& config);

/// Parses a JSON config document. Every field is optional and falls back to
/// the struct default; unknown keys are rejected. `precision` additionally
/// accepts the string "inf". The result is validated before it is returned.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config_file(const std::string& path);

std::unique_ptr<PongAgent> make_agent(const ExperimentConfig& config);

struct TraceRow {
  long step = 0;  // global step within the trial, 0 at the fresh agent
  std::string param;
  double value = 0.0;

  bool operator==(const TraceRow&) const = default;
};

struct TrialResult {
  int trial_index = 0;
  std::vector<EpisodeRecord> episodes;  // timestamped onto the 1200 s axis
  std::vector<TraceRow> traces;
};

/// Plays episodes_per_trial episodes with the given agent, which persists
/// (and keeps learning) across episode boundaries. All randomness comes from
/// one generator seeded with base_seed + trial_index, so a (config, index)
/// pair fully determines the result. Trace scalars are sampled once before
/// the first action and then whenever the global step count is a multiple
/// of trace_interval.
TrialResult run_trial_with_agent(const ExperimentConfig& config, int trial_index,
                                 PongAgent& agent);

/// run_trial_with_agent on a fresh make_agent(config) instance.
TrialResult run_trial(const ExperimentConfig& config, int trial_index);

/// Mean / sample standard deviation of one statistic across trials. The sd
/// needs at least two observations and the mean at least one; both are
/// absent otherwise.
struct StatLine {
  std::optional<double> mean;
  std::optional<double> sd;
  int n = 0;
};

/// Cross-trial aggregate of one episode metric: its first-block and
/// last-block values, the per-trial regression slope, and the relative
/// improvement (last - first) / first of the block means. The improvement of
/// a flat series is 0, and it is absent when the first-block mean is zero
/// with a different last block (or when either block is empty).
struct MetricAggregate {
  StatLine first;
  StatLine last;
  StatLine slope;
  std::optional<double> improvement;
};

struct AggregateSummary {
  std::string label;
  int trials = 0;       // trials that produced episodes
  MetricAggregate hits;   // mean hits per rally; slope of hits vs end time
  MetricAggregate aces;   // % aces; slope of the per-minute ace percentage
  MetricAggregate longs;  // % long rallies; slope of the per-minute percentage
};

AggregateSummary aggregate_trials(const std::string& label,
                                  const std::vector<TrialSummary>& trials);

struct RunManifest {
  std::string version;
  std::string label;
  ExperimentConfig config;
  std::vector<std::uint64_t> seeds;  // seeds[i] = base_seed + i
  std::vector<std::string> files;    // names relative to the run directory
  std::vector<int> failed_trials;
  std::vector<std::string> failures;  // messages, parallel to failed_trials
  double wall_clock_s = 0.0;
};

/// Runs every trial (worker threads capped by AIFPONG_THREADS and the
/// hardware thread count), then writes per-trial episode and trace CSVs,
/// summary.csv / summary.json, and manifest.json into config.out_dir,
/// creating it if needed. A trial that throws is recorded in the manifest
/// and excluded from the summary instead of aborting the run.
RunManifest run_experiment(const ExperimentConfig& config);

/// Rebuilds the aggregate summary of a finished run from its manifest and
/// per-trial episode files.
AggregateSummary summarize_run_dir(const std::string& dir);

RunManifest read_manifest_json(const std::string& path);

/// Per-trial file writers used by run_experiment; exposed so tests can
/// reproduce the exact bytes from a standalone run_trial result.
std::string trial_file_name(const std::string& prefix, int trial_index);
void write_episode_csv(const std::string& path, int trial_index,
                       std::span<const EpisodeRecord> episodes);
void write_trace_csv(const std::string& path, int trial_index,
                     std::span<const TraceRow> traces);

void write_summary_csv(const std::string& path, const AggregateSummary& summary);
void write_summary_json(const std::string& path, const AggregateSummary& summary);

void print_summary(std::ostream& out, const AggregateSummary& summary);
void print_comparison(std::ostream& out, const std::vector<AggregateSummary>& runs);

/// Shortest-round-trip-ish float formatting shared by every CSV writer
/// (printf %.12g), pinned so that repeat runs are byte-identical.
std::string format_double(double value);

}  // namespace aifpong
