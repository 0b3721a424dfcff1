#include "aifpong/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "aifpong/aif1_agent.hpp"
#include "aifpong/cfl_agent.hpp"
#include "aifpong/pong_env.hpp"

namespace aifpong {

using json = nlohmann::ordered_json;

const char* to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::Aif1:
      return "aif1";
    case AgentKind::Dpefe:
      return "dp";
    case AgentKind::Cfl:
      return "cfl";
  }
  throw std::logic_error("unknown agent kind");
}

AgentKind agent_kind_from_string(const std::string& name) {
  if (name == "aif1") return AgentKind::Aif1;
  if (name == "dp") return AgentKind::Dpefe;
  if (name == "cfl") return AgentKind::Cfl;
  throw std::invalid_argument("agent must be one of aif1, dp, cfl (got \"" + name + "\")");
}

const char* to_string(ReplanMode mode) {
  switch (mode) {
    case ReplanMode::EveryStep:
      return "every_step";
    case ReplanMode::PerEpisode:
      return "per_episode";
  }
  throw std::logic_error("unknown replan mode");
}

ReplanMode replan_mode_from_string(const std::string& name) {
  if (name == "every_step") return ReplanMode::EveryStep;
  if (name == "per_episode") return ReplanMode::PerEpisode;
  throw std::invalid_argument("replan must be every_step or per_episode (got \"" + name +
                              "\")");
}

void validate(const ExperimentConfig& config) {
  if (config.trials < 1) throw std::invalid_argument("trials must be at least 1");
  if (config.episodes_per_trial < 1)
    throw std::invalid_argument("episodes must be at least 1");
  if (config.memory_horizon < 1) throw std::invalid_argument("memory must be at least 1");
  if (config.planning_horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (config.hit_halfwidth < 0 || config.hit_halfwidth > 7)
    throw std::invalid_argument("hit_halfwidth must lie in [0, 7]");
  if (config.step_cap < 1) throw std::invalid_argument("step_cap must be at least 1");
  if (std::isnan(config.precision) || config.precision <= 0.0)
    throw std::invalid_argument("precision must be positive (inf is allowed)");
  if (!(config.lr > 0.0) || !std::isfinite(config.lr))
    throw std::invalid_argument("lr must be positive and finite");
  if (!(config.eta > 0.0) || !std::isfinite(config.eta))
    throw std::invalid_argument("eta must be positive and finite");
  if (config.trace_interval < 1)
    throw std::invalid_argument("trace_interval must be at least 1");
  if (config.out_dir.empty()) throw std::invalid_argument("out must not be empty");
}

std::string agent_label(const ExperimentConfig& config) {
  switch (config.agent) {
    case AgentKind::Aif1:
      return "AIF-1";
    case AgentKind::Dpefe:
      return "DP-" + std::to_string(config.planning_horizon);
    case AgentKind::Cfl:
      return "CFL-" + std::to_string(config.memory_horizon);
  }
  throw std::logic_error("unknown agent kind");
}

namespace {

[[noreturn]] void bad_field(const std::string& name, const std::string& what) {
  throw std::invalid_argument(name + " " + what);
}

const json* find_field(const json& j, const char* name) {
  auto it = j.find(name);
  return it == j.end() ? nullptr : &*it;
}

int get_int_field(const json& j, const char* name, int fallback) {
  const json* f = find_field(j, name);
  if (!f) return fallback;
  if (!f->is_number_integer()) bad_field(name, "must be an integer");
  auto v = f->get<std::int64_t>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
    bad_field(name, "is out of range");
  return static_cast<int>(v);
}

std::uint64_t get_seed_field(const json& j, const char* name, std::uint64_t fallback) {
  const json* f = find_field(j, name);
  if (!f) return fallback;
  if (f->is_number_unsigned()) return f->get<std::uint64_t>();
  if (f->is_number_integer()) {
    auto v = f->get<std::int64_t>();
    if (v < 0) bad_field(name, "must be a non-negative integer");
    return static_cast<std::uint64_t>(v);
  }
  bad_field(name, "must be a non-negative integer");
}

double get_double_field(const json& j, const char* name, double fallback,
                        bool allow_inf_string) {
  const json* f = find_field(j, name);
  if (!f) return fallback;
  if (f->is_number()) return f->get<double>();
  if (allow_inf_string && f->is_string() && f->get<std::string>() == "inf")
    return std::numeric_limits<double>::infinity();
  bad_field(name, allow_inf_string ? "must be a number or the string \"inf\""
                                   : "must be a number");
}

std::string get_string_field(const json& j, const char* name, const std::string& fallback) {
  const json* f = find_field(j, name);
  if (!f) return fallback;
  if (!f->is_string()) bad_field(name, "must be a string");
  return f->get<std::string>();
}

ExperimentConfig config_from_json_object(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config root must be a JSON object");
  static const char* kKnown[] = {"agent",    "memory", "horizon",  "trials",
                                 "episodes", "seed",   "hit_halfwidth", "step_cap",
                                 "precision", "lr",    "eta",      "replan",
                                 "trace_interval", "out"};
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : kKnown) known = known || item.key() == k;
    if (!known) throw std::invalid_argument("unknown config field \"" + item.key() + "\"");
  }

  ExperimentConfig c;
  c.agent = agent_kind_from_string(get_string_field(j, "agent", to_string(c.agent)));
  c.memory_horizon = get_int_field(j, "memory", c.memory_horizon);
  c.planning_horizon = get_int_field(j, "horizon", c.planning_horizon);
  c.trials = get_int_field(j, "trials", c.trials);
  c.episodes_per_trial = get_int_field(j, "episodes", c.episodes_per_trial);
  c.base_seed = get_seed_field(j, "seed", c.base_seed);
  c.hit_halfwidth = get_int_field(j, "hit_halfwidth", c.hit_halfwidth);
  c.step_cap = get_int_field(j, "step_cap", c.step_cap);
  c.precision = get_double_field(j, "precision", c.precision, /*allow_inf_string=*/true);
  c.lr = get_double_field(j, "lr", c.lr, false);
  c.eta = get_double_field(j, "eta", c.eta, false);
  c.replan = replan_mode_from_string(get_string_field(j, "replan", to_string(c.replan)));
  c.trace_interval = get_int_field(j, "trace_interval", c.trace_interval);
  c.out_dir = get_string_field(j, "out", c.out_dir);
  validate(c);
  return c;
}

json config_to_json_object(const ExperimentConfig& c) {
  json j;
  j["agent"] = to_string(c.agent);
  j["memory"] = c.memory_horizon;
  j["horizon"] = c.planning_horizon;
  j["trials"] = c.trials;
  j["episodes"] = c.episodes_per_trial;
  j["seed"] = c.base_seed;
  j["hit_halfwidth"] = c.hit_halfwidth;
  j["step_cap"] = c.step_cap;
  if (std::isinf(c.precision))
    j["precision"] = "inf";
  else
    j["precision"] = c.precision;
  j["lr"] = c.lr;
  j["eta"] = c.eta;
  j["replan"] = to_string(c.replan);
  j["trace_interval"] = c.trace_interval;
  j["out"] = c.out_dir;
  return j;
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
  }
  return config_from_json_object(j);
}

std::string config_to_json(const ExperimentConfig& config) {
  return config_to_json_object(config).dump(2) + "\n";
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return config_from_json(text.str());
}

std::unique_ptr<PongAgent> make_agent(const ExperimentConfig& config) {
  validate(config);
  switch (config.agent) {
    case AgentKind::Aif1:
      return std::make_unique<Aif1Agent>(Aif1Config{config.precision, config.lr, config.eta});
    case AgentKind::Dpefe:
      return std::make_unique<DpefeAgent>(DpefeConfig{config.planning_horizon, config.replan,
                                                      config.precision, config.lr,
                                                      config.eta});
    case AgentKind::Cfl:
      return std::make_unique<CflAgent>(CflConfig{config.memory_horizon, config.precision});
  }
  throw std::logic_error("unknown agent kind");
}

TrialResult run_trial_with_agent(const ExperimentConfig& config, int trial_index,
                                 PongAgent& agent) {
  validate(config);
  if (trial_index < 0 || trial_index >= config.trials)
    throw std::invalid_argument("trial_index must lie in [0, trials)");

  Rng rng(config.base_seed + static_cast<std::uint64_t>(trial_index));
  PongEnv env({config.hit_halfwidth, config.step_cap});

  TrialResult result;
  result.trial_index = trial_index;
  long global_step = 0;
  std::vector<TraceSample> samples;
  auto sample_traces = [&] {
    samples.clear();
    agent.append_trace_samples(samples);
    for (TraceSample& s : samples)
      result.traces.push_back({global_step, std::move(s.param), s.value});
  };
  sample_traces();  // fresh-agent baseline, so normalized traces start at 1

  for (int ep = 0; ep < config.episodes_per_trial; ++ep) {
    Observation obs = env.reset(rng);
    agent.begin_episode();
    while (true) {
      Action a = agent.act(obs, rng);
      PongEnv::StepResult r = env.step(a);
      agent.observe(r.obs, r.feedback);
      ++global_step;
      if (global_step % config.trace_interval == 0) sample_traces();
      obs = r.obs;
      if (r.done) break;
    }
    agent.end_episode();
    EpisodeRecord rec;
    rec.episode_index = ep;
    rec.hits = env.episode_hits();
    rec.steps = env.episode_steps();
    rec.is_ace = rec.hits == 0;
    result.episodes.push_back(rec);
  }
  timestamp_episodes(result.episodes);
  return result;
}

TrialResult run_trial(const ExperimentConfig& config, int trial_index) {
  auto agent = make_agent(config);
  return run_trial_with_agent(config, trial_index, *agent);
}

namespace {

StatLine stat_line(const std::vector<double>& values) {
  StatLine s;
  s.n = static_cast<int>(values.size());
  if (values.empty()) return s;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  s.mean = mean;
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

MetricAggregate aggregate_metric(const std::vector<TrialSummary>& trials,
                                 double (*block_value)(const BlockStats&),
                                 const std::optional<RegressionResult> TrialSummary::*reg) {
  std::vector<double> first, last, slope;
  for (const TrialSummary& t : trials) {
    if (t.first_block) first.push_back(block_value(*t.first_block));
    if (t.last_block) last.push_back(block_value(*t.last_block));
    if (t.*reg) slope.push_back((t.*reg)->slope);
  }
  MetricAggregate m;
  m.first = stat_line(first);
  m.last = stat_line(last);
  m.slope = stat_line(slope);
  if (m.first.mean && m.last.mean) {
    if (*m.last.mean == *m.first.mean)
      m.improvement = 0.0;
    else if (*m.first.mean != 0.0)
      m.improvement = (*m.last.mean - *m.first.mean) / *m.first.mean;
  }
  return m;
}

}  // namespace

AggregateSummary aggregate_trials(const std::string& label,
                                  const std::vector<TrialSummary>& trials) {
  AggregateSummary out;
  out.label = label;
  out.trials = static_cast<int>(trials.size());
  out.hits = aggregate_metric(
      trials, [](const BlockStats& b) { return b.mean_hits; },
      &TrialSummary::hits_per_episode);
  out.aces = aggregate_metric(
      trials, [](const BlockStats& b) { return b.pct_aces; },
      &TrialSummary::aces_per_minute);
  out.longs = aggregate_metric(
      trials, [](const BlockStats& b) { return b.pct_long; },
      &TrialSummary::long_per_minute);
  return out;
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

std::string trial_file_name(const std::string& prefix, int trial_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "_trial_%03d.csv", trial_index);
  return prefix + buf;
}

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps line endings pinned
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

}  // namespace

void write_episode_csv(const std::string& path, int trial_index,
                       std::span<const EpisodeRecord> episodes) {
  std::ofstream out = open_for_write(path);
  out << "trial,episode,hits,steps,end_time_s,is_ace\n";
  for (const EpisodeRecord& r : episodes)
    out << trial_index << ',' << r.episode_index << ',' << r.hits << ',' << r.steps << ','
        << format_double(r.end_time_s) << ',' << (r.is_ace ? 1 : 0) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path);
}

void write_trace_csv(const std::string& path, int trial_index,
                     std::span<const TraceRow> traces) {
  std::ofstream out = open_for_write(path);
  out << "trial,step,param,value\n";
  for (const TraceRow& r : traces)
    out << trial_index << ',' << r.step << ',' << r.param << ',' << format_double(r.value)
        << '\n';
  if (!out) throw std::runtime_error("cannot write " + path);
}

namespace {

json stat_to_json(const StatLine& s, const char* mean_key, const char* sd_key,
                  const char* n_key) {
  json j;
  j[mean_key] = s.mean ? json(*s.mean) : json(nullptr);
  j[sd_key] = s.sd ? json(*s.sd) : json(nullptr);
  j[n_key] = s.n;
  return j;
}

json metric_to_json(const MetricAggregate& m) {
  json j;
  j.update(stat_to_json(m.first, "first_mean", "first_sd", "first_n"));
  j.update(stat_to_json(m.last, "last_mean", "last_sd", "last_n"));
  j["improvement"] = m.improvement ? json(*m.improvement) : json(nullptr);
  j.update(stat_to_json(m.slope, "slope_mean", "slope_sd", "slope_n"));
  return j;
}

std::string csv_opt(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

void append_metric_row(std::ostream& out, const AggregateSummary& s, const char* name,
                       const MetricAggregate& m) {
  out << s.label << ',' << name << ',' << s.trials << ',' << csv_opt(m.first.mean) << ','
      << csv_opt(m.first.sd) << ',' << csv_opt(m.last.mean) << ',' << csv_opt(m.last.sd)
      << ',' << csv_opt(m.improvement) << ',' << csv_opt(m.slope.mean) << ','
      << csv_opt(m.slope.sd) << '\n';
}

}  // namespace

void write_summary_csv(const std::string& path, const AggregateSummary& summary) {
  std::ofstream out = open_for_write(path);
  out << "label,metric,trials,first_mean,first_sd,last_mean,last_sd,improvement,"
         "slope_mean,slope_sd\n";
  append_metric_row(out, summary, "hits_per_rally", summary.hits);
  append_metric_row(out, summary, "pct_aces", summary.aces);
  append_metric_row(out, summary, "pct_long", summary.longs);
  if (!out) throw std::runtime_error("cannot write " + path);
}

void write_summary_json(const std::string& path, const AggregateSummary& summary) {
  json j;
  j["label"] = summary.label;
  j["trials"] = summary.trials;
  j["metrics"] = {{"hits_per_rally", metric_to_json(summary.hits)},
                  {"pct_aces", metric_to_json(summary.aces)},
                  {"pct_long", metric_to_json(summary.longs)}};
  std::ofstream out = open_for_write(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + path);
}

namespace {

int worker_count(int trials) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("AIFPONG_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw std::invalid_argument("AIFPONG_THREADS must be a positive integer");
    hw = static_cast<int>(std::min<long>(v, 256));
  }
  return std::min(trials, hw);
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& config) {
  validate(config);
  const auto t0 = std::chrono::steady_clock::now();
  const std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);

  const int n = config.trials;
  std::vector<std::optional<TrialResult>> results(static_cast<std::size_t>(n));
  std::vector<std::string> errors(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  auto work = [&] {
    for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      try {
        results[static_cast<std::size_t>(i)] = run_trial(config, i);
      } catch (const std::exception& e) {
        errors[static_cast<std::size_t>(i)] = e.what();
      }
    }
  };
  const int workers = worker_count(n);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  RunManifest manifest;
  manifest.version = kVersion;
  manifest.label = agent_label(config);
  manifest.config = config;
  for (int i = 0; i < n; ++i)
    manifest.seeds.push_back(config.base_seed + static_cast<std::uint64_t>(i));

  std::vector<TrialSummary> summaries;
  for (int i = 0; i < n; ++i) {
    const auto& slot = results[static_cast<std::size_t>(i)];
    if (!slot) {
      manifest.failed_trials.push_back(i);
      manifest.failures.push_back(errors[static_cast<std::size_t>(i)]);
      continue;
    }
    const std::string ep_name = trial_file_name("episodes", i);
    const std::string tr_name = trial_file_name("traces", i);
    write_episode_csv((dir / ep_name).string(), i, slot->episodes);
    write_trace_csv((dir / tr_name).string(), i, slot->traces);
    manifest.files.push_back(ep_name);
    manifest.files.push_back(tr_name);
    summaries.push_back(summarize(slot->episodes));
  }

  const AggregateSummary agg = aggregate_trials(manifest.label, summaries);
  write_summary_csv((dir / "summary.csv").string(), agg);
  write_summary_json((dir / "summary.json").string(), agg);
  manifest.files.push_back("summary.csv");
  manifest.files.push_back("summary.json");

  manifest.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json j;
  j["version"] = manifest.version;
  j["label"] = manifest.label;
  j["wall_clock_s"] = manifest.wall_clock_s;
  j["config"] = config_to_json_object(manifest.config);
  j["seeds"] = manifest.seeds;
  j["files"] = manifest.files;
  j["failed_trials"] = manifest.failed_trials;
  j["failures"] = manifest.failures;
  std::ofstream out = open_for_write((dir / "manifest.json").string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write manifest.json");

  return manifest;
}

RunManifest read_manifest_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open manifest " + path);
  std::ostringstream text;
  text << in.rdbuf();
  json j;
  try {
    j = json::parse(text.str());
    RunManifest m;
    m.version = j.at("version").get<std::string>();
    m.label = j.at("label").get<std::string>();
    m.wall_clock_s = j.at("wall_clock_s").get<double>();
    m.config = config_from_json_object(j.at("config"));
    m.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    m.files = j.at("files").get<std::vector<std::string>>();
    if (j.contains("failed_trials"))
      m.failed_trials = j.at("failed_trials").get<std::vector<int>>();
    if (j.contains("failures"))
      m.failures = j.at("failures").get<std::vector<std::string>>();
    return m;
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception& e) {
    throw std::runtime_error(path + ": malformed manifest: " + e.what());
  }
}

AggregateSummary summarize_run_dir(const std::string& dir) {
  const std::filesystem::path base(dir);
  const RunManifest manifest = read_manifest_json((base / "manifest.json").string());
  std::vector<TrialSummary> summaries;
  for (const std::string& name : manifest.files) {
    if (name.rfind("episodes_trial_", 0) != 0) continue;
    summaries.push_back(summarize(read_episode_csv((base / name).string())));
  }
  return aggregate_trials(manifest.label, summaries);
}

namespace {

std::string pretty(const std::optional<double>& v) {
  if (!v) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", *v);
  return buf;
}

std::string pretty_pm(const StatLine& s) {
  if (!s.mean) return "n/a";
  std::string text = pretty(s.mean);
  if (s.sd) text += " +- " + pretty(s.sd);
  return text;
}

}  // namespace

void print_summary(std::ostream& out, const AggregateSummary& summary) {
  out << summary.label << ": " << summary.trials << " trial"
      << (summary.trials == 1 ? "" : "s") << "\n";
  const auto row = [&](const char* name, const MetricAggregate& m) {
    out << "  " << std::left << std::setw(16) << name << std::setw(20) << pretty_pm(m.first)
        << std::setw(20) << pretty_pm(m.last) << std::setw(14) << pretty(m.improvement)
        << pretty_pm(m.slope) << "\n";
  };
  out << "  " << std::left << std::setw(16) << "metric" << std::setw(20) << "first block"
      << std::setw(20) << "last block" << std::setw(14) << "improvement"
      << "slope per trial\n";
  row("hits_per_rally", summary.hits);
  row("pct_aces", summary.aces);
  row("pct_long", summary.longs);
}

void print_comparison(std::ostream& out, const std::vector<AggregateSummary>& runs) {
  out << std::left << std::setw(10) << "label" << std::setw(8) << "trials" << std::setw(20)
      << "last hits" << std::setw(14) << "improvement" << std::setw(20) << "last %aces"
      << "last %long\n";
  for (const AggregateSummary& s : runs) {
    out << std::left << std::setw(10) << s.label << std::setw(8) << s.trials << std::setw(20)
        << pretty_pm(s.hits.last) << std::setw(14) << pretty(s.hits.improvement)
        << std::setw(20) << pretty_pm(s.aces.last) << pretty_pm(s.longs.last) << "\n";
  }
}

}  // namespace aifpong
