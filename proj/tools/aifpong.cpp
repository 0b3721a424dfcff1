#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "aifpong/harness.hpp"

namespace {

double parse_precision(const std::string& text) {
  char* end = nullptr;
  double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0')
    throw std::invalid_argument("precision must be a number or inf (got \"" + text + "\")");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid-Pong experiment harness for three expected-free-energy agents"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run an experiment and write per-trial CSVs");
  std::string config_path;
  run->add_option("config", config_path, "JSON config file; flags below override its fields");
  std::string agent_name, replan_name, precision_text, out_dir;
  int memory = 0, horizon = 0, trials = 0, episodes = 0;
  int hit_halfwidth = 0, step_cap = 0, trace_interval = 0;
  std::uint64_t seed = 0;
  double lr = 0.0, eta = 0.0;
  run->add_option("--agent", agent_name, "aif1, dp or cfl");
  run->add_option("--memory", memory, "CFL memory horizon");
  run->add_option("--horizon", horizon, "DP planning horizon");
  run->add_option("--trials", trials, "independent trials (seeded seed, seed+1, ...)");
  run->add_option("--episodes", episodes, "episodes per trial");
  run->add_option("--seed", seed, "base seed");
  run->add_option("--hit-halfwidth", hit_halfwidth, "paddle reach, 0..7");
  run->add_option("--step-cap", step_cap, "max environment steps per episode");
  run->add_option("--precision", precision_text, "action/planner precision, or inf");
  run->add_option("--lr", lr, "transition learning rate");
  run->add_option("--eta", eta, "preference learning rate");
  run->add_option("--replan", replan_name, "every_step or per_episode");
  run->add_option("--trace-interval", trace_interval, "steps between trace samples");
  run->add_option("--out", out_dir, "output directory");

  auto* summarize_cmd =
      app.add_subcommand("summarize", "Recompute and print the summary of a finished run");
  std::string summarize_dir;
  summarize_cmd->add_option("dir", summarize_dir, "run directory with a manifest.json")
      ->required();

  auto* compare_cmd =
      app.add_subcommand("compare", "Print a side-by-side table for several runs");
  std::vector<std::string> compare_dirs;
  compare_cmd->add_option("dirs", compare_dirs, "run directories")->required()->expected(-1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;  // bad arguments are config errors
  }

  try {
    if (run->parsed()) {
      aifpong::ExperimentConfig config;
      if (!config_path.empty()) config = aifpong::load_config_file(config_path);
      if (run->count("--agent")) config.agent = aifpong::agent_kind_from_string(agent_name);
      if (run->count("--memory")) config.memory_horizon = memory;
      if (run->count("--horizon")) config.planning_horizon = horizon;
      if (run->count("--trials")) config.trials = trials;
      if (run->count("--episodes")) config.episodes_per_trial = episodes;
      if (run->count("--seed")) config.base_seed = seed;
      if (run->count("--hit-halfwidth")) config.hit_halfwidth = hit_halfwidth;
      if (run->count("--step-cap")) config.step_cap = step_cap;
      if (run->count("--precision")) config.precision = parse_precision(precision_text);
      if (run->count("--lr")) config.lr = lr;
      if (run->count("--eta")) config.eta = eta;
      if (run->count("--replan"))
        config.replan = aifpong::replan_mode_from_string(replan_name);
      if (run->count("--trace-interval")) config.trace_interval = trace_interval;
      if (run->count("--out")) config.out_dir = out_dir;
      aifpong::validate(config);

      aifpong::RunManifest manifest = aifpong::run_experiment(config);
      const int ok = static_cast<int>(manifest.seeds.size()) -
                     static_cast<int>(manifest.failed_trials.size());
      std::cout << manifest.label << ": " << ok << "/" << manifest.seeds.size()
                << " trials finished in " << aifpong::format_double(manifest.wall_clock_s)
                << " s, outputs in " << config.out_dir << "\n";
      aifpong::print_summary(std::cout, aifpong::summarize_run_dir(config.out_dir));
      if (!manifest.failed_trials.empty()) {
        std::cerr << "failed trials:";
        for (std::size_t i = 0; i < manifest.failed_trials.size(); ++i)
          std::cerr << " " << manifest.failed_trials[i] << " (" << manifest.failures[i]
                    << ")";
        std::cerr << "\n";
        return 2;
      }
      return 0;
    }

    if (summarize_cmd->parsed()) {
      aifpong::AggregateSummary summary = aifpong::summarize_run_dir(summarize_dir);
      aifpong::write_summary_csv(summarize_dir + "/summary.csv", summary);
      aifpong::write_summary_json(summarize_dir + "/summary.json", summary);
      aifpong::print_summary(std::cout, summary);
      return 0;
    }

    if (compare_cmd->parsed()) {
      std::vector<aifpong::AggregateSummary> runs;
      runs.reserve(compare_dirs.size());
      for (const std::string& dir : compare_dirs)
        runs.push_back(aifpong::summarize_run_dir(dir));
      aifpong::print_comparison(std::cout, runs);
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
