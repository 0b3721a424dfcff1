#include "aifpong/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace aifpong {

void timestamp_episodes(std::vector<EpisodeRecord>& records) {
  if (records.empty()) throw std::invalid_argument("cannot timestamp an empty trial");
  long total = 0;
  for (const EpisodeRecord& r : records) {
    if (r.steps <= 0) throw std::invalid_argument("episode with non-positive step count");
    total += r.steps;
  }
  long cumulative = 0;
  for (EpisodeRecord& r : records) {
    cumulative += r.steps;
    // multiply first so the final episode lands on 1200 exactly
    r.end_time_s = 1200.0 * static_cast<double>(cumulative) / static_cast<double>(total);
  }
}

BlockStats compute_stats(std::span<const EpisodeRecord> records) {
  if (records.empty()) throw std::invalid_argument("no episodes to summarize");
  BlockStats stats;
  stats.episodes = static_cast<int>(records.size());
  long hit_total = 0;
  int aces = 0, longs = 0;
  for (const EpisodeRecord& r : records) {
    hit_total += r.hits;
    if (r.hits == 0) ++aces;
    if (r.hits >= 3) ++longs;
  }
  const double n = static_cast<double>(records.size());
  stats.mean_hits = static_cast<double>(hit_total) / n;
  stats.pct_aces = 100.0 * aces / n;
  stats.pct_long = 100.0 * longs / n;
  return stats;
}

RegressionResult linear_regression(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("regression inputs differ in length");
  if (x.size() < 2) throw std::invalid_argument("regression needs at least two points");
  const double n = static_cast<double>(x.size());
  double x_mean = 0.0, y_mean = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    x_mean += x[i];
    y_mean += y[i];
  }
  x_mean /= n;
  y_mean /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - x_mean;
    const double dy = y[i] - y_mean;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("regression undefined for constant x");
  RegressionResult result;
  result.slope = sxy / sxx;
  result.intercept = y_mean - result.slope * x_mean;
  result.r = (syy == 0.0) ? 0.0 : sxy / std::sqrt(sxx * syy);
  return result;
}

int minute_bin(double end_time_s) {
  const int bin = static_cast<int>(std::ceil(end_time_s / 60.0)) - 1;
  return std::clamp(bin, 0, 19);
}

TrialSummary summarize(std::span<const EpisodeRecord> records) {
  if (records.empty()) throw std::invalid_argument("no episodes to summarize");
  for (const EpisodeRecord& r : records)
    if (!(r.end_time_s > 0.0))
      throw std::invalid_argument("records must be timestamped before summarizing");

  TrialSummary summary;
  std::vector<EpisodeRecord> first, last;
  std::array<std::vector<EpisodeRecord>, 20> bins;
  for (const EpisodeRecord& r : records) {
    (r.end_time_s <= 300.0 ? first : last).push_back(r);
    bins[minute_bin(r.end_time_s)].push_back(r);
  }
  if (!first.empty()) summary.first_block = compute_stats(first);
  if (!last.empty()) summary.last_block = compute_stats(last);
  for (int m = 0; m < 20; ++m)
    if (!bins[m].empty()) summary.minute_bins[m] = compute_stats(bins[m]);

  std::vector<double> minutes, aces, longs;
  for (int m = 0; m < 20; ++m)
    if (summary.minute_bins[m]) {
      minutes.push_back(static_cast<double>(m));
      aces.push_back(summary.minute_bins[m]->pct_aces);
      longs.push_back(summary.minute_bins[m]->pct_long);
    }
  if (minutes.size() >= 2) {
    summary.aces_per_minute = linear_regression(minutes, aces);
    summary.long_per_minute = linear_regression(minutes, longs);
  }
  if (records.size() >= 2) {
    std::vector<double> times, hits;
    for (const EpisodeRecord& r : records) {
      times.push_back(r.end_time_s);
      hits.push_back(static_cast<double>(r.hits));
    }
    summary.hits_per_episode = linear_regression(times, hits);
  }
  return summary;
}

double total_entropy(std::span<const Categorical> members) {
  double h = 0.0;
  for (const Categorical& c : members) h += entropy(c);
  return h;
}

std::vector<double> normalize_trace(std::span<const double> te_series) {
  if (te_series.empty()) throw std::invalid_argument("cannot normalize an empty series");
  double peak = 0.0;
  for (double v : te_series) {
    if (v < 0.0) throw std::invalid_argument("total entropy cannot be negative");
    peak = std::max(peak, v);
  }
  std::vector<double> nte(te_series.begin(), te_series.end());
  if (peak == 0.0) return nte;  // all-zero series stays all zero
  for (double& v : nte) v /= peak;
  return nte;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  return fields;
}

[[noreturn]] void fail_at(const std::string& path, long line_no, const std::string& what) {
  throw std::runtime_error(path + " line " + std::to_string(line_no) + ": " + what);
}

}  // namespace

std::vector<EpisodeRecord> read_episode_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line) || line != "trial,episode,hits,steps,end_time_s,is_ace")
    fail_at(path, line_no, "unexpected episode header");

  std::vector<EpisodeRecord> records;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != 6) fail_at(path, line_no, "expected 6 fields");
    EpisodeRecord r;
    try {
      r.episode_index = std::stoi(fields[1]);
      r.hits = std::stoi(fields[2]);
      r.steps = std::stoi(fields[3]);
      r.end_time_s = std::stod(fields[4]);
      r.is_ace = std::stoi(fields[5]) != 0;
    } catch (const std::exception&) {
      fail_at(path, line_no, "malformed field");
    }
    if (r.is_ace != (r.hits == 0)) fail_at(path, line_no, "is_ace contradicts hits");
    records.push_back(r);
  }
  return records;
}

std::vector<EntropyTrace> read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  long line_no = 1;
  if (!std::getline(in, line) || line != "trial,step,param,value")
    fail_at(path, line_no, "unexpected trace header");

  std::vector<EntropyTrace> traces;
  auto find = [&](const std::string& param) -> EntropyTrace& {
    for (EntropyTrace& t : traces)
      if (t.param == param) return t;
    traces.push_back({param, {}, {}, {}});
    return traces.back();
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_fields(line);
    if (fields.size() != 4) fail_at(path, line_no, "expected 4 fields");
    try {
      EntropyTrace& t = find(fields[2]);
      t.steps.push_back(std::stol(fields[1]));
      t.te.push_back(std::stod(fields[3]));
    } catch (const std::exception&) {
      fail_at(path, line_no, "malformed field");
    }
  }
  for (EntropyTrace& t : traces) t.nte = normalize_trace(t.te);
  return traces;
}

}  // namespace aifpong
