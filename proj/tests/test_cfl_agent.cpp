#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "aifpong/cfl_agent.hpp"
#include "aifpong/pong_env.hpp"

using namespace aifpong;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

long run_episodes(CflAgent& agent, PongEnv& env, Rng& rng, int episodes) {
  long steps = 0;
  for (int ep = 0; ep < episodes; ++ep) {
    Observation obs = env.reset(rng);
    agent.begin_episode();
    while (true) {
      Action a = agent.act(obs, rng);
      auto r = env.step(a);
      agent.observe(r.obs, r.feedback);
      ++steps;
      obs = r.obs;
      if (r.done) break;
    }
    agent.end_episode();
  }
  return steps;
}

double cell(const CflAgent& agent, const Observation& obs, Action u) {
  return agent.cl_counts()[static_cast<std::size_t>(joint_index(obs)) * 3 +
                           static_cast<int>(u)];
}

}  // namespace

TEST_CASE("fresh mapping yields a uniform policy") {
  CflAgent agent;
  auto dist = agent.action_distribution({10, 3, 3});
  for (int u = 0; u < 3; ++u) CHECK(dist[u] == doctest::Approx(1.0 / 3).epsilon(1e-12));

  Rng rng(11);
  int counts[3] = {0, 0, 0};
  for (int k = 0; k < 30000; ++k) {
    ++counts[static_cast<int>(agent.act({10, 3, 3}, rng))];
    agent.observe({10, 3, 3}, FeedbackKind::None);
  }
  for (int u = 0; u < 3; ++u) CHECK(std::abs(counts[u] - 10000) <= 245);  // 3 sigma
}

TEST_CASE("log-count softmax reproduces the hand-evaluated column") {
  // counts [e^2, e, e] have logs [2, 1, 1]
  const double e = std::exp(1.0);
  double ln_counts[3] = {std::log(e * e), std::log(e), std::log(e)};
  auto dist = softmax(std::span<const double>(ln_counts, 3));
  CHECK(dist[0] == doctest::Approx(0.5761168847658291).epsilon(1e-12));
  CHECK(dist[1] == doctest::Approx(0.21194155761708545).epsilon(1e-12));
  CHECK(dist[2] == doctest::Approx(0.21194155761708545).epsilon(1e-12));
  CHECK(dist[0] == doctest::Approx(e / (e + 2.0)).epsilon(1e-12));
}

TEST_CASE("unit precision equals the normalized count column exactly") {
  CflAgent agent({.memory_horizon = 8});
  PongEnv env;
  Rng rng(22);
  run_episodes(agent, env, rng, 12);

  for (int rep = 0; rep < 100; ++rep) {
    Observation obs{uniform_int(rng, 38), uniform_int(rng, 8), uniform_int(rng, 8)};
    auto col_start = agent.cl_counts().subspan(static_cast<std::size_t>(joint_index(obs)) * 3, 3);
    Categorical expected = normalize(col_start);
    auto actual = agent.action_distribution(obs);
    for (int u = 0; u < 3; ++u)
      CHECK(actual[u] == doctest::Approx(expected[u]).epsilon(1e-12));
  }
}

TEST_CASE("rescaling the counts leaves the policy unchanged") {
  CflAgent agent({.memory_horizon = 4});
  PongEnv env;
  Rng rng(33);
  run_episodes(agent, env, rng, 8);

  for (int rep = 0; rep < 50; ++rep) {
    Observation obs{uniform_int(rng, 38), uniform_int(rng, 8), uniform_int(rng, 8)};
    auto col = agent.cl_counts().subspan(static_cast<std::size_t>(joint_index(obs)) * 3, 3);
    double scaled_ln[3], plain_ln[3];
    for (int u = 0; u < 3; ++u) {
      plain_ln[u] = std::log(col[u]);
      scaled_ln[u] = std::log(col[u] * 739.25);
    }
    auto a = softmax(std::span<const double>(plain_ln, 3));
    auto b = softmax(std::span<const double>(scaled_ln, 3));
    for (int u = 0; u < 3; ++u) CHECK(a[u] == doctest::Approx(b[u]).epsilon(1e-12));
  }
}

TEST_CASE("infinite precision takes the argmax with lowest-index ties") {
  CflAgent agent({.memory_horizon = 2, .alpha = kInf});
  Rng rng(44);
  // all ties on a fresh mapping: index 0 wins
  for (int k = 0; k < 20; ++k) {
    CHECK(agent.act({5, 5, 5}, rng) == Action::Up);
    agent.observe({5, 5, 5}, FeedbackKind::None);
  }
  // credit one pair heavily, then it must always be chosen
  agent.begin_episode();
  Observation obs{1, 4, 4};
  agent.act(obs, rng);
  agent.observe(obs, FeedbackKind::Hit);
  REQUIRE(cell(agent, obs, Action::Up) > 0.5);
  for (int k = 0; k < 20; ++k) CHECK(agent.act(obs, rng) == Action::Up);
}

TEST_CASE("hits rewrite risks by recency") {
  CflAgent agent({.memory_horizon = 32});
  Rng rng(55);
  Observation obs{10, 3, 3};
  for (int k = 0; k < 20; ++k) {
    agent.act(obs, rng);
    if (k < 19) agent.observe(obs, FeedbackKind::None);
  }
  agent.observe(obs, FeedbackKind::Hit);  // completes step 20

  REQUIRE(agent.memory().size() == 20);
  // stamped 0..19; T_goal = 20
  CHECK(agent.memory()[0].gamma == doctest::Approx(0.50).epsilon(1e-12));   // 0.55 - 1/20
  CHECK(agent.memory()[15].gamma == doctest::Approx(0.35).epsilon(1e-12));  // 0.55 - 1/5
  CHECK(agent.memory()[19].gamma == doctest::Approx(0.0).epsilon(1e-12));   // clamped
}

TEST_CASE("without a hit risks stay at the prior") {
  CflAgent agent({.memory_horizon = 4});
  Rng rng(66);
  Observation obs{10, 3, 3};
  for (int k = 0; k < 3; ++k) {
    agent.act(obs, rng);
    agent.observe(obs, k == 2 ? FeedbackKind::Miss : FeedbackKind::None);
  }
  for (const MemoryEntry& e : agent.memory()) CHECK(e.gamma == kGammaPrior);
  for (double g : agent.gamma_history()) CHECK(g == doctest::Approx(kGammaPrior).epsilon(1e-12));
}

TEST_CASE("credited pair gains the current step worth of mass") {
  CflAgent agent({.memory_horizon = 4});
  Rng rng(77);
  Observation obs{1, 4, 4};
  agent.act(obs, rng);
  Action first = agent.memory().back().action;
  agent.observe(obs, FeedbackKind::Hit);  // gamma -> 0, update adds 1 * (1 - 0) / 1
  CHECK(cell(agent, obs, first) == doctest::Approx(1.0).epsilon(1e-9));

  agent.apply_update(5);  // single entry, gamma 0, t-bar 5: adds 5 more
  CHECK(cell(agent, obs, first) == doctest::Approx(6.0).epsilon(1e-9));
}

TEST_CASE("risk of one half is the null point of the update") {
  CflAgent agent({.memory_horizon = 32});
  Rng rng(88);
  Observation obs{10, 3, 3};
  agent.act(obs, rng);
  Action first = agent.memory().back().action;
  for (int k = 0; k < 19; ++k) {
    agent.observe(obs, FeedbackKind::None);
    agent.act(obs, rng);
  }
  agent.observe(obs, FeedbackKind::Hit);  // first entry: gamma = 0.55 - 1/20 = 0.5
  CHECK(agent.memory()[0].gamma == doctest::Approx(0.5).epsilon(1e-12));
  (void)first;

  // its contribution to the hit-step update was 20 * (1 - 2 * 0.5) / 20 = 0
  double before = cell(agent, obs, agent.memory()[0].action);
  std::deque<MemoryEntry> snapshot = agent.memory();
  agent.apply_update(40);
  double gained = cell(agent, obs, snapshot[0].action) - before;
  // any gain must come from other buffered entries on the same cell
  double expected = 0.0;
  for (std::size_t i = 1; i < snapshot.size(); ++i)
    if (snapshot[i].state == snapshot[0].state && snapshot[i].action == snapshot[0].action)
      expected += 40.0 * (1.0 - 2.0 * snapshot[i].gamma) / static_cast<double>(snapshot.size());
  CHECK(gained == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("uncredited pairs decay by a tenth of the step and floor out") {
  CflAgent agent({.memory_horizon = 4});
  Rng rng(99);
  Observation obs{20, 2, 6};
  agent.act(obs, rng);
  Action first = agent.memory().back().action;
  // fresh cell at the floor: a negative increment cannot push it lower
  agent.apply_update(5);
  CHECK(cell(agent, obs, first) == kEpsilonFloor);

  // seed the cell with credited mass, then measure the exact decay
  agent.begin_episode();
  agent.act(obs, rng);
  Action credited = agent.memory().back().action;
  agent.observe(obs, FeedbackKind::Hit);
  double base = cell(agent, obs, credited);
  CHECK(base == doctest::Approx(1.0).epsilon(1e-9));

  agent.begin_episode();
  Rng pick(1);
  agent.act(obs, pick);
  while (agent.memory().back().action != credited) {
    agent.begin_episode();
    agent.act(obs, pick);
  }
  agent.apply_update(6);  // single entry at prior risk: adds 6 * (1 - 1.1) = -0.6
  CHECK(cell(agent, obs, credited) == doctest::Approx(base - 0.6).epsilon(1e-9));
}

TEST_CASE("same-cell contributions aggregate before flooring") {
  CflAgent agent({.memory_horizon = 4});
  Rng rng(123);
  Observation obs{1, 4, 4};
  agent.act(obs, rng);
  Action first = agent.memory().back().action;
  agent.observe(obs, FeedbackKind::Hit);  // cell -> 1, buffered gamma -> 0
  agent.act(obs, rng);
  REQUIRE(agent.memory().size() == 2);
  REQUIRE(agent.memory()[1].action == first);  // near one-hot column repeats the pick
  REQUIRE(agent.memory()[1].gamma == kGammaPrior);

  // two entries on one cell: 6 * (1 - 0) / 2 + 6 * (1 - 1.1) / 2 = 3 - 0.3
  agent.apply_update(6);
  CHECK(cell(agent, obs, first) == doctest::Approx(3.7).epsilon(1e-9));
}

TEST_CASE("when every remembered risk is below one half no cell shrinks") {
  CflAgent agent({.memory_horizon = 3});
  Rng rng(135);
  Observation obs{3, 1, 1};
  for (int k = 0; k < 3; ++k) {
    agent.act(obs, rng);
    agent.observe(obs, k == 2 ? FeedbackKind::Hit : FeedbackKind::None);
  }
  for (const MemoryEntry& e : agent.memory()) REQUIRE(e.gamma < 0.5);

  std::vector<double> before(agent.cl_counts().begin(), agent.cl_counts().end());
  agent.apply_update(9);
  auto after = agent.cl_counts();
  for (std::size_t i = 0; i < after.size(); ++i) {
    CHECK(after[i] >= before[i]);
    bool visited = false;
    for (const MemoryEntry& e : agent.memory())
      if (static_cast<std::size_t>(e.state) * 3 + static_cast<int>(e.action) == i) visited = true;
    if (!visited) CHECK(after[i] == before[i]);
  }
}

TEST_CASE("memory is bounded by the horizon and ordered by step") {
  CflAgent agent({.memory_horizon = 3});
  Rng rng(146);
  Observation obs{10, 3, 3};
  for (int k = 0; k < 5; ++k) {
    agent.act(obs, rng);
    agent.observe(obs, FeedbackKind::None);
  }
  REQUIRE(agent.memory().size() == 3);
  CHECK(agent.memory()[0].step == 2);
  CHECK(agent.memory()[1].step == 3);
  CHECK(agent.memory()[2].step == 4);
}

TEST_CASE("episode boundaries clear the memory") {
  CflAgent agent({.memory_horizon = 8});
  Rng rng(157);
  agent.begin_episode();
  agent.act({10, 3, 3}, rng);
  agent.observe({9, 3, 3}, FeedbackKind::None);
  agent.end_episode();
  CHECK(agent.memory().empty());
  CHECK_THROWS_WITH_AS(agent.observe({9, 3, 3}, FeedbackKind::None), "memory buffer is empty",
                       std::runtime_error);
  CHECK_THROWS_AS(agent.apply_update(3), std::runtime_error);
}

TEST_CASE("counts stay at or above the floor under fuzzed updates") {
  CflAgent agent({.memory_horizon = 8});
  Rng rng(168);
  int step_budget = 100000;
  while (step_budget > 0) {
    agent.begin_episode();
    int len = 1 + uniform_int(rng, 40);
    for (int k = 0; k < len && step_budget > 0; ++k, --step_budget) {
      Observation obs{uniform_int(rng, 38), uniform_int(rng, 8), uniform_int(rng, 8)};
      agent.act(obs, rng);
      int roll = uniform_int(rng, 20);
      FeedbackKind fb = roll == 0   ? FeedbackKind::Hit
                        : roll == 1 ? FeedbackKind::Miss
                                    : FeedbackKind::None;
      agent.observe(obs, fb);
    }
    agent.end_episode();
  }
  double lowest = 1e300;
  for (double c : agent.cl_counts()) lowest = std::min(lowest, c);
  CHECK(lowest >= kEpsilonFloor);
}

TEST_CASE("hitting lowers the recorded mean risk") {
  CflAgent agent({.memory_horizon = 4});
  Rng rng(179);
  Observation obs{1, 4, 4};
  for (int k = 0; k < 4; ++k) {
    agent.act(obs, rng);
    agent.observe(obs, k == 3 ? FeedbackKind::Hit : FeedbackKind::None);
  }
  const auto& history = agent.gamma_history();
  REQUIRE(history.size() == 4);
  CHECK(history[2] == doctest::Approx(kGammaPrior).epsilon(1e-12));
  CHECK(history[3] < kGammaPrior);
}

TEST_CASE("trace emits the mapping entropy and the interval mean risk") {
  CflAgent agent;
  std::vector<TraceSample> out;
  agent.append_trace_samples(out);
  REQUIRE(out.size() == 2);
  CHECK(out[0].param == "te_cl");
  CHECK(out[0].value == doctest::Approx(2432 * std::log(3.0)).epsilon(1e-12));
  CHECK(out[0].value == doctest::Approx(2671.825086040843).epsilon(1e-12));
  CHECK(out[1].param == "gamma_mean");
  CHECK(out[1].value == doctest::Approx(kGammaPrior).epsilon(1e-12));

  // interval semantics: each emission covers history since the previous one
  Rng rng(190);
  Observation obs{1, 4, 4};
  agent.act(obs, rng);
  agent.observe(obs, FeedbackKind::Hit);
  agent.act(obs, rng);
  agent.observe(obs, FeedbackKind::None);
  out.clear();
  agent.append_trace_samples(out);
  double expected = (agent.gamma_history()[0] + agent.gamma_history()[1]) / 2.0;
  CHECK(out[1].value == doctest::Approx(expected).epsilon(1e-12));
  out.clear();
  agent.append_trace_samples(out);  // no new steps: falls back to the prior
  CHECK(out[1].value == doctest::Approx(kGammaPrior).epsilon(1e-12));
}

TEST_CASE("a short trial concentrates the mapping and records some hits") {
  CflAgent agent({.memory_horizon = 4});
  PongEnv env;
  Rng rng(201);
  double fresh_entropy = agent.cl_total_entropy();
  run_episodes(agent, env, rng, 30);
  CHECK(agent.cl_total_entropy() < fresh_entropy);
  double mean = 0.0;
  for (double g : agent.gamma_history()) mean += g;
  mean /= static_cast<double>(agent.gamma_history().size());
  CHECK(mean < kGammaPrior);  // at least one hit credited
}

TEST_CASE("invalid configuration is rejected") {
  CHECK_THROWS_AS(CflAgent({.memory_horizon = 0}), std::invalid_argument);
  CHECK_THROWS_AS(CflAgent({.memory_horizon = 4, .alpha = 0.0}), std::invalid_argument);
}
