#pragma once

// Brute-force oracle for small single-factor planning problems with
// deterministic (one-hot) transitions: scores every open-loop action
// sequence by its accumulated per-step risk. Used to pin the backward
// recursion against an independent path-enumeration computation, which
// coincides with it exactly when transitions are deterministic.

#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "aifpong/categorical.hpp"
#include "aifpong/dpefe_agent.hpp"
#include "aifpong/rng.hpp"

namespace aifpong::testing {

struct EnumerationResult {
  int best_first_action = 0;
  // minimum total risk over all policies starting with each action
  std::vector<double> best_g_per_action;
};

inline int argmax_row(std::span<const double> row) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(row.size()); ++i)
    if (row[i] > row[best]) best = i;
  return best;
}

inline EnumerationResult enumerate_policies(const PlannerModel& model, int horizon, int root) {
  if (model.factors.size() != 1)
    throw std::invalid_argument("oracle handles single-factor models only");
  const PlannerFactor& f = model.factors[0];
  const int a = model.n_actions;
  const int dim = f.dim;

  long n_policies = 1;
  for (int t = 0; t < horizon; ++t) n_policies *= a;

  EnumerationResult result;
  result.best_g_per_action.assign(a, std::numeric_limits<double>::infinity());
  std::span<const double> pref(f.pref);
  for (long code = 0; code < n_policies; ++code) {
    // decode most-significant-first so scanning order is lexicographic
    long rest = code;
    long place = n_policies / a;
    int state = root;
    int first = -1;
    double risk = 0.0;
    for (int t = 0; t < horizon; ++t) {
      const int u = static_cast<int>(rest / place);
      rest %= place;
      place = (t + 1 < horizon) ? place / a : 1;
      if (t == 0) first = u;
      std::span<const double> row(&f.trans[u][static_cast<std::size_t>(state) * dim],
                                  static_cast<std::size_t>(dim));
      risk += kl_divergence(row, pref);
      state = argmax_row(row);
    }
    if (risk < result.best_g_per_action[first]) result.best_g_per_action[first] = risk;
  }
  for (int u = 1; u < a; ++u)
    if (result.best_g_per_action[u] <
        result.best_g_per_action[result.best_first_action])
      result.best_first_action = u;
  return result;
}

// Random instance with one-hot transition rows and a strictly positive
// preference, the regime where closed-loop recursion and open-loop
// enumeration provably agree.
inline PlannerModel random_deterministic_instance(Rng& rng, int n_states, int n_actions) {
  PlannerModel model;
  model.n_actions = n_actions;
  model.factors.resize(1);
  PlannerFactor& f = model.factors[0];
  f.dim = n_states;
  f.trans.assign(n_actions,
                 std::vector<double>(static_cast<std::size_t>(n_states) * n_states, 0.0));
  for (int u = 0; u < n_actions; ++u)
    for (int prev = 0; prev < n_states; ++prev)
      f.trans[u][static_cast<std::size_t>(prev) * n_states + uniform_int(rng, n_states)] = 1.0;
  f.pref.resize(n_states);
  double total = 0.0;
  for (int i = 0; i < n_states; ++i) {
    f.pref[i] = 0.01 + uniform01(rng);
    total += f.pref[i];
  }
  for (double& p : f.pref) p /= total;
  return model;
}

}  // namespace aifpong::testing
