#include "aifpong/dpefe_agent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "aifpong/gen_model.hpp"

namespace aifpong {

namespace {

// Mode product for one factor: contracts `in` (a function of the joint next
// state) with the factor's transition matrix, leaving a function of the
// joint state with this factor replaced by its previous value. Joint index
// decomposes as (o * dim + x) * stride + i for this factor.
void apply_factor(const std::vector<double>& trans_u, int dim, long outer, long stride,
                  const double* in, double* out) {
  for (long o = 0; o < outer; ++o) {
    const double* in_base = in + o * dim * stride;
    double* out_base = out + o * dim * stride;
    for (int prev = 0; prev < dim; ++prev) {
      double* out_row = out_base + prev * stride;
      std::fill(out_row, out_row + stride, 0.0);
      const double* probs = &trans_u[static_cast<std::size_t>(prev) * dim];
      for (int next = 0; next < dim; ++next) {
        const double p = probs[next];
        if (p <= kSupportCutoff) continue;
        const double* in_row = in_base + next * stride;
        for (long i = 0; i < stride; ++i) out_row[i] += p * in_row[i];
      }
    }
  }
}

// Writes softmax(-precision * g) over the `a` action values at g_slice.
// Matches the softmax kernel applied to the negated slice bit for bit.
void write_action_softmax(const double* g_slice, int a, double precision, double* out) {
  int best = 0;
  for (int u = 1; u < a; ++u)
    if (g_slice[u] < g_slice[best]) best = u;
  if (std::isinf(precision)) {
    std::fill(out, out + a, 0.0);
    out[best] = 1.0;
    return;
  }
  const double vmax = precision * -g_slice[best];
  double total = 0.0;
  for (int u = 0; u < a; ++u) {
    out[u] = std::exp(precision * -g_slice[u] - vmax);
    total += out[u];
  }
  for (int u = 0; u < a; ++u) out[u] /= total;
}

void validate(const PlannerModel& model, int horizon, double precision) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (std::isnan(precision) || precision <= 0.0)
    throw std::invalid_argument("precision must be positive");
  if (model.n_actions < 1) throw std::invalid_argument("model needs at least one action");
  if (model.factors.empty()) throw std::invalid_argument("model needs at least one factor");
  for (const auto& f : model.factors) {
    if (f.dim < 1) throw std::invalid_argument("factor dimension must be at least 1");
    if (f.trans.size() != static_cast<std::size_t>(model.n_actions))
      throw std::invalid_argument("factor needs one transition matrix per action");
    for (const auto& t : f.trans)
      if (t.size() != static_cast<std::size_t>(f.dim) * f.dim)
        throw std::invalid_argument("transition matrix size mismatch");
    if (f.pref.size() != static_cast<std::size_t>(f.dim))
      throw std::invalid_argument("preference size mismatch");
  }
}

}  // namespace

void plan_backward(const PlannerModel& model, int horizon, double precision, EfeTable& out) {
  validate(model, horizon, precision);
  const int a = model.n_actions;
  const long n = model.n_states();
  const std::size_t f_count = model.factors.size();

  out.horizon = horizon;
  out.n_actions = a;
  out.n_states = n;
  out.g.resize(horizon);
  out.qu.resize(horizon);
  for (int t = 0; t < horizon; ++t) {
    out.g[t].resize(static_cast<std::size_t>(n) * a);
    out.qu[t].resize(static_cast<std::size_t>(n) * a);
  }

  // Factor strides for the mixed-radix joint index (outermost first).
  std::vector<long> strides(f_count), outers(f_count);
  {
    long stride = 1;
    for (std::size_t f = f_count; f-- > 0;) {
      strides[f] = stride;
      stride *= model.factors[f].dim;
    }
    for (std::size_t f = 0; f < f_count; ++f)
      outers[f] = n / (strides[f] * model.factors[f].dim);
  }

  // The risk of acting from each (state, action) is time-independent, so it
  // is assembled once: per factor a KL against the preference for every
  // (action, previous value), then summed over factors along the joint
  // index odometer.
  std::vector<std::vector<double>> factor_kl(f_count);
  for (std::size_t f = 0; f < f_count; ++f) {
    const PlannerFactor& factor = model.factors[f];
    factor_kl[f].resize(static_cast<std::size_t>(a) * factor.dim);
    std::span<const double> pref(factor.pref);
    for (int u = 0; u < a; ++u)
      for (int prev = 0; prev < factor.dim; ++prev) {
        std::span<const double> row(&factor.trans[u][static_cast<std::size_t>(prev) * factor.dim],
                                    static_cast<std::size_t>(factor.dim));
        factor_kl[f][static_cast<std::size_t>(u) * factor.dim + prev] = kl_divergence(row, pref);
      }
  }
  std::vector<double> kl(static_cast<std::size_t>(n) * a);
  std::vector<int> digits(f_count, 0);
  for (long s = 0; s < n; ++s) {
    for (int u = 0; u < a; ++u) {
      double v = 0.0;
      for (std::size_t f = 0; f < f_count; ++f)
        v += factor_kl[f][static_cast<std::size_t>(u) * model.factors[f].dim + digits[f]];
      kl[s * a + u] = v;
    }
    for (std::size_t f = f_count; f-- > 0;) {
      if (++digits[f] < model.factors[f].dim) break;
      digits[f] = 0;
    }
  }

  // Terminal level: risk only.
  out.g[horizon - 1] = kl;
  for (long s = 0; s < n; ++s)
    write_action_softmax(&out.g[horizon - 1][s * a], a, precision, &out.qu[horizon - 1][s * a]);

  std::vector<double> w(n), buf_a(n), buf_b(n);
  for (int t = horizon - 2; t >= 0; --t) {
    const std::vector<double>& g_next = out.g[t + 1];
    const std::vector<double>& qu_next = out.qu[t + 1];
    for (long s = 0; s < n; ++s) {
      double v = 0.0;
      for (int u = 0; u < a; ++u) v += qu_next[s * a + u] * g_next[s * a + u];
      w[s] = v;
    }
    std::vector<double>& g_t = out.g[t];
    for (int u = 0; u < a; ++u) {
      const double* src = w.data();
      double* dst = buf_a.data();
      for (std::size_t f = 0; f < f_count; ++f) {
        apply_factor(model.factors[f].trans[u], model.factors[f].dim, outers[f], strides[f], src,
                     dst);
        src = dst;
        dst = (dst == buf_a.data()) ? buf_b.data() : buf_a.data();
      }
      for (long s = 0; s < n; ++s) g_t[s * a + u] = kl[s * a + u] + src[s];
    }
    for (long s = 0; s < n; ++s)
      write_action_softmax(&g_t[s * a], a, precision, &out.qu[t][s * a]);
  }
}

DpefeAgent::DpefeAgent(DpefeConfig config)
    : model_(config.lr, config.eta), config_(config) {
  if (config_.horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (std::isnan(config_.precision) || config_.precision <= 0.0)
    throw std::invalid_argument("precision must be positive");
  planner_model_.n_actions = kNumActions;
  planner_model_.factors.resize(3);
  for (int m = 0; m < 3; ++m) {
    PlannerFactor& factor = planner_model_.factors[m];
    factor.dim = kModalityDims[m];
    factor.trans.assign(kNumActions, std::vector<double>(
                                         static_cast<std::size_t>(factor.dim) * factor.dim));
    factor.pref.resize(factor.dim);
  }
}

void DpefeAgent::refresh_planner_model() {
  for (int m = 0; m < 3; ++m) {
    PlannerFactor& factor = planner_model_.factors[m];
    Modality mod = static_cast<Modality>(m);
    for (int u = 0; u < kNumActions; ++u)
      model_.b().write_normalized(mod, static_cast<Action>(u), factor.trans[u]);
    const Categorical pref = model_.c().normalized(mod);
    std::copy(pref.probs().begin(), pref.probs().end(), factor.pref.begin());
  }
}

const EfeTable& DpefeAgent::plan() {
  refresh_planner_model();
  plan_backward(planner_model_, config_.horizon, config_.precision, table_);
  table_valid_ = true;
  ++plans_built_;
  return table_;
}

Action DpefeAgent::act(const Observation& obs, Rng& rng) {
  if (config_.replan == ReplanMode::EveryStep) {
    plan();
  } else if (plan_pending_) {
    plan();
    plan_pending_ = false;
  } else if (!table_valid_) {
    throw std::runtime_error("stale plan: call begin_episode before act");
  }
  const long s = joint_index(obs);
  const double* q = &table_.qu[0][static_cast<std::size_t>(s) * kNumActions];
  Categorical dist(std::vector<double>(q, q + kNumActions));
  Action a = static_cast<Action>(sample(dist, rng));
  pending_ = {obs, a};
  return a;
}

void DpefeAgent::learn(const Observation& next, FeedbackKind fb) {
  if (!pending_) throw std::runtime_error("learn called before act");
  model_.update_b(pending_->first, pending_->second, next);
  model_.update_c(next, fb);
  pending_.reset();
}

void DpefeAgent::begin_episode() {
  if (config_.replan == ReplanMode::PerEpisode) plan_pending_ = true;
}

void DpefeAgent::end_episode() {
  table_valid_ = false;
  pending_.reset();
}

void DpefeAgent::append_trace_samples(std::vector<TraceSample>& out) {
  static const char* b_names[3] = {"te_b_ballx", "te_b_bally", "te_b_paddley"};
  static const char* c_names[3] = {"te_c_ballx", "te_c_bally", "te_c_paddley"};
  for (int m = 0; m < 3; ++m) {
    out.push_back({b_names[m], model_.b().total_entropy(static_cast<Modality>(m))});
    out.push_back({c_names[m], model_.c().total_entropy(static_cast<Modality>(m))});
  }
}

}  // namespace aifpong
