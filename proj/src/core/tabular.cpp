#include "core/tabular.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include "core/error.hpp"

namespace tddr::tabular {

TabularQPair::TabularQPair(int states, int actions, std::uint64_t seed, double init_a, double init_b)
    : n_states(states),
      n_actions(actions),
      qa(static_cast<std::size_t>(states) * actions, init_a),
      qb(static_cast<std::size_t>(states) * actions, init_b),
      visits(static_cast<std::size_t>(states) * actions, 0),
      rng(seed, Stream::kTabular) {
  if (states < 1 || actions < 1) throw ConfigError("TabularQPair: sizes must be >= 1");
}

std::string_view to_string(UpdatePattern p) { return p == UpdatePattern::kRandom ? "random" : "simultaneous"; }

std::string_view to_string(Selector s) {
  switch (s) {
    case Selector::kTddr: return "tddr";
    case Selector::kFixed1: return "fixed1";
    case Selector::kFixed2: return "fixed2";
  }
  return "?";
}

std::string_view to_string(Scheme s) { return s == Scheme::kMin ? "min" : "classic"; }

UpdatePattern parse_pattern(std::string_view name) {
  if (name == "random") return UpdatePattern::kRandom;
  if (name == "simultaneous") return UpdatePattern::kSimultaneous;
  throw ConfigError("unknown update pattern '" + std::string(name) + "' (expected random|simultaneous)");
}

Selector parse_selector(std::string_view name) {
  if (name == "tddr") return Selector::kTddr;
  if (name == "fixed1") return Selector::kFixed1;
  if (name == "fixed2") return Selector::kFixed2;
  throw ConfigError("unknown selector '" + std::string(name) + "' (expected tddr|fixed1|fixed2)");
}

Scheme parse_scheme(std::string_view name) {
  if (name == "min") return Scheme::kMin;
  if (name == "classic") return Scheme::kClassic;
  throw ConfigError("unknown scheme '" + std::string(name) + "' (expected min|classic)");
}

int greedy_action(const std::vector<double>& table, int n_actions, int s) {
  const std::size_t base = static_cast<std::size_t>(s) * n_actions;
  int best = 0;
  for (int a = 1; a < n_actions; ++a) {
    if (table[base + a] > table[base + best]) best = a;
  }
  return best;
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw UsageError("learning rate must lie in [0, 1]");
}

double shared_target(const TabularQPair& pair, const env::MdpSpec& mdp, const Experience& e, int selected) {
  const std::vector<double>& source = (selected == 1) ? pair.qa : pair.qb;
  const int a_star = greedy_action(source, pair.n_actions, e.s_next);
  const double bootstrap = std::min(pair.b_value(e.s_next, a_star), pair.a_value(e.s_next, a_star));
  return e.r + mdp.gamma * bootstrap;
}

}  // namespace

StepLog classic_double_q_step(TabularQPair& pair, const env::MdpSpec& mdp, const Experience& e, double alpha) {
  check_alpha(alpha);
  const std::size_t sa = pair.index(e.s, e.a);
  const int a1 = greedy_action(pair.qa, pair.n_actions, e.s_next);
  const int a2 = greedy_action(pair.qb, pair.n_actions, e.s_next);
  StepLog log;
  log.target_a = e.r + mdp.gamma * pair.b_value(e.s_next, a1);
  log.target_b = e.r + mdp.gamma * pair.a_value(e.s_next, a2);
  log.error_a = log.target_a - pair.qa[sa];
  log.error_b = log.target_b - pair.qb[sa];
  if (pair.rng.coin()) {
    pair.qa[sa] += alpha * log.error_a;
    log.updated_a = true;
  } else {
    pair.qb[sa] += alpha * log.error_b;
    log.updated_b = true;
  }
  return log;
}

int tddr_tabular_selector(const TabularQPair& pair, const env::MdpSpec& mdp, const Experience& e) {
  const double current = std::min(pair.b_value(e.s, e.a), pair.a_value(e.s, e.a));
  const double delta1 = shared_target(pair, mdp, e, 1) - current;
  const double delta2 = shared_target(pair, mdp, e, 2) - current;
  return std::abs(delta1) <= std::abs(delta2) ? 1 : 2;
}

StepLog min_double_q_step(TabularQPair& pair, const env::MdpSpec& mdp, const Experience& e, double alpha,
                          UpdatePattern pattern, Selector selector) {
  check_alpha(alpha);
  StepLog log;
  switch (selector) {
    case Selector::kTddr: log.selected = tddr_tabular_selector(pair, mdp, e); break;
    case Selector::kFixed1: log.selected = 1; break;
    case Selector::kFixed2: log.selected = 2; break;
  }
  const double target = shared_target(pair, mdp, e, log.selected);
  const std::size_t sa = pair.index(e.s, e.a);
  log.target_a = target;
  log.target_b = target;
  log.error_a = target - pair.qa[sa];
  log.error_b = target - pair.qb[sa];
  if (pattern == UpdatePattern::kSimultaneous) {
    log.updated_a = log.updated_b = true;
  } else if (pair.rng.coin()) {
    log.updated_a = true;
  } else {
    log.updated_b = true;
  }
  if (log.updated_a) pair.qa[sa] += alpha * log.error_a;
  if (log.updated_b) pair.qb[sa] += alpha * log.error_b;
  return log;
}

double learning_rate(std::int64_t n, double omega) {
  if (!(omega > 0.5 && omega <= 1.0)) throw ConfigError("learning-rate exponent omega must lie in (0.5, 1]");
  if (n < 1) throw UsageError("learning_rate: visit count must be >= 1");
  return std::pow(static_cast<double>(n), -omega);
}

void ConvergenceOptions::validate() const {
  if (steps < 0) throw ConfigError("convergence: steps must be >= 0");
  if (checkpoint_every < 1) throw ConfigError("convergence: checkpoint interval must be >= 1");
  if (!(omega > 0.5 && omega <= 1.0)) throw ConfigError("convergence: omega must lie in (0.5, 1]");
  if (!(epsilon_end > 0.0 && epsilon_end <= 1.0) || !(epsilon_start >= epsilon_end && epsilon_start <= 1.0)) {
    throw ConfigError("convergence: need 0 < epsilon_end <= epsilon_start <= 1");
  }
  if (!(epsilon_decay_fraction > 0.0 && epsilon_decay_fraction <= 1.0)) {
    throw ConfigError("convergence: epsilon decay fraction must lie in (0, 1]");
  }
}

namespace {

double sup_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double m = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) m = std::max(m, std::abs(x[k] - y[k]));
  return m;
}

double sup_abs(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace

ConvergenceTrace run_convergence(const env::MdpSpec& mdp, const ConvergenceOptions& options) {
  mdp.validate();
  options.validate();
  ConvergenceTrace trace;
  trace.q_star = env::value_iteration(mdp, options.value_iteration_tol).q;
  trace.q_star_inf = sup_abs(trace.q_star);

  TabularQPair pair(mdp.n_states, mdp.n_actions, options.seed, options.init_a, options.init_b);
  Rng behavior(options.seed, Stream::kExploration);
  Rng dynamics(options.seed, Stream::kEnv);

  const double decay_steps = options.epsilon_decay_fraction * static_cast<double>(std::max<std::int64_t>(options.steps, 1));
  auto epsilon_at = [&](std::int64_t t) {
    const double frac = std::min(1.0, static_cast<double>(t) / decay_steps);
    return options.epsilon_start + (options.epsilon_end - options.epsilon_start) * frac;
  };

  double sum_ea = 0.0, sum_eb = 0.0, sum_alpha = 0.0;
  std::int64_t window = 0;
  auto checkpoint = [&](std::int64_t t) {
    TraceRow row;
    row.step = t;
    row.delta_ba_inf = sup_diff(pair.qa, pair.qb);
    row.delta_a_inf = sup_diff(pair.qa, trace.q_star);
    if (window > 0) {
      row.mean_abs_ea = sum_ea / static_cast<double>(window);
      row.mean_abs_eb = sum_eb / static_cast<double>(window);
      row.alpha_mean = sum_alpha / static_cast<double>(window);
    }
    row.epsilon = epsilon_at(t);
    row.max_abs_q = std::max(sup_abs(pair.qa), sup_abs(pair.qb));
    trace.rows.push_back(row);
    sum_ea = sum_eb = sum_alpha = 0.0;
    window = 0;
  };

  std::vector<double> q_min(static_cast<std::size_t>(mdp.n_actions));
  int s = static_cast<int>(dynamics.index(static_cast<std::size_t>(mdp.n_states)));
  checkpoint(0);
  for (std::int64_t t = 1; t <= options.steps; ++t) {
    int a = 0;
    if (behavior.uniform() < epsilon_at(t)) {
      a = static_cast<int>(behavior.index(static_cast<std::size_t>(mdp.n_actions)));
    } else {
      for (int k = 0; k < mdp.n_actions; ++k) q_min[k] = std::min(pair.a_value(s, k), pair.b_value(s, k));
      a = greedy_action(q_min, mdp.n_actions, 0);
    }
    Experience e;
    e.s = s;
    e.a = a;
    e.s_next = mdp.sample_next_state(s, a, dynamics);
    e.r = mdp.sample_reward(s, a, dynamics);

    const std::int64_t n = ++pair.visits[pair.index(s, a)];
    const double alpha = learning_rate(n, options.omega);
    const StepLog log = (options.scheme == Scheme::kMin)
                            ? min_double_q_step(pair, mdp, e, alpha, options.pattern, options.selector)
                            : classic_double_q_step(pair, mdp, e, alpha);
    sum_ea += std::abs(log.error_a);
    sum_eb += std::abs(log.error_b);
    sum_alpha += alpha;
    ++window;
    s = e.s_next;

    if (t % options.checkpoint_every == 0 || t == options.steps) checkpoint(t);
  }
  trace.final_pair = std::move(pair);
  return trace;
}

namespace {

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

}  // namespace

void write_trace_csv(const ConvergenceTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "step,deltaBA_inf,deltaA_inf,meanAbsEA,meanAbsEB,epsilon,alphaMean\n";
  for (const TraceRow& r : trace.rows) {
    out << r.step << ',' << num(r.delta_ba_inf) << ',' << num(r.delta_a_inf) << ',' << num(r.mean_abs_ea) << ','
        << num(r.mean_abs_eb) << ',' << num(r.epsilon) << ',' << num(r.alpha_mean) << '\n';
  }
  if (!out) throw IoError("write failed: " + path.string());
}

}  // namespace tddr::tabular
