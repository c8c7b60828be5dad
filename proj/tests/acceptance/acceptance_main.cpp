// Acceptance suite. One PASS/FAIL line per criterion; INFO lines carry
// supporting measurements and never change the verdict.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "core/agent.hpp"
#include "core/config.hpp"
#include "core/experiment.hpp"
#include "core/mdp.hpp"
#include "core/regularizers.hpp"
#include "core/report.hpp"
#include "core/tabular.hpp"
#include "helpers.hpp"
#include "oracle_values.hpp"

using namespace tddr;
namespace fs = std::filesystem;

namespace {

// Tolerances.
constexpr double kTabularBaRatio = 0.05;
constexpr double kTabularStarRatio = 0.1;
constexpr double kValueIterationTol = 1e-10;
constexpr std::int64_t kTabularSteps = 500000;
constexpr std::int64_t kTabularExtendedSteps = 5000000;
constexpr double kGradRelTol = 1e-4;
constexpr double kBoundaryMassRelTol = 0.02;
constexpr int kNoiseDraws = 100000;
constexpr int kLearningSeedsRequired = 4;
constexpr int kBaselineEpisodes = 100;
constexpr std::uint64_t kBaselineSeed = 0;

int failures = 0;

void verdict(int id, bool pass, const std::string& what, const std::string& detail) {
  std::printf("%s criterion %d: %s | %s\n", pass ? "PASS" : "FAIL", id, what.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

void info(int id, const std::string& text) {
  std::printf("INFO criterion %d: %s\n", id, text.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---- criteria 1-4 -----------------------------------------------------------

struct TabularOutcome {
  int passed = 0;
  double worst_ba = 0.0;    // max over MDPs of ||QA - QB|| / ||Q*||
  double worst_star = 0.0;  // max over MDPs of ||QA - Q*|| / ||Q*||
  bool ba_always_zero = true;
  int star_trend = 0;  // MDPs where the windowed gap to Q* fell since 10% progress
  int ba_trend = 0;    // same for the gap between the tables (or it stayed at zero)
};

// Mean over up to 5 rows centred on index i.
double window_mean(const std::vector<tabular::TraceRow>& rows, std::size_t i, double tabular::TraceRow::*field) {
  const std::size_t lo = i >= 2 ? i - 2 : 0, hi = std::min(rows.size() - 1, i + 2);
  double s = 0;
  for (std::size_t k = lo; k <= hi; ++k) s += rows[k].*field;
  return s / static_cast<double>(hi - lo + 1);
}

TabularOutcome tabular_suite(tabular::Scheme scheme, tabular::UpdatePattern pattern, tabular::Selector selector,
                             std::int64_t steps, bool check_ba) {
  TabularOutcome out;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const env::MdpSpec mdp = env::make_random_mdp(6, 4, seed, 0.0, 0.9);
    tabular::ConvergenceOptions o;
    o.scheme = scheme;
    o.pattern = pattern;
    o.selector = selector;
    o.steps = steps;
    o.seed = seed;
    o.omega = 0.8;
    o.epsilon_end = 0.1;
    o.value_iteration_tol = kValueIterationTol;
    const tabular::ConvergenceTrace t = tabular::run_convergence(mdp, o);
    const tabular::TraceRow& last = t.rows.back();
    const double ba = last.delta_ba_inf / t.q_star_inf, star = last.delta_a_inf / t.q_star_inf;
    out.worst_ba = std::max(out.worst_ba, ba);
    out.worst_star = std::max(out.worst_star, star);
    const bool ok = star < kTabularStarRatio && (!check_ba || ba < kTabularBaRatio);
    out.passed += ok;
    for (const auto& r : t.rows) out.ba_always_zero &= r.delta_ba_inf == 0.0;

    const std::size_t tenth = t.rows.size() / 10, end = t.rows.size() - 1;
    using R = tabular::TraceRow;
    const bool star_down = window_mean(t.rows, end, &R::delta_a_inf) < window_mean(t.rows, tenth, &R::delta_a_inf);
    const double ba_end = window_mean(t.rows, end, &R::delta_ba_inf), ba_tenth = window_mean(t.rows, tenth, &R::delta_ba_inf);
    out.star_trend += star_down;
    out.ba_trend += ba_end < ba_tenth || (ba_end == 0.0 && ba_tenth == 0.0);
  }
  return out;
}

std::string tabular_detail(const TabularOutcome& o, bool with_ba) {
  std::string s = std::to_string(o.passed) + "/10 MDPs";
  if (with_ba) s += ", worst |QA-QB|/|Q*| = " + fmt("%.4f", o.worst_ba);
  s += ", worst |QA-Q*|/|Q*| = " + fmt("%.4f", o.worst_star);
  return s;
}

std::string trend_detail(const TabularOutcome& o) {
  return "windowed trend vs the 10%-progress checkpoint: |QA-Q*| fell on " + std::to_string(o.star_trend) +
         "/10 MDPs, |QA-QB| fell on " + std::to_string(o.ba_trend) + "/10";
}

void criteria_tabular() {
  using tabular::Scheme;
  using tabular::Selector;
  using tabular::UpdatePattern;
  const std::string thresholds = "thresholds |QA-QB| < 0.05|Q*|, |QA-Q*| < 0.1|Q*|";

  auto t0 = std::chrono::steady_clock::now();
  const TabularOutcome c1 = tabular_suite(Scheme::kMin, UpdatePattern::kRandom, Selector::kTddr, kTabularSteps, true);
  verdict(1, c1.passed == 10, "min double Q, random pattern, TDDR selector, 5e5 steps, " + thresholds,
          tabular_detail(c1, true) + fmt(", %.1fs", seconds_since(t0)));
  info(1, trend_detail(c1));

  t0 = std::chrono::steady_clock::now();
  const TabularOutcome c2 =
      tabular_suite(Scheme::kMin, UpdatePattern::kSimultaneous, Selector::kTddr, kTabularSteps, true);
  verdict(2, c2.passed == 10 && c2.ba_always_zero,
          "min double Q, simultaneous pattern, equal initial tables, |QA-QB| = 0 at every checkpoint",
          tabular_detail(c2, true) + ", exact zero gap at all checkpoints: " + (c2.ba_always_zero ? "yes" : "no") +
              fmt(", %.1fs", seconds_since(t0)));
  info(2, trend_detail(c2));

  t0 = std::chrono::steady_clock::now();
  const TabularOutcome c3 = tabular_suite(Scheme::kMin, UpdatePattern::kRandom, Selector::kFixed1, kTabularSteps, true);
  verdict(3, c3.passed == 10, "criterion 1 with the fixed i=1 selector", tabular_detail(c3, true) + fmt(", %.1fs", seconds_since(t0)));

  t0 = std::chrono::steady_clock::now();
  const TabularOutcome c4 = tabular_suite(Scheme::kClassic, UpdatePattern::kRandom, Selector::kTddr, kTabularSteps, false);
  verdict(4, c4.passed == 10, "classic double Q reaches |QA-Q*| < 0.1|Q*|", tabular_detail(c4, false) + fmt(", %.1fs", seconds_since(t0)));

  // Same thresholds with ten times the step budget: separates slow convergence
  // from a wrong fixed point.
  const TabularOutcome e1 = tabular_suite(Scheme::kMin, UpdatePattern::kRandom, Selector::kTddr, kTabularExtendedSteps, true);
  info(1, "extended budget 5e6 steps: " + tabular_detail(e1, true));
  const TabularOutcome e3 = tabular_suite(Scheme::kMin, UpdatePattern::kRandom, Selector::kFixed1, kTabularExtendedSteps, true);
  info(3, "extended budget 5e6 steps: " + tabular_detail(e3, true));
  const TabularOutcome e4 = tabular_suite(Scheme::kClassic, UpdatePattern::kRandom, Selector::kTddr, kTabularExtendedSteps, false);
  info(4, "extended budget 5e6 steps: " + tabular_detail(e4, false));
}

// ---- criterion 5 -------------------------------------------------------------

void criterion5() {
  Rng rng(5, Stream::kInit);
  const double nus[] = {0.0, 0.1, 0.5, 1.0};
  long violations = 0, ties = 0;
  for (int k = 0; k < 1000; ++k) {
    reg::TargetSample t;
    for (auto& row : t.next_q)
      for (double& q : row) q = rng.uniform(-10, 10);
    // Some samples share entries so equalities get exercised.
    if (k % 10 == 0) t.next_q[1][1] = t.next_q[0][0];
    t.reward = rng.uniform(-1, 1);
    t.done = k % 7 == 0 ? 1.0 : 0.0;
    t.current_q = {rng.uniform(-10, 10), rng.uniform(-10, 10)};
    const double gamma = rng.uniform(0.0, 0.999);
    const std::span<const reg::TargetSample> b(&t, 1);

    const double lo = reg::psi_min_da(b)[0];
    const double tddr = reg::psi_tddr(b, reg::tddr_deltas(b, gamma))[0];
    violations += !(lo <= tddr);
    double prev = 0.0;
    for (int n = 0; n < 4; ++n) {
      const double d = reg::psi_darc(b, nus[n])[0];
      violations += !(lo <= d);
      if (n > 0) violations += !(d <= prev);
      prev = d;
    }
    violations += reg::psi_darc(b, 1.0)[0] != lo;

    // Explicit tie |delta_1| = |delta_2|, both signs.
    const double delta = rng.uniform(-2, 2);
    for (double sign : {1.0, -1.0}) {
      const reg::TddrDeltas tie{{delta}, {sign * delta}};
      violations += reg::psi_tddr(b, tie)[0] != reg::candidate_value(t, 0);
      ++ties;
    }
  }
  verdict(5, violations == 0, "regularizer ordering on 1000 random samples, exact",
          std::to_string(violations) + " violations, " + std::to_string(ties) + " tie cases");
}

// ---- criterion 6 -------------------------------------------------------------

double max_rel_error(nn::Mlp& net, const std::function<double()>& f, const std::vector<nn::Matrix>& grads) {
  double worst = 0.0;
  auto params = net.parameters();
  for (std::size_t p = 0; p < params.size(); ++p) {
    const nn::Matrix fd = testing::numeric_grad(params[p].value, f);
    for (Eigen::Index k = 0; k < fd.size(); ++k) worst = std::max(worst, testing::rel_err(grads[p].data()[k], fd.data()[k]));
  }
  return worst;
}

std::vector<nn::Matrix> grads_of(const nn::Mlp& net) {
  std::vector<nn::Matrix> g;
  for (const auto& p : net.parameters()) g.push_back(p.grad);
  return g;
}

nn::Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  nn::Matrix m(r, c);
  for (Eigen::Index k = 0; k < m.size(); ++k) m.data()[k] = rng.uniform(-1, 1);
  return m;
}

void criterion6() {
  Rng rng(6, Stream::kInit);
  double worst_nets = 0.0;
  for (int k = 0; k < 20; ++k) {
    std::vector<int> widths{1 + static_cast<int>(rng.index(4))};
    const int hidden_layers = 1 + static_cast<int>(rng.index(2));
    for (int h = 0; h < hidden_layers; ++h) widths.push_back(2 + static_cast<int>(rng.index(6)));
    widths.push_back(1 + static_cast<int>(rng.index(2)));
    const auto act = rng.coin() ? nn::OutputActivation::kTanh : nn::OutputActivation::kIdentity;
    nn::Mlp net = nn::Mlp::random(widths, act, 1.0 + rng.uniform(), rng, 1.0);
    const nn::Matrix x = random_matrix(3, widths.front(), rng), target = random_matrix(3, widths.back(), rng);
    net.zero_grad();
    nn::Tape t;
    t.backward(t.mean(t.square(t.sub(net.forward(t, t.constant(x)), t.constant(target)))));
    const auto g = grads_of(net);
    worst_nets = std::max(worst_nets, max_rel_error(net, [&] { return (net.predict(x) - target).squaredNorm() / target.size(); }, g));
  }

  // Actor objective -mean Q(s, pi(s)) through a frozen critic.
  agents::AgentConfig cfg;
  cfg.observation_dim = 3;
  cfg.action_dim = 1;
  cfg.action_bound = 2.0;
  cfg.hidden = {8, 8};
  cfg.regularizer = reg::RegularizerKind::tddr();
  cfg.final_layer_scale = 1.0;
  Rng init(7);
  agents::Agent agent(cfg, init);
  const nn::Matrix s = random_matrix(5, 3, rng);
  agent.actor_gradient(0, s);
  nn::Mlp& actor = agent.state().actors[0];
  const nn::Mlp& critic = agent.state().critics[0];
  const auto actor_grads = grads_of(actor);
  const double worst_actor = max_rel_error(actor, [&] {
    nn::Matrix in(5, 4);
    in << s, actor.predict(s);
    return -critic.predict(in).mean();
  }, actor_grads);

  // Critic loss mean (y - Q)^2 with fixed targets.
  nn::Mlp q = agent.state().critics[1];
  const nn::Matrix xa = random_matrix(5, 4, rng);
  std::vector<double> y(5);
  for (double& v : y) v = rng.uniform(-2, 2);
  q.zero_grad();
  nn::Tape t;
  t.backward(reg::critic_loss(t, q.forward(t, t.constant(xa)), y));
  const auto critic_grads = grads_of(q);
  const double worst_critic = max_rel_error(q, [&] {
    const nn::Matrix out = q.predict(xa);
    double l = 0;
    for (int k = 0; k < 5; ++k) l += (y[k] - out(k, 0)) * (y[k] - out(k, 0));
    return l / 5;
  }, critic_grads);

  const double worst = std::max({worst_nets, worst_actor, worst_critic});
  verdict(6, worst < kGradRelTol, "autodiff vs central differences, max relative error < 1e-4",
          "random nets " + fmt("%.2e", worst_nets) + ", actor objective " + fmt("%.2e", worst_actor) +
              ", critic loss " + fmt("%.2e", worst_critic));
}

// ---- criterion 7 -------------------------------------------------------------

void criterion7() {
  agents::NoiseConfig noise;
  noise.smoothing_sigma = 0.2;
  noise.clip = 0.5;
  Rng rng(0, Stream::kSmoothing);
  int outside = 0, at_boundary = 0;
  for (int k = 0; k < kNoiseDraws; ++k) {
    const double e = agents::sample_smoothing_noise(noise, rng);
    outside += std::abs(e) > 0.5;
    at_boundary += std::abs(e) == 0.5;
  }
  const double mass = static_cast<double>(at_boundary) / kNoiseDraws;
  const double expected = oracle::smoothing_boundary_mass;
  const double rel = std::abs(mass - expected) / expected;
  const double se = std::sqrt(expected * (1 - expected) / kNoiseDraws);
  verdict(7, outside == 0 && rel < kBoundaryMassRelTol,
          "1e5 clipped draws, |eps| <= 0.5, boundary mass within 2% (relative) of the analytic tail",
          std::to_string(outside) + " draws outside, boundary mass " + fmt("%.5f", mass) + " vs " +
              fmt("%.5f", expected) + " (" + fmt("%.2f", 100 * rel) + "% off)");
  info(7, "binomial standard error of the mass is " + fmt("%.5f", se) + " (" + fmt("%.1f", 100 * se / expected) +
              "% relative); deviation is " + fmt("%.2f", std::abs(mass - expected) / se) + " standard errors");
}

// ---- criterion 8 -------------------------------------------------------------

void criterion8() {
  Rng rng(8, Stream::kInit);
  long mismatches = 0, checked = 0;
  for (double tau : {0.0, 0.005, 0.5, 1.0}) {
    for (int trial = 0; trial < 25; ++trial) {
      nn::Mlp online = nn::Mlp::random({3, 5, 2}, nn::OutputActivation::kIdentity, 1.0, rng, 1.0);
      nn::Mlp target = nn::Mlp::random({3, 5, 2}, nn::OutputActivation::kIdentity, 1.0, rng, 1.0);
      for (auto& p : target.parameters())
        for (Eigen::Index k = 0; k < p.value.size(); ++k) p.value.data()[k] *= std::exp(rng.uniform(-20, 20));
      const nn::Mlp before = target;
      agents::soft_update(target, online, tau);
      for (std::size_t p = 0; p < target.parameters().size(); ++p) {
        const auto& o = online.parameters()[p].value;
        const auto& b = before.parameters()[p].value;
        const auto& a = target.parameters()[p].value;
        for (Eigen::Index k = 0; k < a.size(); ++k) {
          const volatile double expect = tau * o.data()[k] + (1.0 - tau) * b.data()[k];
          mismatches += a.data()[k] != expect;
          ++checked;
        }
      }
    }
  }
  verdict(8, mismatches == 0, "soft update equals tau*theta + (1-tau)*theta' bit for bit, tau in {0, 0.005, 0.5, 1}",
          std::to_string(mismatches) + " mismatches over " + std::to_string(checked) + " scalars");
}

// ---- criterion 9 -------------------------------------------------------------

harness::ExperimentConfig learning_config(reg::Algorithm algo) {
  harness::ExperimentConfig c;
  harness::apply_preset(c, "desk");
  c.algorithm = algo;
  c.total_steps = 30000;
  c.hidden = {64, 64};
  return c;
}

void criterion9() {
  const double baseline = harness::random_policy_return("pendulum", kBaselineEpisodes, kBaselineSeed);
  info(9, "random-policy baseline (100 episodes, seed 0): " + fmt("%.2f", baseline) + "; independent numpy estimate " +
              fmt("%.2f", oracle::pendulum_random_return) + " +/- " + fmt("%.2f", oracle::pendulum_random_return_sem));

  auto t0 = std::chrono::steady_clock::now();
  const harness::ExperimentConfig tddr_cfg = learning_config(reg::Algorithm::kTddr);
  const auto tddr_runs = harness::run_experiment(tddr_cfg);
  int beat = 0;
  std::string finals;
  for (const auto& r : tddr_runs) {
    const double f = r.aborted ? NAN : harness::final_smoothed_return(r, tddr_cfg.smoothing_window);
    beat += !r.aborted && f > baseline;
    finals += (finals.empty() ? "" : ", ") + fmt("%.1f", f);
  }
  info(9, "TDDR wall time " + fmt("%.0fs", seconds_since(t0)));

  t0 = std::chrono::steady_clock::now();
  const harness::ExperimentConfig ddpg_cfg = learning_config(reg::Algorithm::kDdpg);
  const auto ddpg_runs = harness::run_experiment(ddpg_cfg);
  bool ddpg_ok = true;
  std::string ddpg_finals;
  for (const auto& r : ddpg_runs) {
    bool finite = !r.aborted && r.env_steps == ddpg_cfg.total_steps;
    for (const auto& e : r.evaluations) finite &= std::isfinite(e.mean_return);
    ddpg_ok &= finite;
    ddpg_finals += (ddpg_finals.empty() ? "" : ", ") + fmt("%.1f", harness::final_smoothed_return(r, ddpg_cfg.smoothing_window));
  }
  info(9, "DDPG wall time " + fmt("%.0fs", seconds_since(t0)) + ", final smoothed returns " + ddpg_finals);
  verdict(9, beat >= kLearningSeedsRequired && ddpg_ok,
          "TDDR on pendulum, 5 seeds, 3e4 steps, 64x64 nets: window-5 final return beats the random baseline in >= 4 seeds; DDPG completes without NaN",
          std::to_string(beat) + "/5 seeds beat " + fmt("%.1f", baseline) + " (TDDR finals " + finals +
              "), DDPG completed cleanly: " + (ddpg_ok ? "yes" : "no"));
}

// ---- criterion 10 ------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion10() {
  const fs::path root = fs::temp_directory_path() / "tddr_acceptance_determinism";
  fs::remove_all(root);
  int identical = 0, compared = 0;
  for (auto algo : {reg::Algorithm::kTddr, reg::Algorithm::kDdpg, reg::Algorithm::kTd3, reg::Algorithm::kDarc,
                    reg::Algorithm::kMinDa}) {
    harness::ExperimentConfig c;
    c.algorithm = algo;
    c.seeds = {0, 3};
    c.total_steps = 2000;
    c.warmup_steps = 500;
    c.eval_every = 500;
    c.eval_episodes = 2;
    c.hidden = {32, 32};
    c.batch_size = 64;
    for (int run = 0; run < 2; ++run) {
      const auto recs = harness::run_experiment(c);
      harness::emit(harness::aggregate(recs, c.smoothing_window, c.final_evaluations), recs, c,
                    root / std::string(reg::to_string(algo)) / std::to_string(run));
    }
    for (std::uint64_t seed : c.seeds) {
      const std::string name = "seed_" + std::to_string(seed) + ".csv";
      const fs::path base = root / std::string(reg::to_string(algo));
      identical += slurp(base / "0" / name) == slurp(base / "1" / name) && !slurp(base / "0" / name).empty();
      ++compared;
    }
  }
  fs::remove_all(root);
  verdict(10, identical == compared, "rerunning (config, seed) gives byte-identical per-seed CSVs",
          std::to_string(identical) + "/" + std::to_string(compared) + " (algorithm, seed) pairs identical across 5 algorithms");
}

// ---- criterion 11 ------------------------------------------------------------

void criterion11() {
  harness::ExperimentConfig c;
  harness::apply_preset(c, "paper-protocol");
  std::vector<std::string> problems;
  if (c.eval_every != 5000) problems.push_back("eval_every");
  if (c.eval_episodes != 10) problems.push_back("eval_episodes");
  if (c.seeds.size() != 5) problems.push_back("seeds");
  if (c.smoothing_window != 5) problems.push_back("window");
  if (c.final_evaluations != 10) problems.push_back("final_evaluations");
  if (c.total_steps != 1000000) problems.push_back("total_steps");

  // Shortened run under the preset's protocol.
  c.total_steps = 15000;
  c.hidden = {16};
  const auto recs = harness::run_experiment(c);
  for (const auto& r : recs) {
    std::vector<std::int64_t> steps;
    for (const auto& e : r.evaluations) steps.push_back(e.step);
    if (steps != std::vector<std::int64_t>{0, 5000, 10000, 15000}) problems.push_back("eval grid of seed " + std::to_string(r.seed));
  }
  const harness::AggregateReport report = harness::aggregate(recs, c.smoothing_window, c.final_evaluations);
  if (report.seeds.size() != 5 || report.window != 5 || report.final_summary.k != 10) problems.push_back("aggregate shape");

  // Evaluation uses exactly eval_episodes episodes: count resets on a probe.
  int resets = 0;
  struct Probe final : env::Environment {
    int* resets;
    int t = 0;
    explicit Probe(int* r) : resets(r) {}
    std::string_view name() const override { return "probe"; }
    std::size_t observation_dim() const override { return 1; }
    std::size_t action_dim() const override { return 1; }
    double action_bound() const override { return 1.0; }
    int horizon() const override { return 3; }
    std::vector<double> reset(std::uint64_t) override {
      ++*resets;
      t = 0;
      return {0.0};
    }
    env::StepResult step(std::span<const double>) override { return {{0.0}, 1.0, ++t >= 3, false}; }
    std::vector<double> observation() const override { return {0.0}; }
    int elapsed_steps() const override { return t; }
  } probe(&resets);
  Rng eval_rng(0, Stream::kEvaluation);
  harness::evaluate([](std::span<const double>) { return std::vector<double>{0.0}; }, probe, c.eval_episodes, eval_rng);
  if (resets != 10) problems.push_back("episodes per evaluation");

  // Final-10 summary on a synthetic 20-checkpoint record.
  harness::RunRecord ramp;
  for (int k = 0; k < 20; ++k) ramp.evaluations.push_back({k * 5000, static_cast<double>(k)});
  const harness::RunRecord one[] = {ramp};
  if (harness::aggregate(one, 5, 10).final_summary.mean != 14.5) problems.push_back("final-10 mean");

  std::string detail = "eval every 5000 steps, 10 episodes, 5 seeds, window 5, final-10 summary";
  if (!problems.empty()) {
    detail = "mismatch in:";
    for (const auto& p : problems) detail += " " + p;
  }
  verdict(11, problems.empty(), "paper-protocol preset follows the evaluation procedure", detail);
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  criteria_tabular();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion10();
  criterion11();
  criterion9();
  std::printf("%d criteria failed, %.0fs total\n", failures, seconds_since(t0));
  return failures == 0 ? 0 : 1;
}
