#pragma once

// Tabular double Q-learning: the classic cross-target scheme and the
// shared-target min scheme, with random or simultaneous table updates, plus a
// driver that records how far the tables are from each other and from Q*.

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "core/mdp.hpp"
#include "core/rng.hpp"

namespace tddr::tabular {

struct TabularQPair {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> qa;
  std::vector<double> qb;
  std::vector<std::int64_t> visits;
  Rng rng;  // chooses the table under the random pattern

  TabularQPair() = default;
  TabularQPair(int states, int actions, std::uint64_t seed, double init_a = 0.0, double init_b = 0.0);

  std::size_t index(int s, int a) const { return static_cast<std::size_t>(s) * n_actions + a; }
  double a_value(int s, int a) const { return qa[index(s, a)]; }
  double b_value(int s, int a) const { return qb[index(s, a)]; }
};

struct Experience {
  int s = 0;
  int a = 0;
  double r = 0.0;
  int s_next = 0;
};

enum class UpdatePattern { kRandom, kSimultaneous };
enum class Selector { kTddr, kFixed1, kFixed2 };
enum class Scheme { kMin, kClassic };

std::string_view to_string(UpdatePattern p);
std::string_view to_string(Selector s);
std::string_view to_string(Scheme s);
UpdatePattern parse_pattern(std::string_view name);
Selector parse_selector(std::string_view name);
Scheme parse_scheme(std::string_view name);

struct StepLog {
  double error_a = 0.0;  // E^A = target for A minus Q^A(s, a) before the update
  double error_b = 0.0;
  double target_a = 0.0;  // target applied (or that would apply) to Q^A
  double target_b = 0.0;
  bool updated_a = false;
  bool updated_b = false;
  int selected = 1;  // greedy action source used by the min scheme (1 or 2)
};

// argmax with ties to the lowest action index.
int greedy_action(const std::vector<double>& table, int n_actions, int s);

// Exactly one table (fair coin) moves toward its cross target:
// A toward r + gamma Q^B(s', argmax Q^A(s', .)), B toward r + gamma Q^A(s', argmax Q^B(s', .)).
StepLog classic_double_q_step(TabularQPair& pair, const env::MdpSpec& mdp, const Experience& e, double alpha);

// delta_i = r + gamma min{Q^B(s', a*_i), Q^A(s', a*_i)} - min{Q^B(s, a), Q^A(s, a)}
// with a*_1 = argmax Q^A(s', .), a*_2 = argmax Q^B(s', .). Returns 1 iff |delta_1| <= |delta_2|.
int tddr_tabular_selector(const TabularQPair& pair, const env::MdpSpec& mdp, const Experience& e);

// Shared target T = r + gamma min{Q^B(s', a*_i), Q^A(s', a*_i)} with i from the
// selector; random pattern updates one table, simultaneous updates both with T.
StepLog min_double_q_step(TabularQPair& pair, const env::MdpSpec& mdp, const Experience& e, double alpha,
                          UpdatePattern pattern, Selector selector);

// alpha = n^{-omega}; requires n >= 1 and omega in (0.5, 1].
double learning_rate(std::int64_t n, double omega);

struct ConvergenceOptions {
  Scheme scheme = Scheme::kMin;
  UpdatePattern pattern = UpdatePattern::kRandom;
  Selector selector = Selector::kTddr;
  std::int64_t steps = 500000;
  std::uint64_t seed = 0;
  std::int64_t checkpoint_every = 1000;
  double omega = 0.8;
  double epsilon_start = 1.0;
  double epsilon_end = 0.1;
  // Fraction of the run over which epsilon decays linearly to epsilon_end.
  double epsilon_decay_fraction = 0.5;
  double init_a = 0.0;
  double init_b = 0.0;
  double value_iteration_tol = 1e-10;

  void validate() const;
};

struct TraceRow {
  std::int64_t step = 0;
  double delta_ba_inf = 0.0;  // ||Q^A - Q^B||_inf
  double delta_a_inf = 0.0;   // ||Q^A - Q*||_inf
  double mean_abs_ea = 0.0;   // since the previous checkpoint
  double mean_abs_eb = 0.0;
  double epsilon = 0.0;
  double alpha_mean = 0.0;
  double max_abs_q = 0.0;     // max over both tables
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;
  std::vector<double> q_star;
  TabularQPair final_pair;
  double q_star_inf = 0.0;
};

// Follows one trajectory through the MDP with epsilon-greedy behavior on
// min(Q^A, Q^B); checkpoints at step 0, every checkpoint_every steps and the
// final step.
ConvergenceTrace run_convergence(const env::MdpSpec& mdp, const ConvergenceOptions& options);

// step,deltaBA_inf,deltaA_inf,meanAbsEA,meanAbsEB,epsilon,alphaMean
void write_trace_csv(const ConvergenceTrace& trace, const std::filesystem::path& path);

}  // namespace tddr::tabular
