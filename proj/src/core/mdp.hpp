#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "core/rng.hpp"

namespace tddr::env {

// Finite MDP with tabular dynamics. transition is flattened [s][a][s'],
// reward holds the mean R(s, a) flattened [s][a]. Sampled rewards add
// uniform noise of total width reward_noise around the mean.
struct MdpSpec {
  int n_states = 0;
  int n_actions = 0;
  std::vector<double> transition;
  std::vector<double> reward;
  double reward_noise = 0.0;
  double gamma = 0.9;

  double p(int s, int a, int s_next) const {
    return transition[(static_cast<std::size_t>(s) * n_actions + a) * n_states + s_next];
  }
  double r(int s, int a) const { return reward[static_cast<std::size_t>(s) * n_actions + a]; }
  std::size_t pairs() const { return static_cast<std::size_t>(n_states) * n_actions; }

  // Throws ConfigError on inconsistent sizes, non-stochastic rows or gamma outside [0, 1).
  void validate() const;

  int sample_next_state(int s, int a, Rng& rng) const;
  double sample_reward(int s, int a, Rng& rng) const;
};

// Random dense-ish MDP: each row of P keeps each successor with probability
// 1 - sparsity (at least one survives) with uniform weights, then normalizes.
// Mean rewards uniform in [-1, 1].
MdpSpec make_random_mdp(int n_states, int n_actions, std::uint64_t seed, double sparsity = 0.0,
                        double gamma = 0.9);

struct ValueIterationResult {
  std::vector<double> q;          // flattened [s][a]
  std::vector<double> sup_deltas; // ||Q_{k+1} - Q_k||_inf per sweep
  int iterations = 0;
};

// Iterates the Bellman optimality operator from Q = 0 until the sup-norm
// change of a sweep falls below tol. Throws ConfigError if gamma >= 1.
ValueIterationResult value_iteration(const MdpSpec& mdp, double tol);

// max over (s,a) of |Q(s,a) - (R(s,a) + gamma * sum_s' P max_a' Q(s',a'))|
double bellman_residual(const MdpSpec& mdp, const std::vector<double>& q);

std::string mdp_to_json(const MdpSpec& mdp);
MdpSpec mdp_from_json(const std::string& text);
void save_mdp(const MdpSpec& mdp, const std::filesystem::path& path);
MdpSpec load_mdp(const std::filesystem::path& path);

}  // namespace tddr::env
