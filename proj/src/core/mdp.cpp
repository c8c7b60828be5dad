#include "core/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/error.hpp"
#include "json.hpp"

namespace tddr::env {

void MdpSpec::validate() const {
  if (n_states < 1 || n_actions < 1) throw ConfigError("MDP: n_states and n_actions must be >= 1");
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("MDP: gamma must lie in [0, 1)");
  if (reward_noise < 0.0 || !std::isfinite(reward_noise)) throw ConfigError("MDP: reward noise must be finite and >= 0");
  if (transition.size() != pairs() * static_cast<std::size_t>(n_states)) {
    throw ConfigError("MDP: transition table has wrong size");
  }
  if (reward.size() != pairs()) throw ConfigError("MDP: reward table has wrong size");
  for (std::size_t row = 0; row < pairs(); ++row) {
    double sum = 0.0;
    for (int k = 0; k < n_states; ++k) {
      const double v = transition[row * n_states + k];
      if (!(v >= 0.0)) throw ConfigError("MDP: negative or NaN transition probability");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw ConfigError("MDP: transition row does not sum to 1");
  }
  for (double r : reward) {
    if (!std::isfinite(r)) throw ConfigError("MDP: non-finite reward");
  }
}

int MdpSpec::sample_next_state(int s, int a, Rng& rng) const {
  const double u = rng.uniform();
  const std::size_t base = (static_cast<std::size_t>(s) * n_actions + a) * n_states;
  double acc = 0.0;
  int last_positive = 0;
  for (int k = 0; k < n_states; ++k) {
    const double pk = transition[base + k];
    if (pk <= 0.0) continue;
    last_positive = k;
    acc += pk;
    if (u < acc) return k;
  }
  return last_positive;
}

double MdpSpec::sample_reward(int s, int a, Rng& rng) const {
  const double mean = r(s, a);
  if (reward_noise == 0.0) return mean;
  return mean + rng.uniform(-0.5 * reward_noise, 0.5 * reward_noise);
}

MdpSpec make_random_mdp(int n_states, int n_actions, std::uint64_t seed, double sparsity, double gamma) {
  if (n_states < 1 || n_actions < 1) throw ConfigError("make_random_mdp: sizes must be >= 1");
  if (!(sparsity >= 0.0 && sparsity < 1.0)) throw ConfigError("make_random_mdp: sparsity must lie in [0, 1)");
  Rng rng(seed);
  MdpSpec mdp;
  mdp.n_states = n_states;
  mdp.n_actions = n_actions;
  mdp.gamma = gamma;
  mdp.transition.assign(mdp.pairs() * n_states, 0.0);
  mdp.reward.assign(mdp.pairs(), 0.0);

  for (std::size_t row = 0; row < mdp.pairs(); ++row) {
    double* p = &mdp.transition[row * n_states];
    double sum = 0.0;
    for (int k = 0; k < n_states; ++k) {
      const bool keep = rng.uniform() >= sparsity;
      const double w = rng.uniform();
      p[k] = keep ? w : 0.0;
      sum += p[k];
    }
    if (sum <= 0.0) {
      const std::size_t k = rng.index(static_cast<std::size_t>(n_states));
      p[k] = 1.0;
      sum = 1.0;
    }
    for (int k = 0; k < n_states; ++k) p[k] /= sum;
  }
  for (double& r : mdp.reward) r = rng.uniform(-1.0, 1.0);
  mdp.validate();
  return mdp;
}

namespace {

std::vector<double> bellman_apply(const MdpSpec& mdp, const std::vector<double>& q) {
  std::vector<double> v(static_cast<std::size_t>(mdp.n_states));
  for (int s = 0; s < mdp.n_states; ++s) {
    const auto first = q.begin() + static_cast<std::ptrdiff_t>(s) * mdp.n_actions;
    v[s] = *std::max_element(first, first + mdp.n_actions);
  }
  std::vector<double> out(mdp.pairs());
  for (int s = 0; s < mdp.n_states; ++s) {
    for (int a = 0; a < mdp.n_actions; ++a) {
      double expect = 0.0;
      for (int k = 0; k < mdp.n_states; ++k) expect += mdp.p(s, a, k) * v[k];
      out[static_cast<std::size_t>(s) * mdp.n_actions + a] = mdp.r(s, a) + mdp.gamma * expect;
    }
  }
  return out;
}

}  // namespace

ValueIterationResult value_iteration(const MdpSpec& mdp, double tol) {
  if (!(mdp.gamma < 1.0)) throw ConfigError("value_iteration: gamma must be < 1");
  if (!(tol > 0.0)) throw ConfigError("value_iteration: tolerance must be positive");
  mdp.validate();
  ValueIterationResult result;
  result.q.assign(mdp.pairs(), 0.0);
  for (;;) {
    std::vector<double> next = bellman_apply(mdp, result.q);
    double delta = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) delta = std::max(delta, std::abs(next[k] - result.q[k]));
    result.q = std::move(next);
    result.sup_deltas.push_back(delta);
    ++result.iterations;
    if (delta < tol) break;
  }
  return result;
}

double bellman_residual(const MdpSpec& mdp, const std::vector<double>& q) {
  const std::vector<double> tq = bellman_apply(mdp, q);
  double res = 0.0;
  for (std::size_t k = 0; k < q.size(); ++k) res = std::max(res, std::abs(tq[k] - q[k]));
  return res;
}

std::string mdp_to_json(const MdpSpec& mdp) {
  nlohmann::json j;
  j["states"] = mdp.n_states;
  j["actions"] = mdp.n_actions;
  j["gamma"] = mdp.gamma;
  j["reward_noise"] = mdp.reward_noise;
  j["P"] = mdp.transition;
  j["R"] = mdp.reward;
  return j.dump(1);
}

MdpSpec mdp_from_json(const std::string& text) {
  MdpSpec mdp;
  try {
    const nlohmann::json j = nlohmann::json::parse(text);
    mdp.n_states = j.at("states").get<int>();
    mdp.n_actions = j.at("actions").get<int>();
    mdp.gamma = j.at("gamma").get<double>();
    mdp.reward_noise = j.value("reward_noise", 0.0);
    mdp.transition = j.at("P").get<std::vector<double>>();
    mdp.reward = j.at("R").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("MDP file: ") + e.what());
  }
  mdp.validate();
  return mdp;
}

void save_mdp(const MdpSpec& mdp, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << mdp_to_json(mdp) << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

MdpSpec load_mdp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return mdp_from_json(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace tddr::env
