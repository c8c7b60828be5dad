#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "core/regularizers.hpp"
#include "core/replay.hpp"
#include "core/rng.hpp"
#include "core/tensor.hpp"

namespace tddr::agents {

struct NoiseConfig {
  double explore_sigma = 0.2;    // absolute, added to behavior actions
  double smoothing_sigma = 0.2;  // target policy smoothing
  double clip = 0.5;             // smoothing noise clipped to [-clip, clip]

  void validate() const;
};

// clip(N(0, smoothing_sigma), -clip, clip); zero without a draw when sigma is 0.
double sample_smoothing_noise(const NoiseConfig& noise, Rng& rng);

enum class ScheduleMode { kCross, kJoint };

// Which (critic, actor) pairs train on a given step. Cross mode alternates
// pair 0, 1, 0, 1, ...; joint mode trains both every step.
class UpdateSchedule {
 public:
  explicit UpdateSchedule(ScheduleMode mode = ScheduleMode::kCross) : mode_(mode) {}
  std::vector<int> advance();
  ScheduleMode mode() const { return mode_; }
  bool parity() const { return parity_; }

 private:
  ScheduleMode mode_;
  bool parity_ = false;
};

enum class EvalPolicy {
  kMaxQ,    // argmax over (critic i, actor j) as for behavior, without noise
  kActor1,  // first actor only
};

struct AgentConfig {
  int observation_dim = 0;
  int action_dim = 0;
  double action_bound = 1.0;
  std::vector<int> hidden = {256, 256};
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  double gamma = 0.99;
  double tau = 0.005;
  int batch_size = 128;
  NoiseConfig noise;
  ScheduleMode schedule = ScheduleMode::kCross;
  // Actor update every k-th step; only single-actor algorithms (TD3) use it.
  int policy_delay = 1;
  reg::RegularizerKind regularizer;
  double final_layer_scale = 1e-2;

  void validate() const;
};

// Online and target networks. Sizes follow the algorithm: DDPG keeps one
// actor and one critic, TD3 one actor and two critics, the double
// actor-critic algorithms two of each. Optimizer states pair with online nets.
struct AgentState {
  std::vector<nn::Mlp> actors;
  std::vector<nn::Mlp> critics;
  std::vector<nn::Mlp> target_actors;
  std::vector<nn::Mlp> target_critics;
  std::vector<nn::AdamState> actor_optimizers;
  std::vector<nn::AdamState> critic_optimizers;
};

struct TrainStats {
  double critic_loss = 0.0;  // mean over critics trained this step
  double actor_loss = 0.0;   // mean over actors trained this step (0 if none)
  int critic_updates = 0;
  int actor_updates = 0;
};

// target <- tau * online + (1 - tau) * target, scalar by scalar.
void soft_update(std::span<nn::Tensor> target, std::span<const nn::Tensor> online, double tau);
void soft_update(nn::Mlp& target, const nn::Mlp& online, double tau);

class Agent {
 public:
  // Online networks from init_rng; targets start as exact copies.
  Agent(AgentConfig config, Rng& init_rng);
  Agent(AgentConfig config, AgentState state);

  const AgentConfig& config() const { return config_; }
  AgentState& state() { return state_; }
  const AgentState& state() const { return state_; }
  int actor_count() const { return static_cast<int>(state_.actors.size()); }
  int critic_count() const { return static_cast<int>(state_.critics.size()); }

  struct Choice {
    std::vector<double> action;  // after noise and clamping
    int critic = 0;              // argmax indices (0-based)
    int actor = 0;
  };

  // Candidates pi_j(s) scored by every critic Q_i(s, pi_j(s)); the
  // maximizing actor's action plus N(0, sigma) noise, clamped. Single-actor
  // algorithms use their actor directly. Ties resolve to the lowest (i, j).
  Choice select_behavior_action(std::span<const double> state, double sigma, Rng& rng) const;
  std::vector<double> act(std::span<const double> state, EvalPolicy policy) const;

  // clamp(pi'_j(s') + clip(N(0, sigma), -c, c)) row by row.
  nn::Matrix target_action(int j, const nn::Matrix& next_states, const NoiseConfig& noise, Rng& rng) const;
  // Target-network evaluations for every transition of the batch.
  std::vector<reg::TargetSample> target_samples(const Batch& batch, Rng& smoothing_rng) const;
  // y for the configured regularizer.
  std::vector<double> td_targets(const Batch& batch, Rng& smoothing_rng) const;

  // One Adam step on critic i against fixed targets y (plus the DARC coupling
  // term when configured). Returns the loss before the step.
  double critic_step(int i, const Batch& batch, std::span<const double> y);
  // One Adam step on actor i along the deterministic policy gradient of
  // critic i. Critic parameters are not modified. Returns -mean Q.
  double actor_step(int i, const Batch& batch);
  // Gradient of the actor objective -mean_k Q_i(s_k, pi_i(s_k)) w.r.t. actor
  // i's parameters, left in the actor's Tensor::grad. Returns the objective.
  double actor_gradient(int i, const nn::Matrix& states);

  void soft_update_pair(int i);
  // One training step: sample, build targets, update critics, actors and
  // targets according to the algorithm and schedule.
  TrainStats train_step(const ReplayBuffer& replay, Rng& replay_rng, Rng& smoothing_rng);

  std::int64_t train_steps() const { return train_steps_; }

 private:
  nn::Matrix critic_input(const nn::Matrix& states, const nn::Matrix& actions) const;

  AgentConfig config_;
  AgentState state_;
  UpdateSchedule schedule_;
  std::int64_t train_steps_ = 0;
};

}  // namespace tddr::agents
