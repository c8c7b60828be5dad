#include "core/agent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "core/error.hpp"

namespace tddr::agents {

void NoiseConfig::validate() const {
  if (!(explore_sigma >= 0.0)) throw ConfigError("exploration sigma must be >= 0");
  if (!(smoothing_sigma >= 0.0)) throw ConfigError("smoothing sigma must be >= 0");
  if (!(clip > 0.0)) throw ConfigError("smoothing clip must be > 0");
}

double sample_smoothing_noise(const NoiseConfig& noise, Rng& rng) {
  if (noise.smoothing_sigma == 0.0) return 0.0;
  return std::clamp(noise.smoothing_sigma * rng.normal(), -noise.clip, noise.clip);
}

std::vector<int> UpdateSchedule::advance() {
  if (mode_ == ScheduleMode::kJoint) return {0, 1};
  const int pair = parity_ ? 1 : 0;
  parity_ = !parity_;
  return {pair};
}

void AgentConfig::validate() const {
  if (observation_dim <= 0 || action_dim <= 0) throw ConfigError("agent: observation and action dims must be positive");
  if (!(action_bound > 0.0)) throw ConfigError("agent: action bound must be positive");
  for (int h : hidden) {
    if (h <= 0) throw ConfigError("agent: hidden widths must be positive");
  }
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("agent: gamma must lie in [0, 1)");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("agent: tau must lie in [0, 1]");
  if (!(actor_lr > 0.0) || !(critic_lr > 0.0)) throw ConfigError("agent: learning rates must be positive");
  if (policy_delay < 1) throw ConfigError("agent: policy delay must be >= 1");
  if (batch_size < 1) throw ConfigError("agent: batch size must be >= 1");
  noise.validate();
  regularizer.validate();
}

void soft_update(std::span<nn::Tensor> target, std::span<const nn::Tensor> online, double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw UsageError("soft_update: tau must lie in [0, 1]");
  if (target.size() != online.size()) throw UsageError("soft_update: parameter lists differ in length");
  for (std::size_t k = 0; k < target.size(); ++k) {
    nn::Matrix& t = target[k].value;
    const nn::Matrix& o = online[k].value;
    if (t.rows() != o.rows() || t.cols() != o.cols()) throw UsageError("soft_update: shape mismatch");
    t = tau * o + (1.0 - tau) * t;
  }
}

void soft_update(nn::Mlp& target, const nn::Mlp& online, double tau) {
  soft_update(target.parameters(), online.parameters(), tau);
}

namespace {

std::vector<int> layer_widths(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> w;
  w.push_back(in);
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(out);
  return w;
}

nn::Matrix row_matrix(std::span<const double> v) {
  nn::Matrix m(1, static_cast<Eigen::Index>(v.size()));
  for (std::size_t k = 0; k < v.size(); ++k) m(0, static_cast<Eigen::Index>(k)) = v[k];
  return m;
}

}  // namespace

Agent::Agent(AgentConfig config, Rng& init_rng) : config_(std::move(config)), schedule_(config_.schedule) {
  config_.validate();
  const int n_actors = config_.regularizer.actor_count();
  const int n_critics = config_.regularizer.critic_count();
  const auto actor_widths = layer_widths(config_.observation_dim, config_.hidden, config_.action_dim);
  const auto critic_widths = layer_widths(config_.observation_dim + config_.action_dim, config_.hidden, 1);
  for (int k = 0; k < std::max(n_actors, n_critics); ++k) {
    if (k < n_actors) {
      state_.actors.push_back(nn::Mlp::random(actor_widths, nn::OutputActivation::kTanh, config_.action_bound,
                                              init_rng, config_.final_layer_scale));
    }
    if (k < n_critics) {
      state_.critics.push_back(nn::Mlp::random(critic_widths, nn::OutputActivation::kIdentity, 1.0, init_rng));
    }
  }
  state_.target_actors = state_.actors;
  state_.target_critics = state_.critics;
  for (const auto& a : state_.actors) {
    state_.actor_optimizers.push_back(nn::make_adam_state(a.parameters(), {.learning_rate = config_.actor_lr}));
  }
  for (const auto& c : state_.critics) {
    state_.critic_optimizers.push_back(nn::make_adam_state(c.parameters(), {.learning_rate = config_.critic_lr}));
  }
}

Agent::Agent(AgentConfig config, AgentState state)
    : config_(std::move(config)), state_(std::move(state)), schedule_(config_.schedule) {
  config_.validate();
  const auto n_actors = static_cast<std::size_t>(config_.regularizer.actor_count());
  const auto n_critics = static_cast<std::size_t>(config_.regularizer.critic_count());
  if (state_.actors.size() != n_actors || state_.target_actors.size() != n_actors ||
      state_.critics.size() != n_critics || state_.target_critics.size() != n_critics ||
      state_.actor_optimizers.size() != n_actors || state_.critic_optimizers.size() != n_critics) {
    throw ConfigError("agent state does not match the regularizer's network counts");
  }
}

nn::Matrix Agent::critic_input(const nn::Matrix& states, const nn::Matrix& actions) const {
  nn::Matrix x(states.rows(), states.cols() + actions.cols());
  x << states, actions;
  return x;
}

Agent::Choice Agent::select_behavior_action(std::span<const double> state, double sigma, Rng& rng) const {
  if (static_cast<int>(state.size()) != config_.observation_dim) {
    throw UsageError("select_behavior_action: state has wrong dimension");
  }
  const nn::Matrix s = row_matrix(state);
  Choice choice;
  nn::Matrix best_action;
  if (actor_count() == 1) {
    best_action = state_.actors[0].predict(s);
  } else {
    double best = -std::numeric_limits<double>::infinity();
    std::vector<nn::Matrix> candidates;
    for (const auto& actor : state_.actors) candidates.push_back(actor.predict(s));
    for (int i = 0; i < critic_count(); ++i) {
      for (int j = 0; j < actor_count(); ++j) {
        const double q = state_.critics[i].predict(critic_input(s, candidates[j]))(0, 0);
        if (q > best || best_action.size() == 0) {
          best = q;
          choice.critic = i;
          choice.actor = j;
          best_action = candidates[j];
        }
      }
    }
  }
  choice.action.resize(static_cast<std::size_t>(config_.action_dim));
  for (int k = 0; k < config_.action_dim; ++k) {
    double a = best_action(0, k);
    if (sigma > 0.0) a += sigma * rng.normal();
    choice.action[k] = std::clamp(a, -config_.action_bound, config_.action_bound);
  }
  return choice;
}

std::vector<double> Agent::act(std::span<const double> state, EvalPolicy policy) const {
  if (policy == EvalPolicy::kActor1 || actor_count() == 1) {
    const nn::Matrix a = state_.actors[0].predict(row_matrix(state));
    return {a.data(), a.data() + a.size()};
  }
  Rng unused(0);
  return select_behavior_action(state, 0.0, unused).action;
}

nn::Matrix Agent::target_action(int j, const nn::Matrix& next_states, const NoiseConfig& noise, Rng& rng) const {
  if (j < 0 || j >= actor_count()) throw UsageError("target_action: actor index out of range");
  nn::Matrix a = state_.target_actors[j].predict(next_states);
  const double bound = config_.action_bound;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    a.data()[k] = std::clamp(a.data()[k] + sample_smoothing_noise(noise, rng), -bound, bound);
  }
  return a;
}

std::vector<reg::TargetSample> Agent::target_samples(const Batch& batch, Rng& smoothing_rng) const {
  const std::size_t n = batch.size();
  std::vector<reg::TargetSample> out(n);
  const nn::Matrix current_in = critic_input(batch.states, batch.actions);
  for (int j = 0; j < actor_count(); ++j) {
    const nn::Matrix a_next = target_action(j, batch.next_states, config_.noise, smoothing_rng);
    const nn::Matrix next_in = critic_input(batch.next_states, a_next);
    for (int i = 0; i < critic_count(); ++i) {
      const nn::Matrix q = state_.target_critics[i].predict(next_in);
      for (std::size_t k = 0; k < n; ++k) out[k].next_q[i][j] = q(static_cast<Eigen::Index>(k), 0);
    }
  }
  for (int i = 0; i < critic_count(); ++i) {
    const nn::Matrix q = state_.target_critics[i].predict(current_in);
    for (std::size_t k = 0; k < n; ++k) out[k].current_q[i] = q(static_cast<Eigen::Index>(k), 0);
  }
  for (std::size_t k = 0; k < n; ++k) {
    reg::TargetSample& t = out[k];
    t.reward = batch.rewards[k];
    t.done = batch.dones[k];
    // Reduced architectures duplicate the missing network's values.
    if (critic_count() == 1) {
      t.next_q[1] = t.next_q[0];
      t.current_q[1] = t.current_q[0];
    }
    if (actor_count() == 1) {
      t.next_q[0][1] = t.next_q[0][0];
      t.next_q[1][1] = t.next_q[1][0];
    }
  }
  return out;
}

std::vector<double> Agent::td_targets(const Batch& batch, Rng& smoothing_rng) const {
  const auto samples = target_samples(batch, smoothing_rng);
  const auto psi = reg::compute_psi(samples, config_.regularizer, config_.gamma);
  return reg::td_target(batch.rewards, psi, config_.gamma, batch.dones);
}

double Agent::critic_step(int i, const Batch& batch, std::span<const double> y) {
  if (i < 0 || i >= critic_count()) throw UsageError("critic_step: critic index out of range");
  nn::Tape tape;
  const nn::Var input = tape.constant(critic_input(batch.states, batch.actions));
  nn::Mlp& critic = state_.critics[i];
  const nn::Var q = critic.forward(tape, input);
  nn::Var loss = reg::critic_loss(tape, q, y);
  if (config_.regularizer.darc && config_.regularizer.darc->lambda > 0.0 && critic_count() == 2) {
    const nn::Var other = state_.critics[1 - i].forward(tape, input, false);
    loss = tape.add(loss, reg::darc_coupling_penalty(tape, q, other, config_.regularizer.darc->lambda));
  }
  const double value = tape.value(loss)(0, 0);
  if (!std::isfinite(value)) throw NumericError("critic " + std::to_string(i + 1) + " loss is not finite");
  critic.zero_grad();
  tape.backward(loss);
  nn::adam_step(critic.parameters(), state_.critic_optimizers[i]);
  return value;
}

double Agent::actor_gradient(int i, const nn::Matrix& states) {
  if (i < 0 || i >= actor_count()) throw UsageError("actor_gradient: actor index out of range");
  nn::Tape tape;
  const nn::Var s = tape.constant(states);
  nn::Mlp& actor = state_.actors[i];
  const nn::Var a = actor.forward(tape, s);
  const nn::Var q = state_.critics[i].forward(tape, tape.concat_cols(s, a), false);
  const nn::Var objective = tape.scale(tape.mean(q), -1.0);
  actor.zero_grad();
  tape.backward(objective);
  return tape.value(objective)(0, 0);
}

double Agent::actor_step(int i, const Batch& batch) {
  const double value = actor_gradient(i, batch.states);
  if (!std::isfinite(value)) throw NumericError("actor " + std::to_string(i + 1) + " objective is not finite");
  nn::adam_step(state_.actors[i].parameters(), state_.actor_optimizers[i]);
  return value;
}

void Agent::soft_update_pair(int i) {
  if (i < critic_count()) soft_update(state_.target_critics[i], state_.critics[i], config_.tau);
  if (i < actor_count()) soft_update(state_.target_actors[i], state_.actors[i], config_.tau);
}

TrainStats Agent::train_step(const ReplayBuffer& replay, Rng& replay_rng, Rng& smoothing_rng) {
  ++train_steps_;
  TrainStats stats;
  const auto n = static_cast<std::size_t>(config_.batch_size);
  auto record_critic = [&](double loss) {
    stats.critic_loss += loss;
    ++stats.critic_updates;
  };
  auto record_actor = [&](double loss) {
    stats.actor_loss += loss;
    ++stats.actor_updates;
  };

  if (actor_count() == 1) {
    const Batch batch = replay.sample_batch(n, replay_rng);
    const auto y = td_targets(batch, smoothing_rng);
    for (int i = 0; i < critic_count(); ++i) record_critic(critic_step(i, batch, y));
    if (train_steps_ % config_.policy_delay == 0) {
      record_actor(actor_step(0, batch));
      for (int i = 0; i < critic_count(); ++i) soft_update_pair(i);
    }
  } else {
    for (int i : schedule_.advance()) {
      const Batch batch = replay.sample_batch(n, replay_rng);
      const auto y = td_targets(batch, smoothing_rng);
      record_critic(critic_step(i, batch, y));
      record_actor(actor_step(i, batch));
      soft_update_pair(i);
    }
  }
  if (stats.critic_updates > 0) stats.critic_loss /= stats.critic_updates;
  if (stats.actor_updates > 0) stats.actor_loss /= stats.actor_updates;
  return stats;
}

}  // namespace tddr::agents
