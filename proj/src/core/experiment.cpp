#include "core/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <exception>
#include <thread>

#include "core/checkpoint.hpp"
#include "core/error.hpp"
#include "core/replay.hpp"

namespace tddr::harness {

double evaluate(const Policy& policy, env::Environment& environment, int episodes, Rng& eval_rng) {
  if (episodes < 1) throw UsageError("evaluate: episodes must be >= 1");
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    std::vector<double> state = environment.reset(eval_rng.next_u64());
    for (;;) {
      const env::StepResult r = environment.step(policy(state));
      total += r.reward;
      if (r.done) break;
      state = r.next_state;
    }
  }
  return total / static_cast<double>(episodes);
}

double evaluate(const agents::Agent& agent, agents::EvalPolicy mode, env::Environment& environment, int episodes,
                Rng& eval_rng) {
  return evaluate([&](std::span<const double> s) { return agent.act(s, mode); }, environment, episodes, eval_rng);
}

double random_policy_return(std::string_view task, int episodes, std::uint64_t seed) {
  auto environment = env::make_environment(task);
  Rng action_rng(seed, Stream::kExploration);
  Rng eval_rng(seed, Stream::kEvaluation);
  const double bound = environment->action_bound();
  std::vector<double> action(environment->action_dim());
  return evaluate(
      [&](std::span<const double>) {
        for (double& a : action) a = action_rng.uniform(-bound, bound);
        return action;
      },
      *environment, episodes, eval_rng);
}

std::uint64_t parameter_fingerprint(const agents::AgentState& state) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&](const std::vector<nn::Mlp>& nets) {
    for (const nn::Mlp& net : nets) {
      for (const nn::Tensor& t : net.parameters()) {
        for (Eigen::Index k = 0; k < t.value.size(); ++k) {
          std::uint64_t bits = 0;
          std::memcpy(&bits, t.value.data() + k, sizeof bits);
          for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xffU;
            h *= 0x100000001b3ULL;
          }
        }
      }
    }
  };
  mix(state.actors);
  mix(state.critics);
  return h;
}

RunRecord run_single(const ExperimentConfig& cfg, std::uint64_t seed, const std::filesystem::path& checkpoint_dir) {
  cfg.validate();
  const auto started = std::chrono::steady_clock::now();
  RunRecord record;
  record.seed = seed;
  record.config_hash = config_hash(cfg);

  auto environment = env::make_environment(cfg.task);
  auto eval_environment = env::make_environment(cfg.task);
  const int obs_dim = static_cast<int>(environment->observation_dim());
  const int act_dim = static_cast<int>(environment->action_dim());
  const double bound = environment->action_bound();

  Rng init_rng(seed, Stream::kInit);
  Rng env_rng(seed, Stream::kEnv);
  Rng explore_rng(seed, Stream::kExploration);
  Rng smoothing_rng(seed, Stream::kSmoothing);
  Rng replay_rng(seed, Stream::kReplay);
  Rng eval_rng(seed, Stream::kEvaluation);

  agents::Agent agent(cfg.agent_config(obs_dim, act_dim, bound), init_rng);
  ReplayBuffer replay(cfg.replay_capacity, static_cast<std::size_t>(obs_dim), static_cast<std::size_t>(act_dim));
  const double sigma = agent.config().noise.explore_sigma;

  auto run_eval = [&](std::int64_t step) {
    const double value = evaluate(agent, cfg.eval_policy, *eval_environment, cfg.eval_episodes, eval_rng);
    record.evaluations.push_back({step, value});
  };

  run_eval(0);
  std::vector<double> state = environment->reset(env_rng.next_u64());
  std::vector<double> action(static_cast<std::size_t>(act_dim));
  double episode_return = 0.0;
  for (std::int64_t t = 1; t <= cfg.total_steps; ++t) {
    if (t <= cfg.warmup_steps) {
      for (double& a : action) a = explore_rng.uniform(-bound, bound);
    } else {
      action = agent.select_behavior_action(state, sigma, explore_rng).action;
    }
    env::StepResult r = environment->step(action);
    episode_return += r.reward;
    replay.push({state, action, r.reward, r.next_state, r.terminal});
    ++record.env_steps;
    if (r.done) {
      record.training_returns.push_back(episode_return);
      episode_return = 0.0;
      state = environment->reset(env_rng.next_u64());
    } else {
      state = std::move(r.next_state);
    }

    if (t > cfg.warmup_steps) {
      try {
        agent.train_step(replay, replay_rng, smoothing_rng);
        ++record.gradient_steps;
      } catch (const NumericError& e) {
        record.aborted = true;
        record.diagnostic = "step " + std::to_string(t) + ": " + e.what();
        break;
      }
    }
    if (t % cfg.eval_every == 0) {
      run_eval(t);
      if (!std::isfinite(record.evaluations.back().mean_return)) {
        record.aborted = true;
        record.diagnostic = "step " + std::to_string(t) + ": non-finite evaluation return";
        break;
      }
    }
  }

  record.parameter_fingerprint = parameter_fingerprint(agent.state());
  if (!checkpoint_dir.empty()) {
    std::filesystem::create_directories(checkpoint_dir);
    agents::save_checkpoint(agent.state(), checkpoint_dir / ("seed_" + std::to_string(seed) + ".ckpt"));
  }
  record.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return record;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const std::filesystem::path ckpt = cfg.save_checkpoints ? cfg.output_dir : std::filesystem::path{};
  std::vector<RunRecord> records(cfg.seeds.size());
  std::vector<std::exception_ptr> errors(cfg.seeds.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < cfg.seeds.size(); k = next++) {
      try {
        records[k] = run_single(cfg, cfg.seeds[k], ckpt);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(cfg.jobs), cfg.seeds.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (std::thread& th : pool) th.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return records;
}

}  // namespace tddr::harness
