#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "core/agent.hpp"
#include "core/config.hpp"
#include "core/env.hpp"
#include "core/rng.hpp"

namespace tddr::harness {

struct EvalPoint {
  std::int64_t step = 0;
  double mean_return = 0.0;
};

struct RunRecord {
  std::uint64_t seed = 0;
  std::vector<EvalPoint> evaluations;
  // Undiscounted returns of completed training episodes, in order.
  std::vector<double> training_returns;
  std::int64_t env_steps = 0;
  std::int64_t gradient_steps = 0;
  // FNV-1a over the bits of every online parameter at the end of the run.
  std::uint64_t parameter_fingerprint = 0;
  std::uint64_t config_hash = 0;
  double wall_seconds = 0.0;
  bool aborted = false;
  std::string diagnostic;
};

using Policy = std::function<std::vector<double>(std::span<const double>)>;

// Mean undiscounted return of `episodes` full episodes. Each reset seed comes
// from eval_rng, which nothing else touches.
double evaluate(const Policy& policy, env::Environment& environment, int episodes, Rng& eval_rng);
double evaluate(const agents::Agent& agent, agents::EvalPolicy mode, env::Environment& environment, int episodes,
                Rng& eval_rng);

// Uniform random actions in the action box.
double random_policy_return(std::string_view task, int episodes, std::uint64_t seed);

std::uint64_t parameter_fingerprint(const agents::AgentState& state);

// One seed end to end. With a checkpoint directory the final agent state is
// written to seed_<seed>.ckpt there.
RunRecord run_single(const ExperimentConfig& cfg, std::uint64_t seed,
                     const std::filesystem::path& checkpoint_dir = {});

// One record per seed in cfg.seeds order; up to cfg.jobs seeds run at once.
std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg);

}  // namespace tddr::harness
