#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "core/agent.hpp"
#include "core/regularizers.hpp"

namespace tddr::harness {

// Everything that determines an experiment. Loaded from a flat key=value file
// (optional [section] headers prefix keys as "section.key"); the CLI layers
// its flags on top via set_option.
struct ExperimentConfig {
  std::string preset = "desk";
  std::string task = "pendulum";
  reg::Algorithm algorithm = reg::Algorithm::kTddr;
  double darc_nu = 0.1;
  double darc_lambda = 0.005;
  reg::DeltaMode delta_mode = reg::DeltaMode::kPerSample;
  reg::SoftmaxProvenance provenance;

  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
  std::int64_t total_steps = 30000;
  std::int64_t eval_every = 1000;
  int eval_episodes = 10;
  int batch_size = 128;
  std::int64_t warmup_steps = 1000;
  std::size_t replay_capacity = 100000;

  std::vector<int> hidden = {256, 256};
  double actor_lr = 3e-4;
  double critic_lr = 3e-4;
  double gamma = 0.99;
  double tau = 0.005;
  double explore_noise = 0.1;  // fraction of the action bound
  double target_noise = 0.2;
  double target_noise_clip = 0.5;
  agents::ScheduleMode schedule = agents::ScheduleMode::kCross;
  int policy_delay = 2;  // TD3 only
  agents::EvalPolicy eval_policy = agents::EvalPolicy::kMaxQ;

  int smoothing_window = 5;
  int final_evaluations = 10;

  int jobs = 1;
  bool save_checkpoints = false;
  std::filesystem::path output_dir = "runs";

  reg::RegularizerKind regularizer() const;
  agents::AgentConfig agent_config(int observation_dim, int action_dim, double action_bound) const;
  // Throws ConfigError with the offending field.
  void validate() const;
};

// "desk" (default) or "paper-protocol" (eval every 5000 steps, 10 episodes,
// seeds 0-4, window 5, last-10 summary, 10^6 steps, batch 128).
void apply_preset(ExperimentConfig& cfg, std::string_view name);

// Unknown keys and unparsable values throw ConfigError naming the key.
void set_option(ExperimentConfig& cfg, std::string_view key, std::string_view value);

// Parses key=value text with optional [section] headers.
std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text);

// Defaults, then the file's preset (if any), then the remaining keys in order.
ExperimentConfig config_from_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Canonical key/value listing, sorted by key. Excludes keys that cannot
// change results (out, jobs, save_checkpoints).
std::map<std::string, std::string> canonical_options(const ExperimentConfig& cfg);
std::uint64_t config_hash(const ExperimentConfig& cfg);
std::string hash_hex(std::uint64_t h);

}  // namespace tddr::harness
