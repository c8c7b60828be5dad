#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "core/agent.hpp"

namespace tddr::agents {

struct NamedTensor {
  std::string name;
  nn::Matrix value;
};

// Every parameter and optimizer tensor of the agent, in a fixed order:
// actor1.W0, actor1.b0, ..., critic1.*, target_actor1.*, target_critic1.*,
// then actor1.adam.m0 / .v0 / .step and so on.
std::vector<NamedTensor> flatten(const AgentState& state);

// Text container, one tensor per record, values as hexfloats so a round
// trip is bit-exact.
void save_checkpoint(const AgentState& state, const std::filesystem::path& path);
// Overwrites the tensors of an agent built with the same configuration.
// Throws ConfigError on name or shape mismatch, IoError on read failure.
void load_checkpoint(AgentState& state, const std::filesystem::path& path);

}  // namespace tddr::agents
