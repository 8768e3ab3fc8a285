#pragma once

#include <filesystem>

#include "nait/agent.hpp"
#include "nait/value_memory.hpp"

namespace nait {

// Files are written to a sibling temporary and renamed into place, so a
// crash never leaves a half-written checkpoint under the final name.
void save_memory(const std::filesystem::path& path, const ActionMemory& memory);
ActionMemory load_memory(const std::filesystem::path& path, MemoryOptions options = {});

void save_agent(const std::filesystem::path& path, const Agent& agent);
// The config must describe the agent that was saved; the feature dimension
// and action count are checked against the file.
Agent load_agent(const std::filesystem::path& path, const AgentConfig& config, FrameShape frame);

}  // namespace nait
