#include "nait/checkpoint.hpp"

#include <fstream>
#include <sstream>
#include <string>

#include "binary_io.hpp"
#include "nait/error.hpp"

namespace nait {

namespace {
constexpr std::uint32_t kAgentFormatVersion = 1;

template <typename Fn>
void write_atomically(const std::filesystem::path& path, Fn&& fn) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + tmp.string() + " for writing");
    fn(out);
    out.flush();
    if (!out) throw FormatError("failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::ifstream open_for_read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return in;
}

void expect_end(std::istream& in, const std::filesystem::path& path) {
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes in " + path.string());
}
}  // namespace

// Layout: "NAIT" u32 version u32 action_count u64 feature_dim u64 total_steps
// u64 episodes u64 rng_len char rng_state[rng_len], then one memory block per action.
void Agent::save(std::ostream& out) const {
  io::write_magic(out);
  io::write<std::uint32_t>(out, kAgentFormatVersion);
  io::write<std::uint32_t>(out, static_cast<std::uint32_t>(memories_.size()));
  io::write<std::uint64_t>(out, encoder_.feature_dim());
  io::write<std::uint64_t>(out, total_steps_);
  io::write<std::uint64_t>(out, episodes_);
  std::ostringstream rng_text;
  rng_text << rng_;
  const std::string state = rng_text.str();
  io::write<std::uint64_t>(out, state.size());
  out.write(state.data(), static_cast<std::streamsize>(state.size()));
  for (const auto& m : memories_) m.save(out);
  if (!out) throw FormatError("failed writing agent checkpoint");
}

Agent Agent::load(std::istream& in, AgentConfig config, FrameShape frame) {
  io::expect_magic(in);
  const auto version = io::read<std::uint32_t>(in, "checkpoint version");
  if (version != kAgentFormatVersion) {
    throw FormatError("unsupported checkpoint version " + std::to_string(version));
  }
  const auto actions = io::read<std::uint32_t>(in, "action count");
  const auto feature_dim = io::read<std::uint64_t>(in, "feature dim");
  if (feature_dim != config.F) {
    throw FormatError("checkpoint feature dim " + std::to_string(feature_dim) + " does not match config F=" +
                      std::to_string(config.F));
  }
  const auto total_steps = io::read<std::uint64_t>(in, "total steps");
  const auto episodes = io::read<std::uint64_t>(in, "episodes");
  const auto rng_len = io::read<std::uint64_t>(in, "rng length");
  if (rng_len > (1u << 20)) throw FormatError("implausible rng state length");
  std::string state(rng_len, '\0');
  if (!in.read(state.data(), static_cast<std::streamsize>(rng_len))) {
    throw FormatError("truncated input while reading rng state");
  }
  Rng rng;
  std::istringstream rng_text(state);
  if (!(rng_text >> rng)) throw FormatError("corrupt rng state");

  std::vector<ActionMemory> memories;
  memories.reserve(actions);
  for (std::uint32_t a = 0; a < actions; ++a) {
    memories.push_back(ActionMemory::load(in, config.memory_options()));
    if (memories.back().size() > 0 && memories.back().index().dim() != feature_dim) {
      throw FormatError("memory dimension does not match feature dim");
    }
  }

  Agent agent(config, actions, frame);
  agent.memories_ = std::move(memories);
  agent.rng_ = rng;
  agent.total_steps_ = total_steps;
  agent.episodes_ = episodes;
  return agent;
}

void save_memory(const std::filesystem::path& path, const ActionMemory& memory) {
  write_atomically(path, [&](std::ostream& out) { memory.save(out); });
}

ActionMemory load_memory(const std::filesystem::path& path, MemoryOptions options) {
  auto in = open_for_read(path);
  auto mem = ActionMemory::load(in, options);
  expect_end(in, path);
  return mem;
}

void save_agent(const std::filesystem::path& path, const Agent& agent) {
  write_atomically(path, [&](std::ostream& out) { agent.save(out); });
}

Agent load_agent(const std::filesystem::path& path, const AgentConfig& config, FrameShape frame) {
  auto in = open_for_read(path);
  auto agent = Agent::load(in, config, frame);
  expect_end(in, path);
  return agent;
}

}  // namespace nait
