#include "core/checkpoint.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>

#include "core/error.hpp"

namespace tddr::agents {

namespace {

constexpr const char* kMagic = "tddr-checkpoint 1";

// Visits every tensor slot with its checkpoint name.
void visit(AgentState& state, const std::function<void(const std::string&, nn::Matrix&)>& fn) {
  auto nets = [&](const char* role, std::vector<nn::Mlp>& list) {
    for (std::size_t k = 0; k < list.size(); ++k) {
      auto params = list[k].parameters();
      for (std::size_t p = 0; p < params.size(); ++p) {
        const std::string name = std::string(role) + std::to_string(k + 1) + "." + (p % 2 == 0 ? "W" : "b") +
                                 std::to_string(p / 2);
        fn(name, params[p].value);
      }
    }
  };
  nets("actor", state.actors);
  nets("critic", state.critics);
  nets("target_actor", state.target_actors);
  nets("target_critic", state.target_critics);

  auto optimizers = [&](const char* role, std::vector<nn::AdamState>& list) {
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string prefix = std::string(role) + std::to_string(k + 1) + ".adam.";
      for (std::size_t p = 0; p < list[k].first_moment.size(); ++p) {
        fn(prefix + "m" + std::to_string(p), list[k].first_moment[p]);
        fn(prefix + "v" + std::to_string(p), list[k].second_moment[p]);
      }
      nn::Matrix step = nn::Matrix::Constant(1, 1, static_cast<double>(list[k].step));
      fn(prefix + "step", step);
      list[k].step = static_cast<std::int64_t>(step(0, 0));
    }
  };
  optimizers("actor", state.actor_optimizers);
  optimizers("critic", state.critic_optimizers);
}

std::string hex(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::hex);
  (void)ec;
  return std::string(buf, end);
}

double parse_hex(const std::string& token) {
  double v = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  bool negative = false;
  if (first != last && *first == '-') {
    negative = true;
    ++first;
  }
  auto [ptr, ec] = std::from_chars(first, last, v, std::chars_format::hex);
  if (ec != std::errc() || ptr != last) throw ConfigError("checkpoint: bad value '" + token + "'");
  return negative ? -v : v;
}

}  // namespace

std::vector<NamedTensor> flatten(const AgentState& state) {
  std::vector<NamedTensor> out;
  AgentState copy = state;
  visit(copy, [&](const std::string& name, nn::Matrix& m) { out.push_back({name, m}); });
  return out;
}

void save_checkpoint(const AgentState& state, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << kMagic << '\n';
  for (const NamedTensor& t : flatten(state)) {
    out << "tensor " << t.name << ' ' << t.value.rows() << ' ' << t.value.cols() << '\n';
    for (Eigen::Index r = 0; r < t.value.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.value.cols(); ++c) {
        if (c) out << ' ';
        out << hex(t.value(r, c));
      }
      out << '\n';
    }
  }
  out << "end\n";
  if (!out) throw IoError("write failed: " + path.string());
}

void load_checkpoint(AgentState& state, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kMagic) throw ConfigError(path.string() + ": not a checkpoint file");

  AgentState loaded = state;
  visit(loaded, [&](const std::string& name, nn::Matrix& m) {
    std::string tag, file_name;
    Eigen::Index rows = 0, cols = 0;
    if (!(in >> tag >> file_name >> rows >> cols) || tag != "tensor") {
      throw ConfigError(path.string() + ": truncated before tensor " + name);
    }
    if (file_name != name || rows != m.rows() || cols != m.cols()) {
      throw ConfigError(path.string() + ": expected " + name + " " + std::to_string(m.rows()) + "x" +
                        std::to_string(m.cols()) + ", found " + file_name + " " + std::to_string(rows) + "x" +
                        std::to_string(cols));
    }
    std::string token;
    for (Eigen::Index k = 0; k < m.size(); ++k) {
      if (!(in >> token)) throw ConfigError(path.string() + ": truncated inside " + name);
      m.data()[k] = parse_hex(token);
    }
  });
  std::string tail;
  if (!(in >> tail) || tail != "end") throw ConfigError(path.string() + ": trailing data or missing end marker");
  state = std::move(loaded);
}

}  // namespace tddr::agents
