#include "core/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "core/error.hpp"

namespace tddr::harness {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view expected) {
  throw ConfigError("config key '" + std::string(key) + "': cannot parse '" + std::string(value) + "' as " +
                    std::string(expected));
}

double to_double(std::string_view key, std::string_view value) {
  const std::string v = trim(value);
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, value, "a number");
  return out;
}

std::int64_t to_int(std::string_view key, std::string_view value) {
  const std::string v = trim(value);
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec == std::errc() && ptr == v.data() + v.size()) return out;
  // Accept integral scientific notation such as 3e4.
  const double d = to_double(key, value);
  if (d != static_cast<double>(static_cast<std::int64_t>(d))) bad_value(key, value, "an integer");
  return static_cast<std::int64_t>(d);
}

bool to_bool(std::string_view key, std::string_view value) {
  const std::string v = trim(value);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, value, "a boolean");
}

std::string num(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

template <typename T>
std::string join(const std::vector<T>& xs) {
  std::string out;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (k) out += ',';
    out += std::to_string(xs[k]);
  }
  return out;
}

}  // namespace

reg::RegularizerKind ExperimentConfig::regularizer() const {
  reg::RegularizerKind kind;
  switch (algorithm) {
    case reg::Algorithm::kDdpg: kind = reg::RegularizerKind::ddpg(); break;
    case reg::Algorithm::kTd3: kind = reg::RegularizerKind::td3(); break;
    case reg::Algorithm::kDarc: kind = reg::RegularizerKind::darc_with(darc_nu, darc_lambda); break;
    case reg::Algorithm::kMinDa: kind = reg::RegularizerKind::min_da(); break;
    case reg::Algorithm::kTddr: kind = reg::RegularizerKind::tddr(delta_mode); break;
  }
  kind.provenance = provenance;
  return kind;
}

agents::AgentConfig ExperimentConfig::agent_config(int observation_dim, int action_dim, double action_bound) const {
  agents::AgentConfig ac;
  ac.observation_dim = observation_dim;
  ac.action_dim = action_dim;
  ac.action_bound = action_bound;
  ac.hidden = hidden;
  ac.actor_lr = actor_lr;
  ac.critic_lr = critic_lr;
  ac.gamma = gamma;
  ac.tau = tau;
  ac.batch_size = batch_size;
  ac.noise.explore_sigma = explore_noise * action_bound;
  ac.noise.smoothing_sigma = target_noise;
  ac.noise.clip = target_noise_clip;
  ac.schedule = schedule;
  ac.policy_delay = (algorithm == reg::Algorithm::kTd3) ? policy_delay : 1;
  ac.regularizer = regularizer();
  return ac;
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("config: seeds must not be empty");
  if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
    throw ConfigError("config: seeds must be distinct");
  }
  if (total_steps < 0) throw ConfigError("config: total_steps must be >= 0");
  if (eval_every <= 0) throw ConfigError("config: eval_every must be > 0");
  if (eval_episodes < 1) throw ConfigError("config: eval_episodes must be >= 1");
  if (batch_size < 1) throw ConfigError("config: batch_size must be >= 1");
  if (warmup_steps < 0) throw ConfigError("config: warmup_steps must be >= 0");
  if (replay_capacity < 1) throw ConfigError("config: replay_capacity must be >= 1");
  if (!(explore_noise >= 0.0)) throw ConfigError("config: explore_noise must be >= 0");
  if (smoothing_window < 1) throw ConfigError("config: smoothing_window must be >= 1");
  if (final_evaluations < 1) throw ConfigError("config: final_evaluations must be >= 1");
  if (jobs < 1) throw ConfigError("config: jobs must be >= 1");
  if (task != "pendulum" && task != "reacher") {
    throw ConfigError("config: unknown task '" + task + "' (expected pendulum or reacher)");
  }
  agent_config(1, 1, 1.0).validate();
}

void apply_preset(ExperimentConfig& cfg, std::string_view name) {
  if (name == "desk") {
    cfg.total_steps = 30000;
    cfg.eval_every = 1000;
    cfg.eval_episodes = 10;
    cfg.seeds = {0, 1, 2, 3, 4};
  } else if (name == "paper-protocol") {
    cfg.total_steps = 1000000;
    cfg.eval_every = 5000;
    cfg.eval_episodes = 10;
    cfg.seeds = {0, 1, 2, 3, 4};
    cfg.batch_size = 128;
  } else {
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected desk or paper-protocol)");
  }
  cfg.smoothing_window = 5;
  cfg.final_evaluations = 10;
  cfg.preset = std::string(name);
}

void set_option(ExperimentConfig& cfg, std::string_view key, std::string_view raw) {
  const std::string value = trim(raw);
  if (key == "preset") {
    apply_preset(cfg, value);
  } else if (key == "task") {
    cfg.task = value;
  } else if (key == "regularizer") {
    cfg.algorithm = reg::parse_algorithm(value);
  } else if (key == "darc.nu") {
    cfg.darc_nu = to_double(key, value);
  } else if (key == "darc.lambda") {
    cfg.darc_lambda = to_double(key, value);
  } else if (key == "tddr.delta_mode") {
    if (value == "per_sample") {
      cfg.delta_mode = reg::DeltaMode::kPerSample;
    } else if (value == "batch_mean") {
      cfg.delta_mode = reg::DeltaMode::kBatchMean;
    } else {
      bad_value(key, value, "per_sample|batch_mean");
    }
  } else if (key == "provenance.nns") {
    cfg.provenance.noise_samples = static_cast<int>(to_int(key, value));
  } else if (key == "provenance.beta") {
    cfg.provenance.beta = to_double(key, value);
  } else if (key == "provenance.bias") {
    cfg.provenance.bias = to_double(key, value);
  } else if (key == "seeds") {
    cfg.seeds.clear();
    for (const std::string& s : split(value, ',')) {
      const std::int64_t v = to_int(key, s);
      if (v < 0) bad_value(key, value, "non-negative seeds");
      cfg.seeds.push_back(static_cast<std::uint64_t>(v));
    }
  } else if (key == "total_steps" || key == "steps") {
    cfg.total_steps = to_int(key, value);
  } else if (key == "eval_every") {
    cfg.eval_every = to_int(key, value);
  } else if (key == "eval_episodes") {
    cfg.eval_episodes = static_cast<int>(to_int(key, value));
  } else if (key == "batch_size") {
    cfg.batch_size = static_cast<int>(to_int(key, value));
  } else if (key == "warmup_steps") {
    cfg.warmup_steps = to_int(key, value);
  } else if (key == "replay_capacity") {
    const std::int64_t v = to_int(key, value);
    if (v < 1) bad_value(key, value, "a positive capacity");
    cfg.replay_capacity = static_cast<std::size_t>(v);
  } else if (key == "hidden") {
    cfg.hidden.clear();
    for (const std::string& s : split(value, ',')) cfg.hidden.push_back(static_cast<int>(to_int(key, s)));
  } else if (key == "actor_lr") {
    cfg.actor_lr = to_double(key, value);
  } else if (key == "critic_lr") {
    cfg.critic_lr = to_double(key, value);
  } else if (key == "gamma") {
    cfg.gamma = to_double(key, value);
  } else if (key == "tau") {
    cfg.tau = to_double(key, value);
  } else if (key == "explore_noise") {
    cfg.explore_noise = to_double(key, value);
  } else if (key == "target_noise") {
    cfg.target_noise = to_double(key, value);
  } else if (key == "target_noise_clip") {
    cfg.target_noise_clip = to_double(key, value);
  } else if (key == "schedule") {
    if (value == "cross") {
      cfg.schedule = agents::ScheduleMode::kCross;
    } else if (value == "joint") {
      cfg.schedule = agents::ScheduleMode::kJoint;
    } else {
      bad_value(key, value, "cross|joint");
    }
  } else if (key == "policy_delay") {
    cfg.policy_delay = static_cast<int>(to_int(key, value));
  } else if (key == "eval_policy") {
    if (value == "max_q") {
      cfg.eval_policy = agents::EvalPolicy::kMaxQ;
    } else if (value == "actor1") {
      cfg.eval_policy = agents::EvalPolicy::kActor1;
    } else {
      bad_value(key, value, "max_q|actor1");
    }
  } else if (key == "smoothing_window") {
    cfg.smoothing_window = static_cast<int>(to_int(key, value));
  } else if (key == "final_evaluations") {
    cfg.final_evaluations = static_cast<int>(to_int(key, value));
  } else if (key == "jobs") {
    cfg.jobs = static_cast<int>(to_int(key, value));
  } else if (key == "save_checkpoints") {
    cfg.save_checkpoints = to_bool(key, value);
  } else if (key == "out" || key == "output_dir") {
    cfg.output_dir = value;
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

std::vector<std::pair<std::string, std::string>> parse_key_values(const std::string& text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      out.emplace_back(key, node.data());
    } else {
      for (const auto& [sub, leaf] : node) out.emplace_back(key + "." + sub, leaf.data());
    }
  }
  return out;
}

ExperimentConfig config_from_text(const std::string& text) {
  const auto kv = parse_key_values(text);
  ExperimentConfig cfg;
  for (const auto& [k, v] : kv) {
    if (k == "preset") set_option(cfg, k, v);
  }
  for (const auto& [k, v] : kv) {
    if (k != "preset") set_option(cfg, k, v);
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return config_from_text(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::map<std::string, std::string> canonical_options(const ExperimentConfig& cfg) {
  std::map<std::string, std::string> m;
  m["preset"] = cfg.preset;
  m["task"] = cfg.task;
  m["regularizer"] = std::string(reg::to_string(cfg.algorithm));
  m["darc.nu"] = num(cfg.darc_nu);
  m["darc.lambda"] = num(cfg.darc_lambda);
  m["tddr.delta_mode"] = cfg.delta_mode == reg::DeltaMode::kPerSample ? "per_sample" : "batch_mean";
  m["provenance.nns"] = std::to_string(cfg.provenance.noise_samples);
  m["provenance.beta"] = num(cfg.provenance.beta);
  m["provenance.bias"] = num(cfg.provenance.bias);
  m["seeds"] = join(cfg.seeds);
  m["total_steps"] = std::to_string(cfg.total_steps);
  m["eval_every"] = std::to_string(cfg.eval_every);
  m["eval_episodes"] = std::to_string(cfg.eval_episodes);
  m["batch_size"] = std::to_string(cfg.batch_size);
  m["warmup_steps"] = std::to_string(cfg.warmup_steps);
  m["replay_capacity"] = std::to_string(cfg.replay_capacity);
  m["hidden"] = join(cfg.hidden);
  m["actor_lr"] = num(cfg.actor_lr);
  m["critic_lr"] = num(cfg.critic_lr);
  m["gamma"] = num(cfg.gamma);
  m["tau"] = num(cfg.tau);
  m["explore_noise"] = num(cfg.explore_noise);
  m["target_noise"] = num(cfg.target_noise);
  m["target_noise_clip"] = num(cfg.target_noise_clip);
  m["schedule"] = cfg.schedule == agents::ScheduleMode::kCross ? "cross" : "joint";
  m["policy_delay"] = std::to_string(cfg.policy_delay);
  m["eval_policy"] = cfg.eval_policy == agents::EvalPolicy::kMaxQ ? "max_q" : "actor1";
  m["smoothing_window"] = std::to_string(cfg.smoothing_window);
  m["final_evaluations"] = std::to_string(cfg.final_evaluations);
  return m;
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  // FNV-1a over "key=value\n" lines in key order.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [k, v] : canonical_options(cfg)) {
    for (char c : k + "=" + v + "\n") {
      h ^= static_cast<unsigned char>(c);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, h, 16);
  (void)ec;
  std::string s(buf, end);
  return std::string(16 - s.size(), '0') + s;
}

}  // namespace tddr::harness
