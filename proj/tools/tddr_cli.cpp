#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tddr/tddr.h"

namespace {

struct Failure {
  tddr_status status;
  std::string context;
};

void check(tddr_status status, const std::string& context) {
  if (status != TDDR_OK) throw Failure{status, context};
}

struct ConfigDeleter {
  void operator()(tddr_config* p) const { tddr_config_destroy(p); }
};
struct ResultDeleter {
  void operator()(tddr_result* p) const { tddr_result_destroy(p); }
};
struct MdpDeleter {
  void operator()(tddr_mdp* p) const { tddr_mdp_destroy(p); }
};
struct TraceDeleter {
  void operator()(tddr_trace* p) const { tddr_trace_destroy(p); }
};

std::string config_value(const tddr_config* cfg, const char* key) {
  std::size_t needed = 0;
  check(tddr_config_get(cfg, key, nullptr, 0, &needed), key);
  std::string value(needed + 1, '\0');
  check(tddr_config_get(cfg, key, value.data(), value.size(), &needed), key);
  value.resize(needed);
  return value;
}

struct RunArgs {
  std::string config;
  std::string preset;
  std::string task;
  std::string regularizer;
  std::string seeds;
  std::string steps;
  std::string out;
  std::string eval_policy;
  int jobs = 0;
  std::vector<std::string> overrides;
};

int run_command(const RunArgs& args) {
  tddr_config* raw = nullptr;
  if (args.config.empty()) {
    check(tddr_config_create(&raw), "config");
  } else {
    check(tddr_config_load(args.config.c_str(), &raw), args.config);
  }
  std::unique_ptr<tddr_config, ConfigDeleter> cfg(raw);

  auto set = [&](const char* key, const std::string& value) {
    if (!value.empty()) check(tddr_config_set(cfg.get(), key, value.c_str()), std::string("--") + key);
  };
  set("preset", args.preset);
  set("task", args.task);
  set("regularizer", args.regularizer);
  set("seeds", args.seeds);
  set("total_steps", args.steps);
  set("eval_policy", args.eval_policy);
  set("out", args.out);
  if (args.jobs > 0) set("jobs", std::to_string(args.jobs));
  for (const std::string& kv : args.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Failure{TDDR_ERR_USAGE, "--set expects key=value, got '" + kv + "'"};
    check(tddr_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str()), "--set " + kv);
  }
  check(tddr_config_validate(cfg.get()), "config");

  const std::string out = config_value(cfg.get(), "out");
  std::printf("run: task=%s regularizer=%s seeds=%s steps=%s out=%s\n", config_value(cfg.get(), "task").c_str(),
              config_value(cfg.get(), "regularizer").c_str(), config_value(cfg.get(), "seeds").c_str(),
              config_value(cfg.get(), "total_steps").c_str(), out.c_str());
  std::fflush(stdout);

  tddr_result* result_raw = nullptr;
  check(tddr_run(cfg.get(), &result_raw), "run");
  std::unique_ptr<tddr_result, ResultDeleter> result(result_raw);
  check(tddr_result_emit(result.get(), out.c_str()), out);

  int aborted = 0;
  for (std::size_t k = 0; k < tddr_result_seed_count(result.get()); ++k) {
    tddr_run_info info{};
    check(tddr_result_info(result.get(), k, &info), "result");
    std::printf("seed %" PRIu64 ": evaluations=%zu gradient_steps=%" PRId64 " final_smoothed=%.6g wall=%.1fs%s\n",
                info.seed, info.evaluations, info.gradient_steps, info.final_smoothed, info.wall_seconds,
                info.aborted ? " ABORTED" : "");
    if (info.aborted) {
      ++aborted;
      std::size_t needed = 0;
      check(tddr_result_diagnostic(result.get(), k, nullptr, 0, &needed), "result");
      std::string diag(needed + 1, '\0');
      check(tddr_result_diagnostic(result.get(), k, diag.data(), diag.size(), &needed), "result");
      std::fprintf(stderr, "seed %" PRIu64 " aborted: %s\n", info.seed, diag.c_str());
    }
  }
  if (aborted < static_cast<int>(tddr_result_seed_count(result.get()))) {
    double mean = 0.0, sd = 0.0;
    check(tddr_result_summary(result.get(), &mean, &sd), "summary");
    std::printf("final summary: %.6g +/- %.6g\n", mean, sd);
  }
  return aborted > 0 ? 3 : 0;
}

struct ConvergeArgs {
  std::string mdp;
  tddr_converge_options options{};
  std::string out;
  bool save_mdp = false;
};

std::unique_ptr<tddr_mdp, MdpDeleter> open_mdp(const std::string& source) {
  tddr_mdp* raw = nullptr;
  const std::string prefix = "random:";
  if (source.rfind(prefix, 0) == 0) {
    int states = 0, actions = 0;
    unsigned long long seed = 0;
    char tail = 0;
    if (std::sscanf(source.c_str() + prefix.size(), "%d,%d,%llu%c", &states, &actions, &seed, &tail) != 3) {
      throw Failure{TDDR_ERR_USAGE, "--mdp random:S,A,seed expected, got '" + source + "'"};
    }
    check(tddr_mdp_random(states, actions, seed, &raw), source);
  } else {
    check(tddr_mdp_load(source.c_str(), &raw), source);
  }
  return std::unique_ptr<tddr_mdp, MdpDeleter>(raw);
}

int converge_command(const ConvergeArgs& args) {
  auto mdp = open_mdp(args.mdp);
  std::error_code ec;
  std::filesystem::create_directories(args.out, ec);
  if (ec) throw Failure{TDDR_ERR_IO, "cannot create " + args.out + ": " + ec.message()};
  if (args.save_mdp) {
    const std::string path = (std::filesystem::path(args.out) / "mdp.json").string();
    check(tddr_mdp_save(mdp.get(), path.c_str()), path);
  }

  tddr_trace* raw = nullptr;
  check(tddr_converge(mdp.get(), &args.options, &raw), "converge");
  std::unique_ptr<tddr_trace, TraceDeleter> trace(raw);
  const std::string path = (std::filesystem::path(args.out) / "trace.csv").string();
  check(tddr_trace_write_csv(trace.get(), path.c_str()), path);

  tddr_trace_row last{};
  check(tddr_trace_row_at(trace.get(), tddr_trace_row_count(trace.get()) - 1, &last), "trace");
  const double q_inf = tddr_trace_q_star_inf(trace.get());
  std::printf("step %" PRId64 ": |QA-QB|inf=%.6g |QA-Q*|inf=%.6g |Q*|inf=%.6g\n", last.step, last.delta_ba_inf,
              last.delta_a_inf, q_inf);
  std::printf("trace written to %s\n", path.c_str());
  return 0;
}

int aggregate_command(const std::string& dir) {
  std::size_t seeds = 0;
  double mean = 0.0, sd = 0.0;
  check(tddr_aggregate_dir(dir.c_str(), &seeds, &mean, &sd), dir);
  std::printf("aggregated %zu seeds: final summary %.6g +/- %.6g\n", seeds, mean, sd);
  return 0;
}

int baseline_command(const std::string& task, int episodes, std::uint64_t seed) {
  double value = 0.0;
  check(tddr_random_policy_return(task.c_str(), episodes, seed, &value), task);
  std::printf("random policy on %s over %d episodes: %.6g\n", task.c_str(), episodes, value);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double actor-critic experiments with TD-error-driven regularization"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tddr_version());

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Train agents over several seeds and write learning curves");
  run_cmd->add_option("--config", run.config, "Config file (key=value lines, optional [section] headers)");
  run_cmd->add_option("--preset", run.preset, "desk or paper-protocol");
  run_cmd->add_option("--task", run.task, "pendulum or reacher");
  run_cmd->add_option("--regularizer", run.regularizer, "ddpg|td3|darc|minda|tddr");
  run_cmd->add_option("--seeds", run.seeds, "Comma-separated seeds");
  run_cmd->add_option("--steps", run.steps, "Environment steps per seed");
  run_cmd->add_option("--out", run.out, "Output directory");
  run_cmd->add_option("--eval-policy", run.eval_policy, "max_q or actor1");
  run_cmd->add_option("--jobs", run.jobs, "Seeds run in parallel");
  run_cmd->add_option("--set", run.overrides, "Extra key=value overrides");

  ConvergeArgs conv;
  tddr_converge_defaults(&conv.options);
  conv.options.steps = 500000;
  const std::map<std::string, tddr_pattern> patterns{{"random", TDDR_PATTERN_RANDOM},
                                                     {"simultaneous", TDDR_PATTERN_SIMULTANEOUS}};
  const std::map<std::string, tddr_selector> selectors{
      {"tddr", TDDR_SELECTOR_TDDR}, {"fixed1", TDDR_SELECTOR_FIXED1}, {"fixed2", TDDR_SELECTOR_FIXED2}};
  const std::map<std::string, tddr_scheme> schemes{{"min", TDDR_SCHEME_MIN}, {"classic", TDDR_SCHEME_CLASSIC}};
  auto* conv_cmd = app.add_subcommand("converge", "Tabular double Q-learning against the value-iteration Q*");
  conv_cmd->add_option("--mdp", conv.mdp, "MDP JSON file or random:S,A,seed")->required();
  conv_cmd->add_option("--pattern", conv.options.pattern, "random|simultaneous")
      ->transform(CLI::CheckedTransformer(patterns));
  conv_cmd->add_option("--selector", conv.options.selector, "tddr|fixed1|fixed2")
      ->transform(CLI::CheckedTransformer(selectors));
  conv_cmd->add_option("--scheme", conv.options.scheme, "min|classic")->transform(CLI::CheckedTransformer(schemes));
  conv_cmd->add_option("--steps", conv.options.steps, "Transitions");
  conv_cmd->add_option("--seed", conv.options.seed, "Seed for behavior, dynamics and update coins");
  conv_cmd->add_option("--omega", conv.options.omega, "Learning-rate exponent, alpha = n^-omega");
  conv_cmd->add_option("--epsilon-end", conv.options.epsilon_end, "Exploration floor");
  conv_cmd->add_option("--checkpoint-every", conv.options.checkpoint_every, "Trace row interval");
  conv_cmd->add_flag("--save-mdp", conv.save_mdp, "Also write the MDP as mdp.json");
  conv_cmd->add_option("--out", conv.out, "Output directory")->required();

  std::string agg_dir;
  auto* agg_cmd = app.add_subcommand("aggregate", "Recompute aggregate.csv of a run directory");
  agg_cmd->add_option("--in", agg_dir, "Run directory")->required();

  std::string base_task = "pendulum";
  int base_episodes = 100;
  std::uint64_t base_seed = 0;
  auto* base_cmd = app.add_subcommand("baseline", "Mean return of the uniform random policy");
  base_cmd->add_option("--task", base_task, "pendulum or reacher");
  base_cmd->add_option("--episodes", base_episodes, "Episodes");
  base_cmd->add_option("--seed", base_seed, "Seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run_command(run);
    if (*conv_cmd) return converge_command(conv);
    if (*agg_cmd) return aggregate_command(agg_dir);
    if (*base_cmd) return baseline_command(base_task, base_episodes, base_seed);
  } catch (const Failure& f) {
    const char* detail = tddr_last_error();
    std::fprintf(stderr, "error: %s (%s)%s%s\n", f.context.c_str(), tddr_status_string(f.status),
                 *detail ? ": " : "", detail);
    return f.status == TDDR_ERR_USAGE || f.status == TDDR_ERR_CONFIG ? 2 : 1;
  }
  return 0;
}
