#include "tddr/tddr.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <filesystem>
#include <memory>
#include <new>
#include <string>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/experiment.hpp"
#include "core/mdp.hpp"
#include "core/report.hpp"
#include "core/tabular.hpp"

struct tddr_config {
  tddr::harness::ExperimentConfig cfg;
};

struct tddr_result {
  tddr::harness::ExperimentConfig cfg;
  std::vector<tddr::harness::RunRecord> records;
};

struct tddr_mdp {
  tddr::env::MdpSpec spec;
};

struct tddr_trace {
  tddr::tabular::ConvergenceTrace trace;
};

namespace {

thread_local std::string last_error;

template <typename F>
tddr_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return TDDR_OK;
  } catch (const tddr::ConfigError& e) {
    last_error = e.what();
    return TDDR_ERR_CONFIG;
  } catch (const tddr::UsageError& e) {
    last_error = e.what();
    return TDDR_ERR_USAGE;
  } catch (const tddr::PreconditionError& e) {
    last_error = e.what();
    return TDDR_ERR_PRECONDITION;
  } catch (const tddr::IoError& e) {
    last_error = e.what();
    return TDDR_ERR_IO;
  } catch (const std::filesystem::filesystem_error& e) {
    last_error = e.what();
    return TDDR_ERR_IO;
  } catch (const tddr::NumericError& e) {
    last_error = e.what();
    return TDDR_ERR_NUMERIC;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return TDDR_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return TDDR_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return TDDR_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (p == nullptr) throw tddr::UsageError(std::string(what) + " must not be null");
}

void copy_string(const std::string& s, char* buf, std::size_t cap, std::size_t* needed) {
  if (needed) *needed = s.size();
  if (buf && cap > 0) {
    const std::size_t n = std::min(cap - 1, s.size());
    std::memcpy(buf, s.data(), n);
    buf[n] = '\0';
  }
}

const tddr::harness::RunRecord& record_at(const tddr_result* result, std::size_t index) {
  require(result, "result");
  if (index >= result->records.size()) throw tddr::UsageError("seed index out of range");
  return result->records[index];
}

std::vector<tddr::harness::RunRecord> completed(const tddr_result* result) {
  std::vector<tddr::harness::RunRecord> out;
  for (const auto& r : result->records) {
    if (!r.aborted) out.push_back(r);
  }
  return out;
}

}  // namespace

extern "C" {

const char* tddr_version(void) { return "0.1.0"; }

const char* tddr_status_string(tddr_status status) {
  switch (status) {
    case TDDR_OK: return "ok";
    case TDDR_ERR_CONFIG: return "configuration error";
    case TDDR_ERR_USAGE: return "usage error";
    case TDDR_ERR_PRECONDITION: return "precondition violated";
    case TDDR_ERR_IO: return "i/o error";
    case TDDR_ERR_NUMERIC: return "numeric error";
    case TDDR_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* tddr_last_error(void) { return last_error.c_str(); }

tddr_status tddr_config_create(tddr_config** out) {
  return guarded([&] {
    require(out, "out");
    *out = new tddr_config{};
  });
}

tddr_status tddr_config_load(const char* path, tddr_config** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new tddr_config{tddr::harness::load_config(path)};
  });
}

tddr_status tddr_config_set(tddr_config* cfg, const char* key, const char* value) {
  return guarded([&] {
    require(cfg, "config");
    require(key, "key");
    require(value, "value");
    tddr::harness::set_option(cfg->cfg, key, value);
  });
}

tddr_status tddr_config_get(const tddr_config* cfg, const char* key, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(cfg, "config");
    require(key, "key");
    const std::string k = key;
    std::string value;
    if (k == "out" || k == "output_dir") {
      value = cfg->cfg.output_dir.string();
    } else if (k == "jobs") {
      value = std::to_string(cfg->cfg.jobs);
    } else if (k == "save_checkpoints") {
      value = cfg->cfg.save_checkpoints ? "true" : "false";
    } else {
      const auto options = tddr::harness::canonical_options(cfg->cfg);
      const auto it = options.find(k);
      if (it == options.end()) throw tddr::ConfigError("unknown config key '" + k + "'");
      value = it->second;
    }
    copy_string(value, buf, cap, needed);
  });
}

tddr_status tddr_config_hash(const tddr_config* cfg, uint64_t* out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    *out = tddr::harness::config_hash(cfg->cfg);
  });
}

tddr_status tddr_config_validate(const tddr_config* cfg) {
  return guarded([&] {
    require(cfg, "config");
    cfg->cfg.validate();
  });
}

void tddr_config_destroy(tddr_config* cfg) { delete cfg; }

tddr_status tddr_run(const tddr_config* cfg, tddr_result** out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    auto result = std::make_unique<tddr_result>();
    result->cfg = cfg->cfg;
    result->records = tddr::harness::run_experiment(cfg->cfg);
    *out = result.release();
  });
}

size_t tddr_result_seed_count(const tddr_result* result) { return result ? result->records.size() : 0; }

tddr_status tddr_result_info(const tddr_result* result, size_t index, tddr_run_info* out) {
  return guarded([&] {
    const auto& r = record_at(result, index);
    require(out, "out");
    out->seed = r.seed;
    out->config_hash = r.config_hash;
    out->evaluations = r.evaluations.size();
    out->env_steps = r.env_steps;
    out->gradient_steps = r.gradient_steps;
    out->parameter_fingerprint = r.parameter_fingerprint;
    out->final_smoothed =
        r.evaluations.empty() ? 0.0 : tddr::harness::final_smoothed_return(r, result->cfg.smoothing_window);
    out->wall_seconds = r.wall_seconds;
    out->aborted = r.aborted ? 1 : 0;
  });
}

tddr_status tddr_result_evaluations(const tddr_result* result, size_t index, int64_t* steps, double* returns,
                                    size_t cap) {
  return guarded([&] {
    const auto& r = record_at(result, index);
    const std::size_t n = std::min(cap, r.evaluations.size());
    for (std::size_t k = 0; k < n; ++k) {
      if (steps) steps[k] = r.evaluations[k].step;
      if (returns) returns[k] = r.evaluations[k].mean_return;
    }
  });
}

tddr_status tddr_result_diagnostic(const tddr_result* result, size_t index, char* buf, size_t cap, size_t* needed) {
  return guarded([&] { copy_string(record_at(result, index).diagnostic, buf, cap, needed); });
}

tddr_status tddr_result_summary(const tddr_result* result, double* final_mean, double* final_std) {
  return guarded([&] {
    require(result, "result");
    const auto records = completed(result);
    if (records.empty()) throw tddr::PreconditionError("no completed seeds to summarize");
    const auto report =
        tddr::harness::aggregate(records, result->cfg.smoothing_window, result->cfg.final_evaluations);
    if (final_mean) *final_mean = report.final_summary.mean;
    if (final_std) *final_std = report.final_summary.std;
  });
}

tddr_status tddr_result_emit(const tddr_result* result, const char* dir) {
  return guarded([&] {
    require(result, "result");
    require(dir, "dir");
    const auto report = tddr::harness::aggregate(completed(result), result->cfg.smoothing_window,
                                                 result->cfg.final_evaluations);
    tddr::harness::emit(report, result->records, result->cfg, dir);
  });
}

void tddr_result_destroy(tddr_result* result) { delete result; }

tddr_status tddr_aggregate_dir(const char* dir, size_t* seeds, double* final_mean, double* final_std) {
  return guarded([&] {
    require(dir, "dir");
    const auto loaded = tddr::harness::load_run_directory(dir);
    const auto report = tddr::harness::aggregate(loaded.records, loaded.window, loaded.final_k);
    tddr::harness::write_aggregate_csv(report, std::filesystem::path(dir) / "aggregate.csv");
    if (seeds) *seeds = loaded.records.size();
    if (final_mean) *final_mean = report.final_summary.mean;
    if (final_std) *final_std = report.final_summary.std;
  });
}

tddr_status tddr_random_policy_return(const char* task, int episodes, uint64_t seed, double* out) {
  return guarded([&] {
    require(task, "task");
    require(out, "out");
    *out = tddr::harness::random_policy_return(task, episodes, seed);
  });
}

tddr_status tddr_mdp_random(int states, int actions, uint64_t seed, tddr_mdp** out) {
  return guarded([&] {
    require(out, "out");
    *out = new tddr_mdp{tddr::env::make_random_mdp(states, actions, seed)};
  });
}

tddr_status tddr_mdp_load(const char* path, tddr_mdp** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new tddr_mdp{tddr::env::load_mdp(path)};
  });
}

tddr_status tddr_mdp_save(const tddr_mdp* mdp, const char* path) {
  return guarded([&] {
    require(mdp, "mdp");
    require(path, "path");
    tddr::env::save_mdp(mdp->spec, path);
  });
}

tddr_status tddr_mdp_shape(const tddr_mdp* mdp, int* states, int* actions, double* gamma) {
  return guarded([&] {
    require(mdp, "mdp");
    if (states) *states = mdp->spec.n_states;
    if (actions) *actions = mdp->spec.n_actions;
    if (gamma) *gamma = mdp->spec.gamma;
  });
}

tddr_status tddr_mdp_optimal_q(const tddr_mdp* mdp, double tol, double* q, size_t cap) {
  return guarded([&] {
    require(mdp, "mdp");
    require(q, "q");
    if (cap < mdp->spec.pairs()) throw tddr::UsageError("q buffer smaller than states*actions");
    const auto result = tddr::env::value_iteration(mdp->spec, tol);
    std::copy(result.q.begin(), result.q.end(), q);
  });
}

void tddr_mdp_destroy(tddr_mdp* mdp) { delete mdp; }

void tddr_converge_defaults(tddr_converge_options* options) {
  if (!options) return;
  const tddr::tabular::ConvergenceOptions d;
  options->scheme = TDDR_SCHEME_MIN;
  options->pattern = TDDR_PATTERN_RANDOM;
  options->selector = TDDR_SELECTOR_TDDR;
  options->steps = d.steps;
  options->seed = d.seed;
  options->checkpoint_every = d.checkpoint_every;
  options->omega = d.omega;
  options->epsilon_start = d.epsilon_start;
  options->epsilon_end = d.epsilon_end;
  options->init_a = d.init_a;
  options->init_b = d.init_b;
}

tddr_status tddr_converge(const tddr_mdp* mdp, const tddr_converge_options* options, tddr_trace** out) {
  return guarded([&] {
    require(mdp, "mdp");
    require(options, "options");
    require(out, "out");
    namespace tab = tddr::tabular;
    tab::ConvergenceOptions o;
    switch (options->scheme) {
      case TDDR_SCHEME_MIN: o.scheme = tab::Scheme::kMin; break;
      case TDDR_SCHEME_CLASSIC: o.scheme = tab::Scheme::kClassic; break;
      default: throw tddr::UsageError("unknown scheme");
    }
    switch (options->pattern) {
      case TDDR_PATTERN_RANDOM: o.pattern = tab::UpdatePattern::kRandom; break;
      case TDDR_PATTERN_SIMULTANEOUS: o.pattern = tab::UpdatePattern::kSimultaneous; break;
      default: throw tddr::UsageError("unknown update pattern");
    }
    switch (options->selector) {
      case TDDR_SELECTOR_TDDR: o.selector = tab::Selector::kTddr; break;
      case TDDR_SELECTOR_FIXED1: o.selector = tab::Selector::kFixed1; break;
      case TDDR_SELECTOR_FIXED2: o.selector = tab::Selector::kFixed2; break;
      default: throw tddr::UsageError("unknown selector");
    }
    o.steps = options->steps;
    o.seed = options->seed;
    o.checkpoint_every = options->checkpoint_every;
    o.omega = options->omega;
    o.epsilon_start = options->epsilon_start;
    o.epsilon_end = options->epsilon_end;
    o.init_a = options->init_a;
    o.init_b = options->init_b;
    *out = new tddr_trace{tab::run_convergence(mdp->spec, o)};
  });
}

size_t tddr_trace_row_count(const tddr_trace* trace) { return trace ? trace->trace.rows.size() : 0; }

tddr_status tddr_trace_row_at(const tddr_trace* trace, size_t index, tddr_trace_row* out) {
  return guarded([&] {
    require(trace, "trace");
    require(out, "out");
    if (index >= trace->trace.rows.size()) throw tddr::UsageError("trace row index out of range");
    const auto& r = trace->trace.rows[index];
    *out = {r.step, r.delta_ba_inf, r.delta_a_inf, r.mean_abs_ea, r.mean_abs_eb, r.epsilon, r.alpha_mean};
  });
}

double tddr_trace_q_star_inf(const tddr_trace* trace) { return trace ? trace->trace.q_star_inf : 0.0; }

tddr_status tddr_trace_write_csv(const tddr_trace* trace, const char* path) {
  return guarded([&] {
    require(trace, "trace");
    require(path, "path");
    tddr::tabular::write_trace_csv(trace->trace, path);
  });
}

void tddr_trace_destroy(tddr_trace* trace) { delete trace; }

}  // extern "C"
