#pragma once

// Bootstrap-value (psi) constructions and TD targets for the five supported
// algorithms, and the critic losses built on them.
//
// Everything except the losses is a pure function over TargetSample rows,
// which hold the target-network values for one transition. The networks are
// evaluated once by the agent; every psi rule below only recombines them.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/tensor.hpp"

namespace tddr::reg {

enum class Algorithm { kDdpg, kTd3, kDarc, kMinDa, kTddr };

std::string_view to_string(Algorithm a);
// Accepts ddpg, td3, darc, minda, tddr (case-sensitive). Throws ConfigError.
Algorithm parse_algorithm(std::string_view name);

// How TDDR compares |delta_1| and |delta_2|.
enum class DeltaMode {
  kPerSample,  // branch chosen independently for every transition
  kBatchMean,  // one branch for the whole batch from mean |delta_i|
};

struct DarcParams {
  double nu = 0.1;        // weight on the min-min term
  double lambda = 0.005;  // critic coupling penalty
};

// Symbols of the softmax-based SD3/GD3 operators. Kept so configs can record
// them; no target computation reads them.
struct SoftmaxProvenance {
  int noise_samples = 50;
  double beta = 0.001;
  double bias = 2.0;
};

struct RegularizerKind {
  Algorithm tag = Algorithm::kTddr;
  std::optional<DarcParams> darc;  // present iff tag == kDarc
  DeltaMode delta_mode = DeltaMode::kPerSample;
  std::optional<SoftmaxProvenance> provenance;

  static RegularizerKind ddpg() { return {Algorithm::kDdpg, std::nullopt, DeltaMode::kPerSample, std::nullopt}; }
  static RegularizerKind td3() { return {Algorithm::kTd3, std::nullopt, DeltaMode::kPerSample, std::nullopt}; }
  static RegularizerKind darc_with(double nu, double lambda) {
    return {Algorithm::kDarc, DarcParams{nu, lambda}, DeltaMode::kPerSample, std::nullopt};
  }
  static RegularizerKind min_da() { return {Algorithm::kMinDa, std::nullopt, DeltaMode::kPerSample, std::nullopt}; }
  static RegularizerKind tddr(DeltaMode mode = DeltaMode::kPerSample) {
    return {Algorithm::kTddr, std::nullopt, mode, std::nullopt};
  }

  int actor_count() const { return (tag == Algorithm::kDdpg || tag == Algorithm::kTd3) ? 1 : 2; }
  int critic_count() const { return tag == Algorithm::kDdpg ? 1 : 2; }
  // Throws ConfigError on nu outside [0, 1], negative lambda or DARC params on another tag.
  void validate() const;
};

// Target-network values for one transition (indices are 0-based: critic i,
// target actor j).
struct TargetSample {
  double reward = 0.0;
  double done = 0.0;
  // next_q[i][j] = Q'_i(s', a'_j) where a'_j is target actor j's smoothed action.
  std::array<std::array<double, 2>, 2> next_q{};
  // current_q[i] = Q'_i(s, a)
  std::array<double, 2> current_q{};
};

// min_i Q'_i(s', a'_j): the clipped double-Q value of target actor j.
inline double candidate_value(const TargetSample& t, int j) {
  return std::min(t.next_q[0][j], t.next_q[1][j]);
}

struct TddrDeltas {
  std::vector<double> delta1;
  std::vector<double> delta2;
};

// Q'_1(s', a'_1): single critic, single actor.
std::vector<double> psi_ddpg(std::span<const TargetSample> batch);
// min_i Q'_i(s', a'_1): double critics, single actor.
std::vector<double> psi_td3(std::span<const TargetSample> batch);
// (1 - nu) max_j min_i Q'_i(s', a'_j) + nu min_j min_i Q'_i(s', a'_j)
std::vector<double> psi_darc(std::span<const TargetSample> batch, double nu);
// min_{i,j} Q'_i(s', a'_j)
std::vector<double> psi_min_da(std::span<const TargetSample> batch);
// delta_j = r + gamma (1 - d) min_i Q'_i(s', a'_j) - min_i Q'_i(s, a)
TddrDeltas tddr_deltas(std::span<const TargetSample> batch, double gamma);
// Per sample: candidate 1 if |delta_1| <= |delta_2|, else candidate 2.
std::vector<double> psi_tddr(std::span<const TargetSample> batch, const TddrDeltas& deltas,
                             DeltaMode mode = DeltaMode::kPerSample);

std::vector<double> compute_psi(std::span<const TargetSample> batch, const RegularizerKind& kind, double gamma);

// y = r + gamma (1 - d) psi
std::vector<double> td_target(std::span<const double> rewards, std::span<const double> psi, double gamma,
                              std::span<const double> dones);

// mean_k (y_k - Q_k)^2 with y held constant. q_pred must be N×1.
nn::Var critic_loss(nn::Tape& tape, nn::Var q_pred, std::span<const double> y);

// lambda * mean_k (Q1_k - Q2_k)^2
nn::Var darc_coupling_penalty(nn::Tape& tape, nn::Var q1, nn::Var q2, double lambda);

}  // namespace tddr::reg
