#include "core/regularizers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/error.hpp"

namespace tddr::reg {

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kDdpg: return "ddpg";
    case Algorithm::kTd3: return "td3";
    case Algorithm::kDarc: return "darc";
    case Algorithm::kMinDa: return "minda";
    case Algorithm::kTddr: return "tddr";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "ddpg") return Algorithm::kDdpg;
  if (name == "td3") return Algorithm::kTd3;
  if (name == "darc") return Algorithm::kDarc;
  if (name == "minda") return Algorithm::kMinDa;
  if (name == "tddr") return Algorithm::kTddr;
  throw ConfigError("unknown regularizer '" + std::string(name) + "' (expected ddpg|td3|darc|minda|tddr)");
}

void RegularizerKind::validate() const {
  if ((tag == Algorithm::kDarc) != darc.has_value()) {
    throw ConfigError("DARC parameters must be present exactly when the regularizer is darc");
  }
  if (darc) {
    if (!(darc->nu >= 0.0 && darc->nu <= 1.0)) throw ConfigError("darc nu must lie in [0, 1]");
    if (!(darc->lambda >= 0.0)) throw ConfigError("darc lambda must be >= 0");
  }
}

std::vector<double> psi_ddpg(std::span<const TargetSample> batch) {
  std::vector<double> out(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) out[k] = batch[k].next_q[0][0];
  return out;
}

std::vector<double> psi_td3(std::span<const TargetSample> batch) {
  std::vector<double> out(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) out[k] = candidate_value(batch[k], 0);
  return out;
}

std::vector<double> psi_darc(std::span<const TargetSample> batch, double nu) {
  if (!(nu >= 0.0 && nu <= 1.0)) throw ConfigError("psi_darc: nu must lie in [0, 1]");
  std::vector<double> out(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const double c1 = candidate_value(batch[k], 0);
    const double c2 = candidate_value(batch[k], 1);
    const double hi = std::max(c1, c2);
    const double lo = std::min(c1, c2);
    // (1 - nu) hi + nu lo written as hi - nu (hi - lo): rounding is monotone in
    // nu and the clamp keeps the result inside [lo, hi] on doubles.
    out[k] = (nu == 1.0) ? lo : std::clamp(hi - nu * (hi - lo), lo, hi);
  }
  return out;
}

std::vector<double> psi_min_da(std::span<const TargetSample> batch) {
  std::vector<double> out(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    out[k] = std::min(candidate_value(batch[k], 0), candidate_value(batch[k], 1));
  }
  return out;
}

TddrDeltas tddr_deltas(std::span<const TargetSample> batch, double gamma) {
  TddrDeltas d;
  d.delta1.resize(batch.size());
  d.delta2.resize(batch.size());
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const TargetSample& t = batch[k];
    const double current = std::min(t.current_q[0], t.current_q[1]);
    const double discount = gamma * (1.0 - t.done);
    d.delta1[k] = t.reward + discount * candidate_value(t, 0) - current;
    d.delta2[k] = t.reward + discount * candidate_value(t, 1) - current;
  }
  return d;
}

std::vector<double> psi_tddr(std::span<const TargetSample> batch, const TddrDeltas& deltas, DeltaMode mode) {
  if (deltas.delta1.size() != batch.size() || deltas.delta2.size() != batch.size()) {
    throw UsageError("psi_tddr: deltas were computed for a different batch");
  }
  std::vector<double> out(batch.size());
  if (mode == DeltaMode::kBatchMean) {
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t k = 0; k < batch.size(); ++k) {
      m1 += std::abs(deltas.delta1[k]);
      m2 += std::abs(deltas.delta2[k]);
    }
    const int j = (m1 <= m2) ? 0 : 1;
    for (std::size_t k = 0; k < batch.size(); ++k) out[k] = candidate_value(batch[k], j);
    return out;
  }
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const int j = (std::abs(deltas.delta1[k]) <= std::abs(deltas.delta2[k])) ? 0 : 1;
    out[k] = candidate_value(batch[k], j);
  }
  return out;
}

std::vector<double> compute_psi(std::span<const TargetSample> batch, const RegularizerKind& kind, double gamma) {
  switch (kind.tag) {
    case Algorithm::kDdpg: return psi_ddpg(batch);
    case Algorithm::kTd3: return psi_td3(batch);
    case Algorithm::kDarc: return psi_darc(batch, kind.darc.value().nu);
    case Algorithm::kMinDa: return psi_min_da(batch);
    case Algorithm::kTddr: return psi_tddr(batch, tddr_deltas(batch, gamma), kind.delta_mode);
  }
  throw UsageError("compute_psi: unknown regularizer");
}

std::vector<double> td_target(std::span<const double> rewards, std::span<const double> psi, double gamma,
                              std::span<const double> dones) {
  if (rewards.size() != psi.size() || rewards.size() != dones.size()) {
    throw UsageError("td_target: batch sizes differ");
  }
  std::vector<double> y(rewards.size());
  for (std::size_t k = 0; k < y.size(); ++k) y[k] = rewards[k] + gamma * (1.0 - dones[k]) * psi[k];
  return y;
}

nn::Var critic_loss(nn::Tape& tape, nn::Var q_pred, std::span<const double> y) {
  const nn::Matrix& q = tape.value(q_pred);
  if (q.cols() != 1 || static_cast<std::size_t>(q.rows()) != y.size()) {
    throw UsageError("critic_loss: prediction must be N x 1 with N = target count");
  }
  nn::Matrix target(q.rows(), 1);
  for (std::size_t k = 0; k < y.size(); ++k) target(static_cast<Eigen::Index>(k), 0) = y[k];
  const nn::Var diff = tape.sub(tape.constant(std::move(target)), q_pred);
  return tape.mean(tape.square(diff));
}

nn::Var darc_coupling_penalty(nn::Tape& tape, nn::Var q1, nn::Var q2, double lambda) {
  if (!(lambda >= 0.0)) throw ConfigError("darc_coupling_penalty: lambda must be >= 0");
  return tape.scale(tape.mean(tape.square(tape.sub(q1, q2))), lambda);
}

}  // namespace tddr::reg
