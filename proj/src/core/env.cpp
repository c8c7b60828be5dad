#include "core/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "core/error.hpp"

namespace tddr::env {

namespace {

void check_action(std::span<const double> action, std::size_t dim) {
  if (action.size() != dim) {
    throw UsageError("env step: action has " + std::to_string(action.size()) + " entries, expected " +
                     std::to_string(dim));
  }
  for (double a : action) {
    if (std::isnan(a)) throw UsageError("env step: NaN action");
  }
}

}  // namespace

double wrap_angle(double theta) {
  constexpr double pi = std::numbers::pi;
  double x = std::fmod(theta + pi, 2.0 * pi);
  if (x < 0.0) x += 2.0 * pi;
  return x - pi;
}

std::vector<double> Pendulum::reset(std::uint64_t seed) {
  rng_ = Rng(seed);
  theta_ = rng_.uniform(-std::numbers::pi, std::numbers::pi);
  theta_dot_ = rng_.uniform(-1.0, 1.0);
  steps_ = 0;
  return observation();
}

StepResult Pendulum::step(std::span<const double> action) {
  check_action(action, 1);
  const double u = std::clamp(action[0], -kMaxTorque, kMaxTorque);
  const double th = wrap_angle(theta_);
  const double cost = th * th + 0.1 * theta_dot_ * theta_dot_ + 0.001 * u * u;

  // Semi-implicit Euler: velocity first, then position with the new velocity.
  const double accel = 3.0 * kGravity / (2.0 * kLength) * std::sin(theta_) + 3.0 / (kMass * kLength * kLength) * u;
  theta_dot_ = std::clamp(theta_dot_ + accel * kDt, -kMaxSpeed, kMaxSpeed);
  theta_ += theta_dot_ * kDt;
  ++steps_;

  StepResult r;
  r.next_state = observation();
  r.reward = -cost;
  r.terminal = false;
  r.done = steps_ >= kHorizon;
  return r;
}

std::vector<double> Pendulum::observation() const {
  return {std::cos(theta_), std::sin(theta_), theta_dot_};
}

double Pendulum::energy() const {
  return 0.5 * theta_dot_ * theta_dot_ + 3.0 * kGravity / (2.0 * kLength) * std::cos(theta_);
}

std::vector<double> PointMassReacher::reset(std::uint64_t seed) {
  rng_ = Rng(seed);
  const double x = rng_.uniform(-1.0, 1.0);
  const double y = rng_.uniform(-1.0, 1.0);
  state_ = {x, y, 0.0, 0.0};
  steps_ = 0;
  return observation();
}

StepResult PointMassReacher::step(std::span<const double> action) {
  check_action(action, 2);
  for (int k = 0; k < 2; ++k) {
    const double f = std::clamp(action[k], -kMaxForce, kMaxForce);
    double& v = state_[2 + k];
    v += kDt * (f / kMass - kDamping * v);
    state_[k] += kDt * v;
  }
  ++steps_;

  StepResult r;
  r.next_state = observation();
  r.reward = -std::hypot(state_[0], state_[1]);
  r.terminal = false;
  r.done = steps_ >= kHorizon;
  return r;
}

std::vector<double> PointMassReacher::observation() const { return state_; }

std::unique_ptr<Environment> make_environment(std::string_view name) {
  if (name == "pendulum") return std::make_unique<Pendulum>();
  if (name == "reacher") return std::make_unique<PointMassReacher>();
  throw ConfigError("unknown task '" + std::string(name) + "' (expected pendulum or reacher)");
}

}  // namespace tddr::env
