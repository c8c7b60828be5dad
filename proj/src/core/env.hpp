#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "core/rng.hpp"

namespace tddr::env {

struct StepResult {
  std::vector<double> next_state;
  double reward = 0.0;
  // Episode over: horizon reached or terminal predicate fired.
  bool done = false;
  // Terminal predicate fired (true absorbing state, not a time limit). Only
  // this flag masks bootstrapping.
  bool terminal = false;
};

// Continuous-control task with a symmetric box action space.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t observation_dim() const = 0;
  virtual std::size_t action_dim() const = 0;
  virtual double action_bound() const = 0;
  virtual int horizon() const = 0;

  // Reseeds the internal generator and draws an initial state.
  virtual std::vector<double> reset(std::uint64_t seed) = 0;
  // Actions are clamped to the bound before the dynamics run. NaN throws UsageError.
  virtual StepResult step(std::span<const double> action) = 0;
  virtual std::vector<double> observation() const = 0;
  virtual int elapsed_steps() const = 0;
};

// Pendulum swing-up. theta = 0 is upright, theta = pi hangs down.
// Observation (cos theta, sin theta, theta_dot); torque in [-2, 2];
// reward -(theta^2 + 0.1 theta_dot^2 + 0.001 u^2) with theta wrapped to
// [-pi, pi) and evaluated before the tick; horizon 200.
class Pendulum final : public Environment {
 public:
  static constexpr double kGravity = 10.0;
  static constexpr double kMass = 1.0;
  static constexpr double kLength = 1.0;
  static constexpr double kDt = 0.05;
  static constexpr double kMaxSpeed = 8.0;
  static constexpr double kMaxTorque = 2.0;
  static constexpr int kHorizon = 200;

  std::string_view name() const override { return "pendulum"; }
  std::size_t observation_dim() const override { return 3; }
  std::size_t action_dim() const override { return 1; }
  double action_bound() const override { return kMaxTorque; }
  int horizon() const override { return kHorizon; }

  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  std::vector<double> observation() const override;
  int elapsed_steps() const override { return steps_; }

  double angle() const { return theta_; }
  double angular_velocity() const { return theta_dot_; }
  void set_state(double theta, double theta_dot) {
    theta_ = theta;
    theta_dot_ = theta_dot;
  }
  // Conserved quantity of the undamped, unforced dynamics (per unit inertia).
  double energy() const;

 private:
  double theta_ = 0.0;
  double theta_dot_ = 0.0;
  int steps_ = 0;
  Rng rng_;
};

// Point mass on a plane driven toward the origin.
// State (x, y, vx, vy); force in [-1, 1]^2; reward = -distance to goal after
// the tick; horizon 100. Initial position uniform in [-1, 1]^2, at rest.
class PointMassReacher final : public Environment {
 public:
  static constexpr double kDt = 0.05;
  static constexpr double kMass = 1.0;
  static constexpr double kDamping = 0.5;
  static constexpr double kMaxForce = 1.0;
  static constexpr int kHorizon = 100;

  std::string_view name() const override { return "reacher"; }
  std::size_t observation_dim() const override { return 4; }
  std::size_t action_dim() const override { return 2; }
  double action_bound() const override { return kMaxForce; }
  int horizon() const override { return kHorizon; }

  std::vector<double> reset(std::uint64_t seed) override;
  StepResult step(std::span<const double> action) override;
  std::vector<double> observation() const override;
  int elapsed_steps() const override { return steps_; }

  void set_state(double x, double y, double vx, double vy) { state_ = {x, y, vx, vy}; }

 private:
  std::vector<double> state_ = std::vector<double>(4, 0.0);
  int steps_ = 0;
  Rng rng_;
};

// "pendulum" or "reacher"; anything else throws ConfigError.
std::unique_ptr<Environment> make_environment(std::string_view name);

double wrap_angle(double theta);

}  // namespace tddr::env
