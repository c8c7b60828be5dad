#include "doctest.h"

#include <cmath>
#include <limits>
#include <numbers>

#include "core/env.hpp"
#include "core/error.hpp"
#include "core/mdp.hpp"
#include "oracle_values.hpp"

using namespace tddr;
using namespace tddr::env;

TEST_CASE("pendulum: reset is a pure function of the seed") {
  Pendulum a, b;
  CHECK(a.reset(0) == b.reset(0));
  CHECK(a.reset(1) != b.reset(0));
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    a.reset(seed);
    CHECK(a.angle() >= -std::numbers::pi);
    CHECK(a.angle() <= std::numbers::pi);
    CHECK(std::abs(a.angular_velocity()) <= 1.0);
  }
}

TEST_CASE("pendulum: hanging at rest stays put") {
  Pendulum p;
  p.reset(0);
  p.set_state(std::numbers::pi, 0.0);
  const double u = 0.0;
  p.step({&u, 1});
  CHECK(std::abs(p.angle() - std::numbers::pi) < 1e-9);
  CHECK(std::abs(p.angular_velocity()) < 1e-9);
}

TEST_CASE("pendulum: one tick matches the Euler oracle") {
  Pendulum p;
  p.reset(0);
  for (const auto& c : oracle::pendulum_cases) {
    p.set_state(c.theta, c.theta_dot);
    const StepResult r = p.step({&c.u, 1});
    CHECK(p.angle() == doctest::Approx(c.next_theta).epsilon(1e-13));
    CHECK(p.angular_velocity() == doctest::Approx(c.next_theta_dot).epsilon(1e-13));
    CHECK(r.reward == doctest::Approx(c.reward).epsilon(1e-13));
    CHECK(r.next_state[0] == doctest::Approx(std::cos(c.next_theta)));
    CHECK_FALSE(r.terminal);
  }
}

TEST_CASE("pendulum: energy drift stays bounded without torque") {
  Pendulum p;
  p.reset(0);
  p.set_state(2.0, 0.0);
  const double e0 = p.energy();
  const double u = 0.0;
  double worst = 0.0;
  for (int k = 0; k < 199; ++k) {
    const double before = p.energy();
    p.step({&u, 1});
    worst = std::max(worst, std::abs(p.energy() - before));
    CHECK(std::abs(p.energy() - e0) < 0.1 * std::abs(e0) + 1.0);
  }
  // Semi-implicit Euler: per-tick error O(dt) in energy for this amplitude.
  CHECK(worst < 15.0 * Pendulum::kDt);
}

TEST_CASE("pendulum: horizon, clamping and bad actions") {
  Pendulum p;
  p.reset(3);
  const double big = 50.0;
  StepResult r;
  for (int k = 0; k < Pendulum::kHorizon; ++k) {
    CHECK_FALSE(r.done);
    r = p.step({&big, 1});
    CHECK(std::isfinite(r.reward));
    CHECK(std::abs(p.angular_velocity()) <= Pendulum::kMaxSpeed);
  }
  CHECK(r.done);
  CHECK_FALSE(r.terminal);

  Pendulum q;
  q.reset(0);
  q.set_state(0.3, 0.0);
  const double clamped = 2.0;
  const StepResult a = q.step({&big, 1});
  q.set_state(0.3, 0.0);
  const StepResult b = q.step({&clamped, 1});
  CHECK(a.next_state == b.next_state);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(p.step({&nan, 1}), UsageError);
  const double two[2] = {0.0, 0.0};
  CHECK_THROWS_AS(p.step({two, 2}), UsageError);
}

TEST_CASE("reacher: reset range, goal reward and dynamics") {
  PointMassReacher env;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto s = env.reset(seed);
    CHECK(std::abs(s[0]) <= 1.0);
    CHECK(std::abs(s[1]) <= 1.0);
    CHECK(s[2] == 0.0);
    CHECK(s[3] == 0.0);
  }
  env.set_state(0, 0, 0, 0);
  const double zero[2] = {0.0, 0.0};
  StepResult r = env.step(zero);
  CHECK(r.reward == 0.0);

  env.set_state(0.5, 0.0, 0.0, 0.0);
  const double push[2] = {3.0, -1.0};  // clamped to (1, -1)
  r = env.step(push);
  const double vx = 0.05 * 1.0, vy = 0.05 * -1.0;
  CHECK(r.next_state[2] == doctest::Approx(vx));
  CHECK(r.next_state[3] == doctest::Approx(vy));
  CHECK(r.next_state[0] == doctest::Approx(0.5 + 0.05 * vx));
  CHECK(r.reward == doctest::Approx(-std::hypot(0.5 + 0.05 * vx, 0.05 * vy)));

  env.reset(0);
  for (int k = 0; k < PointMassReacher::kHorizon; ++k) r = env.step(zero);
  CHECK(r.done);
  CHECK_THROWS_AS(env.step({zero, 1}), UsageError);
}

TEST_CASE("make_environment: known and unknown names") {
  CHECK(make_environment("pendulum")->name() == "pendulum");
  CHECK(make_environment("reacher")->action_dim() == 2u);
  CHECK_THROWS_AS(make_environment("cartpole"), ConfigError);
}

TEST_CASE("mdp: 1x1 MDP is forced, seeds replay, rows normalize") {
  const MdpSpec one = make_random_mdp(1, 1, 5);
  CHECK(one.transition == std::vector<double>{1.0});

  const MdpSpec a = make_random_mdp(6, 4, 7), b = make_random_mdp(6, 4, 7);
  CHECK(a.transition == b.transition);
  CHECK(a.reward == b.reward);

  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const MdpSpec m = make_random_mdp(5, 3, seed, seed % 2 ? 0.6 : 0.0);
    for (int s = 0; s < m.n_states; ++s) {
      for (int act = 0; act < m.n_actions; ++act) {
        double sum = 0.0;
        for (int t = 0; t < m.n_states; ++t) sum += m.p(s, act, t);
        CHECK(std::abs(sum - 1.0) < 1e-12);
        CHECK(std::abs(m.r(s, act)) <= 1.0);
      }
    }
  }
}

TEST_CASE("mdp: validation rejects bad specs") {
  MdpSpec m = make_random_mdp(2, 2, 0);
  m.transition[0] += 0.1;
  CHECK_THROWS_AS(m.validate(), ConfigError);
  MdpSpec g = make_random_mdp(2, 2, 0);
  g.gamma = 1.0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("value iteration: closed forms") {
  MdpSpec one;
  one.n_states = 1;
  one.n_actions = 1;
  one.transition = {1.0};
  one.reward = {1.0};
  one.gamma = 0.5;
  CHECK(value_iteration(one, 1e-12).q[0] == doctest::Approx(2.0).epsilon(1e-11));

  MdpSpec zero = make_random_mdp(4, 3, 2, 0.0, 0.0);
  CHECK(value_iteration(zero, 1e-12).q == zero.reward);

  // State 0 -> state 1 with reward 0; state 1 absorbing with reward 1.
  // By hand: Q*(1) = 1 / (1 - 0.9) = 10, Q*(0) = 0 + 0.9 * 10 = 9.
  MdpSpec chain;
  chain.n_states = 2;
  chain.n_actions = 1;
  chain.transition = {0.0, 1.0, 0.0, 1.0};
  chain.reward = {0.0, 1.0};
  chain.gamma = 0.9;
  const auto q = value_iteration(chain, 1e-12).q;
  CHECK(q[0] == doctest::Approx(9.0).epsilon(1e-10));
  CHECK(q[1] == doctest::Approx(10.0).epsilon(1e-10));

  MdpSpec bad = chain;
  bad.gamma = 1.0;
  CHECK_THROWS_AS(value_iteration(bad, 1e-10), ConfigError);
}

TEST_CASE("value iteration: contraction and residual bound") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const MdpSpec m = make_random_mdp(6, 4, seed);
    const auto result = value_iteration(m, 1e-10);
    for (std::size_t k = 1; k < result.sup_deltas.size(); ++k) {
      CHECK(result.sup_deltas[k] <= result.sup_deltas[k - 1] + 1e-15);
    }
    CHECK(result.sup_deltas.back() < 1e-10);
    CHECK(bellman_residual(m, result.q) < 1e-10 / (1.0 - m.gamma));
  }
}

TEST_CASE("mdp: json round trip and malformed input") {
  MdpSpec m = make_random_mdp(3, 2, 4);
  m.reward_noise = 0.25;
  const MdpSpec back = mdp_from_json(mdp_to_json(m));
  CHECK(back.transition == m.transition);
  CHECK(back.reward == m.reward);
  CHECK(back.gamma == m.gamma);
  CHECK(back.reward_noise == m.reward_noise);
  CHECK_THROWS_AS(mdp_from_json("{\"states\": 2}"), ConfigError);
  CHECK_THROWS_AS(mdp_from_json("not json"), ConfigError);
  CHECK_THROWS_AS(load_mdp("/nonexistent/mdp.json"), IoError);
}

TEST_CASE("mdp: reward noise stays within its width") {
  MdpSpec m = make_random_mdp(2, 2, 1);
  m.reward_noise = 0.4;
  Rng rng(0);
  for (int k = 0; k < 1000; ++k) CHECK(std::abs(m.sample_reward(0, 1, rng) - m.r(0, 1)) <= 0.2);
}
