#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dtnav/nav_env.hpp"
#include "oracles/reward_cases.hpp"

using namespace dtnav;

namespace {

World open_world(Pose start, Vec2 goal) {
  World w;
  w.bounds = {0, 0, 10, 10};
  w.start = start;
  w.goal = goal;
  return w;
}

LaserScan empty_scan() {
  LaserScan s;
  s.ranges.assign(180, kNoReturn);
  return s;
}

}  // namespace

TEST(Reward, TableCases) {
  const auto cases = oracle::reward_cases();
  ASSERT_GE(cases.size(), 20u);
  for (const auto& c : cases) {
    const double r = compute_reward(c.event, c.dist, c.action, c.heading, c.target, c.robot);
    if (c.event == StepEvent::GoalReached || c.event == StepEvent::Collision) {
      EXPECT_EQ(r, c.expected) << c.name;
    } else {
      EXPECT_NEAR(r, c.expected, 1e-12) << c.name;
    }
  }
}

TEST(Reward, DegenerateTargetRejected) {
  EXPECT_THROW(compute_reward(StepEvent::None, 0.0, {0, 0}, {1, 0}, {1, 1}, {1, 1}), ValidationError);
}

TEST(Reward, ContinuousAtOneMetre) {
  const auto r = [](double dist) { return compute_reward(StepEvent::None, dist, {0, 0}, {0, 1}, {1, 0}, {0, 0}); };
  EXPECT_NEAR(r(1.0 - 1e-12), r(1.0), 1e-12);
  EXPECT_NEAR(r(1.0 + 1e-12), r(1.0), 1e-12);
}

TEST(Reward, OrientationScaleKnob) {
  RewardParams p;
  p.orientation_scale = 2.0;
  EXPECT_NEAR(compute_reward(StepEvent::None, 3.0, {-1, 0}, {1, 0}, {4, 0}, {0, 0}, p), -0.5 + 2.0, 1e-12);
}

TEST(Action, Mapping) {
  const MotionLimits lim{0.8, 1.5};
  EXPECT_EQ((Action{-1, 0}).v(lim), 0.0);
  EXPECT_EQ((Action{1, 0}).v(lim), 0.8);
  EXPECT_DOUBLE_EQ((Action{0, 0}).v(lim), 0.4);
  EXPECT_EQ((Action{0, 3}).w(lim), 1.5);
  EXPECT_EQ((Action{0, -3}).w(lim), -1.5);
  EXPECT_EQ((Action{2, -2}).clamped(), (Action{1, -1}));
}

TEST(BuildState, EmptyWorldBinsAreOne) {
  const auto s = build_state(empty_scan(), {4.9, 5, 0}, {5, 5}, kStopAction, {});
  ASSERT_EQ(s.lidar_bins.size(), 20u);
  for (double b : s.lidar_bins) EXPECT_EQ(b, 1.0);
}

TEST(BuildState, AlignedGoalHasZeroHeading) {
  const auto s = build_state(empty_scan(), {1, 1, std::numbers::pi / 4}, {4, 4}, kStopAction, {});
  EXPECT_NEAR(s.goal_heading, 0.0, 1e-15);
}

TEST(BuildState, GoalDistanceNormalization) {
  const auto s = build_state(empty_scan(), {2, 5, 0}, {7, 5}, kStopAction, {});
  EXPECT_NEAR(s.goal_dist, 5.0 / (10.0 * std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(s.goal_dist, 0.3536, 1e-4);
}

TEST(BuildState, HeadingSignAndRange) {
  // Goal to the left is positive, directly behind is +1.
  EXPECT_NEAR(build_state(empty_scan(), {0, 0, 0}, {0, 3}, kStopAction, {}).goal_heading, 0.5, 1e-15);
  EXPECT_NEAR(build_state(empty_scan(), {0, 0, 0}, {0, -3}, kStopAction, {}).goal_heading, -0.5, 1e-15);
  EXPECT_NEAR(build_state(empty_scan(), {0, 0, 0}, {-3, 0}, kStopAction, {}).goal_heading, 1.0, 1e-15);
}

TEST(BuildState, MinPooling) {
  LaserScan s = empty_scan();
  s.ranges[0] = 5.0;
  s.ranges[3] = 2.0;
  s.ranges[9] = 0.0;
  s.ranges[179] = 12.0;
  const auto st = build_state(s, {0, 0, 0}, {3, 0}, {0.5, -0.5}, {});
  EXPECT_DOUBLE_EQ(st.lidar_bins[0], 0.2);
  EXPECT_DOUBLE_EQ(st.lidar_bins[1], 0.0);
  EXPECT_DOUBLE_EQ(st.lidar_bins[19], 1.0);
  EXPECT_DOUBLE_EQ(st.prev_v, 0.75);
  EXPECT_DOUBLE_EQ(st.prev_w, -0.5);
  EXPECT_EQ(st.features().size(), 24u);
}

TEST(BuildState, BinsMustDivideBeams) {
  StateParams p;
  p.n_bins = 7;
  EXPECT_THROW(build_state(empty_scan(), {0, 0, 0}, {1, 0}, kStopAction, p), ValidationError);
}

TEST(BuildState, FeaturesFiniteAndBounded) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.5, 9.5), ang(-4, 4), act(-2, 2);
  World w = open_world({0, 0, 0}, {0, 0});
  w.obstacles = {{5, 5, 1, 1}};
  for (int i = 0; i < 200; ++i) {
    const Pose p{u(rng), u(rng), ang(rng)};
    const auto scan = simulate_scan(w, p, {});
    const auto st = build_state(scan, p, {u(rng), u(rng)}, {act(rng), act(rng)}, {});
    for (double f : st.features()) {
      ASSERT_TRUE(std::isfinite(f));
      ASSERT_LE(std::abs(f), 1.0 + 1e-12);
    }
  }
}

TEST(NavEnv, StopActionTimesOut) {
  EnvConfig cfg;
  cfg.step_budget = 50;
  NavEnv env(cfg);
  env.reset(open_world({2, 2, 0}, {8, 8}));
  StepResult r;
  int n = 0;
  while (!env.done()) {
    r = env.step(kStopAction);
    ++n;
  }
  EXPECT_EQ(r.event, StepEvent::Timeout);
  EXPECT_EQ(n, 50);
  EXPECT_THROW(env.step(kStopAction), ValidationError);
}

TEST(NavEnv, DriveIntoGoal) {
  NavEnv env;
  env.reset(open_world({2, 5, 0}, {3.05, 5}));
  StepResult r;
  while (!env.done()) r = env.step({1, 0});
  EXPECT_EQ(r.event, StepEvent::GoalReached);
  EXPECT_EQ(r.reward, 100.0);
  // 0.1 m per step: 0.35 m left after 7 steps, 0.25 m after 8.
  EXPECT_EQ(env.steps(), 8);
}

TEST(NavEnv, DriveIntoObstacle) {
  World w = open_world({2, 5, 0}, {8, 5});
  w.obstacles = {{5, 5, 1, 1}};
  NavEnv env;
  env.reset(w);
  StepResult r;
  while (!env.done()) r = env.step({1, 0});
  EXPECT_EQ(r.event, StepEvent::Collision);
  EXPECT_EQ(r.reward, -100.0);
  EXPECT_LT(distance_to_box(env.robot().pose.position(), w.obstacles[0]), 0.5);
}

TEST(NavEnv, CollisionWinsOverGoal) {
  World w = open_world({5, 5, 0}, {5.1, 5});
  w.obstacles = {{5.6, 5, 0.5, 0.5}};
  NavEnv env;
  env.reset(w);
  EXPECT_EQ(env.classify({5.05, 5, 0}, 1), StepEvent::Collision);
  EXPECT_EQ(env.classify({5.05, 5, 0}, 500), StepEvent::Collision);
}

TEST(NavEnv, ResetIsRepeatable) {
  NavEnv env;
  const World w = open_world({1, 1, 0.3}, {9, 9});
  const auto a = env.reset(w).features();
  env.step({0.2, 0.4});
  const auto b = env.reset(w).features();
  EXPECT_EQ(a, b);
  EXPECT_EQ(env.steps(), 0);
}
