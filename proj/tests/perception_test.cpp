#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "dtnav/perception.hpp"
#include "oracles/dbscan_oracle.hpp"

using namespace dtnav;

namespace {

LaserScan scan_with(std::vector<double> ranges, double angle_min = 0.0, double angle_max = 1.0) {
  LaserScan s;
  s.params.n_beams = static_cast<int>(ranges.size());
  s.params.angle_min = angle_min;
  s.params.angle_max = angle_max;
  s.ranges = std::move(ranges);
  return s;
}

std::vector<Point2> random_points(std::mt19937_64& rng, int n, double extent) {
  std::uniform_real_distribution<double> u(0.0, extent);
  std::vector<Point2> pts;
  for (int i = 0; i < n; ++i) pts.push_back({u(rng), u(rng)});
  return pts;
}

}  // namespace

TEST(ScanToPoints, AllMissesGiveNoPoints) {
  EXPECT_TRUE(scan_to_points(scan_with({kNoReturn, kNoReturn, kNoReturn}), {0, 0, 0}).empty());
}

TEST(ScanToPoints, ZeroRangesAreDropped) {
  // A literal replace-with-zero would put points at the sensor origin.
  EXPECT_TRUE(scan_to_points(scan_with({0.0, 0.0}), {1, 1, 0}).empty());
}

TEST(ScanToPoints, PolarIdentity) {
  const auto pts = scan_to_points(scan_with({2.5, kNoReturn}, 0.0, 1.0), {0, 0, 0});
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_DOUBLE_EQ(pts[0].x, 2.5);
  EXPECT_DOUBLE_EQ(pts[0].y, 0.0);
}

TEST(ScanToPoints, FrameComposition) {
  const auto pts = scan_to_points(scan_with({2.0, kNoReturn}, 0.0, 1.0), {1, 1, std::numbers::pi / 2});
  ASSERT_EQ(pts.size(), 1u);
  EXPECT_NEAR(pts[0].x, 1.0, 1e-12);
  EXPECT_NEAR(pts[0].y, 3.0, 1e-12);
}

TEST(RegionQuery, SinglePointContainsItself) {
  EXPECT_EQ(region_query({1, 1}, {{1, 1}}, 0.1), std::vector<std::size_t>{0});
}

TEST(RegionQuery, BoundaryIsInclusive) {
  const double eps = 0.35;
  const auto n = region_query({0, 0}, {{0, 0}, {eps, 0}, {eps + 1e-9, 0}}, eps);
  EXPECT_EQ(n, (std::vector<std::size_t>{0, 1}));
}

TEST(RegionQuery, MatchesBruteForceAndIsSymmetric) {
  std::mt19937_64 rng(5);
  const auto pts = random_points(rng, 100, 3.0);
  const double eps = 0.4;
  for (std::size_t p = 0; p < pts.size(); ++p) {
    std::vector<std::size_t> expected;
    for (std::size_t q = 0; q < pts.size(); ++q) {
      const double dx = pts[p].x - pts[q].x, dy = pts[p].y - pts[q].y;
      if (dx * dx + dy * dy <= eps * eps * (1 + 1e-15)) expected.push_back(q);
    }
    const auto got = region_query(pts[p], pts, eps);
    ASSERT_EQ(got, expected);
    for (auto q : got) {
      const auto back = region_query(pts[q], pts, eps);
      ASSERT_NE(std::find(back.begin(), back.end(), p), back.end());
    }
  }
}

TEST(Dbscan, EmptyInput) {
  const auto r = dbscan({}, 0.3, 3);
  EXPECT_EQ(r.cluster_count, 0);
  EXPECT_TRUE(r.labels.empty());
}

TEST(Dbscan, SinglePointMinPtsOne) {
  const auto r = dbscan({{4, 2}}, 0.3, 1);
  EXPECT_EQ(r.cluster_count, 1);
  EXPECT_EQ(r.labels, std::vector<int>{0});
}

TEST(Dbscan, TwoBlobsNoNoise) {
  const double eps = 0.3;
  std::vector<Point2> pts;
  for (int i = 0; i < 5; ++i) pts.push_back({0.2 * i, 0.0});
  for (int i = 0; i < 5; ++i) pts.push_back({5.0 + 0.2 * i, 0.0});
  const auto r = dbscan(pts, eps, 3);
  EXPECT_EQ(r.cluster_count, 2);
  for (int l : r.labels) EXPECT_GE(l, 0);
  EXPECT_EQ(r.members(0).size(), 5u);
  EXPECT_EQ(r.members(1).size(), 5u);
  int ref_clusters = 0;
  EXPECT_EQ(oracle::reference_dbscan(pts, eps, 3, &ref_clusters), r.labels);
  EXPECT_EQ(ref_clusters, 2);
}

TEST(Dbscan, NoiseIsLaterUpgradedToBorder) {
  // Point 0 is visited first with too few neighbors, then reached from core point 1's cluster.
  const std::vector<Point2> pts{{0, 0}, {0.3, 0}, {0.6, 0}, {0.6, 0.3}};
  const auto r = dbscan(pts, 0.31, 3);
  EXPECT_EQ(r.labels, (std::vector<int>{0, 0, 0, 0}));
}

TEST(Dbscan, BorderPointJoinsFirstClusterThatReachesIt) {
  // Point 2 sits between two dense groups but is not core itself.
  const std::vector<Point2> pts{{-1.0, 0}, {-1.0, 0.1}, {-0.55, 0}, {0, 0}, {-0.1, 0}, {-0.1, 0.1}};
  const double eps = 0.5;
  // Groups: {0,1} reach 2; {3,4,5} reach 2 as well.
  const auto r = dbscan(pts, eps, 3);
  EXPECT_EQ(r.labels, oracle::reference_dbscan(pts, eps, 3));
}

TEST(Dbscan, RandomInstancesMatchReference) {
  std::mt19937_64 rng(123);
  std::uniform_int_distribution<int> size(0, 120);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pts = random_points(rng, size(rng), 4.0);
    for (double eps : {0.2, 0.35, 0.5}) {
      for (int min_pts : {1, 3, 5}) {
        const auto r = dbscan(pts, eps, min_pts);
        ASSERT_EQ(r.labels, oracle::reference_dbscan(pts, eps, min_pts)) << trial;
      }
    }
  }
}

TEST(Dbscan, ClusteredPointsAreChainReachable) {
  std::mt19937_64 rng(77);
  const auto pts = random_points(rng, 150, 4.0);
  const double eps = 0.35;
  const auto r = dbscan(pts, eps, 3);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (r.labels[i] < 0) continue;
    bool near_member = false;
    for (auto j : r.members(r.labels[i])) {
      if (j != i && std::hypot(pts[i].x - pts[j].x, pts[i].y - pts[j].y) <= eps) near_member = true;
    }
    EXPECT_TRUE(near_member || r.members(r.labels[i]).size() == 1);
  }
}

TEST(ClusterProperties, DegeneratePointIsInflated) {
  const auto e = cluster_properties({{2, 0}}, {0, 0, 0}, 0.2);
  EXPECT_DOUBLE_EQ(e.center.x, 2.0);
  EXPECT_DOUBLE_EQ(e.center.y, 0.0);
  EXPECT_DOUBLE_EQ(e.width, 0.2);
  EXPECT_DOUBLE_EQ(e.height, 0.2);
  EXPECT_DOUBLE_EQ(e.distance_to_robot, 2.0);
}

TEST(ClusterProperties, ExtentsByHand) {
  const auto e = cluster_properties({{1, 1}, {2, 1}, {1, 3}}, {0, 0, 0}, 0.2);
  EXPECT_DOUBLE_EQ(e.center.x, 1.5);
  EXPECT_DOUBLE_EQ(e.center.y, 2.0);
  EXPECT_DOUBLE_EQ(e.width, 1.0);
  EXPECT_DOUBLE_EQ(e.height, 2.0);
  EXPECT_DOUBLE_EQ(e.distance_to_robot, 2.5);
}

TEST(ClusterProperties, CenteredOnRobot) {
  const auto e = cluster_properties({{-1, -1}, {1, 1}}, {0, 0, 0}, 0.2);
  EXPECT_DOUBLE_EQ(e.distance_to_robot, 0.0);
}

TEST(ClusterProperties, BoxContainsEveryPoint) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = random_points(rng, 1 + trial % 20, 2.0);
    const auto e = cluster_properties(pts, {0, 0, 0}, 0.2);
    for (const auto& p : pts) {
      ASSERT_LE(std::abs(p.x - e.center.x), e.width / 2 + 1e-12);
      ASSERT_LE(std::abs(p.y - e.center.y), e.height / 2 + 1e-12);
    }
  }
  EXPECT_THROW(cluster_properties({}, {0, 0, 0}, 0.2), ValidationError);
}

TEST(ReconstructWorld, EmptyScan) {
  LaserScan scan;
  scan.ranges.assign(180, kNoReturn);
  const auto w = reconstruct_world(scan, {0, 0, 0}, {5, 0}, {-10, -10, 10, 10}, {});
  EXPECT_TRUE(w.obstacles.empty());
  EXPECT_EQ(w.goal, (Vec2{5, 0}));
}

TEST(ReconstructWorld, SingleBoxAhead) {
  World truth;
  truth.bounds = {-10, -10, 10, 10};
  truth.obstacles = {{3, 0, 1, 1}};
  const Pose robot{0, 0, 0};
  const auto scan = simulate_scan(truth, robot, {});
  PerceptionParams params;
  const auto w = reconstruct_world(scan, robot, {8, 0}, truth.bounds, params);
  ASSERT_EQ(w.obstacles.size(), 1u);
  // Visible face x = 2.5, y in [-0.5, 0.5].
  EXPECT_LT(std::hypot(w.obstacles[0].cx - 2.5, w.obstacles[0].cy), params.eps);
  EXPECT_EQ(w.start, robot);
}

TEST(ReconstructWorld, TwoSeparatedBoxesAndDeterminism) {
  World truth;
  truth.bounds = {-10, -10, 10, 10};
  truth.obstacles = {{3, 0, 1, 1}, {-2, 3, 1.5, 0.8}};
  const Pose robot{0, 0, 0.4};
  const auto scan = simulate_scan(truth, robot, {});
  const auto a = reconstruct_world(scan, robot, {8, 0}, truth.bounds, {});
  EXPECT_EQ(a.obstacles.size(), 2u);
  EXPECT_EQ(a, reconstruct_world(scan, robot, {8, 0}, truth.bounds, {}));
}
