#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <tuple>
#include <vector>

#include "topicmod/cluster.hpp"
#include "topicmod/random.hpp"
#include "topicmod/synthetic.hpp"

namespace {

using namespace topicmod;

PointMatrix line(std::initializer_list<double> xs) {
  PointMatrix p(static_cast<Eigen::Index>(xs.size()), 1);
  Eigen::Index i = 0;
  for (double x : xs)
    p(i++, 0) = x;
  return p;
}

std::vector<std::size_t> sorted_sizes(const ClusterLabels &c) {
  auto s = c.sizes();
  std::sort(s.begin(), s.end());
  return s;
}

TEST(CoreDistances, Examples) {
  EXPECT_EQ(core_distances(line({0, 1, 3}), 1), (std::vector<double>{1, 1, 2}));
  EXPECT_EQ(core_distances(line({2, 2, 7}), 1), (std::vector<double>{0, 0, 5}));
  // k = n - 1 reaches the farthest point
  EXPECT_EQ(core_distances(line({0, 1, 3}), 2), (std::vector<double>{3, 2, 3}));
  EXPECT_EQ(core_distances(line({0, 1, 3}), 10), (std::vector<double>{3, 2, 3}));
}

TEST(MutualReachability, Examples) {
  EXPECT_EQ(mutual_reachability(5, 1, 2), 5);
  EXPECT_EQ(mutual_reachability(1, 3, 2), 3);
  EXPECT_EQ(mutual_reachability(0, 4, 4), 4);
}

TEST(Mst, PicksLightestEdges) {
  const auto mst = build_mst(line({0, 1, 3}), {0, 0, 0});
  ASSERT_EQ(mst.size(), 2u);
  double total = 0.0;
  for (const auto &e : mst)
    total += e.weight;
  EXPECT_EQ(total, 3.0); // edges of weight 1 and 2, not 3
  for (const auto &e : mst)
    EXPECT_LT(e.u, e.v);
}

TEST(Mst, EqualWeightsTakeLexicographicallySmallestEdges) {
  PointMatrix p(4, 2);
  p << 0, 0, 1, 0, 0, 1, 1, 1;
  const auto mst = build_mst(p, {10, 10, 10, 10});
  ASSERT_EQ(mst.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(mst[i].u, 0u);
    EXPECT_EQ(mst[i].v, i + 1);
    EXPECT_EQ(mst[i].weight, 10.0);
  }
}

// Kruskal over every pair with mutual reachability recomputed from scratch.
double kruskal_weight(const PointMatrix &p, std::size_t k) {
  const auto n = static_cast<std::size_t>(p.rows());
  std::vector<double> core(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> d;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i)
        d.push_back((p.row(i) - p.row(j)).norm());
    std::sort(d.begin(), d.end());
    core[i] = d[k - 1];
  }
  std::vector<std::tuple<double, std::size_t, std::size_t>> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      edges.emplace_back(std::max({core[i], core[j], (p.row(i) - p.row(j)).norm()}), i, j);
  std::sort(edges.begin(), edges.end());
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  const auto find = [&](std::size_t x) {
    while (parent[x] != x)
      x = parent[x] = parent[parent[x]];
    return x;
  };
  double total = 0.0;
  for (const auto &[w, i, j] : edges) {
    const auto a = find(i), b = find(j);
    if (a != b) {
      parent[a] = b;
      total += w;
    }
  }
  return total;
}

TEST(Mst, MatchesKruskalOnRandomPoints) {
  Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    PointMatrix p(25, 3);
    for (Eigen::Index i = 0; i < p.size(); ++i)
      p.data()[i] = rng.normal();
    const std::size_t k = 1 + rng.below(5);
    const auto mst = build_mst(p, core_distances(p, k));
    ASSERT_EQ(mst.size(), 24u);
    double total = 0.0;
    for (const auto &e : mst)
      total += e.weight;
    EXPECT_NEAR(total, kruskal_weight(p, k), 1e-9);
  }
}

TEST(Mst, TwoPoints) {
  const auto mst = build_mst(line({0, 4}), {0, 0});
  ASSERT_EQ(mst.size(), 1u);
  EXPECT_EQ(mst[0].weight, 4.0);
}

TEST(Hdbscan, TwoSeparatedBlobs) {
  const auto b = synthetic::gaussian_blobs(2, 20, 2, 1.0, 10.0, 5);
  HdbscanParams p;
  p.min_cluster_size = 5;
  const ClusterLabels c = cluster(b.points, p);
  EXPECT_EQ(c.n_clusters, 2u);
  EXPECT_EQ(std::count(c.labels.begin(), c.labels.end(), -1), 0);
  for (std::size_t i = 0; i < 40; ++i)
    EXPECT_EQ(c.labels[i], c.labels[(i / 20) * 20]) << i;
  EXPECT_NE(c.labels[0], c.labels[20]);
}

TEST(Hdbscan, OneBlobAndAFarPoint) {
  const auto b = synthetic::gaussian_blobs(1, 30, 2, 1.0, 0.0, 6);
  PointMatrix p(31, 2);
  p.topRows(30) = b.points;
  p.row(30) << 100.0, 100.0;
  HdbscanParams params;
  params.min_cluster_size = 5;
  const ClusterLabels c = cluster(p, params);
  EXPECT_EQ(c.n_clusters, 1u);
  EXPECT_EQ(c.labels[30], -1);
  EXPECT_EQ(std::count(c.labels.begin(), c.labels.end(), -1), 1);
}

TEST(Hdbscan, UnreachableMinSizeIsAllNoise) {
  Rng rng(8);
  PointMatrix p(20, 3);
  for (Eigen::Index i = 0; i < p.size(); ++i)
    p.data()[i] = rng.uniform();
  HdbscanParams params;
  params.min_cluster_size = 21;
  const ClusterLabels c = cluster(p, params);
  EXPECT_EQ(c.n_clusters, 0u);
  EXPECT_EQ(c.labels, std::vector<int>(20, -1));
}

TEST(Hdbscan, ClustersRespectMinSizeAndAreDenseBySize) {
  const auto b = synthetic::gaussian_blobs(4, 15, 3, 0.4, 6.0, 9);
  for (std::size_t mcs : {3u, 5u, 8u, 15u}) {
    HdbscanParams p;
    p.min_cluster_size = mcs;
    const ClusterLabels c = cluster(b.points, p);
    const auto sizes = c.sizes();
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      EXPECT_GE(sizes[k], mcs);
      if (k > 0)
        EXPECT_GE(sizes[k - 1], sizes[k]);
    }
  }
}

TEST(Hdbscan, PermutationInvariantHistogram) {
  const auto b = synthetic::gaussian_blobs(3, 25, 4, 0.5, 5.0, 10);
  HdbscanParams p;
  p.min_cluster_size = 6;
  const ClusterLabels base = cluster(b.points, p);

  std::vector<Eigen::Index> perm(static_cast<std::size_t>(b.points.rows()));
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(77);
  for (std::size_t i = perm.size() - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.below(i + 1)]);
  PointMatrix shuffled(b.points.rows(), b.points.cols());
  for (std::size_t i = 0; i < perm.size(); ++i)
    shuffled.row(static_cast<Eigen::Index>(i)) = b.points.row(perm[i]);

  const ClusterLabels moved = cluster(shuffled, p);
  EXPECT_EQ(sorted_sizes(moved), sorted_sizes(base));
  EXPECT_EQ(std::count(moved.labels.begin(), moved.labels.end(), -1),
            std::count(base.labels.begin(), base.labels.end(), -1));
}

TEST(Hdbscan, IdenticalPointsDoNotCrash) {
  PointMatrix p = PointMatrix::Constant(12, 2, 1.5);
  HdbscanParams params;
  params.min_cluster_size = 3;
  const ClusterLabels c = cluster(p, params);
  EXPECT_LE(c.n_clusters, 1u);
  EXPECT_EQ(c.labels.size(), 12u);
}

TEST(Hdbscan, ParamsValidation) {
  HdbscanParams p;
  p.min_cluster_size = 1;
  EXPECT_THROW(p.validate(), Error);
  p.min_cluster_size = 4;
  EXPECT_EQ(p.effective_min_samples(), 4u);
  p.min_samples = 2;
  EXPECT_EQ(p.effective_min_samples(), 2u);
}

TEST(Condense, LambdaIsCapped) {
  EXPECT_EQ(lambda_of(0.0), kMaxLambda);
  EXPECT_EQ(lambda_of(0.5), 2.0);
  EXPECT_EQ(lambda_of(1e-300), kMaxLambda);
}

} // namespace
