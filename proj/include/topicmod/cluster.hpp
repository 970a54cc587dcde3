#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"

namespace topicmod {

struct HdbscanParams {
  std::size_t min_cluster_size = 10;
  /// Defaults to min_cluster_size.
  std::optional<std::size_t> min_samples;

  std::size_t effective_min_samples() const {
    return min_samples.value_or(min_cluster_size);
  }

  void validate() const {
    if (min_cluster_size < 2)
      throw Error(ErrorKind::invalid_config, "min_cluster_size must be >= 2");
    if (effective_min_samples() < 1)
      throw Error(ErrorKind::invalid_config, "min_samples must be >= 1");
  }
};

struct ClusterLabels {
  std::vector<int> labels; // -1 = outlier
  std::size_t n_clusters = 0;

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> s(n_clusters, 0);
    for (int l : labels)
      if (l >= 0)
        ++s[static_cast<std::size_t>(l)];
    return s;
  }
};

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline double euclidean(const PointMatrix &points, std::size_t a, std::size_t b) {
  return (points.row(static_cast<Eigen::Index>(a)) - points.row(static_cast<Eigen::Index>(b))).norm();
}

/// Distance to the k-th nearest neighbour, self excluded. k is clamped to
/// n - 1.
inline std::vector<double> core_distances(const PointMatrix &points, std::size_t k) {
  const auto n = static_cast<std::size_t>(points.rows());
  std::vector<double> core(n, 0.0);
  if (n < 2 || k == 0)
    return core;
  k = std::min(k, n - 1);
  std::vector<double> d;
  d.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    d.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i)
        d.push_back(euclidean(points, i, j));
    std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k - 1), d.end());
    core[i] = d[k - 1];
  }
  return core;
}

inline double mutual_reachability(double distance, double core_a, double core_b) noexcept {
  return std::max({core_a, core_b, distance});
}

struct MstEdge {
  std::size_t u; // u < v
  std::size_t v;
  double weight;
};

namespace detail {

inline bool edge_less(double wa, std::size_t ua, std::size_t va, double wb, std::size_t ub,
                      std::size_t vb) noexcept {
  return std::tie(wa, ua, va) < std::tie(wb, ub, vb);
}

} // namespace detail

/// Prim's algorithm on the complete mutual-reachability graph, O(n^2).
/// Among equal weights the edge with the lower (smaller, larger) endpoint
/// pair wins.
inline std::vector<MstEdge> build_mst(const PointMatrix &points, const std::vector<double> &core) {
  const auto n = static_cast<std::size_t>(points.rows());
  std::vector<MstEdge> mst;
  if (n < 2)
    return mst;
  mst.reserve(n - 1);
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<bool> in_tree(n, false);
  std::vector<MstEdge> best(n, MstEdge{n, n, inf});
  std::size_t current = 0;
  in_tree[0] = true;
  for (std::size_t step = 1; step < n; ++step) {
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v])
        continue;
      const double w = mutual_reachability(euclidean(points, current, v), core[current], core[v]);
      const std::size_t lo = std::min(current, v);
      const std::size_t hi = std::max(current, v);
      if (detail::edge_less(w, lo, hi, best[v].weight, best[v].u, best[v].v))
        best[v] = {lo, hi, w};
    }
    std::size_t next = n;
    for (std::size_t v = 0; v < n; ++v) {
      if (in_tree[v])
        continue;
      if (next == n || detail::edge_less(best[v].weight, best[v].u, best[v].v, best[next].weight,
                                         best[next].u, best[next].v))
        next = v;
    }
    mst.push_back(best[next]);
    in_tree[next] = true;
    current = next;
  }
  return mst;
}

/// One row of the condensed tree: `child` left `parent` at `lambda`.
/// Children below n are points, the rest are clusters (offset by n).
struct CondensedEntry {
  std::size_t parent;
  std::size_t child;
  double lambda;
  std::size_t size;
};

struct CondensedTree {
  std::size_t n_points = 0;
  std::size_t n_clusters = 0; // cluster c has id n_points + c; 0 is the root
  std::vector<CondensedEntry> entries;
  std::vector<double> birth;  // per cluster
  std::vector<std::size_t> parent_of; // per cluster; root points to itself
};

/// Merge heights are mapped to lambda = 1 / distance; zero distances
/// (duplicate points) get this finite ceiling.
inline constexpr double kMaxLambda = 1e100;

inline double lambda_of(double distance) noexcept {
  return distance > 0.0 ? std::min(1.0 / distance, kMaxLambda) : kMaxLambda;
}

/// Single-linkage dendrogram from the MST, condensed with the given
/// minimum cluster size. The root (the whole data set) is never itself a
/// candidate: the first time it sheds undersized fragments, the remaining
/// component is promoted to a candidate cluster born at that lambda.
inline CondensedTree condense(const std::vector<MstEdge> &mst, std::size_t n,
                              std::size_t min_cluster_size) {
  CondensedTree tree;
  tree.n_points = n;
  if (n == 0)
    return tree;

  // Single-linkage tree. Node ids: points 0..n-1, merges n..2n-2.
  std::vector<MstEdge> edges = mst;
  std::sort(edges.begin(), edges.end(), [](const MstEdge &a, const MstEdge &b) {
    return detail::edge_less(a.weight, a.u, a.v, b.weight, b.u, b.v);
  });
  struct Node {
    std::size_t left, right;
    double distance;
    std::size_t size;
  };
  std::vector<Node> nodes;
  nodes.reserve(n > 0 ? n - 1 : 0);
  std::vector<std::size_t> uf_parent(2 * n, 0);
  std::iota(uf_parent.begin(), uf_parent.end(), std::size_t{0});
  const auto find = [&](std::size_t x) {
    while (uf_parent[x] != x) {
      uf_parent[x] = uf_parent[uf_parent[x]];
      x = uf_parent[x];
    }
    return x;
  };
  const auto size_of = [&](std::size_t id) { return id < n ? std::size_t{1} : nodes[id - n].size; };
  for (const auto &e : edges) {
    const std::size_t a = find(e.u);
    const std::size_t b = find(e.v);
    const std::size_t id = n + nodes.size();
    nodes.push_back({a, b, e.weight, size_of(a) + size_of(b)});
    uf_parent[a] = id;
    uf_parent[b] = id;
  }
  const std::size_t root = n + nodes.size() - 1;

  tree.n_clusters = 1;
  tree.birth.push_back(0.0);
  tree.parent_of.push_back(0);

  const auto new_cluster = [&](std::size_t parent, double lambda) {
    tree.birth.push_back(lambda);
    tree.parent_of.push_back(parent);
    return tree.n_clusters++;
  };
  const auto fall_out = [&](std::size_t node, std::size_t cluster, double lambda) {
    std::vector<std::size_t> stack{node};
    while (!stack.empty()) {
      const std::size_t x = stack.back();
      stack.pop_back();
      if (x < n) {
        tree.entries.push_back({cluster, x, lambda, 1});
      } else {
        stack.push_back(nodes[x - n].right);
        stack.push_back(nodes[x - n].left);
      }
    }
  };

  if (n == 1) {
    tree.entries.push_back({0, 0, kMaxLambda, 1});
    return tree;
  }

  // (dendrogram node, condensed cluster it belongs to)
  std::vector<std::pair<std::size_t, std::size_t>> work{{root, 0}};
  while (!work.empty()) {
    auto [node_id, cluster] = work.back();
    work.pop_back();
    if (node_id < n) {
      // a lone point reached as a continuation keeps the cluster alive to the end
      tree.entries.push_back({cluster, node_id, kMaxLambda, 1});
      continue;
    }
    const Node &node = nodes[node_id - n];
    const double lambda = lambda_of(node.distance);
    const std::size_t ls = size_of(node.left);
    const std::size_t rs = size_of(node.right);
    const bool left_big = ls >= min_cluster_size;
    const bool right_big = rs >= min_cluster_size;
    if (left_big && right_big) {
      const std::size_t lc = new_cluster(cluster, lambda);
      const std::size_t rc = new_cluster(cluster, lambda);
      tree.entries.push_back({cluster, n + lc, lambda, ls});
      tree.entries.push_back({cluster, n + rc, lambda, rs});
      work.push_back({node.right, rc});
      work.push_back({node.left, lc});
    } else if (!left_big && !right_big) {
      fall_out(node.left, cluster, lambda);
      fall_out(node.right, cluster, lambda);
    } else {
      const std::size_t big = left_big ? node.left : node.right;
      const std::size_t small = left_big ? node.right : node.left;
      fall_out(small, cluster, lambda);
      std::size_t continuing = cluster;
      if (cluster == 0) {
        continuing = new_cluster(0, lambda);
        tree.entries.push_back({0, n + continuing, lambda, size_of(big)});
      }
      work.push_back({big, continuing});
    }
  }
  return tree;
}

/// Excess-of-mass selection over the condensed tree followed by labelling.
/// Labels are raw cluster ids before relabelling; -1 for noise.
inline std::vector<int> select_and_label(const CondensedTree &tree) {
  const std::size_t n = tree.n_points;
  const std::size_t nc = tree.n_clusters;
  std::vector<double> stability(nc, 0.0);
  std::vector<std::vector<std::size_t>> children(nc);
  std::vector<std::size_t> point_cluster(n, 0);
  for (const auto &e : tree.entries) {
    stability[e.parent] += (e.lambda - tree.birth[e.parent]) * static_cast<double>(e.size);
    if (e.child >= n)
      children[e.parent].push_back(e.child - n);
    else
      point_cluster[e.child] = e.parent;
  }

  std::vector<bool> selected(nc, false);
  std::vector<double> best(nc, 0.0);
  // children always have larger ids than their parent
  for (std::size_t c = nc; c-- > 1;) {
    if (children[c].empty()) {
      selected[c] = true;
      best[c] = stability[c];
      continue;
    }
    double child_sum = 0.0;
    for (std::size_t ch : children[c])
      child_sum += best[ch];
    if (stability[c] > child_sum) {
      selected[c] = true;
      best[c] = stability[c];
      std::vector<std::size_t> stack(children[c].begin(), children[c].end());
      while (!stack.empty()) {
        const std::size_t x = stack.back();
        stack.pop_back();
        selected[x] = false;
        stack.insert(stack.end(), children[x].begin(), children[x].end());
      }
    } else {
      best[c] = child_sum;
    }
  }

  std::vector<int> labels(n, -1);
  for (std::size_t p = 0; p < n; ++p) {
    std::size_t c = point_cluster[p];
    while (c != 0 && !selected[c])
      c = tree.parent_of[c];
    if (c != 0)
      labels[p] = static_cast<int>(c);
  }
  return labels;
}

/// Relabels to 0..k-1 by descending size, then ascending lowest member index.
inline ClusterLabels relabel_by_size(const std::vector<int> &raw) {
  struct Info {
    int raw;
    std::size_t size;
    std::size_t first;
  };
  std::vector<Info> infos;
  for (std::size_t p = 0; p < raw.size(); ++p) {
    if (raw[p] < 0)
      continue;
    auto it = std::find_if(infos.begin(), infos.end(), [&](const Info &i) { return i.raw == raw[p]; });
    if (it == infos.end())
      infos.push_back({raw[p], 1, p});
    else
      ++it->size;
  }
  std::sort(infos.begin(), infos.end(), [](const Info &a, const Info &b) {
    return a.size != b.size ? a.size > b.size : a.first < b.first;
  });
  ClusterLabels out;
  out.n_clusters = infos.size();
  out.labels.assign(raw.size(), -1);
  for (std::size_t p = 0; p < raw.size(); ++p) {
    if (raw[p] < 0)
      continue;
    for (std::size_t k = 0; k < infos.size(); ++k)
      if (infos[k].raw == raw[p]) {
        out.labels[p] = static_cast<int>(k);
        break;
      }
  }
  return out;
}

/// Condensed tree plus cluster extraction. A result with no clusters
/// (every label -1) is the all-noise outcome.
inline ClusterLabels condense_and_extract(const std::vector<MstEdge> &mst, std::size_t n,
                                          std::size_t min_cluster_size) {
  if (n < min_cluster_size || n < 2) {
    ClusterLabels all_noise;
    all_noise.labels.assign(n, -1);
    return all_noise;
  }
  return relabel_by_size(select_and_label(condense(mst, n, min_cluster_size)));
}

inline ClusterLabels cluster(const PointMatrix &points, const HdbscanParams &params) {
  params.validate();
  const auto n = static_cast<std::size_t>(points.rows());
  if (n < params.min_cluster_size || n < 2) {
    ClusterLabels all_noise;
    all_noise.labels.assign(n, -1);
    return all_noise;
  }
  const auto core = core_distances(points, params.effective_min_samples());
  return condense_and_extract(build_mst(points, core), n, params.min_cluster_size);
}

} // namespace topicmod
