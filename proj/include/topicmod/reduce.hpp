#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "embedding_io.hpp"
#include "error.hpp"
#include "random.hpp"

namespace topicmod {

enum class Metric { cosine };

struct UmapParams {
  std::size_t n_neighbors = 15;
  std::size_t n_components = 5;
  double min_dist = 0.0;
  Metric metric = Metric::cosine;
  std::size_t n_epochs = 200;
  std::size_t negative_sample_rate = 5;
  double learning_rate = 1.0;
  std::uint64_t seed = 42;

  void validate(std::size_t n_docs) const {
    if (n_neighbors < 2 || n_neighbors >= n_docs)
      throw Error(ErrorKind::invalid_config,
                  "n_neighbors must satisfy 2 <= n_neighbors < n_docs (got " +
                      std::to_string(n_neighbors) + " with " + std::to_string(n_docs) +
                      " documents)");
    if (n_components < 1)
      throw Error(ErrorKind::invalid_config, "n_components must be >= 1");
    if (!(min_dist >= 0.0))
      throw Error(ErrorKind::invalid_config, "min_dist must be >= 0");
    if (!(learning_rate > 0.0))
      throw Error(ErrorKind::invalid_config, "learning_rate must be > 0");
  }
};

/// n_docs x n_components, rows in input order.
using ReducedMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Neighbor {
  std::size_t index;
  double distance;
};

using KnnGraph = std::vector<std::vector<Neighbor>>;

/// Exact k nearest neighbours under cosine distance 1 - <x, y> on unit rows.
/// Self is excluded; ties go to the lower index.
inline KnnGraph knn_graph(const EmbeddingMatrixD &m, std::size_t k) {
  const std::size_t n = m.n_docs();
  if (k < 1 || k >= n)
    throw Error(ErrorKind::too_few_points,
                "need more than k=" + std::to_string(k) + " points, have " +
                    std::to_string(n));
  KnnGraph graph(n);
  std::vector<Neighbor> candidates;
  candidates.reserve(n - 1);
  const auto by_distance = [](const Neighbor &a, const Neighbor &b) {
    return a.distance < b.distance || (a.distance == b.distance && a.index < b.index);
  };
  for (std::size_t i = 0; i < n; ++i) {
    candidates.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i)
        continue;
      // equals 1 - <x, y> on unit rows, and is exactly 0 for duplicates
      const double d = 0.5 * (m.rows.row(i) - m.rows.row(j)).squaredNorm();
      candidates.push_back({j, d});
    }
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k),
                      candidates.end(), by_distance);
    graph[i].assign(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return graph;
}

struct WeightedNeighbor {
  std::size_t index;
  double weight;
};

/// Directed fuzzy membership graph with the per-point calibration values.
struct FuzzyGraph {
  std::vector<std::vector<WeightedNeighbor>> edges;
  std::vector<double> rho;
  std::vector<double> sigma;
};

/// Membership of a neighbour at `distance` given the calibration (rho, sigma).
inline double membership_weight(double distance, double rho, double sigma) {
  return std::exp(-std::max(0.0, distance - rho) / sigma);
}

inline constexpr double kSigmaLow = 1e-12;
inline constexpr double kSigmaHigh = 1e4;
inline constexpr int kSigmaIterations = 64;

/// Smooth kNN calibration: rho_i is the nearest-neighbour distance and
/// sigma_i is bisected so that sum_j exp(-max(0, d_ij - rho_i) / sigma_i)
/// equals log2(k). Sigma saturates at the bracket ends when no root exists.
inline FuzzyGraph fuzzy_memberships(const KnnGraph &knn, std::size_t k) {
  const std::size_t n = knn.size();
  const double target = std::log2(static_cast<double>(k));
  FuzzyGraph g;
  g.edges.resize(n);
  g.rho.assign(n, 0.0);
  g.sigma.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto &nbrs = knn[i];
    if (nbrs.empty())
      continue;
    const double rho = nbrs.front().distance;
    const auto membership_sum = [&](double sigma) {
      double s = 0.0;
      for (const auto &nb : nbrs)
        s += membership_weight(nb.distance, rho, sigma);
      return s;
    };
    double lo = kSigmaLow;
    double hi = kSigmaHigh;
    for (int it = 0; it < kSigmaIterations; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (membership_sum(mid) > target)
        hi = mid;
      else
        lo = mid;
    }
    const double sigma = 0.5 * (lo + hi);
    g.rho[i] = rho;
    g.sigma[i] = sigma;
    g.edges[i].reserve(nbrs.size());
    for (const auto &nb : nbrs)
      g.edges[i].push_back({nb.index, membership_weight(nb.distance, rho, sigma)});
  }
  return g;
}

struct GraphEdge {
  std::size_t i; // i < j
  std::size_t j;
  double weight;
};

/// Undirected weighted graph, edges sorted by (i, j) with i < j.
struct SymmetricGraph {
  std::size_t n = 0;
  std::vector<GraphEdge> edges;

  double weight(std::size_t a, std::size_t b) const {
    if (a > b)
      std::swap(a, b);
    const auto it = std::lower_bound(edges.begin(), edges.end(), std::pair{a, b},
                                     [](const GraphEdge &e, const std::pair<std::size_t, std::size_t> &key) {
                                       return std::pair{e.i, e.j} < key;
                                     });
    return (it != edges.end() && it->i == a && it->j == b) ? it->weight : 0.0;
  }
};

/// Fuzzy union: w_ij + w_ji - w_ij * w_ji. Each unordered pair is computed
/// once, so the result is exactly symmetric. Zero-weight pairs are dropped.
inline SymmetricGraph symmetrize(const FuzzyGraph &g) {
  const std::size_t n = g.edges.size();
  std::vector<std::tuple<std::size_t, std::size_t, double, double>> half;
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto &e : g.edges[i]) {
      if (e.index == i)
        continue;
      if (i < e.index)
        half.emplace_back(i, e.index, e.weight, 0.0);
      else
        half.emplace_back(e.index, i, 0.0, e.weight);
    }
  }
  std::sort(half.begin(), half.end(), [](const auto &a, const auto &b) {
    return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
  });
  SymmetricGraph out;
  out.n = n;
  for (std::size_t p = 0; p < half.size();) {
    const auto [i, j, w0, w1] = half[p];
    double forward = w0;
    double backward = w1;
    std::size_t q = p + 1;
    for (; q < half.size() && std::get<0>(half[q]) == i && std::get<1>(half[q]) == j; ++q) {
      forward = std::max(forward, std::get<2>(half[q]));
      backward = std::max(backward, std::get<3>(half[q]));
    }
    const double w = forward + backward - forward * backward;
    if (w > 0.0)
      out.edges.push_back({i, j, w});
    p = q;
  }
  return out;
}

/// Low-dimensional similarity kernel 1 / (1 + a * d^(2b)).
struct CurveParams {
  double a;
  double b;

  double operator()(double d) const {
    return d <= 0.0 ? 1.0 : 1.0 / (1.0 + a * std::pow(d, 2.0 * b));
  }
};

inline constexpr int kCurveSamples = 300;
inline constexpr int kCurveIterations = 64;

/// Least-squares fit of the kernel to psi(d) = 1 for d <= min_dist and
/// exp(-(d - min_dist)) beyond, on 300 evenly spaced points in [0, 3].
/// Gauss-Newton from (1, 1); each step is halved until the squared error
/// does not increase and both parameters stay positive.
inline CurveParams fit_curve_params(double min_dist) {
  if (!(min_dist >= 0.0))
    throw Error(ErrorKind::invalid_config, "min_dist must be >= 0");
  std::vector<double> xs(kCurveSamples), ys(kCurveSamples);
  for (int k = 0; k < kCurveSamples; ++k) {
    xs[k] = 3.0 * k / (kCurveSamples - 1);
    ys[k] = xs[k] <= min_dist ? 1.0 : std::exp(-(xs[k] - min_dist));
  }
  const auto sse = [&](double a, double b) {
    double s = 0.0;
    for (int k = 0; k < kCurveSamples; ++k) {
      const double r = CurveParams{a, b}(xs[k]) - ys[k];
      s += r * r;
    }
    return s;
  };

  double a = 1.0, b = 1.0;
  double err = sse(a, b);
  for (int it = 0; it < kCurveIterations; ++it) {
    Eigen::Matrix2d jtj = Eigen::Matrix2d::Zero();
    Eigen::Vector2d jtr = Eigen::Vector2d::Zero();
    for (int k = 0; k < kCurveSamples; ++k) {
      const double x = xs[k];
      if (x <= 0.0)
        continue; // kernel is identically 1 at d = 0; zero gradient
      const double p = std::pow(x, 2.0 * b);
      const double denom = 1.0 + a * p;
      const double f = 1.0 / denom;
      const double r = f - ys[k];
      Eigen::Vector2d grad;
      grad(0) = -p / (denom * denom);
      grad(1) = -a * p * 2.0 * std::log(x) / (denom * denom);
      jtj += grad * grad.transpose();
      jtr += grad * r;
    }
    const Eigen::Vector2d step = -jtj.ldlt().solve(jtr);
    if (!step.allFinite())
      break;
    double scale = 1.0;
    bool accepted = false;
    for (int half = 0; half < 40; ++half, scale *= 0.5) {
      const double na = a + scale * step(0);
      const double nb = b + scale * step(1);
      if (na <= 0.0 || nb <= 0.0)
        continue;
      const double ne = sse(na, nb);
      if (ne <= err) {
        a = na;
        b = nb;
        err = ne;
        accepted = true;
        break;
      }
    }
    if (!accepted)
      break;
  }
  return {a, b};
}

namespace detail {

inline double clip_gradient(double g) { return std::clamp(g, -4.0, 4.0); }

} // namespace detail

/// Stochastic layout optimisation. Coordinates start uniform in
/// [-10, 10]^n_components. Every epoch each directed edge is sampled with
/// probability w / max_w; a sampled edge pulls its endpoints together and
/// pushes the head away from `negative_sample_rate` random points. The
/// step size decays linearly to zero. Single-threaded; one generator.
inline ReducedMatrix optimize_layout(const SymmetricGraph &graph, const UmapParams &params,
                                     const CurveParams &curve) {
  const std::size_t n = graph.n;
  const auto dim = static_cast<Eigen::Index>(params.n_components);
  Rng rng(params.seed);
  ReducedMatrix y(static_cast<Eigen::Index>(n), dim);
  for (Eigen::Index i = 0; i < y.rows(); ++i)
    for (Eigen::Index d = 0; d < dim; ++d)
      y(i, d) = rng.uniform(-10.0, 10.0);
  if (params.n_epochs == 0 || graph.edges.empty() || n < 2)
    return y;

  double max_w = 0.0;
  for (const auto &e : graph.edges)
    max_w = std::max(max_w, e.weight);

  struct Directed {
    std::size_t head, tail;
    double p;
  };
  std::vector<Directed> directed;
  directed.reserve(2 * graph.edges.size());
  for (const auto &e : graph.edges) {
    directed.push_back({e.i, e.j, e.weight / max_w});
    directed.push_back({e.j, e.i, e.weight / max_w});
  }

  const double a = curve.a;
  const double b = curve.b;
  std::vector<double> delta(static_cast<std::size_t>(dim));
  for (std::size_t epoch = 0; epoch < params.n_epochs; ++epoch) {
    const double alpha = params.learning_rate *
                         (1.0 - static_cast<double>(epoch) / static_cast<double>(params.n_epochs));
    for (const auto &edge : directed) {
      if (rng.uniform() >= edge.p)
        continue;
      auto head = y.row(static_cast<Eigen::Index>(edge.head));
      auto tail = y.row(static_cast<Eigen::Index>(edge.tail));

      double dist_sq = (head - tail).squaredNorm();
      if (dist_sq > 0.0) {
        const double coeff = -2.0 * a * b * std::pow(dist_sq, b - 1.0) /
                             (a * std::pow(dist_sq, b) + 1.0);
        for (Eigen::Index d = 0; d < dim; ++d) {
          const double g = detail::clip_gradient(coeff * (head(d) - tail(d)));
          head(d) += g * alpha;
          tail(d) -= g * alpha;
        }
      }

      for (std::size_t s = 0; s < params.negative_sample_rate; ++s) {
        const std::size_t k = rng.below(n);
        if (k == edge.head)
          continue;
        auto other = y.row(static_cast<Eigen::Index>(k));
        dist_sq = (head - other).squaredNorm();
        if (dist_sq > 0.0) {
          const double coeff =
              2.0 * b / ((0.001 + dist_sq) * (a * std::pow(dist_sq, b) + 1.0));
          for (Eigen::Index d = 0; d < dim; ++d)
            head(d) += detail::clip_gradient(coeff * (head(d) - other(d))) * alpha;
        } else {
          for (Eigen::Index d = 0; d < dim; ++d)
            head(d) += 4.0 * alpha;
        }
      }
    }
  }
  return y;
}

/// Full UMAP pipeline on unit-norm rows: kNN, membership calibration,
/// fuzzy union, kernel fit, layout.
inline ReducedMatrix reduce(const EmbeddingMatrixD &normalized, const UmapParams &params) {
  params.validate(normalized.n_docs());
  const KnnGraph knn = knn_graph(normalized, params.n_neighbors);
  const SymmetricGraph graph = symmetrize(fuzzy_memberships(knn, params.n_neighbors));
  return optimize_layout(graph, params, fit_curve_params(params.min_dist));
}

} // namespace topicmod
