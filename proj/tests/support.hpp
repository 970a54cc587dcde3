#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "topicmod/cluster.hpp"

namespace topicmod::support {

/// Indices of the k Euclidean nearest neighbours of row i (self excluded,
/// ties to the lower index).
template <class Matrix> std::set<std::size_t> nearest(const Matrix &m, std::size_t i, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> d;
  for (Eigen::Index j = 0; j < m.rows(); ++j)
    if (static_cast<std::size_t>(j) != i)
      d.emplace_back((m.row(static_cast<Eigen::Index>(i)) - m.row(j)).norm(),
                     static_cast<std::size_t>(j));
  std::sort(d.begin(), d.end());
  std::set<std::size_t> out;
  for (std::size_t r = 0; r < k && r < d.size(); ++r)
    out.insert(d[r].second);
  return out;
}

/// Mean share of each point's k nearest neighbours in `a` that are also
/// among its k nearest neighbours in `b`.
template <class A, class B> double knn_recall(const A &a, const B &b, std::size_t k) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const auto na = nearest(a, static_cast<std::size_t>(i), k);
    const auto nb = nearest(b, static_cast<std::size_t>(i), k);
    std::size_t hits = 0;
    for (auto x : na)
      hits += nb.count(x);
    total += static_cast<double>(hits) / static_cast<double>(k);
  }
  return total / static_cast<double>(a.rows());
}

/// Share of items whose label agrees with the majority truth of their
/// cluster. Items labelled -1 count as misses.
inline double purity(const std::vector<int> &labels, const std::vector<int> &truth) {
  std::map<int, std::map<int, std::size_t>> table;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] >= 0)
      ++table[labels[i]][truth[i]];
  std::size_t agree = 0;
  for (const auto &[label, counts] : table) {
    std::size_t best = 0;
    for (const auto &[t, c] : counts)
      best = std::max(best, c);
    agree += best;
  }
  return labels.empty() ? 0.0 : static_cast<double>(agree) / static_cast<double>(labels.size());
}

} // namespace topicmod::support
