#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "random.hpp"
#include "topic_model.hpp"
#include "vectorize.hpp"

namespace topicmod {

// ---------------------------------------------------------------------------
// LDA, collapsed Gibbs sampling
// ---------------------------------------------------------------------------

struct LdaParams {
  std::size_t n_topics = 10;
  /// Symmetric document-topic prior; 50 / n_topics when unset.
  std::optional<double> alpha;
  double beta = 0.01;
  std::size_t n_iterations = 1000;
  std::size_t burn_in = 800;
  std::size_t sample_lag = 10;
  std::uint64_t seed = 42;

  double effective_alpha() const {
    return alpha.value_or(50.0 / static_cast<double>(n_topics));
  }

  void validate() const {
    if (n_topics < 1)
      throw Error(ErrorKind::invalid_config, "LDA needs at least one topic");
    if (!(effective_alpha() > 0.0) || !(beta > 0.0))
      throw Error(ErrorKind::invalid_config, "LDA priors must be positive");
    if (sample_lag < 1)
      throw Error(ErrorKind::invalid_config, "sample_lag must be >= 1");
  }
};

/// Sampler count tables, exposed to sweep observers.
struct LdaCounts {
  std::size_t n_topics = 0;
  std::size_t n_terms = 0;
  std::vector<std::uint32_t> doc_topic;  // D x K
  std::vector<std::uint32_t> topic_term; // K x V
  std::vector<std::uint32_t> topic_total;

  std::uint32_t &dk(std::size_t d, std::size_t k) { return doc_topic[d * n_topics + k]; }
  std::uint32_t dk(std::size_t d, std::size_t k) const { return doc_topic[d * n_topics + k]; }
  std::uint32_t &kw(std::size_t k, std::size_t w) { return topic_term[k * n_terms + w]; }
  std::uint32_t kw(std::size_t k, std::size_t w) const { return topic_term[k * n_terms + w]; }

  /// sum_k n_dk equals each document's length and sum_w n_kw equals n_k.
  bool consistent(const std::vector<std::size_t> &doc_lengths) const {
    for (std::size_t d = 0; d < doc_lengths.size(); ++d) {
      std::size_t s = 0;
      for (std::size_t k = 0; k < n_topics; ++k)
        s += dk(d, k);
      if (s != doc_lengths[d])
        return false;
    }
    for (std::size_t k = 0; k < n_topics; ++k) {
      std::size_t s = 0;
      for (std::size_t w = 0; w < n_terms; ++w)
        s += kw(k, w);
      if (s != topic_total[k])
        return false;
    }
    return true;
  }
};

using LdaObserver = std::function<void(std::size_t sweep, const LdaCounts &)>;

struct LdaModel {
  Eigen::MatrixXd phi;   // K x V
  Eigen::MatrixXd theta; // D x K
  std::size_t n_samples = 0;
};

inline LdaModel lda_fit(const DocTermMatrix &dtm, const LdaParams &p,
                        const LdaObserver &observer = {}) {
  p.validate();
  const std::size_t K = p.n_topics;
  const std::size_t V = dtm.n_terms;
  const std::size_t D = dtm.n_docs;

  std::vector<std::uint32_t> token_doc, token_term;
  std::vector<std::size_t> doc_len(D, 0);
  for (std::size_t d = 0; d < D; ++d)
    for (const auto &e : dtm.rows[d])
      for (std::uint32_t c = 0; c < e.count; ++c) {
        token_doc.push_back(static_cast<std::uint32_t>(d));
        token_term.push_back(e.term);
        ++doc_len[d];
      }
  if (token_doc.empty())
    throw Error(ErrorKind::empty_corpus, "LDA input has no tokens");

  const double alpha = p.effective_alpha();
  const double beta = p.beta;
  const double vbeta = static_cast<double>(V) * beta;

  Rng rng(p.seed);
  LdaCounts counts;
  counts.n_topics = K;
  counts.n_terms = V;
  counts.doc_topic.assign(D * K, 0);
  counts.topic_term.assign(K * V, 0);
  counts.topic_total.assign(K, 0);
  std::vector<std::uint32_t> z(token_doc.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    z[i] = static_cast<std::uint32_t>(rng.below(K));
    ++counts.dk(token_doc[i], z[i]);
    ++counts.kw(z[i], token_term[i]);
    ++counts.topic_total[z[i]];
  }

  LdaModel model;
  model.phi = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(V));
  model.theta = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(K));
  const auto accumulate = [&] {
    for (std::size_t k = 0; k < K; ++k)
      for (std::size_t w = 0; w < V; ++w)
        model.phi(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(w)) +=
            (counts.kw(k, w) + beta) / (counts.topic_total[k] + vbeta);
    const double kalpha = static_cast<double>(K) * alpha;
    for (std::size_t d = 0; d < D; ++d)
      for (std::size_t k = 0; k < K; ++k)
        model.theta(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k)) +=
            (counts.dk(d, k) + alpha) / (static_cast<double>(doc_len[d]) + kalpha);
    ++model.n_samples;
  };

  std::vector<double> prob(K);
  for (std::size_t sweep = 1; sweep <= p.n_iterations; ++sweep) {
    for (std::size_t i = 0; i < z.size(); ++i) {
      const std::uint32_t d = token_doc[i];
      const std::uint32_t w = token_term[i];
      const std::uint32_t old = z[i];
      --counts.dk(d, old);
      --counts.kw(old, w);
      --counts.topic_total[old];
      double total = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        total += (counts.dk(d, k) + alpha) * (counts.kw(k, w) + beta) /
                 (counts.topic_total[k] + vbeta);
        prob[k] = total;
      }
      const double u = rng.uniform() * total;
      std::size_t chosen = 0;
      while (chosen + 1 < K && prob[chosen] <= u)
        ++chosen;
      z[i] = static_cast<std::uint32_t>(chosen);
      ++counts.dk(d, chosen);
      ++counts.kw(chosen, w);
      ++counts.topic_total[chosen];
    }
    if (observer)
      observer(sweep, counts);
    if (sweep > p.burn_in && (sweep - p.burn_in) % p.sample_lag == 0)
      accumulate();
  }
  if (model.n_samples == 0)
    accumulate();
  const double scale = 1.0 / static_cast<double>(model.n_samples);
  model.phi *= scale;
  model.theta *= scale;
  return model;
}

inline std::vector<Keyword> lda_top_words(const LdaModel &model, const Vocabulary &vocab,
                                          std::size_t k, std::size_t n) {
  return top_keywords(model.phi, vocab, k, n);
}

// ---------------------------------------------------------------------------
// NMF, Frobenius multiplicative updates
// ---------------------------------------------------------------------------

/// count(d, t) * ln(D / df(t)).
inline Eigen::MatrixXd tfidf_weight(const DocTermMatrix &dtm) {
  std::vector<std::size_t> df(dtm.n_terms, 0);
  for (const auto &row : dtm.rows)
    for (const auto &e : row)
      ++df[e.term];
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dtm.n_docs),
                                            static_cast<Eigen::Index>(dtm.n_terms));
  const auto D = static_cast<double>(dtm.n_docs);
  for (std::size_t d = 0; d < dtm.n_docs; ++d)
    for (const auto &e : dtm.rows[d])
      x(static_cast<Eigen::Index>(d), e.term) = e.count * std::log(D / static_cast<double>(df[e.term]));
  return x;
}

struct NmfParams {
  std::size_t rank = 10;
  std::size_t n_iterations = 500;
  double tol = 1e-6;
  std::uint64_t seed = 42;

  void validate() const {
    if (rank < 1)
      throw Error(ErrorKind::invalid_config, "NMF rank must be >= 1");
  }
};

struct NmfModel {
  Eigen::MatrixXd W; // D x K
  Eigen::MatrixXd H; // K x V
  std::vector<double> objective_trace;
};

inline constexpr double kNmfEpsilon = 1e-12;

inline double nmf_objective(const Eigen::MatrixXd &x, const Eigen::MatrixXd &w,
                            const Eigen::MatrixXd &h) {
  return 0.5 * (x - w * h).squaredNorm();
}

/// Lee-Seung updates H <- H * (W'X) / (W'WH + eps), W <- W * (XH') / (WHH' + eps)
/// until n_iterations or the relative objective change drops below tol.
inline NmfModel nmf_fit(const Eigen::MatrixXd &x, const NmfParams &p) {
  p.validate();
  if ((x.array() < 0.0).any())
    throw Error(ErrorKind::negative_input, "NMF input has negative entries");
  const auto K = static_cast<Eigen::Index>(p.rank);
  Rng rng(p.seed);
  NmfModel m;
  m.W.resize(x.rows(), K);
  m.H.resize(K, x.cols());
  for (Eigen::Index i = 0; i < m.W.rows(); ++i)
    for (Eigen::Index k = 0; k < K; ++k)
      m.W(i, k) = rng.uniform_open_zero();
  for (Eigen::Index k = 0; k < K; ++k)
    for (Eigen::Index j = 0; j < m.H.cols(); ++j)
      m.H(k, j) = rng.uniform_open_zero();

  double prev = nmf_objective(x, m.W, m.H);
  for (std::size_t it = 0; it < p.n_iterations; ++it) {
    const Eigen::MatrixXd wt = m.W.transpose();
    m.H.array() *= (wt * x).array() / (((wt * m.W) * m.H).array() + kNmfEpsilon);
    const Eigen::MatrixXd ht = m.H.transpose();
    m.W.array() *= (x * ht).array() / ((m.W * (m.H * ht)).array() + kNmfEpsilon);
    const double obj = nmf_objective(x, m.W, m.H);
    m.objective_trace.push_back(obj);
    if (prev <= 0.0 || (prev - obj) / prev < p.tol)
      break;
    prev = obj;
  }
  return m;
}

inline std::vector<Keyword> nmf_top_words(const NmfModel &model, const Vocabulary &vocab,
                                          std::size_t k, std::size_t n) {
  return top_keywords(model.H, vocab, k, n);
}

// ---------------------------------------------------------------------------
// Shared reporting for the baselines
// ---------------------------------------------------------------------------

struct BaselineResult {
  std::vector<int> labels; // argmax topic per document, -1 for empty rows
  std::vector<Topic> topics;
};

/// Documents go to their highest-weight topic (ties: lower id); topics
/// are numbered by factor index, keywords ranked by `term_weights` rows.
inline BaselineResult summarize_factors(const Eigen::MatrixXd &doc_weights,
                                        const Eigen::MatrixXd &term_weights,
                                        const DocTermMatrix &dtm, const Vocabulary &vocab,
                                        std::size_t n_keywords) {
  BaselineResult r;
  const auto K = static_cast<std::size_t>(term_weights.rows());
  r.labels.assign(dtm.n_docs, -1);
  std::vector<std::size_t> sizes(K, 0);
  for (std::size_t d = 0; d < dtm.n_docs; ++d) {
    if (dtm.rows[d].empty())
      continue;
    const auto row = doc_weights.row(static_cast<Eigen::Index>(d));
    std::size_t best = 0;
    for (std::size_t k = 1; k < K; ++k)
      if (row(static_cast<Eigen::Index>(k)) > row(static_cast<Eigen::Index>(best)))
        best = k;
    if (!(row(static_cast<Eigen::Index>(best)) > 0.0))
      continue;
    r.labels[d] = static_cast<int>(best);
    ++sizes[best];
  }
  for (std::size_t k = 0; k < K; ++k) {
    Topic t;
    t.id = static_cast<int>(k);
    t.size = sizes[k];
    t.keywords = top_keywords(term_weights, vocab, k, n_keywords);
    r.topics.push_back(std::move(t));
  }
  return r;
}

} // namespace topicmod
