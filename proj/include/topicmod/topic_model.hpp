#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "cluster.hpp"
#include "embedding_io.hpp"
#include "error.hpp"
#include "io.hpp"
#include "preprocess.hpp"
#include "reduce.hpp"
#include "vectorize.hpp"

namespace topicmod {

struct Keyword {
  std::string term;
  double weight;

  friend bool operator==(const Keyword &, const Keyword &) = default;
};

struct Topic {
  int id = 0;
  std::vector<Keyword> keywords;
  std::size_t size = 0;
};

struct TopicModelConfig {
  VectorizeConfig vectorize;
  UmapParams umap;
  HdbscanParams hdbscan;
  std::size_t n_keywords = 10;
  /// Documents left without tokens by preprocessing are not embedded,
  /// clustered or counted in the vocabulary; they stay outliers.
  bool exclude_empty = true;
};

struct TopicModelResult {
  std::vector<int> labels; // one per corpus document
  std::vector<Topic> topics;
  CtfidfMatrix ctfidf;
  Vocabulary vocab;
  DocTermMatrix dtm; // one row per corpus document
  std::size_t n_keywords = 10;

  std::size_t n_topics() const noexcept { return topics.size(); }

  std::size_t n_outliers() const {
    return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), -1));
  }
};

/// The n highest-weight terms of row `c`; ties go to the lexicographically
/// smaller term. Zero weights are never returned.
inline std::vector<Keyword> top_keywords(const Eigen::MatrixXd &weights, const Vocabulary &vocab,
                                         std::size_t c, std::size_t n) {
  std::vector<std::size_t> idx;
  for (Eigen::Index t = 0; t < weights.cols(); ++t)
    if (weights(static_cast<Eigen::Index>(c), t) > 0.0)
      idx.push_back(static_cast<std::size_t>(t));
  const auto row = weights.row(static_cast<Eigen::Index>(c));
  const auto better = [&](std::size_t a, std::size_t b) {
    const double wa = row(static_cast<Eigen::Index>(a));
    const double wb = row(static_cast<Eigen::Index>(b));
    return wa != wb ? wa > wb : vocab.terms[a] < vocab.terms[b];
  };
  const std::size_t k = std::min(n, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(), better);
  std::vector<Keyword> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i)
    out.push_back({vocab.terms[idx[i]], row(static_cast<Eigen::Index>(idx[i]))});
  return out;
}

inline std::vector<Keyword> top_keywords(const CtfidfMatrix &m, const Vocabulary &vocab,
                                         std::size_t c, std::size_t n) {
  return top_keywords(m.weights, vocab, c, n);
}

/// Rebuilds c-TF-IDF, keywords and sizes from the current labels, which
/// must already be dense (0..k-1, -1 for outliers).
inline void recompute_topics(TopicModelResult &r) {
  int max_label = -1;
  for (int l : r.labels)
    max_label = std::max(max_label, l);
  const auto k = static_cast<std::size_t>(max_label + 1);
  r.topics.clear();
  if (k == 0) {
    r.ctfidf = CtfidfMatrix{};
    return;
  }
  r.ctfidf = ctfidf(class_counts(r.dtm, r.labels, k));
  std::vector<std::size_t> sizes(k, 0);
  for (int l : r.labels)
    if (l >= 0)
      ++sizes[static_cast<std::size_t>(l)];
  for (std::size_t c = 0; c < k; ++c) {
    Topic t;
    t.id = static_cast<int>(c);
    t.size = sizes[c];
    t.keywords = top_keywords(r.ctfidf, r.vocab, c, r.n_keywords);
    r.topics.push_back(std::move(t));
  }
}

namespace detail {

inline double cosine(const Eigen::VectorXd &a, const Eigen::VectorXd &b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0)
    return 0.0;
  return a.dot(b) / (na * nb);
}

/// Reorders labels so topic 0 is the largest; equal sizes keep their
/// current relative order.
inline void densify_by_size(std::vector<int> &labels) {
  int max_label = -1;
  for (int l : labels)
    max_label = std::max(max_label, l);
  const auto k = static_cast<std::size_t>(max_label + 1);
  std::vector<std::size_t> sizes(k, 0);
  for (int l : labels)
    if (l >= 0)
      ++sizes[static_cast<std::size_t>(l)];
  std::vector<std::size_t> order;
  for (std::size_t c = 0; c < k; ++c)
    if (sizes[c] > 0)
      order.push_back(c);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return sizes[a] > sizes[b]; });
  std::vector<int> remap(k, -1);
  for (std::size_t i = 0; i < order.size(); ++i)
    remap[order[i]] = static_cast<int>(i);
  for (int &l : labels)
    if (l >= 0)
      l = remap[static_cast<std::size_t>(l)];
}

} // namespace detail

/// Embedding rows reordered to match the corpus document order.
inline EmbeddingMatrix align_embeddings(const CleanCorpus &corpus, const EmbeddingMatrix &emb) {
  if (emb.n_docs() != corpus.size())
    throw Error(ErrorKind::id_mismatch, "corpus has " + std::to_string(corpus.size()) +
                                            " documents but embeddings have " +
                                            std::to_string(emb.n_docs()) + " rows");
  std::unordered_map<std::string, std::size_t> row_of;
  for (std::size_t i = 0; i < emb.doc_ids.size(); ++i)
    if (!row_of.emplace(emb.doc_ids[i], i).second)
      throw Error(ErrorKind::duplicate_id, "embedding id '" + emb.doc_ids[i] + "'");
  EmbeddingMatrix out;
  out.rows.resize(emb.rows.rows(), emb.rows.cols());
  out.doc_ids.reserve(corpus.size());
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const auto &id = corpus.documents[d].id;
    const auto it = row_of.find(id);
    if (it == row_of.end())
      throw Error(ErrorKind::id_mismatch, "no embedding for document '" + id + "'");
    out.rows.row(static_cast<Eigen::Index>(d)) = emb.rows.row(static_cast<Eigen::Index>(it->second));
    out.doc_ids.push_back(id);
  }
  return out;
}

/// normalize -> UMAP -> HDBSCAN -> class counts -> c-TF-IDF -> keywords.
/// Outliers keep label -1.
inline TopicModelResult fit(const CleanCorpus &corpus, const EmbeddingMatrix &embeddings,
                            const TopicModelConfig &cfg) {
  cfg.hdbscan.validate();
  const EmbeddingMatrix aligned = align_embeddings(corpus, embeddings);

  std::vector<std::size_t> included;
  std::vector<CleanDocument> fit_docs;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    if (cfg.exclude_empty && corpus.documents[d].tokens.empty())
      continue;
    included.push_back(d);
    fit_docs.push_back(corpus.documents[d]);
  }
  if (fit_docs.empty())
    throw Error(ErrorKind::empty_corpus, "no non-empty documents to fit");

  TopicModelResult r;
  r.n_keywords = cfg.n_keywords;
  r.vocab = build_vocabulary(std::span<const CleanDocument>(fit_docs), cfg.vectorize);
  r.dtm = count_matrix(corpus, r.vocab);
  r.labels.assign(corpus.size(), -1);

  const std::size_t n = fit_docs.size();
  if (n < cfg.hdbscan.min_cluster_size || n < 3)
    return r;

  EmbeddingMatrix subset;
  subset.rows.resize(static_cast<Eigen::Index>(n), aligned.rows.cols());
  for (std::size_t i = 0; i < n; ++i) {
    subset.rows.row(static_cast<Eigen::Index>(i)) =
        aligned.rows.row(static_cast<Eigen::Index>(included[i]));
    subset.doc_ids.push_back(aligned.doc_ids[included[i]]);
  }
  UmapParams umap = cfg.umap;
  umap.n_neighbors = std::min(umap.n_neighbors, n - 1);
  const ReducedMatrix reduced = reduce(l2_normalize(subset), umap);
  const ClusterLabels clusters = cluster(reduced, cfg.hdbscan);
  for (std::size_t i = 0; i < n; ++i)
    r.labels[included[i]] = clusters.labels[i];
  recompute_topics(r);
  return r;
}

/// Reassigns every outlier with at least one in-vocabulary token to the
/// topic whose c-TF-IDF row is most cosine-similar to the document's
/// idf-weighted counts (ties to the lower topic id).
inline TopicModelResult reduce_outliers(const TopicModelResult &r, const DocTermMatrix &dtm) {
  if (r.topics.empty())
    throw Error(ErrorKind::no_topics, "outlier reduction needs at least one topic");
  TopicModelResult out = r;
  out.dtm = dtm;
  const std::size_t k = r.n_topics();
  bool changed = false;
  Eigen::VectorXd doc(static_cast<Eigen::Index>(dtm.n_terms));
  for (std::size_t d = 0; d < out.labels.size(); ++d) {
    if (out.labels[d] != -1 || dtm.rows[d].empty())
      continue;
    doc.setZero();
    for (const auto &e : dtm.rows[d])
      doc(e.term) = e.count * r.ctfidf.idf(e.term);
    int best = 0;
    double best_sim = -1.0;
    for (std::size_t c = 0; c < k; ++c) {
      const double sim =
          detail::cosine(doc, r.ctfidf.weights.row(static_cast<Eigen::Index>(c)).transpose());
      if (sim > best_sim) {
        best_sim = sim;
        best = static_cast<int>(c);
      }
    }
    out.labels[d] = best;
    changed = true;
  }
  if (changed)
    recompute_topics(out);
  return out;
}

inline TopicModelResult reduce_outliers(const TopicModelResult &r) {
  return reduce_outliers(r, r.dtm);
}

/// Repeatedly merges the smallest topic (ties: higher id) into the topic
/// with the most similar c-TF-IDF row (ties: lower id) until `target`
/// topics remain; ids are finally ordered by size.
inline TopicModelResult reduce_num_topics(const TopicModelResult &r, std::size_t target) {
  if (target < 1)
    throw Error(ErrorKind::invalid_config, "target topic count must be >= 1");
  if (r.n_topics() <= target)
    return r;
  TopicModelResult out = r;
  while (out.n_topics() > target) {
    const std::size_t k = out.n_topics();
    std::size_t smallest = 0;
    for (std::size_t c = 1; c < k; ++c)
      if (out.topics[c].size <= out.topics[smallest].size)
        smallest = c;
    const Eigen::VectorXd from = out.ctfidf.weights.row(static_cast<Eigen::Index>(smallest)).transpose();
    std::size_t into = k;
    double best_sim = -1.0;
    for (std::size_t c = 0; c < k; ++c) {
      if (c == smallest)
        continue;
      const double sim =
          detail::cosine(from, out.ctfidf.weights.row(static_cast<Eigen::Index>(c)).transpose());
      if (sim > best_sim) {
        best_sim = sim;
        into = c;
      }
    }
    const int s = static_cast<int>(smallest);
    const int t = static_cast<int>(into);
    for (int &l : out.labels) {
      if (l == s)
        l = t;
      if (l > s)
        --l;
    }
    recompute_topics(out);
  }
  detail::densify_by_size(out.labels);
  recompute_topics(out);
  return out;
}

/// Header plus one row per topic: topic_id, size, comma-joined term:weight.
inline std::string format_topic_report(const std::vector<Topic> &topics) {
  std::string out = "topic_id\tsize\tkeywords\n";
  for (const auto &t : topics) {
    out += std::to_string(t.id);
    out += '\t';
    out += std::to_string(t.size);
    out += '\t';
    for (std::size_t i = 0; i < t.keywords.size(); ++i) {
      if (i)
        out += ',';
      out += t.keywords[i].term;
      out += ':';
      out += io::fixed(t.keywords[i].weight, 6);
    }
    out += '\n';
  }
  return out;
}

inline std::vector<Topic> parse_topic_report(const std::string &content) {
  const auto lines = io::split_lines(content);
  if (lines.empty() || lines[0] != "topic_id\tsize\tkeywords")
    throw Error(ErrorKind::bad_format, "topic report must start with the header row");
  std::vector<Topic> topics;
  for (std::size_t n = 1; n < lines.size(); ++n) {
    const std::string &line = lines[n];
    if (line.empty())
      continue;
    const auto bad = [&] {
      return Error(ErrorKind::bad_format, "topic report line " + std::to_string(n + 1));
    };
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos)
      throw bad();
    Topic t;
    try {
      t.id = std::stoi(line.substr(0, t1));
      t.size = std::stoull(line.substr(t1 + 1, t2 - t1 - 1));
    } catch (const std::exception &) {
      throw bad();
    }
    const std::string kws = line.substr(t2 + 1);
    std::size_t start = 0;
    while (start < kws.size()) {
      std::size_t end = kws.find(',', start);
      if (end == std::string::npos)
        end = kws.size();
      const std::string item = kws.substr(start, end - start);
      const auto colon = item.rfind(':');
      if (colon == std::string::npos || colon == 0)
        throw bad();
      try {
        t.keywords.push_back({item.substr(0, colon), std::stod(item.substr(colon + 1))});
      } catch (const std::exception &) {
        throw bad();
      }
      start = end + 1;
    }
    topics.push_back(std::move(t));
  }
  return topics;
}

/// "id<TAB>topic_id" per document.
inline std::string format_labels(const CleanCorpus &corpus, const std::vector<int> &labels) {
  std::string out;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    out += corpus.documents[d].id;
    out += '\t';
    out += std::to_string(labels[d]);
    out += '\n';
  }
  return out;
}

} // namespace topicmod
