#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "io.hpp"
#include "preprocess.hpp"

namespace topicmod {

using StopwordSet = std::unordered_set<std::string>;

struct VectorizeConfig {
  std::size_t min_df = 3;
  double max_df = 0.85;
  StopwordSet stopwords;
  std::optional<std::size_t> max_vocab;

  void validate() const {
    if (min_df < 1)
      throw Error(ErrorKind::invalid_config, "min_df must be >= 1");
    if (!(max_df > 0.0 && max_df <= 1.0))
      throw Error(ErrorKind::invalid_config, "max_df must be in (0, 1]");
    if (max_vocab && *max_vocab < 1)
      throw Error(ErrorKind::invalid_config, "max_vocab must be >= 1");
  }
};

/// One word per line; text after '#' is a comment.
inline StopwordSet parse_stopwords(const std::string &content) {
  StopwordSet words;
  for (std::string line : io::split_lines(content)) {
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos)
      continue;
    const auto last = line.find_last_not_of(" \t");
    words.insert(line.substr(first, last - first + 1));
  }
  return words;
}

inline StopwordSet load_stopwords(const std::string &path) {
  return parse_stopwords(io::read_file(path));
}

struct Vocabulary {
  std::vector<std::string> terms; // lexicographic
  std::unordered_map<std::string, std::size_t> index;
  std::vector<std::size_t> doc_freq;

  std::size_t size() const noexcept { return terms.size(); }

  std::optional<std::size_t> find(const std::string &term) const {
    const auto it = index.find(term);
    if (it == index.end())
      return std::nullopt;
    return it->second;
  }
};

/// Builds a vocabulary from terms in the given order (assumed unique).
inline Vocabulary make_vocabulary(std::vector<std::string> terms,
                                  std::vector<std::size_t> doc_freq = {}) {
  Vocabulary v;
  v.terms = std::move(terms);
  v.doc_freq = std::move(doc_freq);
  v.doc_freq.resize(v.terms.size(), 0);
  for (std::size_t i = 0; i < v.terms.size(); ++i)
    v.index.emplace(v.terms[i], i);
  return v;
}

inline Vocabulary build_vocabulary(std::span<const CleanDocument> docs,
                                   const VectorizeConfig &cfg) {
  cfg.validate();
  if (docs.empty())
    throw Error(ErrorKind::empty_corpus, "cannot build a vocabulary from 0 documents");

  struct Stats {
    std::size_t df = 0;
    std::size_t total = 0;
  };
  std::map<std::string, Stats> stats;
  for (const auto &doc : docs) {
    std::unordered_set<std::string_view> in_doc;
    for (const auto &tok : doc.tokens) {
      if (cfg.stopwords.count(tok))
        continue;
      Stats &s = stats[tok];
      ++s.total;
      if (in_doc.insert(tok).second)
        ++s.df;
    }
  }

  const double df_cap = cfg.max_df * static_cast<double>(docs.size());
  std::vector<std::pair<std::string, Stats>> kept;
  for (auto &[term, s] : stats) {
    if (s.df < cfg.min_df || static_cast<double>(s.df) > df_cap)
      continue;
    kept.emplace_back(term, s);
  }

  if (cfg.max_vocab && kept.size() > *cfg.max_vocab) {
    // `kept` is lexicographic already; a stable sort on frequency keeps
    // lexicographic order among ties.
    std::stable_sort(kept.begin(), kept.end(), [](const auto &a, const auto &b) {
      return a.second.total > b.second.total;
    });
    kept.resize(*cfg.max_vocab);
    std::sort(kept.begin(), kept.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
  }

  if (kept.empty())
    throw Error(ErrorKind::empty_vocabulary,
                "no term survives min_df/max_df/stopword filtering");

  std::vector<std::string> terms;
  std::vector<std::size_t> df;
  for (auto &[term, s] : kept) {
    terms.push_back(term);
    df.push_back(s.df);
  }
  return make_vocabulary(std::move(terms), std::move(df));
}

inline Vocabulary build_vocabulary(const CleanCorpus &corpus,
                                   const VectorizeConfig &cfg) {
  return build_vocabulary(std::span<const CleanDocument>(corpus.documents), cfg);
}

struct TermCount {
  std::uint32_t term;
  std::uint32_t count;

  friend bool operator==(const TermCount &, const TermCount &) = default;
};

/// Sparse document-term counts; each row is sorted by term index.
struct DocTermMatrix {
  std::size_t n_docs = 0;
  std::size_t n_terms = 0;
  std::vector<std::vector<TermCount>> rows;

  std::size_t row_total(std::size_t d) const {
    std::size_t total = 0;
    for (const auto &e : rows[d])
      total += e.count;
    return total;
  }
};

inline DocTermMatrix count_matrix(std::span<const CleanDocument> docs,
                                  const Vocabulary &vocab) {
  DocTermMatrix m;
  m.n_docs = docs.size();
  m.n_terms = vocab.size();
  m.rows.resize(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) {
    std::map<std::uint32_t, std::uint32_t> counts;
    for (const auto &tok : docs[d].tokens) {
      if (const auto t = vocab.find(tok))
        ++counts[static_cast<std::uint32_t>(*t)];
    }
    m.rows[d].reserve(counts.size());
    for (const auto &[t, c] : counts)
      m.rows[d].push_back({t, c});
  }
  return m;
}

inline DocTermMatrix count_matrix(const CleanCorpus &corpus,
                                  const Vocabulary &vocab) {
  return count_matrix(std::span<const CleanDocument>(corpus.documents), vocab);
}

/// Class-by-term count matrix. Row c sums the documents labelled c;
/// label -1 marks outliers, which are excluded.
inline Eigen::MatrixXd class_counts(const DocTermMatrix &dtm,
                                    std::span<const int> labels,
                                    std::size_t n_classes) {
  if (labels.size() != dtm.n_docs)
    throw Error(ErrorKind::invalid_config, "label count does not match documents");
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(
      static_cast<Eigen::Index>(n_classes), static_cast<Eigen::Index>(dtm.n_terms));
  for (std::size_t d = 0; d < dtm.n_docs; ++d) {
    const int c = labels[d];
    if (c < 0)
      continue;
    if (static_cast<std::size_t>(c) >= n_classes)
      throw Error(ErrorKind::invalid_config, "label out of range");
    for (const auto &e : dtm.rows[d])
      counts(c, e.term) += e.count;
  }
  return counts;
}

inline Eigen::MatrixXd class_counts(const DocTermMatrix &dtm,
                                    std::span<const int> labels) {
  int max_label = -1;
  for (int l : labels)
    max_label = std::max(max_label, l);
  return class_counts(dtm, labels, static_cast<std::size_t>(max_label + 1));
}

/// Class-based TF-IDF. weights(c, t) = tf(c, t) * idf(t) with
/// idf(t) = ln(1 + A / f(t)), f(t) the term's total count over classes and
/// A the average number of words per class.
struct CtfidfMatrix {
  Eigen::MatrixXd weights; // n_classes x n_terms
  Eigen::VectorXd idf;     // zero for terms absent from every class
  double avg_words_per_class = 0.0;

  std::size_t n_classes() const noexcept {
    return static_cast<std::size_t>(weights.rows());
  }
  std::size_t n_terms() const noexcept {
    return static_cast<std::size_t>(weights.cols());
  }
};

inline CtfidfMatrix ctfidf(const Eigen::MatrixXd &counts) {
  if (counts.rows() == 0)
    throw Error(ErrorKind::degenerate_input, "c-TF-IDF needs at least one class");
  for (Eigen::Index c = 0; c < counts.rows(); ++c) {
    if (counts.row(c).sum() <= 0.0)
      throw Error(ErrorKind::degenerate_input,
                  "class " + std::to_string(c) + " has no in-vocabulary words");
  }
  CtfidfMatrix out;
  out.avg_words_per_class = counts.sum() / static_cast<double>(counts.rows());
  const Eigen::VectorXd f = counts.colwise().sum().transpose();
  out.idf.resize(counts.cols());
  for (Eigen::Index t = 0; t < counts.cols(); ++t)
    out.idf(t) = f(t) > 0.0 ? std::log(1.0 + out.avg_words_per_class / f(t)) : 0.0;
  out.weights = counts * out.idf.asDiagonal();
  return out;
}

} // namespace topicmod
