#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "error.hpp"
#include "preprocess.hpp"
#include "topic_model.hpp"
#include "vectorize.hpp"

namespace topicmod {

struct EvalConfig {
  std::size_t top_n = 10;
  double epsilon = 1e-12;
  std::vector<std::size_t> topic_counts{10, 20, 30, 40, 50};
  std::vector<std::uint64_t> seeds{42, 43, 44};

  std::size_t runs() const noexcept { return seeds.size(); }

  void validate() const {
    if (top_n < 2)
      throw Error(ErrorKind::invalid_config, "top_n must be >= 2");
    if (seeds.empty())
      throw Error(ErrorKind::invalid_config, "at least one run seed is required");
    if (topic_counts.empty())
      throw Error(ErrorKind::invalid_config, "at least one topic count is required");
    for (auto c : topic_counts)
      if (c < 1)
        throw Error(ErrorKind::invalid_config, "topic counts must be >= 1");
  }
};

/// Document-level occurrence statistics: a word counts once per document.
class CooccurrenceStats {
public:
  CooccurrenceStats(std::span<const CleanDocument> docs, Vocabulary vocab)
      : n_docs_(docs.size()), vocab_(std::move(vocab)), postings_(vocab_.size()) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      std::unordered_set<std::size_t> seen;
      for (const auto &tok : docs[d].tokens)
        if (const auto t = vocab_.find(tok); t && seen.insert(*t).second)
          postings_[*t].push_back(static_cast<std::uint32_t>(d));
    }
  }

  /// Every term that occurs in the corpus.
  static CooccurrenceStats from_corpus(const CleanCorpus &corpus) {
    std::set<std::string> terms;
    for (const auto &doc : corpus.documents)
      terms.insert(doc.tokens.begin(), doc.tokens.end());
    return CooccurrenceStats(std::span<const CleanDocument>(corpus.documents),
                             make_vocabulary({terms.begin(), terms.end()}));
  }

  std::size_t n_docs() const noexcept { return n_docs_; }
  const Vocabulary &vocab() const noexcept { return vocab_; }
  bool contains(const std::string &w) const { return vocab_.find(w).has_value(); }

  std::size_t df(const std::string &w) const {
    const auto t = vocab_.find(w);
    return t ? postings_[*t].size() : 0;
  }

  std::size_t joint_df(const std::string &a, const std::string &b) const {
    const auto ta = vocab_.find(a);
    const auto tb = vocab_.find(b);
    if (!ta || !tb)
      return 0;
    const auto &pa = postings_[*ta];
    const auto &pb = postings_[*tb];
    std::size_t i = 0, j = 0, count = 0;
    while (i < pa.size() && j < pb.size()) {
      if (pa[i] < pb[j])
        ++i;
      else if (pb[j] < pa[i])
        ++j;
      else {
        ++count;
        ++i;
        ++j;
      }
    }
    return count;
  }

  double p(const std::string &w) const {
    return n_docs_ ? static_cast<double>(df(w)) / static_cast<double>(n_docs_) : 0.0;
  }

  double p_joint(const std::string &a, const std::string &b) const {
    return n_docs_ ? static_cast<double>(joint_df(a, b)) / static_cast<double>(n_docs_) : 0.0;
  }

private:
  std::size_t n_docs_;
  Vocabulary vocab_;
  std::vector<std::vector<std::uint32_t>> postings_;
};

inline CooccurrenceStats cooccurrence_stats(std::span<const CleanDocument> docs,
                                            const Vocabulary &vocab) {
  return CooccurrenceStats(docs, vocab);
}

/// ln((p_ij + eps) / (p_i p_j)) / -ln(p_ij + eps), clamped to [-1, 1].
/// A pair present in every document (p_ij + eps >= 1) scores 1.
inline double npmi(double p_i, double p_j, double p_ij, double eps) {
  const double joint = p_ij + eps;
  if (joint >= 1.0)
    return 1.0;
  const double value = std::log(joint / (p_i * p_j)) / -std::log(joint);
  return std::clamp(value, -1.0, 1.0);
}

inline double npmi_pair(const std::string &a, const std::string &b,
                        const CooccurrenceStats &stats, double eps) {
  // order-independent by construction: joint_df intersects symmetric sets
  const double pa = stats.p(a);
  const double pb = stats.p(b);
  return npmi(std::min(pa, pb), std::max(pa, pb), stats.p_joint(a, b), eps);
}

struct CoherenceResult {
  std::vector<std::optional<double>> per_topic; // nullopt = skipped
  std::vector<std::size_t> skipped;             // topic positions
  double mean = 0.0;                            // over scored topics
  std::size_t n_scored = 0;
};

/// Mean pairwise NPMI over each topic's top_n keywords that occur in the
/// reference corpus; topics with fewer than two such words are skipped.
inline CoherenceResult topic_coherence(const std::vector<Topic> &topics,
                                       const CooccurrenceStats &stats, const EvalConfig &cfg) {
  CoherenceResult r;
  double total = 0.0;
  for (std::size_t i = 0; i < topics.size(); ++i) {
    std::vector<std::string> words;
    const auto &kws = topics[i].keywords;
    for (std::size_t k = 0; k < std::min(cfg.top_n, kws.size()); ++k)
      if (stats.contains(kws[k].term))
        words.push_back(kws[k].term);
    if (words.size() < 2) {
      r.per_topic.push_back(std::nullopt);
      r.skipped.push_back(i);
      continue;
    }
    double sum = 0.0;
    std::size_t pairs = 0;
    for (std::size_t a = 0; a < words.size(); ++a)
      for (std::size_t b = a + 1; b < words.size(); ++b) {
        sum += npmi_pair(words[a], words[b], stats, cfg.epsilon);
        ++pairs;
      }
    const double score = sum / static_cast<double>(pairs);
    r.per_topic.push_back(score);
    total += score;
    ++r.n_scored;
  }
  if (r.n_scored > 0)
    r.mean = std::clamp(total / static_cast<double>(r.n_scored), -1.0, 1.0);
  return r;
}

/// Share of distinct words among all topics' top_n keyword lists.
inline double topic_diversity(const std::vector<Topic> &topics, std::size_t top_n) {
  std::unordered_set<std::string> unique;
  std::size_t total = 0;
  for (const auto &t : topics) {
    const std::size_t n = std::min(top_n, t.keywords.size());
    for (std::size_t k = 0; k < n; ++k)
      unique.insert(t.keywords[k].term);
    total += n;
  }
  if (total == 0)
    return 0.0;
  return static_cast<double>(unique.size()) / static_cast<double>(total);
}

} // namespace topicmod
