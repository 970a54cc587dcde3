#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "embedding_io.hpp"
#include "eval.hpp"
#include "io.hpp"
#include "random.hpp"
#include "topic_model.hpp"

namespace topicmod {

enum class ModelKind { bertopic, lda, nmf };

inline const char *to_string(ModelKind m) noexcept {
  switch (m) {
  case ModelKind::bertopic: return "bertopic";
  case ModelKind::lda: return "lda";
  case ModelKind::nmf: return "nmf";
  }
  return "?";
}

inline ModelKind parse_model(const std::string &s) {
  if (s == "bertopic")
    return ModelKind::bertopic;
  if (s == "lda")
    return ModelKind::lda;
  if (s == "nmf")
    return ModelKind::nmf;
  throw Error(ErrorKind::invalid_config, "unknown model '" + s + "'");
}

/// Labels and ranked keywords from any of the three models.
struct TopicSet {
  std::vector<int> labels;
  std::vector<Topic> topics;
};

/// Clustering fit with the UMAP seed derived from `seed`.
inline TopicModelResult fit_bertopic_base(const CleanCorpus &corpus, const EmbeddingMatrix &emb,
                                          TopicModelConfig cfg, std::uint64_t seed) {
  cfg.umap.seed = derive_seed(seed, Stage::umap);
  return fit(corpus, emb, cfg);
}

/// Optional topic-count reduction followed by optional outlier reduction.
inline TopicModelResult finish_bertopic(const TopicModelResult &base,
                                        std::optional<std::size_t> nr_topics,
                                        bool outlier_reduction) {
  TopicModelResult r = nr_topics ? reduce_num_topics(base, *nr_topics) : base;
  if (outlier_reduction && r.n_topics() > 0)
    r = reduce_outliers(r);
  return r;
}

inline std::vector<CleanDocument> non_empty_documents(const CleanCorpus &corpus) {
  std::vector<CleanDocument> docs;
  for (const auto &d : corpus.documents)
    if (!d.tokens.empty())
      docs.push_back(d);
  return docs;
}

struct BaselineInput {
  Vocabulary vocab;
  DocTermMatrix dtm; // one row per corpus document
};

inline BaselineInput baseline_input(const CleanCorpus &corpus, const VectorizeConfig &cfg) {
  const auto docs = non_empty_documents(corpus);
  if (docs.empty())
    throw Error(ErrorKind::empty_corpus, "no non-empty documents to fit");
  BaselineInput in;
  in.vocab = build_vocabulary(std::span<const CleanDocument>(docs), cfg);
  in.dtm = count_matrix(corpus, in.vocab);
  return in;
}

inline TopicSet run_lda(const BaselineInput &in, LdaParams p, std::uint64_t seed,
                        std::size_t n_keywords) {
  p.seed = derive_seed(seed, Stage::lda);
  const LdaModel model = lda_fit(in.dtm, p);
  auto r = summarize_factors(model.theta, model.phi, in.dtm, in.vocab, n_keywords);
  return {std::move(r.labels), std::move(r.topics)};
}

inline TopicSet run_nmf(const BaselineInput &in, NmfParams p, std::uint64_t seed,
                        std::size_t n_keywords) {
  p.seed = derive_seed(seed, Stage::nmf);
  const NmfModel model = nmf_fit(tfidf_weight(in.dtm), p);
  auto r = summarize_factors(model.W, model.H, in.dtm, in.vocab, n_keywords);
  return {std::move(r.labels), std::move(r.topics)};
}

struct Scores {
  double tc = 0.0;
  double td = 0.0;
  std::size_t n_topics = 0;
  std::size_t n_skipped = 0;
};

/// TC and TD of a topic list against the corpus' own co-occurrence counts.
inline Scores score_topics(const std::vector<Topic> &topics, const CooccurrenceStats &stats,
                           const EvalConfig &cfg) {
  const CoherenceResult tc = topic_coherence(topics, stats, cfg);
  Scores s;
  s.tc = tc.mean;
  s.td = topic_diversity(topics, cfg.top_n);
  s.n_topics = topics.size();
  s.n_skipped = tc.skipped.size();
  if (!(s.tc >= -1.0 && s.tc <= 1.0) || !(s.td >= 0.0 && s.td <= 1.0))
    throw Error(ErrorKind::degenerate_input, "metric out of range");
  return s;
}

// ---------------------------------------------------------------------------
// Sweep: every (model, topic count, seed) cell, averaged over seeds
// ---------------------------------------------------------------------------

struct SweepConfig {
  TopicModelConfig topic;
  bool outlier_reduction = true;
  LdaParams lda;
  NmfParams nmf;
  EvalConfig eval;
  std::vector<ModelKind> models{ModelKind::bertopic, ModelKind::lda, ModelKind::nmf};
};

struct SweepCell {
  ModelKind model;
  std::size_t n_topics; // requested
  std::uint64_t seed;
  Scores scores;
};

struct SweepFailure {
  ModelKind model;
  std::size_t n_topics;
  std::uint64_t seed;
  std::string message;
};

struct EvalReport {
  PreprocessLevel level = PreprocessLevel::partial;
  std::vector<SweepCell> cells;
  std::vector<SweepFailure> failures;
};

inline std::uint64_t embedding_fingerprint(const EmbeddingMatrix &emb) {
  return fnv1a64(encode_embeddings(emb));
}

inline EvalReport sweep(const CleanCorpus &corpus, const EmbeddingMatrix *embeddings,
                        const SweepConfig &cfg) {
  cfg.eval.validate();
  EvalReport report;
  report.level = corpus.level;
  const CooccurrenceStats stats = CooccurrenceStats::from_corpus(corpus);

  const auto record = [&](ModelKind model, std::size_t count, std::uint64_t seed,
                          const std::vector<Topic> &topics) {
    if (topics.empty()) {
      report.failures.push_back({model, count, seed, "model produced no topics"});
      return;
    }
    report.cells.push_back({model, count, seed, score_topics(topics, stats, cfg.eval)});
  };
  const auto fail = [&](ModelKind model, std::size_t count, std::uint64_t seed,
                        const std::string &why) {
    report.failures.push_back({model, count, seed, why});
  };

  for (ModelKind model : cfg.models) {
    if (model == ModelKind::bertopic) {
      if (embeddings == nullptr) {
        for (auto seed : cfg.eval.seeds)
          for (auto count : cfg.eval.topic_counts)
            fail(model, count, seed, "no embeddings supplied");
        continue;
      }
      const std::uint64_t fingerprint = embedding_fingerprint(*embeddings);
      for (auto seed : cfg.eval.seeds) {
        std::optional<TopicModelResult> base;
        try {
          if (embedding_fingerprint(*embeddings) != fingerprint)
            throw Error(ErrorKind::id_mismatch, "cached embeddings changed during the sweep");
          base = fit_bertopic_base(corpus, *embeddings, cfg.topic, seed);
        } catch (const std::exception &e) {
          for (auto count : cfg.eval.topic_counts)
            fail(model, count, seed, e.what());
          continue;
        }
        for (auto count : cfg.eval.topic_counts) {
          try {
            record(model, count, seed, finish_bertopic(*base, count, cfg.outlier_reduction).topics);
          } catch (const std::exception &e) {
            fail(model, count, seed, e.what());
          }
        }
      }
      continue;
    }

    std::optional<BaselineInput> input;
    try {
      input = baseline_input(corpus, cfg.topic.vectorize);
    } catch (const std::exception &e) {
      for (auto count : cfg.eval.topic_counts)
        for (auto seed : cfg.eval.seeds)
          fail(model, count, seed, e.what());
      continue;
    }
    for (auto count : cfg.eval.topic_counts) {
      for (auto seed : cfg.eval.seeds) {
        try {
          if (model == ModelKind::lda) {
            LdaParams p = cfg.lda;
            p.n_topics = count;
            record(model, count, seed, run_lda(*input, p, seed, cfg.topic.n_keywords).topics);
          } else {
            NmfParams p = cfg.nmf;
            p.rank = count;
            record(model, count, seed, run_nmf(*input, p, seed, cfg.topic.n_keywords).topics);
          }
        } catch (const std::exception &e) {
          fail(model, count, seed, e.what());
        }
      }
    }
  }
  return report;
}

/// Per-run rows followed by one "mean" row per (model, n_topics).
inline std::string format_eval_report(const EvalReport &report, const SweepConfig &cfg) {
  std::string out = "model\tpreprocessing\tn_topics\trun_seed\ttc\ttd\n";
  const auto row = [&](ModelKind m, std::size_t count, const std::string &seed, double tc,
                       double td) {
    out += to_string(m);
    out += '\t';
    out += to_string(report.level);
    out += '\t';
    out += std::to_string(count);
    out += '\t';
    out += seed;
    out += '\t';
    out += io::fixed(tc, 6);
    out += '\t';
    out += io::fixed(td, 6);
    out += '\n';
  };
  for (ModelKind m : cfg.models) {
    for (auto count : cfg.eval.topic_counts) {
      double tc = 0.0, td = 0.0;
      std::size_t runs = 0;
      for (const auto &c : report.cells) {
        if (c.model != m || c.n_topics != count)
          continue;
        row(m, count, std::to_string(c.seed), c.scores.tc, c.scores.td);
        tc += c.scores.tc;
        td += c.scores.td;
        ++runs;
      }
      if (runs > 0)
        row(m, count, "mean", tc / static_cast<double>(runs), td / static_cast<double>(runs));
    }
  }
  return out;
}

} // namespace topicmod
