#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "embedding_io.hpp"
#include "error.hpp"
#include "io.hpp"
#include "pipeline.hpp"
#include "preprocess.hpp"
#include "topic_model.hpp"

namespace topicmod {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_data = 3, exit_model = 4 };

inline int exit_code_for(ErrorCategory c) noexcept {
  switch (c) {
  case ErrorCategory::config: return exit_config;
  case ErrorCategory::data: return exit_data;
  case ErrorCategory::model: return exit_model;
  }
  return exit_model;
}

/// Runs `body`, reporting any exception on `err` and mapping it to an exit code.
template <class F>
int guarded(std::ostream &err, F &&body) {
  try {
    return body();
  } catch (const Error &e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.category());
  } catch (const nlohmann::json::exception &e) {
    err << "error: InvalidConfig: " << e.what() << '\n';
    return exit_config;
  } catch (const std::filesystem::filesystem_error &e) {
    err << "error: IoFailure: " << e.what() << '\n';
    return exit_data;
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
    return exit_model;
  }
}

namespace detail {

inline std::optional<LemmaTable> lemma_table_for(const RunConfig &cfg) {
  if (cfg.level != PreprocessLevel::full)
    return std::nullopt;
  if (!cfg.paths.lemma_table)
    throw Error(ErrorKind::missing_table, "full preprocessing requires paths.lemma_table");
  return load_lemma_table(*cfg.paths.lemma_table);
}

inline CleanCorpus preprocess_raw(const RunConfig &cfg) {
  const auto docs = read_raw_corpus(*cfg.paths.corpus);
  const auto table = lemma_table_for(cfg);
  return preprocess_corpus(docs, cfg.level, table ? &*table : nullptr);
}

inline CleanCorpus load_corpus(const RunConfig &cfg) {
  if (cfg.paths.corpus_format == CorpusFormat::raw)
    return preprocess_raw(cfg);
  return parse_clean_corpus(io::read_file(*cfg.paths.corpus), cfg.level);
}

/// The configuration with its stopword file loaded.
inline RunConfig with_stopwords(RunConfig cfg) {
  if (cfg.paths.stopwords)
    cfg.vectorize.stopwords = load_stopwords(*cfg.paths.stopwords);
  return cfg;
}

inline void write_artifacts(const std::string &dir, const CleanCorpus &corpus,
                            const std::vector<int> &labels, const std::vector<Topic> &topics,
                            const RunConfig &cfg, const Json &effective) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
    throw Error(ErrorKind::io_failure, "cannot create output directory '" + dir + "'");
  const std::filesystem::path base(dir);
  io::write_file((base / "topics.tsv").string(), format_topic_report(topics));
  io::write_file((base / "labels.tsv").string(), format_labels(corpus, labels));
  io::write_file((base / "params.json").string(), params_snapshot(cfg, effective));
}

inline std::size_t count_outliers(const std::vector<int> &labels) {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), -1));
}

} // namespace detail

/// Raw corpus in, clean corpus file out.
inline int cmd_preprocess(const RunConfig &cfg, std::ostream &err) {
  validate(cfg, {.corpus = true, .output = true});
  const CleanCorpus corpus = detail::preprocess_raw(cfg);
  io::write_file(*cfg.paths.output, format_clean_corpus(corpus));
  std::size_t empty = 0;
  for (const auto &d : corpus.documents)
    empty += d.empty ? 1 : 0;
  err << "preprocess: level=" << to_string(cfg.level) << " docs_in=" << corpus.size()
      << " docs_out=" << corpus.size() - empty << " empty=" << empty << '\n';
  return exit_ok;
}

/// Writes topics.tsv, labels.tsv and params.json into paths.output.
inline int cmd_fit(const RunConfig &raw_cfg, std::ostream &err) {
  validate(raw_cfg, {.corpus = true, .embeddings = true, .output = true});
  const RunConfig cfg = detail::with_stopwords(raw_cfg);
  const CleanCorpus corpus = detail::load_corpus(cfg);
  const EmbeddingMatrix emb = read_embeddings(*cfg.paths.embeddings);

  const TopicModelResult base = fit_bertopic_base(corpus, emb, cfg.topic_config(), cfg.seed);
  const TopicModelResult r = finish_bertopic(base, cfg.nr_topics, cfg.reduce_outliers);

  std::size_t fitted = 0;
  for (const auto &d : corpus.documents)
    fitted += (!cfg.exclude_empty || !d.tokens.empty()) ? 1 : 0;
  const Json effective = {
      {"umap_seed", derive_seed(cfg.seed, Stage::umap)},
      {"n_neighbors", fitted > 1 ? std::min(cfg.umap.n_neighbors, fitted - 1) : 0},
      {"min_samples", cfg.hdbscan.effective_min_samples()},
      {"documents_fitted", fitted},
      {"vocabulary_size", r.vocab.size()},
      {"topics_found", base.n_topics()},
      {"topics_reported", r.n_topics()},
      {"outliers_before_reduction", detail::count_outliers(base.labels)},
      {"outliers", detail::count_outliers(r.labels)}};
  detail::write_artifacts(*cfg.paths.output, corpus, r.labels, r.topics, cfg, effective);
  err << "fit: topics=" << r.n_topics() << " outliers=" << detail::count_outliers(r.labels)
      << '\n';
  return exit_ok;
}

/// LDA or NMF with lda.n_topics / nmf.n_topics components.
inline int cmd_fit_baseline(const RunConfig &raw_cfg, ModelKind which, std::ostream &err) {
  if (which == ModelKind::bertopic)
    throw Error(ErrorKind::invalid_config, "fit-baseline takes lda or nmf");
  validate(raw_cfg, {.corpus = true, .output = true});
  const RunConfig cfg = detail::with_stopwords(raw_cfg);
  const CleanCorpus corpus = detail::load_corpus(cfg);
  const BaselineInput input = baseline_input(corpus, cfg.vectorize);

  TopicSet set;
  Json effective;
  if (which == ModelKind::lda) {
    set = run_lda(input, cfg.lda, cfg.seed, cfg.n_keywords);
    effective = {{"lda_seed", derive_seed(cfg.seed, Stage::lda)},
                 {"alpha", cfg.lda.effective_alpha()}};
  } else {
    set = run_nmf(input, cfg.nmf, cfg.seed, cfg.n_keywords);
    effective = {{"nmf_seed", derive_seed(cfg.seed, Stage::nmf)}};
  }
  effective["vocabulary_size"] = input.vocab.size();
  effective["topics_reported"] = set.topics.size();
  detail::write_artifacts(*cfg.paths.output, corpus, set.labels, set.topics, cfg, effective);
  err << to_string(which) << ": topics=" << set.topics.size() << '\n';
  return exit_ok;
}

inline std::string format_scores(const Scores &s) {
  return "tc=" + io::fixed(s.tc, 6) + "\ttd=" + io::fixed(s.td, 6) +
         "\tn_topics=" + std::to_string(s.n_topics) + "\tskipped=" + std::to_string(s.n_skipped) +
         "\n";
}

/// TC and TD of a saved topic report against the corpus.
inline int cmd_eval(const RunConfig &cfg, std::ostream &out) {
  validate(cfg, {.corpus = true, .report = true});
  const CleanCorpus corpus = detail::load_corpus(cfg);
  const auto topics = parse_topic_report(io::read_file(*cfg.paths.report));
  const CooccurrenceStats stats = CooccurrenceStats::from_corpus(corpus);
  out << format_scores(score_topics(topics, stats, cfg.eval));
  return exit_ok;
}

/// Sweep table to paths.output (stdout when unset). Any failed cell makes
/// the exit code nonzero.
inline int cmd_sweep(const RunConfig &raw_cfg, std::ostream &out, std::ostream &err) {
  const bool needs_embeddings =
      std::find(raw_cfg.models.begin(), raw_cfg.models.end(), ModelKind::bertopic) !=
      raw_cfg.models.end();
  validate(raw_cfg, {.corpus = true, .embeddings = needs_embeddings});
  const RunConfig cfg = detail::with_stopwords(raw_cfg);
  const CleanCorpus corpus = detail::load_corpus(cfg);
  std::optional<EmbeddingMatrix> emb;
  if (needs_embeddings)
    emb = read_embeddings(*cfg.paths.embeddings);

  const SweepConfig sc = cfg.sweep_config();
  const EvalReport report = sweep(corpus, emb ? &*emb : nullptr, sc);
  const std::string table = format_eval_report(report, sc);
  if (cfg.paths.output)
    io::write_file(*cfg.paths.output, table);
  else
    out << table;
  for (const auto &f : report.failures)
    err << "sweep: " << to_string(f.model) << " n_topics=" << f.n_topics << " seed=" << f.seed
        << " failed: " << f.message << '\n';
  return report.failures.empty() ? exit_ok : exit_model;
}

} // namespace topicmod
