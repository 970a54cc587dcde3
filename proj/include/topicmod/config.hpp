#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "baselines.hpp"
#include "cluster.hpp"
#include "error.hpp"
#include "eval.hpp"
#include "io.hpp"
#include "pipeline.hpp"
#include "preprocess.hpp"
#include "random.hpp"
#include "reduce.hpp"
#include "topic_model.hpp"
#include "vectorize.hpp"

namespace topicmod {

using Json = nlohmann::json;

enum class CorpusFormat { raw, clean };

struct Paths {
  std::optional<std::string> corpus;
  CorpusFormat corpus_format = CorpusFormat::clean;
  std::optional<std::string> embeddings;
  std::optional<std::string> stopwords;
  std::optional<std::string> lemma_table;
  std::optional<std::string> output; // file for preprocess/sweep, directory for fits
  std::optional<std::string> report; // topic report read by eval
};

/// Everything a command needs. Stopwords and lemma tables stay as paths
/// here and are loaded by the commands.
struct RunConfig {
  Paths paths;
  PreprocessLevel level = PreprocessLevel::partial;
  VectorizeConfig vectorize;
  UmapParams umap;
  HdbscanParams hdbscan;
  std::optional<std::size_t> nr_topics;
  std::size_t n_keywords = 10;
  bool reduce_outliers = true;
  bool exclude_empty = true;
  LdaParams lda;
  NmfParams nmf;
  EvalConfig eval;
  std::vector<ModelKind> models{ModelKind::bertopic, ModelKind::lda, ModelKind::nmf};
  std::uint64_t seed = 42;

  TopicModelConfig topic_config() const {
    TopicModelConfig c;
    c.vectorize = vectorize;
    c.umap = umap;
    c.hdbscan = hdbscan;
    c.n_keywords = n_keywords;
    c.exclude_empty = exclude_empty;
    return c;
  }

  SweepConfig sweep_config() const {
    SweepConfig c;
    c.topic = topic_config();
    c.outlier_reduction = reduce_outliers;
    c.lda = lda;
    c.nmf = nmf;
    c.eval = eval;
    c.models = models;
    return c;
  }
};

namespace detail {

inline void reject_unknown(const Json &obj, const std::string &where,
                           std::initializer_list<const char *> allowed) {
  if (!obj.is_object())
    throw Error(ErrorKind::invalid_config, where + " must be an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto &[key, _] : obj.items())
    if (!keys.count(key))
      throw Error(ErrorKind::invalid_config,
                  "unknown key '" + key + "' in " + (where.empty() ? "config" : where));
}

template <class T>
void read(const Json &obj, const char *key, T &out, const std::string &where) {
  if (!obj.contains(key) || obj.at(key).is_null())
    return;
  try {
    out = obj.at(key).get<T>();
  } catch (const Json::exception &) {
    throw Error(ErrorKind::invalid_config, "bad value for " + where + "." + key);
  }
}

template <class T>
void read(const Json &obj, const char *key, std::optional<T> &out, const std::string &where) {
  if (!obj.contains(key))
    return;
  if (obj.at(key).is_null()) {
    out.reset();
    return;
  }
  T value{};
  read(obj, key, value, where);
  out = value;
}

// Counts arrive as JSON numbers; negative ones would wrap in size_t.
inline void read_count(const Json &obj, const char *key, std::size_t &out,
                       const std::string &where) {
  if (!obj.contains(key) || obj.at(key).is_null())
    return;
  const Json &v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw Error(ErrorKind::invalid_config, where + "." + key + " must be a non-negative integer");
  out = v.get<std::size_t>();
}

inline void read_count(const Json &obj, const char *key, std::optional<std::size_t> &out,
                       const std::string &where) {
  if (!obj.contains(key))
    return;
  if (obj.at(key).is_null()) {
    out.reset();
    return;
  }
  std::size_t value = 0;
  read_count(obj, key, value, where);
  out = value;
}

inline Json optional_json(const std::optional<std::size_t> &v) { return v ? Json(*v) : Json(); }
inline Json optional_json(const std::optional<double> &v) { return v ? Json(*v) : Json(); }
inline Json optional_json(const std::optional<std::string> &v) { return v ? Json(*v) : Json(); }

} // namespace detail

inline RunConfig config_from_json(const Json &j) {
  using detail::read;
  using detail::read_count;
  RunConfig c;
  detail::reject_unknown(j, "", {"paths", "preprocess", "vectorize", "umap", "hdbscan", "topics",
                                 "lda", "nmf", "eval", "seed", "effective"});
  read(j, "seed", c.seed, "");

  if (j.contains("paths")) {
    const Json &p = j.at("paths");
    detail::reject_unknown(p, "paths", {"corpus", "corpus_format", "embeddings", "stopwords",
                                        "lemma_table", "output", "report"});
    read(p, "corpus", c.paths.corpus, "paths");
    read(p, "embeddings", c.paths.embeddings, "paths");
    read(p, "stopwords", c.paths.stopwords, "paths");
    read(p, "lemma_table", c.paths.lemma_table, "paths");
    read(p, "output", c.paths.output, "paths");
    read(p, "report", c.paths.report, "paths");
    std::string format = c.paths.corpus_format == CorpusFormat::raw ? "raw" : "clean";
    read(p, "corpus_format", format, "paths");
    if (format == "raw")
      c.paths.corpus_format = CorpusFormat::raw;
    else if (format == "clean")
      c.paths.corpus_format = CorpusFormat::clean;
    else
      throw Error(ErrorKind::invalid_config, "paths.corpus_format must be 'raw' or 'clean'");
  }

  if (j.contains("preprocess")) {
    const Json &p = j.at("preprocess");
    detail::reject_unknown(p, "preprocess", {"level"});
    std::string level = to_string(c.level);
    read(p, "level", level, "preprocess");
    c.level = parse_level(level);
  }

  if (j.contains("vectorize")) {
    const Json &v = j.at("vectorize");
    detail::reject_unknown(v, "vectorize", {"min_df", "max_df", "max_vocab"});
    read_count(v, "min_df", c.vectorize.min_df, "vectorize");
    read(v, "max_df", c.vectorize.max_df, "vectorize");
    read_count(v, "max_vocab", c.vectorize.max_vocab, "vectorize");
  }

  if (j.contains("umap")) {
    const Json &u = j.at("umap");
    detail::reject_unknown(u, "umap", {"n_neighbors", "n_components", "min_dist", "metric",
                                       "n_epochs", "negative_sample_rate", "learning_rate"});
    read_count(u, "n_neighbors", c.umap.n_neighbors, "umap");
    read_count(u, "n_components", c.umap.n_components, "umap");
    read(u, "min_dist", c.umap.min_dist, "umap");
    read_count(u, "n_epochs", c.umap.n_epochs, "umap");
    read_count(u, "negative_sample_rate", c.umap.negative_sample_rate, "umap");
    read(u, "learning_rate", c.umap.learning_rate, "umap");
    std::string metric = "cosine";
    read(u, "metric", metric, "umap");
    if (metric != "cosine")
      throw Error(ErrorKind::invalid_config, "umap.metric must be 'cosine'");
  }

  if (j.contains("hdbscan")) {
    const Json &h = j.at("hdbscan");
    detail::reject_unknown(h, "hdbscan", {"min_topic_size", "min_samples"});
    read_count(h, "min_topic_size", c.hdbscan.min_cluster_size, "hdbscan");
    read_count(h, "min_samples", c.hdbscan.min_samples, "hdbscan");
  }

  if (j.contains("topics")) {
    const Json &t = j.at("topics");
    detail::reject_unknown(t, "topics",
                           {"nr_topics", "n_keywords", "reduce_outliers", "exclude_empty"});
    read_count(t, "nr_topics", c.nr_topics, "topics");
    read_count(t, "n_keywords", c.n_keywords, "topics");
    read(t, "reduce_outliers", c.reduce_outliers, "topics");
    read(t, "exclude_empty", c.exclude_empty, "topics");
  }

  if (j.contains("lda")) {
    const Json &l = j.at("lda");
    detail::reject_unknown(l, "lda",
                           {"n_topics", "alpha", "beta", "n_iterations", "burn_in", "sample_lag"});
    read_count(l, "n_topics", c.lda.n_topics, "lda");
    read(l, "alpha", c.lda.alpha, "lda");
    read(l, "beta", c.lda.beta, "lda");
    read_count(l, "n_iterations", c.lda.n_iterations, "lda");
    read_count(l, "burn_in", c.lda.burn_in, "lda");
    read_count(l, "sample_lag", c.lda.sample_lag, "lda");
  }

  if (j.contains("nmf")) {
    const Json &n = j.at("nmf");
    detail::reject_unknown(n, "nmf", {"n_topics", "n_iterations", "tol"});
    read_count(n, "n_topics", c.nmf.rank, "nmf");
    read_count(n, "n_iterations", c.nmf.n_iterations, "nmf");
    read(n, "tol", c.nmf.tol, "nmf");
  }

  if (j.contains("eval")) {
    const Json &e = j.at("eval");
    detail::reject_unknown(e, "eval", {"top_n", "epsilon", "topic_counts", "seeds", "models"});
    read_count(e, "top_n", c.eval.top_n, "eval");
    read(e, "epsilon", c.eval.epsilon, "eval");
    read(e, "topic_counts", c.eval.topic_counts, "eval");
    read(e, "seeds", c.eval.seeds, "eval");
    if (e.contains("models")) {
      std::vector<std::string> names;
      read(e, "models", names, "eval");
      c.models.clear();
      for (const auto &name : names)
        c.models.push_back(parse_model(name));
      if (c.models.empty())
        throw Error(ErrorKind::invalid_config, "eval.models must not be empty");
    }
  }
  return c;
}

inline Json config_to_json(const RunConfig &c) {
  using detail::optional_json;
  Json j;
  j["seed"] = c.seed;
  j["paths"] = {{"corpus", optional_json(c.paths.corpus)},
                {"corpus_format", c.paths.corpus_format == CorpusFormat::raw ? "raw" : "clean"},
                {"embeddings", optional_json(c.paths.embeddings)},
                {"stopwords", optional_json(c.paths.stopwords)},
                {"lemma_table", optional_json(c.paths.lemma_table)},
                {"output", optional_json(c.paths.output)},
                {"report", optional_json(c.paths.report)}};
  j["preprocess"] = {{"level", to_string(c.level)}};
  j["vectorize"] = {{"min_df", c.vectorize.min_df},
                    {"max_df", c.vectorize.max_df},
                    {"max_vocab", optional_json(c.vectorize.max_vocab)}};
  j["umap"] = {{"n_neighbors", c.umap.n_neighbors},
               {"n_components", c.umap.n_components},
               {"min_dist", c.umap.min_dist},
               {"metric", "cosine"},
               {"n_epochs", c.umap.n_epochs},
               {"negative_sample_rate", c.umap.negative_sample_rate},
               {"learning_rate", c.umap.learning_rate}};
  j["hdbscan"] = {{"min_topic_size", c.hdbscan.min_cluster_size},
                  {"min_samples", optional_json(c.hdbscan.min_samples)}};
  j["topics"] = {{"nr_topics", optional_json(c.nr_topics)},
                 {"n_keywords", c.n_keywords},
                 {"reduce_outliers", c.reduce_outliers},
                 {"exclude_empty", c.exclude_empty}};
  j["lda"] = {{"n_topics", c.lda.n_topics},
              {"alpha", optional_json(c.lda.alpha)},
              {"beta", c.lda.beta},
              {"n_iterations", c.lda.n_iterations},
              {"burn_in", c.lda.burn_in},
              {"sample_lag", c.lda.sample_lag}};
  j["nmf"] = {{"n_topics", c.nmf.rank}, {"n_iterations", c.nmf.n_iterations}, {"tol", c.nmf.tol}};
  Json models = Json::array();
  for (auto m : c.models)
    models.push_back(to_string(m));
  j["eval"] = {{"top_n", c.eval.top_n},
               {"epsilon", c.eval.epsilon},
               {"topic_counts", c.eval.topic_counts},
               {"seeds", c.eval.seeds},
               {"models", models}};
  return j;
}

inline Json parse_json(const std::string &text, const std::string &origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error &e) {
    throw Error(ErrorKind::invalid_config, origin + ": " + e.what());
  }
}

/// A missing or unreadable config file is a configuration error.
inline Json read_config_json(const std::string &path) {
  std::string text;
  try {
    text = io::read_file(path);
  } catch (const Error &) {
    throw Error(ErrorKind::invalid_config, "cannot read config file '" + path + "'");
  }
  return parse_json(text, path);
}

inline RunConfig load_config(const std::string &path) {
  return config_from_json(read_config_json(path));
}

/// Which inputs a command reads. Validation demands these paths and checks
/// that they exist.
struct Requirements {
  bool corpus = false;
  bool embeddings = false;
  bool report = false;
  bool output = false;
};

inline void validate(const RunConfig &c, const Requirements &need) {
  namespace fs = std::filesystem;
  const auto require = [](const std::optional<std::string> &p, const char *name, bool needed) {
    if (!p) {
      if (needed)
        throw Error(ErrorKind::invalid_config, std::string("paths.") + name + " is required");
      return;
    }
    if (!fs::exists(*p))
      throw Error(ErrorKind::invalid_config,
                  std::string("paths.") + name + " does not exist: " + *p);
  };
  require(c.paths.corpus, "corpus", need.corpus);
  require(c.paths.embeddings, "embeddings", need.embeddings);
  require(c.paths.report, "report", need.report);
  require(c.paths.stopwords, "stopwords", false);
  require(c.paths.lemma_table, "lemma_table", false);
  if (need.output && !c.paths.output)
    throw Error(ErrorKind::invalid_config, "paths.output is required");

  c.vectorize.validate();
  c.hdbscan.validate();
  c.lda.validate();
  c.nmf.validate();
  c.eval.validate();
  if (c.umap.n_components < 1)
    throw Error(ErrorKind::invalid_config, "umap.n_components must be >= 1");
  if (c.umap.n_neighbors < 2)
    throw Error(ErrorKind::invalid_config, "umap.n_neighbors must be >= 2");
  if (!(c.umap.learning_rate > 0.0))
    throw Error(ErrorKind::invalid_config, "umap.learning_rate must be > 0");
  if (!(c.umap.min_dist >= 0.0 && c.umap.min_dist < 1.0))
    throw Error(ErrorKind::invalid_config, "umap.min_dist must be in [0, 1)");
  if (c.nr_topics && *c.nr_topics < 1)
    throw Error(ErrorKind::invalid_config, "topics.nr_topics must be >= 1");
  if (c.n_keywords < 1)
    throw Error(ErrorKind::invalid_config, "topics.n_keywords must be >= 1");
}

/// The configuration plus the derived values a run actually used. The
/// "effective" block is informational; loading the snapshot ignores it.
inline std::string params_snapshot(const RunConfig &c, const Json &effective) {
  Json j = config_to_json(c);
  j["effective"] = effective;
  return j.dump(2) + "\n";
}

} // namespace topicmod
