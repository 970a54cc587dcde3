// Command-line front end: preprocess, fit, fit-lda, fit-nmf, eval, sweep.

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "topicmod/commands.hpp"

namespace {

using topicmod::Json;

enum class Kind { text, number, boolean, number_list, text_list };

struct Flag {
  const char *name;
  const char *section; // nullptr for top-level keys
  const char *key;
  Kind kind;
  const char *help;
};

const std::vector<Flag> &common_flags() {
  static const std::vector<Flag> flags = {
      {"--corpus", "paths", "corpus", Kind::text, "corpus file"},
      {"--corpus-format", "paths", "corpus_format", Kind::text, "raw or clean"},
      {"--embeddings", "paths", "embeddings", Kind::text, "EMB1 embedding file"},
      {"--stopwords", "paths", "stopwords", Kind::text, "stopword list"},
      {"--lemma-table", "paths", "lemma_table", Kind::text, "surface<TAB>lemma table"},
      {"--output", "paths", "output", Kind::text, "output file or directory"},
      {"--report", "paths", "report", Kind::text, "topic report to evaluate"},
      {"--level", "preprocess", "level", Kind::text, "partial or full"},
      {"--min-df", "vectorize", "min_df", Kind::number, "minimum document frequency"},
      {"--max-df", "vectorize", "max_df", Kind::number, "maximum document share"},
      {"--max-vocab", "vectorize", "max_vocab", Kind::number, "vocabulary cap"},
      {"--n-neighbors", "umap", "n_neighbors", Kind::number, "UMAP neighbors"},
      {"--n-components", "umap", "n_components", Kind::number, "UMAP output dimension"},
      {"--min-dist", "umap", "min_dist", Kind::number, "UMAP min_dist"},
      {"--n-epochs", "umap", "n_epochs", Kind::number, "UMAP epochs"},
      {"--negative-sample-rate", "umap", "negative_sample_rate", Kind::number,
       "UMAP negative samples per edge"},
      {"--learning-rate", "umap", "learning_rate", Kind::number, "UMAP learning rate"},
      {"--min-topic-size", "hdbscan", "min_topic_size", Kind::number, "HDBSCAN min cluster size"},
      {"--min-samples", "hdbscan", "min_samples", Kind::number, "HDBSCAN min samples"},
      {"--nr-topics", "topics", "nr_topics", Kind::number, "reduce to this many topics"},
      {"--n-keywords", "topics", "n_keywords", Kind::number, "keywords per topic"},
      {"--reduce-outliers", "topics", "reduce_outliers", Kind::boolean, "true or false"},
      {"--exclude-empty", "topics", "exclude_empty", Kind::boolean, "true or false"},
      {"--alpha", "lda", "alpha", Kind::number, "LDA document-topic prior"},
      {"--beta", "lda", "beta", Kind::number, "LDA topic-word prior"},
      {"--lda-iterations", "lda", "n_iterations", Kind::number, "LDA Gibbs sweeps"},
      {"--burn-in", "lda", "burn_in", Kind::number, "LDA burn-in sweeps"},
      {"--sample-lag", "lda", "sample_lag", Kind::number, "LDA sweeps between samples"},
      {"--nmf-iterations", "nmf", "n_iterations", Kind::number, "NMF update rounds"},
      {"--tol", "nmf", "tol", Kind::number, "NMF relative tolerance"},
      {"--top-n", "eval", "top_n", Kind::number, "keywords per topic for TC and TD"},
      {"--epsilon", "eval", "epsilon", Kind::number, "NPMI smoothing"},
      {"--topic-counts", "eval", "topic_counts", Kind::number_list, "comma-separated counts"},
      {"--seeds", "eval", "seeds", Kind::number_list, "comma-separated run seeds"},
      {"--models", "eval", "models", Kind::text_list, "comma-separated model filter"},
      {"--seed", nullptr, "seed", Kind::number, "master seed"},
  };
  return flags;
}

Json scalar(const std::string &flag, const std::string &value, Kind kind) {
  if (kind == Kind::text)
    return value;
  Json j;
  try {
    j = Json::parse(value);
  } catch (const Json::exception &) {
    throw topicmod::Error(topicmod::ErrorKind::invalid_config,
                          "bad value '" + value + "' for " + flag);
  }
  if ((kind == Kind::number && !j.is_number()) || (kind == Kind::boolean && !j.is_boolean()))
    throw topicmod::Error(topicmod::ErrorKind::invalid_config,
                          "bad value '" + value + "' for " + flag);
  return j;
}

Json flag_value(const Flag &f, const std::string &value) {
  if (f.kind != Kind::number_list && f.kind != Kind::text_list)
    return scalar(f.name, value, f.kind);
  Json list = Json::array();
  std::size_t start = 0;
  while (start <= value.size()) {
    auto end = value.find(',', start);
    if (end == std::string::npos)
      end = value.size();
    const auto item = value.substr(start, end - start);
    if (!item.empty())
      list.push_back(scalar(f.name, item, f.kind == Kind::number_list ? Kind::number : Kind::text));
    start = end + 1;
  }
  return list;
}

struct Invocation {
  std::string config_path;
  std::map<std::string, std::string> values; // flag name -> raw value
  std::string n_topics;
};

void add_flags(CLI::App *sub, Invocation &inv) {
  sub->add_option("--config", inv.config_path, "JSON run configuration");
  for (const auto &f : common_flags())
    sub->add_option(f.name, inv.values[f.name], f.help);
}

topicmod::RunConfig resolve(const Invocation &inv, CLI::App *sub, const char *n_topics_section) {
  Json j = Json::object();
  if (!inv.config_path.empty())
    j = topicmod::read_config_json(inv.config_path);
  if (!j.is_object())
    throw topicmod::Error(topicmod::ErrorKind::invalid_config, "config must be a JSON object");
  for (const auto &f : common_flags()) {
    if (sub->count(f.name) == 0)
      continue;
    const Json v = flag_value(f, inv.values.at(f.name));
    if (f.section)
      j[f.section][f.key] = v;
    else
      j[f.key] = v;
  }
  if (n_topics_section && sub->count("--n-topics"))
    j[n_topics_section]["n_topics"] = scalar("--n-topics", inv.n_topics, Kind::number);
  return topicmod::config_from_json(j);
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Topic modeling for short Serbian texts"};
  app.require_subcommand(1);

  Invocation inv;
  auto *preprocess = app.add_subcommand("preprocess", "clean and tokenize a raw corpus");
  auto *fit = app.add_subcommand("fit", "embedding-clustering topic model");
  auto *fit_lda = app.add_subcommand("fit-lda", "LDA baseline");
  auto *fit_nmf = app.add_subcommand("fit-nmf", "NMF baseline");
  auto *eval = app.add_subcommand("eval", "TC and TD of a saved topic report");
  auto *sweep = app.add_subcommand("sweep", "models x topic counts x seeds table");
  for (auto *sub : {preprocess, fit, fit_lda, fit_nmf, eval, sweep})
    add_flags(sub, inv);
  for (auto *sub : {fit_lda, fit_nmf})
    sub->add_option("--n-topics", inv.n_topics, "number of topics K");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : topicmod::exit_config;
  }

  return topicmod::guarded(std::cerr, [&]() -> int {
    if (preprocess->parsed())
      return topicmod::cmd_preprocess(resolve(inv, preprocess, nullptr), std::cerr);
    if (fit->parsed())
      return topicmod::cmd_fit(resolve(inv, fit, nullptr), std::cerr);
    if (fit_lda->parsed())
      return topicmod::cmd_fit_baseline(resolve(inv, fit_lda, "lda"), topicmod::ModelKind::lda,
                                        std::cerr);
    if (fit_nmf->parsed())
      return topicmod::cmd_fit_baseline(resolve(inv, fit_nmf, "nmf"), topicmod::ModelKind::nmf,
                                        std::cerr);
    if (eval->parsed())
      return topicmod::cmd_eval(resolve(inv, eval, nullptr), std::cout);
    return topicmod::cmd_sweep(resolve(inv, sweep, nullptr), std::cout, std::cerr);
  });
}
