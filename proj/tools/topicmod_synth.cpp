// Writes a planted-topic corpus and matching EMB1 embeddings.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "topicmod/commands.hpp"
#include "topicmod/synthetic.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Planted-topic corpus generator"};
  topicmod::synthetic::PlantedSpec spec;
  std::string corpus_path, embeddings_path;
  app.add_option("--groups", spec.n_groups, "number of planted topics");
  app.add_option("--docs-per-group", spec.docs_per_group, "documents per topic");
  app.add_option("--tokens-per-doc", spec.tokens_per_doc, "tokens per document");
  app.add_option("--words-per-group", spec.words_per_group, "topic vocabulary size");
  app.add_option("--dim", spec.dim, "embedding dimension");
  app.add_option("--noise", spec.noise, "embedding noise sigma");
  app.add_option("--seed", spec.seed, "generator seed");
  app.add_option("--corpus", corpus_path, "output corpus (id<TAB>text)")->required();
  app.add_option("--embeddings", embeddings_path, "output EMB1 file")->required();
  CLI11_PARSE(app, argc, argv);

  return topicmod::guarded(std::cerr, [&] {
    if (spec.n_groups < 1 || spec.docs_per_group < 1 || spec.words_per_group < 1)
      throw topicmod::Error(topicmod::ErrorKind::invalid_config, "sizes must be >= 1");
    if (spec.n_groups > spec.dim)
      throw topicmod::Error(topicmod::ErrorKind::invalid_config, "need dim >= groups");
    const auto planted = topicmod::synthetic::planted_corpus(spec);
    topicmod::io::write_file(corpus_path, topicmod::synthetic::format_raw(planted.corpus));
    topicmod::write_embeddings(planted.embeddings, embeddings_path);
    return 0;
  });
}
