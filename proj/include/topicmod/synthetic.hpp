#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "embedding_io.hpp"
#include "preprocess.hpp"
#include "random.hpp"

namespace topicmod::synthetic {

/// Letters-only pseudo-word, so it survives cleaning unchanged.
inline std::string word(std::size_t index) {
  std::string w = "w";
  for (int i = 0; i < 4; ++i) {
    w.insert(w.begin() + 1, static_cast<char>('a' + index % 26));
    index /= 26;
  }
  return w;
}

struct PlantedSpec {
  std::size_t n_groups = 5;
  std::size_t docs_per_group = 200;
  std::size_t tokens_per_doc = 20;
  std::size_t words_per_group = 50;
  std::size_t dim = 64;
  double noise = 0.05;
  std::uint64_t seed = 42;
};

struct PlantedCorpus {
  CleanCorpus corpus;
  std::vector<int> groups; // planted group per document
  std::vector<std::vector<std::string>> group_words;
  EmbeddingMatrix embeddings;
};

/// Documents draw tokens uniformly from their group's disjoint word list;
/// embeddings are the group's basis vector plus isotropic Gaussian noise.
/// Documents are interleaved across groups.
inline PlantedCorpus planted_corpus(const PlantedSpec &spec) {
  PlantedCorpus out;
  Rng rng(derive_seed(spec.seed, Stage::synthetic));
  out.group_words.resize(spec.n_groups);
  for (std::size_t g = 0; g < spec.n_groups; ++g)
    for (std::size_t j = 0; j < spec.words_per_group; ++j)
      out.group_words[g].push_back(word(g * spec.words_per_group + j));

  const std::size_t n = spec.n_groups * spec.docs_per_group;
  out.embeddings.rows.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.dim));
  for (std::size_t d = 0; d < n; ++d) {
    const std::size_t g = d % spec.n_groups;
    CleanDocument doc;
    doc.id = "doc" + std::to_string(d);
    for (std::size_t t = 0; t < spec.tokens_per_doc; ++t)
      doc.tokens.push_back(out.group_words[g][rng.below(spec.words_per_group)]);
    out.corpus.documents.push_back(std::move(doc));
    out.groups.push_back(static_cast<int>(g));
    for (std::size_t k = 0; k < spec.dim; ++k) {
      const double centre = (k == g % spec.dim) ? 1.0 : 0.0;
      out.embeddings.rows(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(k)) =
          static_cast<float>(centre + spec.noise * rng.normal());
    }
    out.embeddings.doc_ids.push_back(out.corpus.documents.back().id);
  }
  return out;
}

/// The corpus as raw "id<TAB>text" lines.
inline std::string format_raw(const CleanCorpus &corpus) {
  return format_clean_corpus(corpus);
}

struct Blobs {
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> points;
  std::vector<int> labels;
};

/// Isotropic Gaussian blobs centred on scaled basis vectors (pairwise
/// centre distance scale * sqrt(2)).
inline Blobs gaussian_blobs(std::size_t n_blobs, std::size_t per_blob, std::size_t dim,
                            double sigma, double scale, std::uint64_t seed) {
  Blobs b;
  Rng rng(seed);
  b.points.resize(static_cast<Eigen::Index>(n_blobs * per_blob), static_cast<Eigen::Index>(dim));
  for (std::size_t g = 0; g < n_blobs; ++g)
    for (std::size_t i = 0; i < per_blob; ++i) {
      const auto row = static_cast<Eigen::Index>(g * per_blob + i);
      for (std::size_t k = 0; k < dim; ++k)
        b.points(row, static_cast<Eigen::Index>(k)) =
            (k == g % dim ? scale : 0.0) + sigma * rng.normal();
      b.labels.push_back(static_cast<int>(g));
    }
  return b;
}

} // namespace topicmod::synthetic
