#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "topicmod/random.hpp"
#include "topicmod/vectorize.hpp"

namespace {

using namespace topicmod;

std::vector<CleanDocument> docs_of(const std::vector<std::string> &texts) {
  std::vector<CleanDocument> docs;
  for (std::size_t i = 0; i < texts.size(); ++i)
    docs.push_back({"d" + std::to_string(i), tokenize(texts[i]), texts[i].empty()});
  return docs;
}

Vocabulary vocab_of(const std::vector<std::string> &texts, VectorizeConfig cfg) {
  const auto docs = docs_of(texts);
  return build_vocabulary(std::span<const CleanDocument>(docs), cfg);
}

// Straight transcription of W[t,c] = tf * ln(1 + A / f) with plain loops.
double scalar_ctfidf(const std::vector<std::vector<double>> &tf, std::size_t c, std::size_t t) {
  double total = 0.0;
  for (const auto &row : tf)
    for (double v : row)
      total += v;
  const double A = total / static_cast<double>(tf.size());
  double f = 0.0;
  for (const auto &row : tf)
    f += row[t];
  if (f == 0.0)
    return 0.0;
  return tf[c][t] * std::log(1.0 + A / f);
}

TEST(Vocabulary, MinDfFilter) {
  VectorizeConfig cfg;
  cfg.min_df = 3;
  cfg.max_df = 1.0;
  const Vocabulary v = vocab_of({"a b", "a c", "a d", "a e"}, cfg);
  EXPECT_EQ(v.terms, (std::vector<std::string>{"a"}));
  EXPECT_EQ(v.doc_freq, (std::vector<std::size_t>{4}));
}

TEST(Vocabulary, MaxDfCanEmptyTheVocabulary) {
  VectorizeConfig cfg;
  cfg.min_df = 3;
  cfg.max_df = 0.5;
  try {
    vocab_of({"a b", "a c", "a d", "a e"}, cfg);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::empty_vocabulary);
    EXPECT_EQ(e.category(), ErrorCategory::model);
  }
}

TEST(Vocabulary, MaxVocabBreaksTiesLexicographically) {
  VectorizeConfig cfg;
  cfg.min_df = 1;
  cfg.max_df = 1.0;
  cfg.max_vocab = 2;
  EXPECT_EQ(vocab_of({"a a b c"}, cfg).terms, (std::vector<std::string>{"a", "b"}));
}

TEST(Vocabulary, CapIsSubsetOfUncapped) {
  VectorizeConfig cfg;
  cfg.min_df = 1;
  cfg.max_df = 1.0;
  const std::vector<std::string> texts = {"x y z z", "y q r", "z z y k", "k l m n", "q q q"};
  const Vocabulary all = vocab_of(texts, cfg);
  for (std::size_t cap = 1; cap <= all.size(); ++cap) {
    cfg.max_vocab = cap;
    const Vocabulary capped = vocab_of(texts, cfg);
    EXPECT_EQ(capped.size(), cap);
    for (const auto &t : capped.terms)
      EXPECT_TRUE(all.find(t).has_value()) << t;
  }
}

TEST(Vocabulary, StopwordsAreDropped) {
  VectorizeConfig cfg;
  cfg.min_df = 1;
  cfg.max_df = 1.0;
  cfg.stopwords = parse_stopwords("# serbian\n i \nje\n\n");
  EXPECT_EQ(cfg.stopwords.size(), 2u);
  EXPECT_EQ(vocab_of({"vakcina i je", "je lek"}, cfg).terms,
            (std::vector<std::string>{"lek", "vakcina"}));
}

TEST(Vocabulary, EmptyCorpusAndBadConfig) {
  VectorizeConfig cfg;
  EXPECT_THROW(vocab_of({}, cfg), Error);
  cfg.max_df = 0.0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.max_df = 0.5;
  cfg.min_df = 0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(CountMatrix, Examples) {
  const Vocabulary ab = make_vocabulary({"a", "b"});
  auto docs = docs_of({"a a b"});
  auto m = count_matrix(std::span<const CleanDocument>(docs), ab);
  ASSERT_EQ(m.rows.size(), 1u);
  EXPECT_EQ(m.rows[0], (std::vector<TermCount>{{0, 2}, {1, 1}}));

  docs = docs_of({"z"});
  m = count_matrix(std::span<const CleanDocument>(docs), make_vocabulary({"a"}));
  EXPECT_TRUE(m.rows[0].empty());

  docs = docs_of({"a", "b"});
  m = count_matrix(std::span<const CleanDocument>(docs), ab);
  EXPECT_EQ(m.rows[0], (std::vector<TermCount>{{0, 1}}));
  EXPECT_EQ(m.rows[1], (std::vector<TermCount>{{1, 1}}));
}

TEST(ClassCounts, Examples) {
  const Vocabulary a = make_vocabulary({"a"});
  const auto docs = docs_of({"a a", "a"});
  const auto m = count_matrix(std::span<const CleanDocument>(docs), a);

  std::vector<int> labels{0, 0};
  auto c = class_counts(m, labels);
  ASSERT_EQ(c.rows(), 1);
  EXPECT_EQ(c(0, 0), 3.0);

  labels = {0, -1};
  c = class_counts(m, labels);
  ASSERT_EQ(c.rows(), 1);
  EXPECT_EQ(c(0, 0), 2.0);

  labels = {0, 1};
  c = class_counts(m, labels);
  ASSERT_EQ(c.rows(), 2);
  EXPECT_EQ(c(0, 0), 2.0);
  EXPECT_EQ(c(1, 0), 1.0);
}

TEST(ClassCounts, SumEqualsNonOutlierRows) {
  const auto docs = docs_of({"a b", "b c c", "a", "c d", "d d d"});
  const Vocabulary v = make_vocabulary({"a", "b", "c", "d"});
  const auto m = count_matrix(std::span<const CleanDocument>(docs), v);
  const std::vector<int> labels{1, -1, 0, 1, 2};
  const Eigen::MatrixXd c = class_counts(m, labels);
  Eigen::VectorXd expected = Eigen::VectorXd::Zero(4);
  for (std::size_t d = 0; d < docs.size(); ++d)
    if (labels[d] >= 0)
      for (const auto &e : m.rows[d])
        expected(e.term) += e.count;
  EXPECT_EQ(Eigen::VectorXd(c.colwise().sum().transpose()), expected);
}

TEST(Ctfidf, HandComputedExamples) {
  Eigen::MatrixXd counts(2, 3); // terms a, b, c
  counts << 2, 1, 0,            // class A
      0, 2, 1;                  // class B
  const CtfidfMatrix w = ctfidf(counts);
  EXPECT_DOUBLE_EQ(w.avg_words_per_class, 3.0);
  EXPECT_NEAR(w.weights(0, 0), 1.83258146374831, 1e-12);
  EXPECT_DOUBLE_EQ(w.weights(0, 0), 2.0 * std::log(2.5));
  EXPECT_EQ(w.weights(0, 2), 0.0);
  EXPECT_EQ(w.weights(1, 0), 0.0);

  Eigen::MatrixXd single(1, 1);
  single << 5;
  EXPECT_NEAR(ctfidf(single).weights(0, 0), 3.46573590279973, 1e-12);
}

TEST(Ctfidf, MatchesScalarOracleOnRandomMatrices) {
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t C = 1 + rng.below(6);
    const std::size_t V = 1 + rng.below(12);
    std::vector<std::vector<double>> tf(C, std::vector<double>(V, 0.0));
    Eigen::MatrixXd counts(static_cast<Eigen::Index>(C), static_cast<Eigen::Index>(V));
    for (std::size_t c = 0; c < C; ++c) {
      for (std::size_t t = 0; t < V; ++t)
        tf[c][t] = rng.below(3) == 0 ? 0.0 : static_cast<double>(rng.below(20));
      tf[c][rng.below(V)] += 1.0; // no empty class
      for (std::size_t t = 0; t < V; ++t)
        counts(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t)) = tf[c][t];
    }
    const CtfidfMatrix w = ctfidf(counts);
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t t = 0; t < V; ++t) {
        const double expected = scalar_ctfidf(tf, c, t);
        const double got = w.weights(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(t));
        if (expected == 0.0)
          EXPECT_EQ(got, 0.0);
        else
          EXPECT_LE(std::abs(got - expected) / std::abs(expected), 1e-12);
      }
  }
}

TEST(Ctfidf, ClassPermutationPermutesRows) {
  Eigen::MatrixXd counts(3, 4);
  counts << 1, 0, 3, 2, 0, 5, 1, 0, 2, 2, 0, 7;
  Eigen::MatrixXd permuted(3, 4);
  permuted.row(0) = counts.row(2);
  permuted.row(1) = counts.row(0);
  permuted.row(2) = counts.row(1);
  const auto w = ctfidf(counts);
  const auto p = ctfidf(permuted);
  EXPECT_EQ(Eigen::MatrixXd(p.weights.row(0)), Eigen::MatrixXd(w.weights.row(2)));
  EXPECT_EQ(Eigen::MatrixXd(p.weights.row(1)), Eigen::MatrixXd(w.weights.row(0)));
  EXPECT_EQ(Eigen::MatrixXd(p.weights.row(2)), Eigen::MatrixXd(w.weights.row(1)));
}

TEST(Ctfidf, DegenerateInputs) {
  EXPECT_THROW(ctfidf(Eigen::MatrixXd(0, 3)), Error);
  Eigen::MatrixXd empty_class(2, 2);
  empty_class << 1, 1, 0, 0;
  EXPECT_THROW(ctfidf(empty_class), Error);
}

} // namespace
