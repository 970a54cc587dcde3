#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "topicmod/embedding_io.hpp"
#include "topicmod/random.hpp"

namespace {

using namespace topicmod;

EmbeddingMatrix random_matrix(std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  EmbeddingMatrix m;
  m.rows.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < m.rows.size(); ++i)
    m.rows.data()[i] = static_cast<float>(rng.normal());
  for (std::size_t i = 0; i < n; ++i)
    m.doc_ids.push_back("doc-" + std::to_string(i) + (i % 3 == 0 ? "-ž" : ""));
  return m;
}

ErrorKind kind_of_decode(const std::string &bytes) {
  try {
    decode_embeddings(bytes);
  } catch (const Error &e) {
    return e.kind();
  }
  ADD_FAILURE() << "decode succeeded";
  return ErrorKind::invalid_config;
}

TEST(Emb1, OneByOneByteLayout) {
  EmbeddingMatrix m;
  m.rows.resize(1, 1);
  m.rows(0, 0) = 0.5f;
  m.doc_ids = {"d0"};
  const std::string bytes = encode_embeddings(m);
  const std::string expected("EMB1"
                             "\x01\x00\x00\x00"
                             "\x01\x00\x00\x00"
                             "\x00\x00\x00\x3f"
                             "\x02\x00"
                             "d0",
                             20);
  EXPECT_EQ(bytes, expected);
  EXPECT_EQ(decode_embeddings(bytes), m);
}

TEST(Emb1, RoundTripIsBitExact) {
  const EmbeddingMatrix m = random_matrix(2, 3, 1);
  const EmbeddingMatrix back = decode_embeddings(encode_embeddings(m));
  ASSERT_EQ(back.n_docs(), 2u);
  ASSERT_EQ(back.dim(), 3u);
  EXPECT_EQ(back, m);

  EmbeddingMatrix odd;
  odd.rows.resize(1, 4);
  odd.rows << -0.0f, std::numeric_limits<float>::denorm_min(),
      std::numeric_limits<float>::max(), -1e-30f;
  odd.doc_ids = {""};
  EXPECT_EQ(decode_embeddings(encode_embeddings(odd)), odd);
}

TEST(Emb1, EmptyMatrixRoundTrips) {
  EmbeddingMatrix m;
  m.rows.resize(0, 7);
  const std::string bytes = encode_embeddings(m);
  EXPECT_EQ(bytes.size(), 12u);
  const EmbeddingMatrix back = decode_embeddings(bytes);
  EXPECT_EQ(back.n_docs(), 0u);
  EXPECT_EQ(back.dim(), 7u);
}

TEST(Emb1, BadMagic) {
  std::string bytes = encode_embeddings(random_matrix(2, 3, 2));
  bytes.replace(0, 4, "XXXX");
  EXPECT_EQ(kind_of_decode(bytes), ErrorKind::bad_magic);
  EXPECT_EQ(kind_of_decode("EM"), ErrorKind::truncated_file);
}

TEST(Emb1, DeclaredRowsMissingIsTruncated) {
  const std::string five = encode_embeddings(random_matrix(5, 3, 3));
  std::string bytes = five;
  bytes[4] = 10; // claim 10 rows
  EXPECT_EQ(kind_of_decode(bytes), ErrorKind::truncated_file);
  EXPECT_EQ(kind_of_decode(five.substr(0, five.size() - 1)), ErrorKind::truncated_file);
}

TEST(Emb1, NonFiniteAndTrailingBytes) {
  EmbeddingMatrix m = random_matrix(2, 2, 4);
  std::string bytes = encode_embeddings(m);
  EXPECT_EQ(kind_of_decode(bytes + "x"), ErrorKind::trailing_bytes);

  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(&bytes[12 + 4 * 3], &nan, 4);
  try {
    decode_embeddings(bytes);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::non_finite_value);
    EXPECT_NE(std::string(e.what()).find("byte offset 24"), std::string::npos) << e.what();
  }
}

TEST(Emb1, FileRoundTrip) {
  const auto path = ::testing::TempDir() + "emb1_file_round_trip.emb";
  const EmbeddingMatrix m = random_matrix(4, 5, 5);
  write_embeddings(m, path);
  EXPECT_EQ(read_embeddings(path), m);
  EXPECT_THROW(read_embeddings(path + ".missing"), Error);
}

TEST(L2Normalize, Examples) {
  EmbeddingMatrix m;
  m.rows.resize(2, 2);
  m.rows << 3, 4, 0.6f, 0.8f;
  m.doc_ids = {"a", "b"};
  const EmbeddingMatrixD n = l2_normalize(m);
  EXPECT_NEAR(n.rows(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(n.rows(0, 1), 0.8, 1e-15);
  EXPECT_NEAR(n.rows(1, 0), 0.6, 1e-7);
  EXPECT_NEAR(n.rows(1, 1), 0.8, 1e-7);
  EXPECT_NEAR(n.rows.row(1).norm(), 1.0, 1e-15);
  EXPECT_EQ(n.doc_ids, m.doc_ids);

  m.rows.row(1).setZero();
  try {
    l2_normalize(m);
    FAIL();
  } catch (const Error &e) {
    EXPECT_EQ(e.kind(), ErrorKind::zero_row);
    EXPECT_NE(std::string(e.what()).find("row 1"), std::string::npos);
  }
}

TEST(L2Normalize, DotProductIsCosine) {
  const EmbeddingMatrix m = random_matrix(10, 16, 6);
  const EmbeddingMatrixD n = l2_normalize(m);
  const auto raw = m.rows.cast<double>();
  for (Eigen::Index i = 0; i < 10; ++i)
    for (Eigen::Index j = 0; j < 10; ++j) {
      const double cosine = raw.row(i).dot(raw.row(j)) / (raw.row(i).norm() * raw.row(j).norm());
      EXPECT_NEAR(n.rows.row(i).dot(n.rows.row(j)), cosine, 1e-9);
    }
}

} // namespace
