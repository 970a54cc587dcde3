#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "error.hpp"
#include "io.hpp"

namespace topicmod {

/// Dense n_docs x dim row-major matrix with one id per row.
template <typename Scalar> struct BasicEmbeddingMatrix {
  using Rows = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  Rows rows;
  std::vector<std::string> doc_ids;

  std::size_t n_docs() const noexcept { return static_cast<std::size_t>(rows.rows()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(rows.cols()); }

  friend bool operator==(const BasicEmbeddingMatrix &a, const BasicEmbeddingMatrix &b) {
    if (a.rows.rows() != b.rows.rows() || a.rows.cols() != b.rows.cols() ||
        a.doc_ids != b.doc_ids)
      return false;
    return std::memcmp(a.rows.data(), b.rows.data(),
                       sizeof(Scalar) * static_cast<std::size_t>(a.rows.size())) == 0;
  }
};

/// As stored on disk (EMB1 payload is f32).
using EmbeddingMatrix = BasicEmbeddingMatrix<float>;
/// Working precision for the numerical core.
using EmbeddingMatrixD = BasicEmbeddingMatrix<double>;

namespace detail {

inline void put_u16(std::string &out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

inline void put_u32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i)
    out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class ByteReader {
public:
  explicit ByteReader(const std::string &bytes) : bytes_(bytes) {}

  std::size_t offset() const noexcept { return pos_; }
  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

  void require(std::size_t n, const char *what) const {
    if (remaining() < n)
      throw Error(ErrorKind::truncated_file,
                  std::string("file ends while reading ") + what + " at byte offset " +
                      std::to_string(pos_) + " (need " + std::to_string(n) +
                      " bytes, have " + std::to_string(remaining()) + ")");
  }

  std::uint32_t u32(const char *what) {
    require(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i]))
           << (8 * i);
    pos_ += 4;
    return v;
  }

  std::uint16_t u16(const char *what) {
    require(2, what);
    const auto v = static_cast<std::uint16_t>(
        static_cast<unsigned char>(bytes_[pos_]) |
        (static_cast<unsigned char>(bytes_[pos_ + 1]) << 8));
    pos_ += 2;
    return v;
  }

  std::string take(std::size_t n, const char *what) {
    require(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

private:
  const std::string &bytes_;
  std::size_t pos_ = 0;
};

} // namespace detail

/// EMB1 layout, little-endian: "EMB1", u32 n_docs, u32 dim, n_docs*dim f32
/// row-major, then per document a u16 id length followed by the id bytes.
inline std::string encode_embeddings(const EmbeddingMatrix &m) {
  if (m.doc_ids.size() != m.n_docs())
    throw Error(ErrorKind::bad_format, "doc id count does not match row count");
  std::string out = "EMB1";
  detail::put_u32(out, static_cast<std::uint32_t>(m.n_docs()));
  detail::put_u32(out, static_cast<std::uint32_t>(m.dim()));
  out.reserve(12 + 4 * static_cast<std::size_t>(m.rows.size()));
  for (Eigen::Index i = 0; i < m.rows.rows(); ++i)
    for (Eigen::Index j = 0; j < m.rows.cols(); ++j)
      detail::put_u32(out, std::bit_cast<std::uint32_t>(m.rows(i, j)));
  for (const auto &id : m.doc_ids) {
    if (id.size() > 0xFFFF)
      throw Error(ErrorKind::bad_format, "doc id longer than 65535 bytes");
    detail::put_u16(out, static_cast<std::uint16_t>(id.size()));
    out += id;
  }
  return out;
}

inline EmbeddingMatrix decode_embeddings(const std::string &bytes) {
  detail::ByteReader in(bytes);
  const std::string magic = in.take(4, "magic");
  if (magic != "EMB1")
    throw Error(ErrorKind::bad_magic, "expected 'EMB1' at byte offset 0");
  const std::uint32_t n = in.u32("n_docs");
  const std::uint32_t dim = in.u32("dim");
  const std::uint64_t payload = std::uint64_t{n} * dim * 4;
  in.require(payload, "vector payload");

  EmbeddingMatrix m;
  m.rows.resize(n, dim);
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = 0; j < dim; ++j) {
      const std::size_t offset = in.offset();
      const float v = std::bit_cast<float>(in.u32("vector payload"));
      if (!std::isfinite(v))
        throw Error(ErrorKind::non_finite_value,
                    "row " + std::to_string(i) + " column " + std::to_string(j) +
                        " at byte offset " + std::to_string(offset));
      m.rows(i, j) = v;
    }
  }
  m.doc_ids.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const std::uint16_t len = in.u16("doc id length");
    m.doc_ids.push_back(in.take(len, "doc id"));
  }
  if (in.remaining() != 0)
    throw Error(ErrorKind::trailing_bytes,
                std::to_string(in.remaining()) + " unexpected bytes at byte offset " +
                    std::to_string(in.offset()));
  return m;
}

inline EmbeddingMatrix read_embeddings(const std::string &path) {
  return decode_embeddings(io::read_file(path));
}

inline void write_embeddings(const EmbeddingMatrix &m, const std::string &path) {
  io::write_file(path, encode_embeddings(m));
}

/// Scales every row to unit Euclidean norm, widening to double.
template <typename Scalar>
EmbeddingMatrixD l2_normalize(const BasicEmbeddingMatrix<Scalar> &m) {
  EmbeddingMatrixD out;
  out.doc_ids = m.doc_ids;
  out.rows = m.rows.template cast<double>();
  for (Eigen::Index i = 0; i < out.rows.rows(); ++i) {
    const double norm = out.rows.row(i).norm();
    if (!(norm > 0.0))
      throw Error(ErrorKind::zero_row, "row " + std::to_string(i) + " has zero norm");
    out.rows.row(i) /= norm;
  }
  return out;
}

} // namespace topicmod
