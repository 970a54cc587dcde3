#pragma once

#include <stdexcept>
#include <string>

namespace topicmod {

/// Failure categories. Each maps onto one CLI exit code.
enum class ErrorCategory { config, data, model };

enum class ErrorKind {
  // configuration
  invalid_config,
  missing_table,
  // data
  io_failure,
  bad_format,
  duplicate_id,
  bad_magic,
  truncated_file,
  non_finite_value,
  trailing_bytes,
  zero_row,
  id_mismatch,
  negative_input,
  too_few_points,
  // model
  empty_vocabulary,
  empty_corpus,
  degenerate_input,
  no_topics,
};

constexpr ErrorCategory category_of(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::invalid_config:
  case ErrorKind::missing_table:
    return ErrorCategory::config;
  case ErrorKind::empty_vocabulary:
  case ErrorKind::empty_corpus:
  case ErrorKind::degenerate_input:
  case ErrorKind::no_topics:
    return ErrorCategory::model;
  default:
    return ErrorCategory::data;
  }
}

constexpr const char *kind_name(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::invalid_config: return "InvalidConfig";
  case ErrorKind::missing_table: return "MissingTable";
  case ErrorKind::io_failure: return "IoFailure";
  case ErrorKind::bad_format: return "BadFormat";
  case ErrorKind::duplicate_id: return "DuplicateId";
  case ErrorKind::bad_magic: return "BadMagic";
  case ErrorKind::truncated_file: return "TruncatedFile";
  case ErrorKind::non_finite_value: return "NonFiniteValue";
  case ErrorKind::trailing_bytes: return "TrailingBytes";
  case ErrorKind::zero_row: return "ZeroRow";
  case ErrorKind::id_mismatch: return "IdMismatch";
  case ErrorKind::negative_input: return "NegativeInput";
  case ErrorKind::too_few_points: return "TooFewPoints";
  case ErrorKind::empty_vocabulary: return "EmptyVocabulary";
  case ErrorKind::empty_corpus: return "EmptyCorpus";
  case ErrorKind::degenerate_input: return "DegenerateInput";
  case ErrorKind::no_topics: return "NoTopics";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  ErrorCategory category() const noexcept { return category_of(kind_); }

private:
  ErrorKind kind_;
};

} // namespace topicmod
