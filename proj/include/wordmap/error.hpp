#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wordmap {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input bytes (bad header, invalid UTF-8, bad number, ...).
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// The input ended before the declared number of entries was read.
class TruncationError : public Error {
 public:
  explicit TruncationError(std::size_t word_index)
      : Error("truncated embedding data at word index " + std::to_string(word_index)),
        word_index_(word_index) {}

  std::size_t word_index() const noexcept { return word_index_; }

 private:
  std::size_t word_index_;
};

class DuplicateKeyError : public Error {
 public:
  explicit DuplicateKeyError(const std::string& word)
      : Error("duplicate word in embedding data: '" + word + "'"), word_(word) {}

  const std::string& word() const noexcept { return word_; }

 private:
  std::string word_;
};

class MissingWordError : public Error {
 public:
  explicit MissingWordError(const std::string& word)
      : Error("word not in model: '" + word + "'"), word_(word) {}

  const std::string& word() const noexcept { return word_; }

 private:
  std::string word_;
};

/// Cosine similarity requested on a zero-norm vector.
class DegenerateVectorError : public Error {
 public:
  using Error::Error;
};

/// Numeric input that violates a precondition (non-finite, wrong shape).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Invalid optimizer or pipeline configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// The optimizer produced non-finite coordinates.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(int iteration)
      : Error("t-SNE diverged: non-finite coordinates at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

/// A WordMap document that does not satisfy the schema. `path()` is a JSON
/// pointer to the offending element.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : Error((path.empty() ? std::string("/") : path) + ": " + what), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Inputs to map assembly that disagree with each other.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace wordmap
