#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace wordmap::embed {

struct SimilarityHit {
  std::string word;
  double score = 0.0;

  friend bool operator==(const SimilarityHit&, const SimilarityHit&) = default;
};

enum class ModelFormat { kBinary, kText };

/// Immutable word -> vector table in word2vec layout.
///
/// Raw vectors are kept exactly as read. A parallel table of unit-length
/// copies is built at construction and backs the similarity queries; words
/// whose vector has zero norm are never returned as query results.
class EmbeddingModel {
 public:
  /// Empty model of dimension `dim` (must be positive).
  explicit EmbeddingModel(std::size_t dim);

  /// Builds a model from parallel word/vector lists. `values` holds
  /// `words.size() * dim` floats in row order. Throws DuplicateKeyError on a
  /// repeated word and ValidationError on non-finite values.
  EmbeddingModel(std::size_t dim, std::vector<std::string> words, std::vector<float> values);

  std::size_t vocab_size() const noexcept { return words_.size(); }
  std::size_t dim() const noexcept { return dim_; }

  /// Words in insertion (file) order.
  const std::vector<std::string>& words() const noexcept { return words_; }

  bool contains(std::string_view word) const;

  std::optional<std::span<const float>> lookup(std::string_view word) const;

  std::span<const float> vector(std::size_t index) const;

  /// Unit-length copy of entry `index`; all zeros for a zero vector.
  std::span<const float> normalized(std::size_t index) const;

  bool is_zero_vector(std::size_t index) const { return zero_norm_.at(index); }

  /// Index of `word`, if present.
  std::optional<std::size_t> index_of(std::string_view word) const;

  friend bool operator==(const EmbeddingModel& a, const EmbeddingModel& b);

 private:
  struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::size_t dim_;
  std::vector<std::string> words_;
  std::vector<float> values_;
  std::vector<float> unit_values_;
  std::vector<bool> zero_norm_;
  std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> index_;
};

/// Parses the word2vec binary layout: ASCII header "<vocab> <dim>\n", then
/// per entry the UTF-8 word, one space, `dim` little-endian float32 values,
/// and an optional '\n'.
EmbeddingModel parse_binary(std::span<const std::byte> bytes);
EmbeddingModel parse_binary(std::string_view bytes);

/// Parses the text variant: header line, then "word v1 ... vdim" per line.
EmbeddingModel parse_text(std::string_view text);

EmbeddingModel parse_model(std::string_view bytes, ModelFormat format);

/// Writes the binary layout with a '\n' after every vector.
std::string serialize_binary(const EmbeddingModel& model);

/// Writes the text layout using shortest round-trip float formatting.
std::string serialize_text(const EmbeddingModel& model);

/// Reads and parses a model file. Throws IoError if the file cannot be read.
EmbeddingModel load_model(const std::string& path, ModelFormat format);

/// dot(u,v) / sqrt(|u|^2 |v|^2), clamped to [-1, 1]. Symmetric in its
/// arguments bit for bit, and exactly 1 for cosine(u, u).
double cosine(std::span<const float> u, std::span<const float> v);
double cosine(std::span<const double> u, std::span<const double> v);

/// 3CosAdd: ranks every non-input word by cosine to
/// sum(unit(positive)) - sum(unit(negative)). Results are ordered by score
/// descending, then word ascending, and clamped to the number of eligible
/// words.
std::vector<SimilarityHit> analogy(const EmbeddingModel& model,
                                   std::span<const std::string> positive,
                                   std::span<const std::string> negative, std::size_t k);

/// The `k` words closest to `word`, excluding `word` itself.
std::vector<SimilarityHit> nearest(const EmbeddingModel& model, const std::string& word,
                                   std::size_t k);

}  // namespace wordmap::embed
