#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "wordmap/embedding_store.hpp"
#include "wordmap/tokenizer.hpp"

namespace wordmap::diff {

enum class SetLabel { kOnlyA, kOnlyB, kBoth };

/// "a", "b" or "both".
std::string_view to_string(SetLabel label);
std::optional<SetLabel> parse_label(std::string_view s);

struct PairCounts {
  std::size_t a = 0;
  std::size_t b = 0;

  friend bool operator==(const PairCounts&, const PairCounts&) = default;
};

/// Partition of the union vocabulary of two sources.
struct DiffResult {
  std::map<std::string, std::size_t, std::less<>> only_a;
  std::map<std::string, std::size_t, std::less<>> only_b;
  std::map<std::string, PairCounts, std::less<>> both;

  std::size_t size() const noexcept { return only_a.size() + only_b.size() + both.size(); }

  /// Label of `word`, or nullopt if it is in neither source.
  std::optional<SetLabel> label_of(std::string_view word) const;

  /// (count in A, count in B); zeros for unknown words.
  PairCounts counts_of(std::string_view word) const;

  /// All words, sorted.
  std::vector<std::string> words() const;

  friend bool operator==(const DiffResult&, const DiffResult&) = default;
};

struct DroppedWord {
  std::string word;
  SetLabel label;

  friend bool operator==(const DroppedWord&, const DroppedWord&) = default;
};

DiffResult diff(const text::TokenCounts& a, const text::TokenCounts& b);

/// Diff of a single source: every word lands in `only_a`.
DiffResult single(const text::TokenCounts& a);

struct Restricted {
  DiffResult kept;
  std::vector<DroppedWord> dropped;  // sorted by word
};

/// Removes words the embedding model cannot place.
Restricted restrict_to_model(const DiffResult& d, const embed::EmbeddingModel& model);

}  // namespace wordmap::diff
