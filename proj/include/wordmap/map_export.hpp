#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "wordmap/corpus_diff.hpp"
#include "wordmap/matrix.hpp"

namespace wordmap::mapfile {

inline constexpr int kSchemaVersion = 1;

struct MapMeta {
  int schema_version = kSchemaVersion;
  std::string source_a_name;
  std::string source_b_name;
  std::size_t dim = 0;
  double perplexity = 0.0;
  /// "YYYY-MM-DDTHH:MM:SSZ"
  std::string generated_at;

  friend bool operator==(const MapMeta&, const MapMeta&) = default;
};

struct MapPoint {
  std::string word;
  double x = 0.0;
  double y = 0.0;
  diff::SetLabel set = diff::SetLabel::kBoth;
  std::size_t count_a = 0;
  std::size_t count_b = 0;

  friend bool operator==(const MapPoint&, const MapPoint&) = default;
};

/// The document read by the viewer. Points are kept sorted by word.
struct WordMap {
  MapMeta meta;
  std::vector<MapPoint> points;

  friend bool operator==(const WordMap&, const WordMap&) = default;
};

/// Pairs word_order[i] with row i of `coords` (which must have two
/// columns) and attaches the label and counts from `d`. Throws
/// ConsistencyError on a length mismatch, a repeated word, or a word that
/// is not in `d`.
WordMap build_map(const diff::DiffResult& d, const Matrix& coords,
                  const std::vector<std::string>& word_order, MapMeta meta);

/// Throws SchemaError (with a JSON pointer) if `map` breaks an invariant:
/// unknown schema version, non-finite coordinates, duplicate or empty
/// words, counts inconsistent with the set label.
void validate(const WordMap& map);

/// Canonical UTF-8 JSON: fixed key order, points sorted by word, numbers in
/// shortest round-trip form, one point per line. Throws ValidationError if
/// `map` does not validate.
std::string serialize_map(const WordMap& map);

/// Parses and validates a map document; points come back sorted by word.
/// Throws SchemaError naming the JSON path of the first violation.
WordMap parse_map(std::string_view json);

/// Number of points per label, indexed a, b, both.
std::array<std::size_t, 3> label_counts(const WordMap& map);

/// Current UTC time formatted for MapMeta::generated_at.
std::string utc_timestamp_now();

bool is_valid_timestamp(std::string_view s);

}  // namespace wordmap::mapfile
