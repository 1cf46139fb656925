#include "wordmap/map_export.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <set>

#include "json.hpp"
#include "wordmap/error.hpp"

namespace wordmap::mapfile {

namespace {

using nlohmann::json;

std::string pointer(std::string_view base, std::string_view key) {
  return std::string(base) + "/" + std::string(key);
}

std::string point_path(std::size_t index, std::string_view key = {}) {
  std::string p = "/points/" + std::to_string(index);
  if (!key.empty()) p = pointer(p, key);
  return p;
}

void append_number(std::string& out, double v) {
  if (v == 0.0 && std::signbit(v)) {
    out += "-0.0";
    return;
  }
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

void append_string(std::string& out, const std::string& s) {
  out += json(s).dump(-1, ' ', false, json::error_handler_t::strict);
}

bool sorted_by_word(const std::vector<MapPoint>& points) {
  return std::is_sorted(points.begin(), points.end(),
                        [](const MapPoint& a, const MapPoint& b) { return a.word < b.word; });
}

void sort_points(std::vector<MapPoint>& points) {
  std::sort(points.begin(), points.end(),
            [](const MapPoint& a, const MapPoint& b) { return a.word < b.word; });
}

const json& require(const json& obj, std::string_view base, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(pointer(base, key), "missing required field");
  return *it;
}

void reject_unknown_keys(const json& obj, std::string_view base,
                         std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw SchemaError(pointer(base, key), "unknown field");
    }
  }
}

std::string get_string(const json& obj, std::string_view base, const char* key) {
  const json& v = require(obj, base, key);
  if (!v.is_string()) throw SchemaError(pointer(base, key), "expected string");
  return v.get<std::string>();
}

double get_number(const json& obj, std::string_view base, const char* key) {
  const json& v = require(obj, base, key);
  if (!v.is_number()) throw SchemaError(pointer(base, key), "expected number");
  return v.get<double>();
}

std::size_t get_count(const json& obj, std::string_view base, const char* key) {
  const json& v = require(obj, base, key);
  if (!v.is_number_unsigned()) throw SchemaError(pointer(base, key), "expected non-negative integer");
  return v.get<std::size_t>();
}

}  // namespace

bool is_valid_timestamp(std::string_view s) {
  static constexpr std::string_view kPattern = "dddd-dd-ddTdd:dd:ddZ";
  if (s.size() != kPattern.size()) return false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (kPattern[i] == 'd' ? (s[i] < '0' || s[i] > '9') : s[i] != kPattern[i]) return false;
  }
  return true;
}

std::string utc_timestamp_now() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

WordMap build_map(const diff::DiffResult& d, const Matrix& coords,
                  const std::vector<std::string>& word_order, MapMeta meta) {
  if (word_order.size() != coords.rows()) {
    throw ConsistencyError("word list has " + std::to_string(word_order.size()) +
                           " entries but coordinates have " + std::to_string(coords.rows()) +
                           " rows");
  }
  if (!word_order.empty() && coords.cols() != 2) {
    throw ConsistencyError("map coordinates must be two-dimensional, got " +
                           std::to_string(coords.cols()) + " columns");
  }

  WordMap map;
  map.meta = std::move(meta);
  map.points.reserve(word_order.size());
  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < word_order.size(); ++i) {
    const std::string& word = word_order[i];
    const auto label = d.label_of(word);
    if (!label) throw ConsistencyError("word '" + word + "' is not in the diff result");
    if (!seen.insert(word).second) throw ConsistencyError("word '" + word + "' appears twice");
    const auto counts = d.counts_of(word);
    map.points.push_back({word, coords(i, 0), coords(i, 1), *label, counts.a, counts.b});
  }
  sort_points(map.points);
  return map;
}

void validate(const WordMap& map) {
  if (map.meta.schema_version != kSchemaVersion) {
    throw SchemaError("/meta/schema_version",
                      "unsupported schema version " + std::to_string(map.meta.schema_version));
  }
  if (!std::isfinite(map.meta.perplexity)) throw SchemaError("/meta/perplexity", "must be finite");
  if (!is_valid_timestamp(map.meta.generated_at)) {
    throw SchemaError("/meta/generated_at", "expected UTC timestamp YYYY-MM-DDTHH:MM:SSZ");
  }

  std::set<std::string_view> seen;
  for (std::size_t i = 0; i < map.points.size(); ++i) {
    const MapPoint& pt = map.points[i];
    if (pt.word.empty()) throw SchemaError(point_path(i, "word"), "empty word");
    if (!seen.insert(pt.word).second) throw SchemaError(point_path(i, "word"), "duplicate word '" + pt.word + "'");
    if (!std::isfinite(pt.x)) throw SchemaError(point_path(i, "x"), "non-finite coordinate");
    if (!std::isfinite(pt.y)) throw SchemaError(point_path(i, "y"), "non-finite coordinate");
    switch (pt.set) {
      case diff::SetLabel::kOnlyA:
        if (pt.count_b != 0) throw SchemaError(point_path(i, "count_b"), "must be 0 for set \"a\"");
        break;
      case diff::SetLabel::kOnlyB:
        if (pt.count_a != 0) throw SchemaError(point_path(i, "count_a"), "must be 0 for set \"b\"");
        break;
      case diff::SetLabel::kBoth:
        if (pt.count_a == 0) throw SchemaError(point_path(i, "count_a"), "must be >= 1 for set \"both\"");
        if (pt.count_b == 0) throw SchemaError(point_path(i, "count_b"), "must be >= 1 for set \"both\"");
        break;
    }
  }
}

std::string serialize_map(const WordMap& input) {
  try {
    validate(input);
  } catch (const SchemaError& e) {
    throw ValidationError(std::string("refusing to serialize invalid map: ") + e.what());
  }
  const std::vector<MapPoint>* points = &input.points;
  std::vector<MapPoint> sorted;
  if (!sorted_by_word(input.points)) {
    sorted = input.points;
    sort_points(sorted);
    points = &sorted;
  }

  std::string out;
  out.reserve(256 + points->size() * 96);
  out += "{\n  \"meta\": {\n";
  out += "    \"schema_version\": " + std::to_string(input.meta.schema_version) + ",\n";
  try {
    out += "    \"source_a_name\": ";
    append_string(out, input.meta.source_a_name);
    out += ",\n    \"source_b_name\": ";
    append_string(out, input.meta.source_b_name);
  } catch (const json::exception&) {
    throw ValidationError("source names must be valid UTF-8");
  }
  out += ",\n    \"dim\": " + std::to_string(input.meta.dim) + ",\n";
  out += "    \"perplexity\": ";
  append_number(out, input.meta.perplexity);
  out += ",\n    \"generated_at\": ";
  append_string(out, input.meta.generated_at);
  out += "\n  },\n  \"points\": [";
  for (std::size_t i = 0; i < points->size(); ++i) {
    const MapPoint& pt = (*points)[i];
    out += i == 0 ? "\n    " : ",\n    ";
    out += "{\"word\": ";
    try {
      append_string(out, pt.word);
    } catch (const json::exception&) {
      throw ValidationError("word at /points/" + std::to_string(i) + " is not valid UTF-8");
    }
    out += ", \"x\": ";
    append_number(out, pt.x);
    out += ", \"y\": ";
    append_number(out, pt.y);
    out += ", \"set\": \"";
    out += diff::to_string(pt.set);
    out += "\", \"count_a\": " + std::to_string(pt.count_a);
    out += ", \"count_b\": " + std::to_string(pt.count_b) + "}";
  }
  out += points->empty() ? "]\n}\n" : "\n  ]\n}\n";
  return out;
}

WordMap parse_map(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError("", std::string("malformed JSON: ") + e.what());
  }
  if (!root.is_object()) throw SchemaError("", "expected object");
  reject_unknown_keys(root, "", {"meta", "points"});

  WordMap map;
  const json& meta = require(root, "", "meta");
  if (!meta.is_object()) throw SchemaError("/meta", "expected object");
  reject_unknown_keys(meta, "/meta", {"schema_version", "source_a_name", "source_b_name", "dim",
                                      "perplexity", "generated_at"});
  const json& version = require(meta, "/meta", "schema_version");
  if (!version.is_number_integer()) throw SchemaError("/meta/schema_version", "expected integer");
  if (version.get<std::int64_t>() != kSchemaVersion) {
    throw SchemaError("/meta/schema_version",
                      "unsupported schema version " + std::to_string(version.get<std::int64_t>()));
  }
  map.meta.schema_version = kSchemaVersion;
  map.meta.source_a_name = get_string(meta, "/meta", "source_a_name");
  map.meta.source_b_name = get_string(meta, "/meta", "source_b_name");
  map.meta.dim = get_count(meta, "/meta", "dim");
  map.meta.perplexity = get_number(meta, "/meta", "perplexity");
  map.meta.generated_at = get_string(meta, "/meta", "generated_at");

  const json& points = require(root, "", "points");
  if (!points.is_array()) throw SchemaError("/points", "expected array");
  map.points.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const json& pt = points[i];
    const std::string base = point_path(i);
    if (!pt.is_object()) throw SchemaError(base, "expected object");
    reject_unknown_keys(pt, base, {"word", "x", "y", "set", "count_a", "count_b"});
    MapPoint p;
    p.word = get_string(pt, base, "word");
    p.x = get_number(pt, base, "x");
    p.y = get_number(pt, base, "y");
    const auto label = diff::parse_label(get_string(pt, base, "set"));
    if (!label) throw SchemaError(pointer(base, "set"), "expected \"a\", \"b\" or \"both\"");
    p.set = *label;
    p.count_a = get_count(pt, base, "count_a");
    p.count_b = get_count(pt, base, "count_b");
    map.points.push_back(std::move(p));
  }
  validate(map);
  sort_points(map.points);
  return map;
}

std::array<std::size_t, 3> label_counts(const WordMap& map) {
  std::array<std::size_t, 3> counts{};
  for (const auto& pt : map.points) ++counts[static_cast<std::size_t>(pt.set)];
  return counts;
}

}  // namespace wordmap::mapfile
