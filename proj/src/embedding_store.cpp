#include "wordmap/embedding_store.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include "utf8.hpp"
#include "wordmap/error.hpp"

namespace wordmap::embed {

namespace {

bool is_separator(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Empty string if `word` is usable as a vocabulary key, else the reason.
std::string word_problem(std::string_view word) {
  if (word.empty()) return "empty word";
  if (std::any_of(word.begin(), word.end(), is_separator)) return "word contains whitespace";
  if (!utf8::is_valid(word)) return "word is not valid UTF-8";
  return {};
}

float decode_le_float(const unsigned char* p) {
  std::uint32_t bits = static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
                       (static_cast<std::uint32_t>(p[2]) << 16) |
                       (static_cast<std::uint32_t>(p[3]) << 24);
  return std::bit_cast<float>(bits);
}

void append_le_float(std::string& out, float value) {
  const auto bits = std::bit_cast<std::uint32_t>(value);
  for (int shift = 0; shift < 32; shift += 8) {
    out.push_back(static_cast<char>((bits >> shift) & 0xFF));
  }
}

template <typename T, typename U>
double cosine_impl(std::span<const T> u, std::span<const U> v) {
  if (u.size() != v.size()) {
    throw ValidationError("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                          std::to_string(v.size()) + ")");
  }
  double dot = 0.0;
  double uu = 0.0;
  double vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = u[i];
    const double b = v[i];
    dot += a * b;
    uu += a * a;
    vv += b * b;
  }
  if (uu == 0.0 || vv == 0.0) throw DegenerateVectorError("cosine of a zero-norm vector");
  // sqrt(uu * vv) rather than sqrt(uu) * sqrt(vv): for u == v this is exactly uu.
  const double r = dot / std::sqrt(uu * vv);
  return std::clamp(r, -1.0, 1.0);
}

struct Header {
  std::size_t vocab_size;
  std::size_t dim;
  std::size_t end;  // offset just past the header's '\n'
};

Header parse_header(std::string_view bytes) {
  const std::size_t eol = bytes.find('\n');
  if (eol == std::string_view::npos) throw FormatError("missing header line", 0);
  const std::string_view line = bytes.substr(0, eol);

  std::size_t pos = 0;
  const auto read_count = [&](const char* field) {
    std::size_t value = 0;
    const char* first = line.data() + pos;
    const char* last = line.data() + line.size();
    if (first == last || *first < '0' || *first > '9') {
      throw FormatError(std::string("header: expected integer ") + field, pos);
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{}) throw FormatError(std::string("header: ") + field + " out of range", pos);
    pos = static_cast<std::size_t>(ptr - line.data());
    return value;
  };

  Header header{};
  header.vocab_size = read_count("vocabulary size");
  if (pos >= line.size() || line[pos] != ' ') {
    throw FormatError("header: expected ' ' after vocabulary size", pos);
  }
  while (pos < line.size() && line[pos] == ' ') ++pos;
  header.dim = read_count("dimension");
  if (pos != line.size()) throw FormatError("header: unexpected trailing characters", pos);
  if (header.dim == 0) throw FormatError("header: dimension must be positive", 0);
  header.end = eol + 1;
  return header;
}

}  // namespace

EmbeddingModel::EmbeddingModel(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw ValidationError("embedding dimension must be positive");
}

EmbeddingModel::EmbeddingModel(std::size_t dim, std::vector<std::string> words,
                               std::vector<float> values)
    : dim_(dim), words_(std::move(words)), values_(std::move(values)) {
  if (dim_ == 0) throw ValidationError("embedding dimension must be positive");
  if (values_.size() != words_.size() * dim_) {
    throw ValidationError("embedding table size does not match vocabulary size times dimension");
  }
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (const auto problem = word_problem(words_[i]); !problem.empty()) {
      throw ValidationError(problem + " at word index " + std::to_string(i));
    }
    if (!index_.emplace(words_[i], i).second) throw DuplicateKeyError(words_[i]);
  }

  unit_values_.resize(values_.size());
  zero_norm_.resize(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    const auto row = std::span<const float>(values_).subspan(i * dim_, dim_);
    double norm2 = 0.0;
    for (float v : row) {
      if (!std::isfinite(v)) {
        throw ValidationError("non-finite vector component for word '" + words_[i] + "'");
      }
      norm2 += static_cast<double>(v) * v;
    }
    zero_norm_[i] = norm2 == 0.0;
    if (zero_norm_[i]) continue;
    const double inv = 1.0 / std::sqrt(norm2);
    for (std::size_t d = 0; d < dim_; ++d) {
      unit_values_[i * dim_ + d] = static_cast<float>(row[d] * inv);
    }
  }
}

bool EmbeddingModel::contains(std::string_view word) const { return index_.contains(word); }

std::optional<std::size_t> EmbeddingModel::index_of(std::string_view word) const {
  const auto it = index_.find(word);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::span<const float>> EmbeddingModel::lookup(std::string_view word) const {
  const auto idx = index_of(word);
  if (!idx) return std::nullopt;
  return vector(*idx);
}

std::span<const float> EmbeddingModel::vector(std::size_t index) const {
  return std::span<const float>(values_).subspan(index * dim_, dim_);
}

std::span<const float> EmbeddingModel::normalized(std::size_t index) const {
  return std::span<const float>(unit_values_).subspan(index * dim_, dim_);
}

bool operator==(const EmbeddingModel& a, const EmbeddingModel& b) {
  if (a.dim_ != b.dim_ || a.words_ != b.words_) return false;
  // Bitwise, so -0.0 and 0.0 differ and the comparison matches byte roundtrips.
  return a.values_.size() == b.values_.size() &&
         std::memcmp(a.values_.data(), b.values_.data(), a.values_.size() * sizeof(float)) == 0;
}

EmbeddingModel parse_binary(std::span<const std::byte> bytes) {
  return parse_binary(
      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

EmbeddingModel parse_binary(std::string_view bytes) {
  const Header header = parse_header(bytes);
  const std::size_t dim = header.dim;
  const std::size_t vector_bytes = dim * sizeof(float);

  // The header is untrusted; never reserve more than the payload could hold.
  const std::size_t max_entries = (bytes.size() - header.end) / (vector_bytes + 2) + 1;
  std::vector<std::string> words;
  std::vector<float> values;
  words.reserve(std::min(header.vocab_size, max_entries));
  values.reserve(std::min(header.vocab_size, max_entries) * dim);

  std::size_t pos = header.end;
  for (std::size_t i = 0; i < header.vocab_size; ++i) {
    if (i > 0 && pos < bytes.size() && bytes[pos] == '\n') ++pos;
    const std::size_t space = bytes.find(' ', pos);
    if (space == std::string_view::npos) throw TruncationError(i);
    const std::string_view word = bytes.substr(pos, space - pos);
    if (const auto problem = word_problem(word); !problem.empty()) throw FormatError(problem, pos);
    pos = space + 1;

    if (bytes.size() - pos < vector_bytes) throw TruncationError(i);
    const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data() + pos);
    for (std::size_t d = 0; d < dim; ++d) {
      const float v = decode_le_float(raw + d * sizeof(float));
      if (!std::isfinite(v)) {
        throw FormatError("non-finite vector component", pos + d * sizeof(float));
      }
      values.push_back(v);
    }
    pos += vector_bytes;
    words.emplace_back(word);
  }
  if (pos < bytes.size() && bytes[pos] == '\n' && header.vocab_size > 0) ++pos;
  if (pos != bytes.size()) throw FormatError("unexpected data after last entry", pos);

  return EmbeddingModel(dim, std::move(words), std::move(values));
}

EmbeddingModel parse_text(std::string_view text) {
  const Header header = parse_header(text);
  std::vector<std::string> words;
  std::vector<float> values;

  std::size_t pos = header.end;
  for (std::size_t i = 0; i < header.vocab_size; ++i) {
    if (pos >= text.size()) throw TruncationError(i);
    std::size_t eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    std::size_t col = 0;
    const auto next_field = [&]() -> std::string_view {
      while (col < line.size() && (line[col] == ' ' || line[col] == '\t')) ++col;
      const std::size_t start = col;
      while (col < line.size() && line[col] != ' ' && line[col] != '\t') ++col;
      return line.substr(start, col - start);
    };

    const std::string_view word = next_field();
    if (const auto problem = word_problem(word); !problem.empty()) throw FormatError(problem, pos);
    for (std::size_t d = 0; d < header.dim; ++d) {
      const std::string_view field = next_field();
      const std::size_t field_offset = pos + static_cast<std::size_t>(field.data() - line.data());
      if (field.empty()) throw FormatError("expected " + std::to_string(header.dim) + " values", field_offset);
      float v = 0.0f;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (ec != std::errc{} || ptr != field.data() + field.size() || !std::isfinite(v)) {
        throw FormatError("invalid number for word " + std::to_string(i) + ", component " + std::to_string(d),
                          field_offset);
      }
      values.push_back(v);
    }
    if (!next_field().empty()) throw FormatError("too many values on line", pos);
    words.emplace_back(word);
    pos = eol + 1;
  }
  while (pos < text.size() && is_separator(text[pos])) ++pos;
  if (pos < text.size()) throw FormatError("unexpected data after last entry", pos);

  return EmbeddingModel(header.dim, std::move(words), std::move(values));
}

EmbeddingModel parse_model(std::string_view bytes, ModelFormat format) {
  return format == ModelFormat::kBinary ? parse_binary(bytes) : parse_text(bytes);
}

std::string serialize_binary(const EmbeddingModel& model) {
  std::string out = std::to_string(model.vocab_size()) + " " + std::to_string(model.dim()) + "\n";
  out.reserve(out.size() + model.vocab_size() * (model.dim() * sizeof(float) + 16));
  for (std::size_t i = 0; i < model.vocab_size(); ++i) {
    out += model.words()[i];
    out.push_back(' ');
    for (float v : model.vector(i)) append_le_float(out, v);
    out.push_back('\n');
  }
  return out;
}

std::string serialize_text(const EmbeddingModel& model) {
  std::string out = std::to_string(model.vocab_size()) + " " + std::to_string(model.dim()) + "\n";
  char buf[32];
  for (std::size_t i = 0; i < model.vocab_size(); ++i) {
    out += model.words()[i];
    for (float v : model.vector(i)) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
      out.push_back(' ');
      out.append(buf, ptr);
    }
    out.push_back('\n');
  }
  return out;
}

EmbeddingModel load_model(const std::string& path, ModelFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("error reading model file '" + path + "'");
  return parse_model(buffer.view(), format);
}

double cosine(std::span<const float> u, std::span<const float> v) { return cosine_impl(u, v); }

double cosine(std::span<const double> u, std::span<const double> v) { return cosine_impl(u, v); }

std::vector<SimilarityHit> analogy(const EmbeddingModel& model,
                                   std::span<const std::string> positive,
                                   std::span<const std::string> negative, std::size_t k) {
  if (k == 0) throw ValidationError("k must be at least 1");
  const std::size_t dim = model.dim();

  std::vector<bool> excluded(model.vocab_size(), false);
  std::vector<double> query(dim, 0.0);
  const auto accumulate = [&](const std::string& word, double sign) {
    const auto idx = model.index_of(word);
    if (!idx) throw MissingWordError(word);
    if (model.is_zero_vector(*idx)) {
      throw DegenerateVectorError("query word '" + word + "' has a zero vector");
    }
    excluded[*idx] = true;
    const auto unit = model.normalized(*idx);
    for (std::size_t d = 0; d < dim; ++d) query[d] += sign * unit[d];
  };
  for (const auto& w : positive) accumulate(w, 1.0);
  for (const auto& w : negative) accumulate(w, -1.0);

  if (std::all_of(query.begin(), query.end(), [](double q) { return q == 0.0; })) {
    throw DegenerateVectorError("analogy query vector is zero");
  }

  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(model.vocab_size());
  for (std::size_t i = 0; i < model.vocab_size(); ++i) {
    if (excluded[i] || model.is_zero_vector(i)) continue;
    scored.emplace_back(cosine_impl(std::span<const double>(query), model.normalized(i)), i);
  }

  const auto& words = model.words();
  const auto better = [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return words[a.second] < words[b.second];
  };
  const std::size_t count = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(count),
                    scored.end(), better);

  std::vector<SimilarityHit> hits;
  hits.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    hits.push_back({words[scored[i].second], scored[i].first});
  }
  return hits;
}

std::vector<SimilarityHit> nearest(const EmbeddingModel& model, const std::string& word,
                                   std::size_t k) {
  const std::string query[] = {word};
  return analogy(model, query, {}, k);
}

}  // namespace wordmap::embed
