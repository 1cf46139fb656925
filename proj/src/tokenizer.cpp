#include "wordmap/tokenizer.hpp"

#include <fstream>
#include <sstream>

#include "utf8.hpp"
#include "wordmap/error.hpp"

namespace wordmap::text {

namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_ascii_alpha(char32_t cp) { return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z'); }

bool is_ascii_digit(char32_t cp) { return cp >= '0' && cp <= '9'; }

bool is_punctuation(char32_t cp) {
  if (cp < 0x80) return cp > ' ' && cp < 0x7F && !is_ascii_alpha(cp) && !is_ascii_digit(cp);
  switch (cp) {
    case 0x00A1:  // inverted exclamation mark
    case 0x00AB:  // left guillemet
    case 0x00BB:  // right guillemet
    case 0x00BF:  // inverted question mark
    case 0x3001:  // ideographic comma
    case 0x3002:  // ideographic full stop
      return true;
    default:
      // General Punctuation block: dashes, curly quotes, ellipsis, daggers.
      return cp >= 0x2010 && cp <= 0x2027;
  }
}

// Letters are ASCII letters and any non-ASCII code point that is not
// punctuation; good enough for Latin, Cyrillic and CJK text.
bool is_letter(char32_t cp) { return is_ascii_alpha(cp) || (cp >= 0x80 && !is_punctuation(cp)); }

struct CodePoint {
  std::size_t offset;
  std::size_t length;
  bool punct;
};

void split_chunk(std::string_view chunk, std::vector<std::string>& out) {
  std::vector<CodePoint> cps;
  for (std::size_t pos = 0; pos < chunk.size();) {
    const auto d = utf8::decode(chunk, pos);
    cps.push_back({pos, d.length, d.valid && is_punctuation(d.code_point)});
    pos += d.length;
  }

  std::size_t first = 0;
  std::size_t last = cps.size();
  while (first < last && cps[first].punct) ++first;
  while (last > first && cps[last - 1].punct) --last;

  for (std::size_t i = 0; i < first; ++i) {
    out.emplace_back(chunk.substr(cps[i].offset, cps[i].length));
  }
  if (first < last) {
    const std::size_t begin = cps[first].offset;
    const std::size_t end = cps[last - 1].offset + cps[last - 1].length;
    out.emplace_back(chunk.substr(begin, end - begin));
  }
  for (std::size_t i = std::max(last, first); i < cps.size(); ++i) {
    out.emplace_back(chunk.substr(cps[i].offset, cps[i].length));
  }
}

bool keep_token(std::string_view token, const Stoplist& stoplist, bool drop_non_alpha) {
  if (utf8::length(token) > kMaxTokenLength) return false;
  if (drop_non_alpha && !has_letter(token)) return false;
  return !stoplist.contains(token);
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

bool has_letter(std::string_view token) {
  for (std::size_t pos = 0; pos < token.size();) {
    const auto d = utf8::decode(token, pos);
    if (d.valid && is_letter(d.code_point)) return true;
    pos += d.length;
  }
  return false;
}

Stoplist::Stoplist(std::set<std::string> words) {
  for (const auto& w : words) words_.insert(to_lower(w));
}

bool Stoplist::contains(std::string_view word) const {
  return words_.find(to_lower(word)) != words_.end();
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && is_space(text[pos])) ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && !is_space(text[pos])) ++pos;
    if (pos > start) split_chunk(text.substr(start, pos - start), tokens);
  }
  return tokens;
}

TokenCounts count_and_filter(const std::vector<std::string>& tokens, const Stoplist& stoplist,
                             bool drop_non_alpha) {
  TokenCounts result;
  result.total_tokens = tokens.size();
  for (const auto& token : tokens) {
    if (!keep_token(token, stoplist, drop_non_alpha)) continue;
    auto it = result.counts.find(token);
    if (it == result.counts.end()) {
      result.counts.emplace(token, 1);
    } else {
      ++it->second;
    }
  }
  return result;
}

TokenCounts filter(const TokenCounts& counts, const Stoplist& stoplist, bool drop_non_alpha) {
  TokenCounts result;
  result.total_tokens = counts.total_tokens;
  for (const auto& [token, n] : counts.counts) {
    if (keep_token(token, stoplist, drop_non_alpha)) result.counts.emplace(token, n);
  }
  return result;
}

Stoplist load_stoplist(std::string_view bytes) {
  if (const auto bad = utf8::first_invalid(bytes)) {
    throw FormatError("stoplist is not valid UTF-8", *bad);
  }
  std::set<std::string> words;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    std::size_t eol = bytes.find('\n', pos);
    if (eol == std::string_view::npos) eol = bytes.size();
    std::string_view line = bytes.substr(pos, eol - pos);
    pos = eol + 1;
    while (!line.empty() && is_space(line.front())) line.remove_prefix(1);
    while (!line.empty() && is_space(line.back())) line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    words.insert(std::string(line));
  }
  return Stoplist(std::move(words));
}

Stoplist load_stoplist_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open stoplist '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_stoplist(buffer.view());
}

const Stoplist& default_stoplist() {
  static const Stoplist list = load_stoplist(default_stoplist_text());
  return list;
}

}  // namespace wordmap::text
