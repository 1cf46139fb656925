#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace wordmap::text {

/// Tokens longer than this many code points are never counted.
inline constexpr std::size_t kMaxTokenLength = 100;

/// Case-insensitive word set. Entries are stored lowercased; queries are
/// lowercased before the membership test. Lowercasing is ASCII-only.
class Stoplist {
 public:
  Stoplist() = default;
  explicit Stoplist(std::set<std::string> words);

  bool contains(std::string_view word) const;
  std::size_t size() const noexcept { return words_.size(); }
  const std::set<std::string, std::less<>>& words() const noexcept { return words_; }

 private:
  std::set<std::string, std::less<>> words_;
};

/// Token -> occurrence count, plus the number of tokens seen before
/// filtering. Keys are case-sensitive.
struct TokenCounts {
  std::map<std::string, std::size_t, std::less<>> counts;
  std::size_t total_tokens = 0;

  friend bool operator==(const TokenCounts&, const TokenCounts&) = default;
};

/// Splits on whitespace, then peels punctuation off both ends of each chunk
/// as one-character tokens. Punctuation inside a chunk (apostrophes,
/// hyphens, dots) stays part of the token. Non-ASCII code points count as
/// word characters except for common Unicode quotes and dashes.
std::vector<std::string> tokenize(std::string_view text);

/// Counts tokens, skipping stoplist members (case-insensitive), tokens over
/// kMaxTokenLength code points and, when `drop_non_alpha` is set, tokens
/// without a single letter.
TokenCounts count_and_filter(const std::vector<std::string>& tokens, const Stoplist& stoplist,
                             bool drop_non_alpha);

/// Re-applies the filters of count_and_filter to already-counted tokens.
TokenCounts filter(const TokenCounts& counts, const Stoplist& stoplist, bool drop_non_alpha);

/// Newline-delimited word list. Blank lines and lines starting with '#' are
/// skipped, surrounding whitespace trimmed, words lowercased. Throws
/// FormatError on invalid UTF-8.
Stoplist load_stoplist(std::string_view bytes);

/// Reads a stoplist file; throws IoError if it cannot be read.
Stoplist load_stoplist_file(const std::string& path);

/// The bundled list of the 3000 most frequent English words.
std::string_view default_stoplist_text();
const Stoplist& default_stoplist();

/// ASCII lowercase copy.
std::string to_lower(std::string_view s);

/// True if `token` contains at least one letter.
bool has_letter(std::string_view token);

}  // namespace wordmap::text
