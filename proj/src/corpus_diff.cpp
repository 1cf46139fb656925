#include "wordmap/corpus_diff.hpp"

#include <algorithm>

namespace wordmap::diff {

std::string_view to_string(SetLabel label) {
  switch (label) {
    case SetLabel::kOnlyA:
      return "a";
    case SetLabel::kOnlyB:
      return "b";
    case SetLabel::kBoth:
      return "both";
  }
  return "both";
}

std::optional<SetLabel> parse_label(std::string_view s) {
  if (s == "a") return SetLabel::kOnlyA;
  if (s == "b") return SetLabel::kOnlyB;
  if (s == "both") return SetLabel::kBoth;
  return std::nullopt;
}

std::optional<SetLabel> DiffResult::label_of(std::string_view word) const {
  if (only_a.find(word) != only_a.end()) return SetLabel::kOnlyA;
  if (only_b.find(word) != only_b.end()) return SetLabel::kOnlyB;
  if (both.find(word) != both.end()) return SetLabel::kBoth;
  return std::nullopt;
}

PairCounts DiffResult::counts_of(std::string_view word) const {
  if (auto it = only_a.find(word); it != only_a.end()) return {it->second, 0};
  if (auto it = only_b.find(word); it != only_b.end()) return {0, it->second};
  if (auto it = both.find(word); it != both.end()) return it->second;
  return {};
}

std::vector<std::string> DiffResult::words() const {
  std::vector<std::string> out;
  out.reserve(size());
  for (const auto& [w, n] : only_a) out.push_back(w);
  for (const auto& [w, n] : only_b) out.push_back(w);
  for (const auto& [w, n] : both) out.push_back(w);
  std::sort(out.begin(), out.end());
  return out;
}

DiffResult diff(const text::TokenCounts& a, const text::TokenCounts& b) {
  DiffResult result;
  // Both maps are sorted; walk them in lockstep.
  auto ia = a.counts.begin();
  auto ib = b.counts.begin();
  while (ia != a.counts.end() || ib != b.counts.end()) {
    if (ib == b.counts.end() || (ia != a.counts.end() && ia->first < ib->first)) {
      result.only_a.emplace_hint(result.only_a.end(), ia->first, ia->second);
      ++ia;
    } else if (ia == a.counts.end() || ib->first < ia->first) {
      result.only_b.emplace_hint(result.only_b.end(), ib->first, ib->second);
      ++ib;
    } else {
      result.both.emplace_hint(result.both.end(), ia->first, PairCounts{ia->second, ib->second});
      ++ia;
      ++ib;
    }
  }
  return result;
}

DiffResult single(const text::TokenCounts& a) { return diff(a, {}); }

Restricted restrict_to_model(const DiffResult& d, const embed::EmbeddingModel& model) {
  Restricted out;
  const auto split = [&](const auto& source, auto& target, SetLabel label) {
    for (const auto& [word, counts] : source) {
      if (model.contains(word)) {
        target.emplace_hint(target.end(), word, counts);
      } else {
        out.dropped.push_back({word, label});
      }
    }
  };
  split(d.only_a, out.kept.only_a, SetLabel::kOnlyA);
  split(d.only_b, out.kept.only_b, SetLabel::kOnlyB);
  split(d.both, out.kept.both, SetLabel::kBoth);
  std::sort(out.dropped.begin(), out.dropped.end(),
            [](const DroppedWord& x, const DroppedWord& y) { return x.word < y.word; });
  return out;
}

}  // namespace wordmap::diff
