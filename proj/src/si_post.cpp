#include "propdet/si_post.hpp"

#include <algorithm>

#include "propdet/error.hpp"

namespace propdet {

IoLabel vote(std::span<const IoLabel> votes) {
  const auto inside = static_cast<std::size_t>(std::count(votes.begin(), votes.end(), IoLabel::I));
  return 2 * inside >= votes.size() && inside > 0 ? IoLabel::I : IoLabel::O;
}

std::vector<LabelSequence> majority_vote(std::span<const std::vector<LabelSequence>> runs,
                                         std::span<const Fragment> fragments) {
  if (runs.empty()) throw ShapeError("majority vote needs at least one run");
  const auto& first = runs.front();
  auto where = [&](std::size_t f) {
    std::string s = "fragment " + std::to_string(f);
    if (f < fragments.size()) s += " (article " + fragments[f].article_id + ", index " +
                                   std::to_string(fragments[f].index) + ")";
    return s;
  };
  for (std::size_t r = 1; r < runs.size(); ++r) {
    if (runs[r].size() != first.size()) {
      throw ShapeError("run " + std::to_string(r) + " has " + std::to_string(runs[r].size()) +
                       " fragments, run 0 has " + std::to_string(first.size()));
    }
    for (std::size_t f = 0; f < first.size(); ++f) {
      if (runs[r][f].size() != first[f].size()) {
        throw ShapeError("runs disagree on token count in " + where(f));
      }
    }
  }
  std::vector<LabelSequence> out(first.size());
  std::vector<IoLabel> votes(runs.size());
  for (std::size_t f = 0; f < first.size(); ++f) {
    out[f].resize(first[f].size());
    for (std::size_t t = 0; t < first[f].size(); ++t) {
      for (std::size_t r = 0; r < runs.size(); ++r) votes[r] = runs[r][f][t];
      out[f][t] = vote(votes);
    }
  }
  return out;
}

std::vector<CharSpan> merge_spans(std::vector<CharSpan> spans, std::size_t min_gap) {
  if (spans.empty()) return spans;
  std::sort(spans.begin(), spans.end());
  const auto gap = std::max<std::size_t>(min_gap, 1);
  std::vector<CharSpan> out;
  CharSpan current = spans.front();
  for (std::size_t k = 1; k < spans.size(); ++k) {
    const auto& next = spans[k];
    if (next.begin < current.end + gap) {
      current.end = std::max(current.end, next.end);
    } else {
      out.push_back(current);
      current = next;
    }
  }
  out.push_back(current);
  return out;
}

SpanMap merge_spans(const SpanMap& spans, std::size_t min_gap) {
  SpanMap out;
  for (const auto& [id, list] : spans) out[id] = merge_spans(list, min_gap);
  return out;
}

}  // namespace propdet
