#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "propdet/corpus.hpp"

namespace propdet {

inline constexpr std::size_t kDefaultMinGap = 25;
inline constexpr std::size_t kDefaultVotingRuns = 5;

/// I iff strictly more than half the votes are I; an exact even split is I.
IoLabel vote(std::span<const IoLabel> votes);

/// Token-wise vote across k runs. `runs[r][f]` is run r's labels for fragment f.
/// Throws ShapeError naming the fragment when runs disagree in shape; when
/// `fragments` is given the message carries the article id too.
std::vector<LabelSequence> majority_vote(std::span<const std::vector<LabelSequence>> runs,
                                         std::span<const Fragment> fragments = {});

/// Merges spans whose gap (next.begin - prev.end) is below `min_gap` into their
/// covering span, repeatedly, until all gaps are at least `min_gap`.
/// Overlapping and touching spans always merge. Input order is irrelevant.
std::vector<CharSpan> merge_spans(std::vector<CharSpan> spans, std::size_t min_gap = kDefaultMinGap);

SpanMap merge_spans(const SpanMap& spans, std::size_t min_gap = kDefaultMinGap);

}  // namespace propdet
