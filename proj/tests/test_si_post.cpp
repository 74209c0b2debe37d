#include <doctest.h>

#include <algorithm>
#include <random>

#include "oracles.hpp"
#include "propdet/error.hpp"
#include "propdet/si_post.hpp"

using namespace propdet;

namespace {

constexpr auto I = IoLabel::I;
constexpr auto O = IoLabel::O;

std::vector<CharSpan> random_spans(std::mt19937_64& rng) {
  std::vector<CharSpan> out;
  const auto n = std::uniform_int_distribution<int>(0, 10)(rng);
  for (int i = 0; i < n; ++i) {
    const auto b = std::uniform_int_distribution<std::size_t>(0, 400)(rng);
    out.push_back({b, b + std::uniform_int_distribution<std::size_t>(1, 40)(rng)});
  }
  return out;
}

}  // namespace

TEST_CASE("single-token votes") {
  CHECK(vote(std::vector<IoLabel>{I, I, I, O, O}) == I);
  CHECK(vote(std::vector<IoLabel>{I, O, O, O, O}) == O);
  CHECK(vote(std::vector<IoLabel>{I, I, O, O}) == I);
  CHECK(vote(std::vector<IoLabel>{O}) == O);
  CHECK(vote(std::vector<IoLabel>{I}) == I);
}

TEST_CASE("voting with identical runs is the identity") {
  const std::vector<LabelSequence> run = {{I, O, I}, {O}, {I, I}};
  const std::vector<std::vector<LabelSequence>> runs(5, run);
  CHECK(majority_vote(runs) == run);
}

TEST_CASE("voting is monotone in each run") {
  std::mt19937_64 rng(1);
  for (int round = 0; round < 300; ++round) {
    const std::size_t k = static_cast<std::size_t>(std::uniform_int_distribution<int>(1, 6)(rng));
    std::vector<std::vector<LabelSequence>> runs(k, std::vector<LabelSequence>(1, LabelSequence(8)));
    for (auto& r : runs) {
      for (auto& l : r[0]) l = std::bernoulli_distribution(0.5)(rng) ? I : O;
    }
    const auto before = majority_vote(runs);
    auto more = runs;
    more[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)][0][std::uniform_int_distribution<std::size_t>(0, 7)(rng)] = I;
    const auto after = majority_vote(more);
    for (std::size_t t = 0; t < 8; ++t) {
      if (before[0][t] == I) CHECK(after[0][t] == I);
    }
  }
}

TEST_CASE("misaligned runs name the fragment") {
  const std::vector<Fragment> fragments = {{"42", 0, {}}, {"42", 1, {}}};
  const std::vector<std::vector<LabelSequence>> runs = {{{I}, {I, O}}, {{I}, {I}}};
  try {
    majority_vote(runs, fragments);
    FAIL("expected an alignment error");
  } catch (const ShapeError& e) {
    CHECK(std::string(e.what()).find("article 42, index 1") != std::string::npos);
  }
}

TEST_CASE("merging examples") {
  CHECK(merge_spans({{0, 10}, {20, 30}}, 25) == std::vector<CharSpan>{{0, 30}});
  CHECK(merge_spans({{0, 10}, {40, 50}}, 25) == std::vector<CharSpan>{{0, 10}, {40, 50}});
  CHECK(merge_spans({{0, 10}, {35, 50}}, 25) == std::vector<CharSpan>{{0, 10}, {35, 50}});
  CHECK(merge_spans({{0, 10}, {34, 50}}, 25) == std::vector<CharSpan>{{0, 50}});
  CHECK(merge_spans({{0, 10}, {10, 12}}, 0) == std::vector<CharSpan>{{0, 12}});
  CHECK(merge_spans({{0, 100}, {10, 20}, {150, 160}}, 25) == std::vector<CharSpan>{{0, 100}, {150, 160}});
  CHECK(merge_spans({{0, 10}, {20, 30}, {40, 50}}, 11) == std::vector<CharSpan>{{0, 50}});
  CHECK(merge_spans(std::vector<CharSpan>{}, 25).empty());
}

TEST_CASE("merging equals the pairwise fixpoint and keeps coverage") {
  std::mt19937_64 rng(2);
  for (int round = 0; round < 500; ++round) {
    const auto spans = random_spans(rng);
    const std::size_t gap = static_cast<std::size_t>(std::uniform_int_distribution<int>(0, 50)(rng));
    const auto merged = merge_spans(spans, gap);
    CHECK(merged == oracle::merge_fixpoint(spans, gap));
    CHECK(merge_spans(merged, gap) == merged);
    auto shuffled = spans;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    CHECK(merge_spans(shuffled, gap) == merged);
    const auto before = oracle::covered_chars(spans);
    const auto after = oracle::covered_chars(merged);
    CHECK(std::includes(after.begin(), after.end(), before.begin(), before.end()));
    for (std::size_t k = 1; k < merged.size(); ++k) CHECK(merged[k].begin - merged[k - 1].end >= std::max<std::size_t>(gap, 1));
  }
}
