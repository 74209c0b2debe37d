#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "propdet/technique.hpp"

namespace propdet {

/// A news article. All offsets in the pipeline index `chars` (Unicode scalar
/// values), never the UTF-8 bytes of `text`.
struct Article {
  std::string id;
  std::string text;
  std::u32string chars;

  static Article from_utf8(std::string id, std::string text, const std::string& source = {});

  std::size_t size() const { return chars.size(); }
  std::string slice(std::size_t begin, std::size_t end) const;
};

/// Half-open character interval [begin, end).
struct CharSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - begin; }
  bool overlaps(const CharSpan& o) const { return begin < o.end && o.begin < end; }
  std::size_t overlap(const CharSpan& o) const {
    const auto lo = std::max(begin, o.begin);
    const auto hi = std::min(end, o.end);
    return hi > lo ? hi - lo : 0;
  }
  auto operator<=>(const CharSpan&) const = default;
};

struct Token {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;

  CharSpan span() const { return {begin, end}; }
  bool operator==(const Token&) const = default;
};

/// A sentence or sentence piece fed to the tagger as one sequence.
struct Fragment {
  std::string article_id;
  std::size_t index = 0;  // ordinal within the article
  std::vector<Token> tokens;

  std::size_t size() const { return tokens.size(); }
  CharSpan extent() const { return {tokens.front().begin, tokens.back().end}; }
};

enum class IoLabel : unsigned char { O = 0, I = 1 };

/// One label per token of a fragment.
using LabelSequence = std::vector<IoLabel>;

/// Spans per article id. Articles without spans may be present with an empty list.
using SpanMap = std::map<std::string, std::vector<CharSpan>>;

struct TechniqueInstance {
  std::string article_id;
  CharSpan span;
  std::optional<Technique> technique;
  std::size_t instance_id = 0;  // 0-based row order in the source file
};

inline constexpr std::size_t kDefaultMaxFragmentLen = 35;

// ---- loading -------------------------------------------------------------

/// Reads every `article<id>.txt` in `directory`, ordered by numeric id.
std::vector<Article> load_articles(const std::filesystem::path& directory);

/// Reads `article_id<TAB>begin<TAB>end` rows. Spans are sorted per article,
/// duplicates kept.
SpanMap load_si_spans(const std::filesystem::path& path);
SpanMap parse_si_spans(std::istream& in, const std::string& source);
void write_si_spans(std::ostream& out, const SpanMap& spans);

/// Reads `article_id<TAB>technique<TAB>begin<TAB>end` rows in file order. When
/// `labeled` is false the technique column is a placeholder and ignored.
std::vector<TechniqueInstance> load_tc_instances(const std::filesystem::path& path, bool labeled);
std::vector<TechniqueInstance> parse_tc_instances(std::istream& in, const std::string& source,
                                                  bool labeled);
void write_tc_predictions(std::ostream& out, std::span<const TechniqueInstance> instances,
                          std::span<const Technique> labels);

/// Throws std::out_of_range unless 0 <= begin < end <= article size.
void check_span(const Article& article, const CharSpan& span);

// ---- tokenization and fragments -------------------------------------------

/// Alphanumeric runs (with internal apostrophes and hyphens) are one token;
/// any other non-space character is a token by itself. Offsets are shifted by
/// `base_offset`.
std::vector<Token> tokenize(std::u32string_view text, std::size_t base_offset = 0);

/// Sentences as token runs. A sentence ends after `.`, `!` or `?` followed by
/// whitespace or end of text, and at every newline.
std::vector<std::vector<Token>> split_sentences(const Article& article);

/// Cuts a token run into pieces of at most `max_len` tokens, preferring the
/// latest quotation mark, then semicolon, then comma within the first
/// `max_len` tokens (the split token closes the left piece).
std::vector<std::vector<Token>> split_long(std::vector<Token> tokens, std::size_t max_len);

std::vector<Fragment> split_fragments(const Article& article,
                                      std::size_t max_len = kDefaultMaxFragmentLen);

enum class SplitClass { None, Quote, Semicolon, Comma };
SplitClass split_class(const Token& token);

// ---- label/span conversion ------------------------------------------------

/// I iff the token intersects any gold span.
LabelSequence project_labels(const Fragment& fragment, std::span<const CharSpan> gold);

/// One span per maximal run of I labels.
std::vector<CharSpan> labels_to_spans(const Fragment& fragment, std::span<const IoLabel> labels);

}  // namespace propdet
