#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "propdet/corpus.hpp"

namespace propdet {

// ---- sentiment ------------------------------------------------------------

struct SentimentScore {
  double positive = 0.0;
  double negative = 0.0;
  bool operator==(const SentimentScore&) const = default;
};

/// Term -> mean (positive, negative) over all synsets listing the term.
class SentimentLexicon {
 public:
  /// Parses the SentiWordNet TSV (POS, ID, PosScore, NegScore, SynsetTerms, Gloss).
  static SentimentLexicon load(const std::filesystem::path& path);
  static SentimentLexicon parse(std::istream& in, const std::string& source);

  /// Builds a lexicon from raw (term, score) observations; repeats are averaged.
  static SentimentLexicon from_observations(std::vector<std::pair<std::string, SentimentScore>> obs);

  std::optional<SentimentScore> find(std::string_view term) const;
  std::size_t size() const { return entries_.size(); }
  bool operator==(const SentimentLexicon& o) const { return entries_ == o.entries_; }

 private:
  std::unordered_map<std::string, SentimentScore> entries_;
};

/// Suffix-stripping lemma candidates for a lowercase word, most likely first:
/// -ing, -ed, -es, -s, each with a doubled-consonant and silent-e repair.
std::vector<std::string> lemma_candidates(std::string_view word);

/// Lowercased surface form, then lemma candidates, then (0, 0).
SentimentScore sentiment(const Token& token, const SentimentLexicon& lexicon);

// ---- arguing lexicon -------------------------------------------------------

class ArguingLexicon {
 public:
  struct Pattern {
    std::string strategy;
    std::vector<std::string> words;  // lowercase; "*" matches any single token
  };

  /// Reads every `<strategy>.patterns` file in `directory`: one pattern per
  /// line, `#` comments and blank lines skipped.
  static ArguingLexicon load(const std::filesystem::path& directory);

  void add(const std::string& strategy, std::string_view pattern);

  const std::vector<Pattern>& patterns() const { return patterns_; }
  std::size_t strategy_count() const;

  /// Pattern indices that can start with `word` (includes wildcard-initial ones).
  std::vector<std::size_t> candidates(const std::string& word) const;

 private:
  std::vector<Pattern> patterns_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_first_;
  std::vector<std::size_t> wildcard_first_;
};

/// 1 for every token covered by some pattern match, else 0.
std::vector<int> mark_salient(std::span<const Token> tokens, const ArguingLexicon& lexicon);

// ---- annotations (POS / NE files) -----------------------------------------

/// Rows of `article_id<TAB>begin<TAB>end<TAB>tag`.
class AnnotationTable {
 public:
  struct Entry {
    CharSpan span;
    std::string tag;
  };

  static AnnotationTable load(const std::filesystem::path& path);
  static AnnotationTable parse(std::istream& in, const std::string& source);

  void add(const std::string& article_id, CharSpan span, std::string tag);

  /// Tag of the entry starting exactly at `begin`, if any.
  const std::string* tag_at(const std::string& article_id, std::size_t begin) const;

  /// Whether any entry with `tag` overlaps `span`.
  bool any_overlap(const std::string& article_id, const CharSpan& span, std::string_view tag) const;

 private:
  std::map<std::string, std::map<std::size_t, Entry>> by_begin_;
  std::map<std::string, std::vector<Entry>> all_;
};

// ---- part of speech --------------------------------------------------------

enum class PosTag : int {
  NOUN = 0, VERB, ADJ, ADV, PRON, DET, ADP, NUM, CONJ, PRT, PUNCT, PROPN, AUX, INTJ, X
};
inline constexpr std::size_t kNumPosTags = 15;

std::string_view pos_name(PosTag tag);
/// Throws FormatError on a tag outside the 15-tag set.
PosTag parse_pos(std::string_view name);

/// Rule-based tagger used when no annotation file is supplied.
PosTag fallback_pos(const Token& token, bool fragment_initial);

/// One tag per token; from `annotations` when given (missing entry -> FormatError
/// naming article and offset), otherwise from the fallback rules.
std::vector<PosTag> pos_tags(const Fragment& fragment, const AnnotationTable* annotations);

// ---- token features (tagger input) ----------------------------------------

struct TokenFeatures {
  SentimentScore sentiment;
  int salient = 0;
  PosTag pos = PosTag::X;
};

/// Which token feature groups enter the tagger input. Dims: swn 2, al 1, pos 15.
struct SiFeatureSet {
  bool sentiment = true;
  bool arguing = true;
  bool pos = true;

  static SiFeatureSet parse(std::string_view csv);  // e.g. "swn,al,pos", "" or "none"
  std::string to_string() const;
  std::size_t dim() const;
  bool operator==(const SiFeatureSet&) const = default;
};

inline constexpr std::size_t kTokenFeatureDim = 18;

/// Lexicons may be null when the matching feature is disabled.
struct SiResources {
  const SentimentLexicon* sentiment = nullptr;
  const ArguingLexicon* arguing = nullptr;
  const AnnotationTable* pos = nullptr;  // null -> fallback tagger
};

std::vector<TokenFeatures> token_features(const Fragment& fragment, const SiFeatureSet& set,
                                          const SiResources& resources);

/// Writes the enabled groups of `f` into `out` (length `set.dim()`).
void encode(const TokenFeatures& f, const SiFeatureSet& set, Eigen::Ref<Eigen::VectorXd> out);

// ---- repetition ------------------------------------------------------------

struct RepetitionStats {
  std::size_t count = 0;  // occurrences beyond the instance itself
  bool is_first = true;
  bool operator==(const RepetitionStats&) const = default;
};

/// Lowercased text with whitespace runs collapsed, plus the raw offset of each
/// normalized character. Reused across all instances of one article.
class RepetitionIndex {
 public:
  explicit RepetitionIndex(const Article& article);
  RepetitionStats stats(const CharSpan& span) const;

 private:
  const Article* article_;
  std::u32string normalized_;
  std::vector<std::size_t> raw_pos_;
};

RepetitionStats repetition_stats(const Article& article, const CharSpan& span);

/// Span normalization: lowercase, trim punctuation and whitespace at both ends,
/// collapse internal whitespace.
std::u32string normalize_span(std::u32string_view text);

// ---- fragment features (TC) ------------------------------------------------

/// Feature toggles for the technique classifier, named as on the command line:
/// ne2, ne6, al, q, repcount, seqlen, america, reductio, emotion.
struct TcFeatureSet {
  bool ne2 = false;
  bool ne6 = false;  // supersedes ne2
  bool arguing = false;
  bool question = false;
  bool repetition_count = false;
  bool seq_len = false;
  bool america = false;
  bool reductio = false;
  bool emotion = false;

  static TcFeatureSet parse(std::string_view csv);
  std::string to_string() const;
  std::size_t dim() const;
  bool operator==(const TcFeatureSet&) const = default;
};

inline constexpr std::size_t kNumEmotions = 5;

/// instance_id -> (anger, disgust, fear, joy, sadness).
class EmotionTable {
 public:
  static EmotionTable load(const std::filesystem::path& path);
  static EmotionTable parse(std::istream& in, const std::string& source);
  const std::array<double, kNumEmotions>* find(std::size_t instance_id) const;

 private:
  std::map<std::size_t, std::array<double, kNumEmotions>> rows_;
};

struct FragmentFeatures {
  bool arguing = false;
  bool norp = false;
  bool gpe = false;
  bool org = false;
  bool person = false;
  bool cardinal = false;
  bool date = false;
  bool question = false;
  bool america = false;
  bool reductio = false;
  std::size_t repetition_count = 0;
  std::size_t seq_len = 0;
  std::array<double, kNumEmotions> emotion{};
  bool operator==(const FragmentFeatures&) const = default;
};

struct TcResources {
  const ArguingLexicon* arguing = nullptr;
  const AnnotationTable* entities = nullptr;  // NORP/GPE/ORG/PERSON/CARDINAL/DATE spans
  const EmotionTable* emotions = nullptr;
};

/// Throws std::out_of_range when the span is outside the article.
/// `repetition` may be passed to reuse a per-article index.
FragmentFeatures fragment_features(const TechniqueInstance& instance, const Article& article,
                                   const TcResources& resources, const TcFeatureSet& set,
                                   const RepetitionIndex* repetition = nullptr);

Eigen::VectorXd encode(const FragmentFeatures& f, const TcFeatureSet& set);

/// Case-insensitive whole-word occurrence of any of `words` in `text`.
bool contains_word(std::u32string_view text, std::span<const std::u32string_view> words);

}  // namespace propdet
