#include "propdet/features.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <unordered_set>

#include "propdet/error.hpp"
#include "propdet/log.hpp"
#include "propdet/utf8.hpp"
#include "tsv.hpp"

namespace propdet {

namespace fs = std::filesystem;

// ---- sentiment ------------------------------------------------------------

SentimentLexicon SentimentLexicon::from_observations(
    std::vector<std::pair<std::string, SentimentScore>> obs) {
  // Sorting first makes the floating-point sums independent of input order.
  std::sort(obs.begin(), obs.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first < b.first;
    if (a.second.positive != b.second.positive) return a.second.positive < b.second.positive;
    return a.second.negative < b.second.negative;
  });
  SentimentLexicon lex;
  std::size_t i = 0;
  while (i < obs.size()) {
    std::size_t j = i;
    double pos = 0.0, neg = 0.0;
    while (j < obs.size() && obs[j].first == obs[i].first) {
      pos += obs[j].second.positive;
      neg += obs[j].second.negative;
      ++j;
    }
    const auto n = static_cast<double>(j - i);
    lex.entries_.emplace(obs[i].first, SentimentScore{pos / n, neg / n});
    i = j;
  }
  return lex;
}

SentimentLexicon SentimentLexicon::parse(std::istream& in, const std::string& source) {
  std::vector<std::pair<std::string, SentimentScore>> obs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto row = tsv::chomp(line);
    if (row.empty() || row.front() == '#') continue;
    const auto cols = tsv::split(row);
    if (std::all_of(cols.begin(), cols.end(), [](auto c) { return tsv::trim(c).empty(); })) continue;
    if (cols.size() < 5) throw FormatError(source, lineno, "expected at least 5 tab-separated fields");
    const auto pos = tsv::to_double(tsv::trim(cols[2]));
    const auto neg = tsv::to_double(tsv::trim(cols[3]));
    if (!pos || !neg || *pos < 0 || *pos > 1 || *neg < 0 || *neg > 1) {
      throw FormatError(source, lineno, "scores must be numbers in [0,1]");
    }
    for (auto term : tsv::split_ws(cols[4])) {
      if (const auto hash = term.rfind('#'); hash != std::string_view::npos) term = term.substr(0, hash);
      if (term.empty()) continue;
      std::string t = utf8::to_lower(term);
      std::replace(t.begin(), t.end(), '_', ' ');
      obs.emplace_back(std::move(t), SentimentScore{*pos, *neg});
    }
  }
  return from_observations(std::move(obs));
}

SentimentLexicon SentimentLexicon::load(const fs::path& path) {
  auto in = tsv::open(path.string());
  return parse(in, path.string());
}

std::optional<SentimentScore> SentimentLexicon::find(std::string_view term) const {
  const auto it = entries_.find(std::string(term));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

namespace {

bool is_vowel(char c) { return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u'; }

void add_repaired(std::vector<std::string>& out, const std::string& stem) {
  if (stem.size() < 2) return;
  out.push_back(stem);
  const char last = stem.back();
  if (stem[stem.size() - 2] == last && !is_vowel(last) && std::isalpha(static_cast<unsigned char>(last))) {
    out.push_back(stem.substr(0, stem.size() - 1));
  }
  out.push_back(stem + "e");
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

}  // namespace

std::vector<std::string> lemma_candidates(std::string_view word) {
  std::vector<std::string> out;
  const std::string w(word);
  if (ends_with(w, "ing") && w.size() >= 5) {
    add_repaired(out, w.substr(0, w.size() - 3));
  } else if (ends_with(w, "ed") && w.size() >= 4) {
    add_repaired(out, w.substr(0, w.size() - 2));
  } else if (ends_with(w, "es") && w.size() >= 4) {
    out.push_back(w.substr(0, w.size() - 2));
    out.push_back(w.substr(0, w.size() - 1));
  } else if (ends_with(w, "s") && !ends_with(w, "ss") && w.size() >= 3) {
    out.push_back(w.substr(0, w.size() - 1));
  }
  return out;
}

SentimentScore sentiment(const Token& token, const SentimentLexicon& lexicon) {
  const auto lower = utf8::to_lower(token.text);
  if (auto hit = lexicon.find(lower)) return *hit;
  for (const auto& lemma : lemma_candidates(lower)) {
    if (auto hit = lexicon.find(lemma)) return *hit;
  }
  return {};
}

// ---- arguing lexicon -------------------------------------------------------

void ArguingLexicon::add(const std::string& strategy, std::string_view pattern) {
  const auto chars = utf8::to_lower(utf8::decode(pattern));
  Pattern p{strategy, {}};
  for (auto& tok : tokenize(chars)) p.words.push_back(std::move(tok.text));
  if (p.words.empty()) return;
  const auto idx = patterns_.size();
  if (p.words.front() == "*") {
    wildcard_first_.push_back(idx);
  } else {
    by_first_[p.words.front()].push_back(idx);
  }
  patterns_.push_back(std::move(p));
}

ArguingLexicon ArguingLexicon::load(const fs::path& directory) {
  if (!fs::is_directory(directory)) throw IoError("not a directory: " + directory.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".patterns") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  ArguingLexicon lex;
  for (const auto& file : files) {
    auto in = tsv::open(file.string());
    const auto strategy = file.stem().string();
    std::string line;
    while (std::getline(in, line)) {
      const auto row = tsv::trim(tsv::chomp(line));
      if (row.empty() || row.front() == '#') continue;
      lex.add(strategy, row);
    }
  }
  return lex;
}

std::size_t ArguingLexicon::strategy_count() const {
  std::unordered_set<std::string> names;
  for (const auto& p : patterns_) names.insert(p.strategy);
  return names.size();
}

std::vector<std::size_t> ArguingLexicon::candidates(const std::string& word) const {
  std::vector<std::size_t> out = wildcard_first_;
  if (const auto it = by_first_.find(word); it != by_first_.end()) {
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

std::vector<int> mark_salient(std::span<const Token> tokens, const ArguingLexicon& lexicon) {
  std::vector<std::string> lower;
  lower.reserve(tokens.size());
  for (const auto& t : tokens) lower.push_back(utf8::to_lower(t.text));
  std::vector<int> out(tokens.size(), 0);
  for (std::size_t i = 0; i < lower.size(); ++i) {
    for (const auto idx : lexicon.candidates(lower[i])) {
      const auto& words = lexicon.patterns()[idx].words;
      if (i + words.size() > lower.size()) continue;
      bool match = true;
      for (std::size_t k = 0; k < words.size() && match; ++k) {
        match = words[k] == "*" || words[k] == lower[i + k];
      }
      if (match) std::fill(out.begin() + static_cast<std::ptrdiff_t>(i),
                           out.begin() + static_cast<std::ptrdiff_t>(i + words.size()), 1);
    }
  }
  return out;
}

// ---- annotations -------------------------------------------------------------

void AnnotationTable::add(const std::string& article_id, CharSpan span, std::string tag) {
  Entry e{span, std::move(tag)};
  by_begin_[article_id][span.begin] = e;
  all_[article_id].push_back(std::move(e));
}

AnnotationTable AnnotationTable::parse(std::istream& in, const std::string& source) {
  AnnotationTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto row = tsv::chomp(line);
    if (row.empty() || row.front() == '#') continue;
    const auto cols = tsv::split(row);
    if (cols.size() != 4) throw FormatError(source, lineno, "expected 4 tab-separated fields");
    const auto begin = tsv::to_int<std::size_t>(cols[1]);
    const auto end = tsv::to_int<std::size_t>(cols[2]);
    if (!begin || !end || *begin >= *end) throw FormatError(source, lineno, "invalid span offsets");
    table.add(std::string(cols[0]), {*begin, *end}, std::string(cols[3]));
  }
  return table;
}

AnnotationTable AnnotationTable::load(const fs::path& path) {
  auto in = tsv::open(path.string());
  return parse(in, path.string());
}

const std::string* AnnotationTable::tag_at(const std::string& article_id, std::size_t begin) const {
  const auto a = by_begin_.find(article_id);
  if (a == by_begin_.end()) return nullptr;
  const auto e = a->second.find(begin);
  return e == a->second.end() ? nullptr : &e->second.tag;
}

bool AnnotationTable::any_overlap(const std::string& article_id, const CharSpan& span,
                                  std::string_view tag) const {
  const auto a = all_.find(article_id);
  if (a == all_.end()) return false;
  return std::any_of(a->second.begin(), a->second.end(),
                     [&](const Entry& e) { return e.tag == tag && e.span.overlaps(span); });
}

// ---- part of speech --------------------------------------------------------

namespace {

constexpr std::array<std::string_view, kNumPosTags> kPosNames = {
    "NOUN", "VERB", "ADJ", "ADV", "PRON", "DET", "ADP", "NUM",
    "CONJ", "PRT", "PUNCT", "PROPN", "AUX", "INTJ", "X"};

struct ClosedClass {
  PosTag tag;
  std::vector<std::string_view> words;
};

const std::vector<ClosedClass>& closed_classes() {
  static const std::vector<ClosedClass> kClasses = {
      {PosTag::DET, {"the", "a", "an", "this", "that", "these", "those", "some", "any", "each",
                     "every", "no", "another", "either", "neither", "all", "both"}},
      {PosTag::PRON, {"i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself",
                      "yourselves", "he", "him", "his", "himself", "she", "her", "hers", "herself",
                      "it", "its", "itself", "we", "us", "our", "ours", "ourselves", "they", "them",
                      "their", "theirs", "themselves", "who", "whom", "whose", "which", "what",
                      "whatever", "whoever", "someone", "somebody", "something", "anyone",
                      "anybody", "anything", "everyone", "everybody", "everything", "nobody",
                      "nothing", "none"}},
      {PosTag::ADP, {"of", "in", "on", "at", "by", "for", "with", "about", "against", "between",
                     "into", "through", "during", "before", "after", "above", "below", "to", "from",
                     "up", "down", "out", "off", "over", "under", "than", "as", "per", "via",
                     "within", "without", "among", "around", "upon", "across", "along", "toward",
                     "towards", "despite", "since", "until"}},
      {PosTag::CONJ, {"and", "or", "but", "nor", "so", "yet", "because", "although", "though",
                      "while", "whereas", "if", "unless", "whether"}},
      {PosTag::PRT, {"not"}},
      {PosTag::AUX, {"is", "are", "was", "were", "be", "been", "being", "am", "have", "has", "had",
                     "do", "does", "did", "will", "would", "shall", "should", "can", "could", "may",
                     "might", "must", "don't", "doesn't", "didn't", "isn't", "aren't", "wasn't",
                     "weren't", "can't", "couldn't", "won't", "wouldn't", "shouldn't", "haven't",
                     "hasn't", "hadn't"}},
      {PosTag::INTJ, {"oh", "ah", "wow", "hey", "yeah", "yes", "okay", "ok", "alas", "oops", "hmm"}},
      {PosTag::ADV, {"very", "too", "also", "just", "then", "now", "never", "always", "often",
                     "here", "there", "only", "even", "still", "already", "soon", "perhaps",
                     "maybe", "quite", "rather", "almost", "really"}},
  };
  return kClasses;
}

}  // namespace

std::string_view pos_name(PosTag tag) { return kPosNames.at(static_cast<std::size_t>(tag)); }

PosTag parse_pos(std::string_view name) {
  for (std::size_t i = 0; i < kNumPosTags; ++i) {
    if (kPosNames[i] == name) return static_cast<PosTag>(i);
  }
  throw FormatError("unknown POS tag '" + std::string(name) + "'");
}

PosTag fallback_pos(const Token& token, bool fragment_initial) {
  const auto chars = utf8::decode(token.text);
  if (chars.empty()) return PosTag::X;
  if (std::none_of(chars.begin(), chars.end(), [](char32_t c) { return utf8::is_alnum(c); })) {
    return PosTag::PUNCT;
  }
  if (utf8::is_digit(chars.front())) return PosTag::NUM;
  if (!fragment_initial && utf8::is_upper(chars.front())) return PosTag::PROPN;
  const auto lower = utf8::to_lower(token.text);
  for (const auto& cls : closed_classes()) {
    if (std::find(cls.words.begin(), cls.words.end(), lower) != cls.words.end()) return cls.tag;
  }
  return PosTag::NOUN;
}

std::vector<PosTag> pos_tags(const Fragment& fragment, const AnnotationTable* annotations) {
  std::vector<PosTag> out;
  out.reserve(fragment.size());
  for (std::size_t k = 0; k < fragment.size(); ++k) {
    const auto& tok = fragment.tokens[k];
    if (annotations == nullptr) {
      out.push_back(fallback_pos(tok, k == 0));
      continue;
    }
    const auto* tag = annotations->tag_at(fragment.article_id, tok.begin);
    if (tag == nullptr) {
      throw FormatError("POS annotations have no entry for article " + fragment.article_id +
                        " at offset " + std::to_string(tok.begin));
    }
    out.push_back(parse_pos(*tag));
  }
  return out;
}

// ---- token features --------------------------------------------------------

SiFeatureSet SiFeatureSet::parse(std::string_view csv) {
  SiFeatureSet set{false, false, false};
  for (auto name : tsv::split(csv, ',')) {
    name = tsv::trim(name);
    if (name.empty() || name == "none") continue;
    if (name == "swn") set.sentiment = true;
    else if (name == "al") set.arguing = true;
    else if (name == "pos") set.pos = true;
    else throw ConfigError("unknown SI feature '" + std::string(name) + "' (expected swn, al, pos)");
  }
  return set;
}

std::string SiFeatureSet::to_string() const {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(sentiment, "swn");
  add(arguing, "al");
  add(pos, "pos");
  return out.empty() ? "none" : out;
}

std::size_t SiFeatureSet::dim() const {
  return (sentiment ? 2 : 0) + (arguing ? 1 : 0) + (pos ? kNumPosTags : 0);
}

std::vector<TokenFeatures> token_features(const Fragment& fragment, const SiFeatureSet& set,
                                          const SiResources& resources) {
  if (set.sentiment && resources.sentiment == nullptr) throw ConfigError("swn feature needs a SentiWordNet file");
  if (set.arguing && resources.arguing == nullptr) throw ConfigError("al feature needs an Arguing Lexicon directory");
  std::vector<TokenFeatures> out(fragment.size());
  if (set.sentiment) {
    for (std::size_t k = 0; k < fragment.size(); ++k) {
      out[k].sentiment = sentiment(fragment.tokens[k], *resources.sentiment);
    }
  }
  if (set.arguing) {
    const auto marks = mark_salient(fragment.tokens, *resources.arguing);
    for (std::size_t k = 0; k < fragment.size(); ++k) out[k].salient = marks[k];
  }
  if (set.pos) {
    const auto tags = pos_tags(fragment, resources.pos);
    for (std::size_t k = 0; k < fragment.size(); ++k) out[k].pos = tags[k];
  }
  return out;
}

void encode(const TokenFeatures& f, const SiFeatureSet& set, Eigen::Ref<Eigen::VectorXd> out) {
  if (static_cast<std::size_t>(out.size()) != set.dim()) throw ShapeError("token feature buffer size mismatch");
  Eigen::Index i = 0;
  if (set.sentiment) {
    out[i++] = f.sentiment.positive;
    out[i++] = f.sentiment.negative;
  }
  if (set.arguing) out[i++] = f.salient;
  if (set.pos) {
    out.segment(i, kNumPosTags).setZero();
    out[i + static_cast<int>(f.pos)] = 1.0;
  }
}

// ---- repetition ------------------------------------------------------------

std::u32string normalize_span(std::u32string_view text) {
  auto strip = [](char32_t c) { return utf8::is_space(c) || utf8::is_punct(c); };
  std::size_t b = 0, e = text.size();
  while (b < e && strip(text[b])) ++b;
  while (e > b && strip(text[e - 1])) --e;
  std::u32string out;
  bool in_space = false;
  for (std::size_t i = b; i < e; ++i) {
    if (utf8::is_space(text[i])) {
      in_space = true;
      continue;
    }
    if (in_space) out.push_back(U' ');
    in_space = false;
    out.push_back(utf8::to_lower(text[i]));
  }
  return out;
}

RepetitionIndex::RepetitionIndex(const Article& article) : article_(&article) {
  const auto& chars = article.chars;
  for (std::size_t i = 0; i < chars.size();) {
    if (utf8::is_space(chars[i])) {
      normalized_.push_back(U' ');
      raw_pos_.push_back(i);
      while (i < chars.size() && utf8::is_space(chars[i])) ++i;
      continue;
    }
    normalized_.push_back(utf8::to_lower(chars[i]));
    raw_pos_.push_back(i);
    ++i;
  }
}

RepetitionStats RepetitionIndex::stats(const CharSpan& span) const {
  check_span(*article_, span);
  const auto raw = std::u32string_view(article_->chars).substr(span.begin, span.length());
  const auto needle = normalize_span(raw);
  if (needle.empty()) return {};
  std::size_t content_begin = span.begin;
  while (utf8::is_space(article_->chars[content_begin]) || utf8::is_punct(article_->chars[content_begin])) {
    ++content_begin;
  }
  std::vector<std::size_t> hits;
  for (auto pos = normalized_.find(needle); pos != std::u32string::npos;
       pos = normalized_.find(needle, pos + needle.size())) {
    hits.push_back(raw_pos_[pos]);
  }
  RepetitionStats out;
  out.count = hits.empty() ? 0 : hits.size() - 1;
  out.is_first = out.count == 0 || hits.front() == content_begin;
  return out;
}

RepetitionStats repetition_stats(const Article& article, const CharSpan& span) {
  return RepetitionIndex(article).stats(span);
}

// ---- fragment features -----------------------------------------------------

TcFeatureSet TcFeatureSet::parse(std::string_view csv) {
  TcFeatureSet set;
  for (auto name : tsv::split(csv, ',')) {
    name = tsv::trim(name);
    if (name.empty() || name == "none") continue;
    if (name == "ne2") set.ne2 = true;
    else if (name == "ne6") set.ne6 = true;
    else if (name == "al") set.arguing = true;
    else if (name == "q") set.question = true;
    else if (name == "repcount") set.repetition_count = true;
    else if (name == "seqlen") set.seq_len = true;
    else if (name == "america") set.america = true;
    else if (name == "reductio") set.reductio = true;
    else if (name == "emotion") set.emotion = true;
    else throw ConfigError("unknown TC feature '" + std::string(name) +
                           "' (expected ne2, ne6, al, q, repcount, seqlen, america, reductio, emotion)");
  }
  return set;
}

std::string TcFeatureSet::to_string() const {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += ',';
    out += name;
  };
  add(ne2 && !ne6, "ne2");
  add(ne6, "ne6");
  add(arguing, "al");
  add(question, "q");
  add(repetition_count, "repcount");
  add(seq_len, "seqlen");
  add(america, "america");
  add(reductio, "reductio");
  add(emotion, "emotion");
  return out.empty() ? "none" : out;
}

std::size_t TcFeatureSet::dim() const {
  return (ne6 ? 6 : ne2 ? 2 : 0) + (arguing ? 1 : 0) + (question ? 1 : 0) + (repetition_count ? 1 : 0) +
         (seq_len ? 1 : 0) + (america ? 1 : 0) + (reductio ? 1 : 0) + (emotion ? kNumEmotions : 0);
}

EmotionTable EmotionTable::parse(std::istream& in, const std::string& source) {
  EmotionTable table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto row = tsv::chomp(line);
    if (row.empty() || row.front() == '#') continue;
    const auto cols = tsv::split(row);
    if (cols.size() != 1 + kNumEmotions) throw FormatError(source, lineno, "expected 6 tab-separated fields");
    const auto id = tsv::to_int<std::size_t>(cols[0]);
    if (!id) throw FormatError(source, lineno, "instance id must be a non-negative integer");
    std::array<double, kNumEmotions> scores{};
    for (std::size_t k = 0; k < kNumEmotions; ++k) {
      const auto v = tsv::to_double(cols[k + 1]);
      if (!v || *v < 0 || *v > 1) throw FormatError(source, lineno, "emotion scores must be in [0,1]");
      scores[k] = *v;
    }
    table.rows_[*id] = scores;
  }
  return table;
}

EmotionTable EmotionTable::load(const fs::path& path) {
  auto in = tsv::open(path.string());
  return parse(in, path.string());
}

const std::array<double, kNumEmotions>* EmotionTable::find(std::size_t instance_id) const {
  const auto it = rows_.find(instance_id);
  return it == rows_.end() ? nullptr : &it->second;
}

bool contains_word(std::u32string_view text, std::span<const std::u32string_view> words) {
  const auto lower = utf8::to_lower(text);
  for (const auto word : words) {
    for (auto pos = lower.find(word); pos != std::u32string::npos; pos = lower.find(word, pos + 1)) {
      const bool left_ok = pos == 0 || !utf8::is_alnum(lower[pos - 1]);
      const auto after = pos + word.size();
      const bool right_ok = after >= lower.size() || !utf8::is_alnum(lower[after]);
      if (left_ok && right_ok) return true;
    }
  }
  return false;
}

namespace {

constexpr std::array<std::u32string_view, 5> kAmericaWords = {U"america", U"american", U"americans",
                                                              U"usa", U"u.s."};
constexpr std::array<std::u32string_view, 4> kReductioWords = {U"hitler", U"nazi", U"nazis", U"fascist"};

}  // namespace

FragmentFeatures fragment_features(const TechniqueInstance& instance, const Article& article,
                                   const TcResources& resources, const TcFeatureSet& set,
                                   const RepetitionIndex* repetition) {
  check_span(article, instance.span);
  const auto text = std::u32string_view(article.chars).substr(instance.span.begin, instance.span.length());
  FragmentFeatures f;
  f.question = text.find(U'?') != std::u32string_view::npos;
  f.america = contains_word(text, kAmericaWords);
  f.reductio = contains_word(text, kReductioWords);
  if (set.arguing || set.seq_len) {
    const auto tokens = tokenize(text, instance.span.begin);
    f.seq_len = tokens.size();
    if (set.arguing) {
      if (resources.arguing == nullptr) throw ConfigError("al feature needs an Arguing Lexicon directory");
      const auto marks = mark_salient(tokens, *resources.arguing);
      f.arguing = std::find(marks.begin(), marks.end(), 1) != marks.end();
    }
  }
  if (set.ne2 || set.ne6) {
    if (resources.entities == nullptr) {
      static std::once_flag once;
      std::call_once(once, [] { log::warn("no named-entity annotations given; entity features set to 0"); });
    } else {
      const auto& ne = *resources.entities;
      const auto& id = instance.article_id;
      f.norp = ne.any_overlap(id, instance.span, "NORP");
      f.gpe = ne.any_overlap(id, instance.span, "GPE");
      f.org = ne.any_overlap(id, instance.span, "ORG");
      f.person = ne.any_overlap(id, instance.span, "PERSON");
      f.cardinal = ne.any_overlap(id, instance.span, "CARDINAL");
      f.date = ne.any_overlap(id, instance.span, "DATE");
    }
  }
  if (set.repetition_count) {
    f.repetition_count = repetition ? repetition->stats(instance.span).count
                                    : repetition_stats(article, instance.span).count;
  }
  if (set.emotion) {
    const auto* scores = resources.emotions ? resources.emotions->find(instance.instance_id) : nullptr;
    if (scores == nullptr) {
      throw ConfigError("emotion feature enabled but no scores for instance " +
                        std::to_string(instance.instance_id));
    }
    f.emotion = *scores;
  }
  return f;
}

Eigen::VectorXd encode(const FragmentFeatures& f, const TcFeatureSet& set) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(set.dim()));
  Eigen::Index i = 0;
  auto put = [&](double v) { out[i++] = v; };
  if (set.ne6) {
    for (bool b : {f.norp, f.gpe, f.org, f.person, f.cardinal, f.date}) put(b);
  } else if (set.ne2) {
    put(f.norp);
    put(f.gpe);
  }
  if (set.arguing) put(f.arguing);
  if (set.question) put(f.question);
  if (set.repetition_count) put(static_cast<double>(f.repetition_count));
  if (set.seq_len) put(static_cast<double>(f.seq_len));
  if (set.america) put(f.america);
  if (set.reductio) put(f.reductio);
  if (set.emotion) {
    for (double v : f.emotion) put(v);
  }
  return out;
}

}  // namespace propdet
