#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "propdet/error.hpp"
#include "propdet/features.hpp"
#include "propdet/utf8.hpp"
#include "tempdir.hpp"

using namespace propdet;

namespace {

Token tok(const std::string& text) { return {text, 0, text.size()}; }

Fragment fragment_from(const std::string& text, const std::string& id = "1") {
  const auto a = Article::from_utf8(id, text);
  return {id, 0, tokenize(a.chars)};
}

ArguingLexicon lexicon(std::initializer_list<const char*> patterns) {
  ArguingLexicon lex;
  for (const auto* p : patterns) lex.add("test", p);
  return lex;
}

}  // namespace

TEST_CASE("SentiWordNet parsing and averaging") {
  std::istringstream in(
      "# comment\n"
      "a\t1\t0.625\t0\tgood#1\tgloss\n"
      "n\t2\t0.5\t0\tmixed#1 pair_word#1\tgloss\n"
      "n\t3\t0\t0.5\tmixed#2\tgloss\n"
      "\t\t\t\t\t\n");
  const auto lex = SentimentLexicon::parse(in, "swn");
  CHECK(lex.find("good") == SentimentScore{0.625, 0.0});
  CHECK(lex.find("mixed") == SentimentScore{0.25, 0.25});
  CHECK(lex.find("pair word") == SentimentScore{0.5, 0.0});
  CHECK(lex.size() == 3);

  std::istringstream bad("a\t1\tabc\t0\tx#1\tgloss\n");
  try {
    SentimentLexicon::parse(bad, "swn");
    FAIL("expected a parse error");
  } catch (const FormatError& e) {
    CHECK(e.line() == 1);
  }
}

TEST_CASE("fixture entry count matches an independent recount") {
  const std::string path = std::string(PROPDET_TEST_DATA) + "/swn_mini.txt";
  std::ifstream in(path);
  std::set<std::string> terms;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, '\t');) cols.push_back(c);
    std::stringstream words(cols.at(4));
    for (std::string w; words >> w;) {
      w = w.substr(0, w.find('#'));
      std::replace(w.begin(), w.end(), '_', ' ');
      terms.insert(w);
    }
  }
  CHECK(SentimentLexicon::load(path).size() == terms.size());
}

TEST_CASE("lexicon is independent of line order") {
  std::vector<std::string> lines;
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const double p = std::uniform_int_distribution<int>(0, 8)(rng) / 8.0;
    const double n = std::uniform_int_distribution<int>(0, 8)(rng) / 8.0;
    lines.push_back("a\t" + std::to_string(i) + "\t" + std::to_string(p) + "\t" + std::to_string(n) + "\tw" +
                    std::to_string(i % 17) + "#1\tg\n");
  }
  auto build = [&] {
    std::string text;
    for (const auto& l : lines) text += l;
    std::istringstream in(text);
    return SentimentLexicon::parse(in, "swn");
  };
  const auto reference = build();
  for (int round = 0; round < 5; ++round) {
    std::shuffle(lines.begin(), lines.end(), rng);
    CHECK(build() == reference);
  }
}

TEST_CASE("sentiment lookup with lemma fallback") {
  const auto lex = SentimentLexicon::from_observations(
      {{"kill", {0.0, 0.5}}, {"stop", {0.1, 0.2}}, {"make", {0.3, 0.0}}, {"class", {0.2, 0.2}}});
  CHECK(sentiment(tok("qwzx"), lex) == SentimentScore{});
  CHECK(sentiment(tok("Kill"), lex) == SentimentScore{0.0, 0.5});
  CHECK(sentiment(tok("killed"), lex) == SentimentScore{0.0, 0.5});
  CHECK(sentiment(tok("killing"), lex) == SentimentScore{0.0, 0.5});
  CHECK(sentiment(tok("kills"), lex) == SentimentScore{0.0, 0.5});
  CHECK(sentiment(tok("stopped"), lex) == SentimentScore{0.1, 0.2});
  CHECK(sentiment(tok("making"), lex) == SentimentScore{0.3, 0.0});
  CHECK(sentiment(tok("classes"), lex) == SentimentScore{0.2, 0.2});
  CHECK(sentiment(tok("class"), lex) == SentimentScore{0.2, 0.2});
}

TEST_CASE("arguing lexicon matches") {
  const auto lex = lexicon({"you must", "must * now"});
  CHECK(mark_salient(fragment_from("You must go").tokens, lex) == std::vector<int>{1, 1, 0});
  CHECK(mark_salient(fragment_from("nothing here").tokens, lex) == std::vector<int>{0, 0});
  CHECK(mark_salient(fragment_from("you must go now").tokens, lex) == std::vector<int>{1, 1, 1, 1});
}

TEST_CASE("arguing lexicon loads pattern directories") {
  const auto lex = ArguingLexicon::load(std::string(PROPDET_TEST_DATA) + "/arglex");
  CHECK(lex.strategy_count() == 3);
  CHECK(lex.patterns().size() == 6);
}

TEST_CASE("salience agrees with the quadratic matcher") {
  std::mt19937_64 rng(9);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "B"};
  for (int round = 0; round < 300; ++round) {
    ArguingLexicon lex;
    const auto np = std::uniform_int_distribution<int>(1, 5)(rng);
    for (int p = 0; p < np; ++p) {
      std::string pattern;
      const auto len = std::uniform_int_distribution<int>(1, 3)(rng);
      for (int k = 0; k < len; ++k) {
        const auto r = std::uniform_int_distribution<int>(0, 4)(rng);
        pattern += (k ? " " : "") + (r == 4 ? std::string("*") : vocab[static_cast<std::size_t>(r)]);
      }
      lex.add("s", pattern);
    }
    std::vector<std::string> words;
    std::string text;
    const auto n = std::uniform_int_distribution<int>(1, 15)(rng);
    for (int k = 0; k < n; ++k) {
      words.push_back(vocab[std::uniform_int_distribution<std::size_t>(0, vocab.size() - 1)(rng)]);
      text += words.back() + " ";
    }
    CHECK(mark_salient(fragment_from(text).tokens, lex) == oracle::salient(words, lex));
  }
}

TEST_CASE("fallback POS tagger") {
  CHECK(fallback_pos(tok("."), false) == PosTag::PUNCT);
  CHECK(fallback_pos(tok("7"), false) == PosTag::NUM);
  CHECK(fallback_pos(tok("Paris"), false) == PosTag::PROPN);
  CHECK(fallback_pos(tok("Paris"), true) == PosTag::NOUN);
  CHECK(fallback_pos(tok("the"), false) == PosTag::DET);
  CHECK(fallback_pos(tok("would"), false) == PosTag::AUX);
  CHECK(fallback_pos(tok("house"), false) == PosTag::NOUN);
  CHECK(parse_pos("ADJ") == PosTag::ADJ);
  CHECK_THROWS_AS(parse_pos("JJ"), FormatError);
}

TEST_CASE("POS annotation file must cover every token") {
  const auto f = fragment_from("Hi there");
  AnnotationTable table;
  table.add("1", {0, 2}, "INTJ");
  try {
    pos_tags(f, &table);
    FAIL("expected a missing-annotation error");
  } catch (const FormatError& e) {
    CHECK(std::string(e.what()).find("article 1 at offset 3") != std::string::npos);
  }
  table.add("1", {3, 8}, "ADV");
  CHECK(pos_tags(f, &table) == std::vector<PosTag>{PosTag::INTJ, PosTag::ADV});
  table.add("1", {3, 8}, "BOGUS");
  CHECK_THROWS_AS(pos_tags(f, &table), FormatError);
}

TEST_CASE("token feature vectors") {
  const auto lex = SentimentLexicon::from_observations({{"evil", {0.0, 0.75}}});
  const auto arg = lexicon({"you must"});
  const SiResources res{&lex, &arg, nullptr};
  const SiFeatureSet all;
  CHECK(all.dim() == kTokenFeatureDim);
  CHECK(SiFeatureSet::parse("swn,pos").dim() == 17);
  CHECK(SiFeatureSet::parse("none").dim() == 0);
  CHECK(SiFeatureSet::parse("al,swn").to_string() == "swn,al");
  CHECK_THROWS_AS(SiFeatureSet::parse("glove"), ConfigError);

  const auto f = fragment_from("You must fight evil , 42 times.");
  const auto feats = token_features(f, all, res);
  Eigen::VectorXd v(kTokenFeatureDim);
  for (std::size_t k = 0; k < f.size(); ++k) {
    encode(feats[k], all, v);
    CHECK(v.tail(kNumPosTags).sum() == 1.0);
    CHECK(v.minCoeff() >= 0.0);
    CHECK(v.maxCoeff() <= 1.0);
  }
  CHECK(feats[0].salient == 1);
  CHECK(feats[2].salient == 0);
  CHECK(feats[3].sentiment == SentimentScore{0.0, 0.75});

  CHECK_THROWS_AS(token_features(f, all, SiResources{}), ConfigError);
}

TEST_CASE("POS one-hots sum to one over random corpora") {
  std::mt19937_64 rng(2);
  const std::vector<std::string> vocab = {"The", "dog", "7", ".", "and", "Paris", "it's", "?", "x-ray", "élan"};
  for (int round = 0; round < 200; ++round) {
    std::string text;
    for (int k = 0; k < 12; ++k) text += vocab[std::uniform_int_distribution<std::size_t>(0, vocab.size() - 1)(rng)] + " ";
    const auto f = fragment_from(text);
    const auto feats = token_features(f, SiFeatureSet::parse("pos"), {});
    Eigen::VectorXd v(kNumPosTags);
    for (const auto& t : feats) {
      encode(t, SiFeatureSet::parse("pos"), v);
      CHECK(v.sum() == 1.0);
      CHECK(v.maxCoeff() == 1.0);
    }
  }
}

TEST_CASE("repetition statistics") {
  SUBCASE("single occurrence") {
    const auto a = Article::from_utf8("1", "Stop the war now.");
    CHECK(repetition_stats(a, {5, 12}) == RepetitionStats{0, true});
  }
  SUBCASE("normalization") {
    CHECK(normalize_span(U"War!") == U"war");
    CHECK(normalize_span(U"  war ") == U"war");
    CHECK(normalize_span(U"\"Make   America\n great\"") == U"make america great");
    const auto a = Article::from_utf8("1", "War! They want war. WAR");
    CHECK(repetition_stats(a, {0, 4}) == RepetitionStats{2, true});
    CHECK(repetition_stats(a, {14, 18}) == RepetitionStats{2, false});
  }
  SUBCASE("three occurrences, instance at the second") {
    const std::string phrase = "build the wall";
    const std::string text = "We will " + phrase + ". Yes, " + phrase + "! Always " + phrase + ".";
    const auto a = Article::from_utf8("1", text);
    // Brute-force occurrence enumeration.
    std::vector<std::size_t> hits;
    for (auto p = text.find(phrase); p != std::string::npos; p = text.find(phrase, p + phrase.size())) hits.push_back(p);
    REQUIRE(hits.size() == 3);
    const CharSpan second{hits[1], hits[1] + phrase.size()};
    CHECK(repetition_stats(a, second) == RepetitionStats{2, false});
    const CharSpan first{hits[0], hits[0] + phrase.size()};
    CHECK(repetition_stats(a, first) == RepetitionStats{2, true});
    // Leading punctuation inside the span does not move the anchor.
    const CharSpan padded{hits[0] - 1, hits[0] + phrase.size() + 1};
    CHECK(repetition_stats(a, padded).is_first);
  }
  SUBCASE("count zero implies first") {
    std::mt19937_64 rng(4);
    const auto a = Article::from_utf8("1", "alpha beta gamma delta alpha beta epsilon zeta beta");
    for (int i = 0; i < 200; ++i) {
      const auto b = std::uniform_int_distribution<std::size_t>(0, a.size() - 1)(rng);
      const auto e = std::uniform_int_distribution<std::size_t>(b + 1, a.size())(rng);
      const auto s = repetition_stats(a, {b, e});
      if (s.count == 0) CHECK(s.is_first);
    }
  }
}

TEST_CASE("fragment features") {
  const auto a = Article::from_utf8("5", "Is this justice? Washington and the Americans act like Nazis in fact.");
  const auto arg = lexicon({"in fact"});
  AnnotationTable ne;
  ne.add("5", {17, 27}, "GPE");
  ne.add("5", {36, 45}, "NORP");
  const TcResources res{&arg, &ne, nullptr};
  const auto set = TcFeatureSet::parse("ne2,al,q,repcount,seqlen,america,reductio");
  CHECK(set.dim() == 8);
  CHECK(TcFeatureSet::parse("ne2,ne6").dim() == 6);
  CHECK_THROWS_AS(TcFeatureSet::parse("bogus"), ConfigError);

  TechniqueInstance q{"5", {0, 16}, std::nullopt, 0};
  const auto fq = fragment_features(q, a, res, set);
  CHECK(fq.question);
  CHECK_FALSE(fq.gpe);
  CHECK(fq.seq_len == 4);

  TechniqueInstance w{"5", {17, 69}, std::nullopt, 1};
  const auto fw = fragment_features(w, a, res, set);
  CHECK(fw.gpe);
  CHECK(fw.norp);
  CHECK(fw.america);
  CHECK(fw.reductio);
  CHECK(fw.arguing);
  CHECK_FALSE(fw.question);
  CHECK(fragment_features(w, a, res, set) == fw);

  const auto v = encode(fw, set);
  CHECK(v.size() == 8);
  CHECK(v[0] == 1.0);  // norp
  CHECK(v[1] == 1.0);  // gpe

  TechniqueInstance out_of_range{"5", {60, 500}, std::nullopt, 2};
  CHECK_THROWS_AS(fragment_features(out_of_range, a, res, set), std::out_of_range);
}

TEST_CASE("america and reductio flags against a plain scan") {
  std::mt19937_64 rng(8);
  const std::vector<std::string> vocab = {"America", "american", "usa", "U.S.", "Hitler", "nazis", "fascist",
                                          "Americana", "nazism", "busa", "the", "a", "?", ","};
  const std::vector<std::string> america = {"america", "american", "americans", "usa", "u.s."};
  const std::vector<std::string> reductio = {"hitler", "nazi", "nazis", "fascist"};
  for (int i = 0; i < 100; ++i) {
    std::vector<std::string> words;
    std::string text;
    const auto n = std::uniform_int_distribution<int>(1, 8)(rng);
    for (int k = 0; k < n; ++k) {
      words.push_back(vocab[std::uniform_int_distribution<std::size_t>(0, vocab.size() - 1)(rng)]);
      text += words.back() + " ";
    }
    const auto a = Article::from_utf8("1", text);
    const auto f = fragment_features({"1", {0, a.size()}, std::nullopt, 0}, a, {}, TcFeatureSet{});
    auto any_of = [&](const std::vector<std::string>& list) {
      for (auto w : words) {
        std::transform(w.begin(), w.end(), w.begin(), [](unsigned char c) { return std::tolower(c); });
        if (std::find(list.begin(), list.end(), w) != list.end()) return true;
      }
      return false;
    };
    bool has_q = false;
    for (const auto& w : words) has_q = has_q || w == "?";
    CHECK(f.america == any_of(america));
    CHECK(f.reductio == any_of(reductio));
    CHECK(f.question == has_q);
  }
}

TEST_CASE("emotion scores come from the file") {
  std::istringstream in("3\t0.1\t0.2\t0.3\t0.4\t0.5\n");
  const auto table = EmotionTable::parse(in, "emo");
  const auto a = Article::from_utf8("1", "text here");
  const TcResources res{nullptr, nullptr, &table};
  const auto set = TcFeatureSet::parse("emotion");
  const auto f = fragment_features({"1", {0, 4}, std::nullopt, 3}, a, res, set);
  CHECK(f.emotion[4] == 0.5);
  CHECK_THROWS_AS(fragment_features({"1", {0, 4}, std::nullopt, 4}, a, res, set), ConfigError);
  std::istringstream bad("3\t0.1\t0.2\t0.3\t0.4\t1.5\n");
  CHECK_THROWS_AS(EmotionTable::parse(bad, "emo"), FormatError);
}
