#include <doctest.h>

#include "propdet/error.hpp"
#include "propdet/pipeline.hpp"
#include "propdet/scorer.hpp"
#include "synthetic.hpp"

using namespace propdet;

TEST_CASE("embedding specs") {
  CHECK(EmbeddingSpec::parse("hash:32:7") == EmbeddingSpec{EmbeddingSpec::Kind::Hash, 32, 7});
  CHECK(EmbeddingSpec::parse("sidecar:768").to_string() == "sidecar:768");
  CHECK_THROWS_AS(EmbeddingSpec::parse("glove"), ConfigError);
  CHECK_THROWS_AS(EmbeddingSpec::parse("hash:0:1"), ConfigError);
  CHECK_THROWS_AS(check_embedding("hash:32:0", {EmbeddingSpec::Kind::Hash, 16, 0}), ConfigError);
}

TEST_CASE("synthetic gold survives the label round trip") {
  const auto corpus = synthetic::make_si_corpus(6, 3);
  const auto lex = SentimentLexicon::load(std::string(PROPDET_TEST_DATA) + "/swn_mini.txt");
  const auto arg = ArguingLexicon::load(std::string(PROPDET_TEST_DATA) + "/arglex");
  const auto inputs = build_si_inputs(corpus.articles, TokenEmbeddingSource{}, SiFeatureSet{},
                                      SiResources{&lex, &arg, nullptr});
  REQUIRE(inputs.fragments.size() == inputs.inputs.size());
  for (std::size_t i = 0; i < inputs.fragments.size(); ++i) {
    CHECK(inputs.inputs[i].rows() == 32 + 18);
    CHECK(static_cast<std::size_t>(inputs.inputs[i].cols()) == inputs.fragments[i].size());
  }
  const auto labels = gold_labels(inputs.fragments, corpus.gold);
  const auto spans = spans_from_labels(corpus.articles, inputs.fragments, labels);
  CHECK(spans.size() == corpus.articles.size());
  CHECK(spans == corpus.gold);
  const auto s = score_si(spans, corpus.gold);
  CHECK(s.f1 == 1.0);
  // Gold spans stay at least 40 characters apart.
  for (const auto& [id, list] : corpus.gold) {
    for (std::size_t k = 1; k < list.size(); ++k) CHECK(list[k].begin - list[k - 1].end >= 40);
  }
}

TEST_CASE("sidecar lookups fail fast unless fallback is allowed") {
  const auto corpus = synthetic::make_si_corpus(1, 4);
  TokenEmbeddingTable table(4);
  table.insert({corpus.articles[0].id, 0, 0}, Eigen::VectorXd::Ones(4));
  TokenEmbeddingSource src{&table, 4, 0, false};
  CHECK_THROWS_AS(build_si_inputs(corpus.articles, src, SiFeatureSet::parse("none"), {}), MissingEmbedding);
  src.allow_missing = true;
  const auto inputs = build_si_inputs(corpus.articles, src, SiFeatureSet::parse("none"), {});
  CHECK(inputs.inputs[0].col(0) == Eigen::VectorXd::Ones(4));
  CHECK(src.spec().to_string() == "sidecar:4");
}

TEST_CASE("parallel runs are reproducible and seeded apart") {
  const auto corpus = synthetic::make_si_corpus(3, 5);
  const auto inputs = build_si_inputs(corpus.articles, TokenEmbeddingSource{nullptr, 8, 0, false},
                                      SiFeatureSet::parse("pos"), {});
  SITrainingSet data{inputs.inputs, gold_labels(inputs.fragments, corpus.gold)};
  SIConfig config;
  config.input_dim = 8 + 15;
  config.hidden = 4;
  config.epochs = 2;
  config.batch_size = 16;
  config.seed = 10;
  const auto a = train_si_runs(config, data, 3);
  const auto b = train_si_runs(config, data, 3);
  REQUIRE(a.size() == 3);
  for (std::size_t r = 0; r < 3; ++r) CHECK(a[r].output_weights == b[r].output_weights);
  CHECK(a[0].output_weights != a[1].output_weights);
  auto single = config;
  single.seed = 11;
  CHECK(train_si(single, data).output_weights == a[1].output_weights);

  const auto spans = predict_si_spans(a, inputs, corpus.articles, true);
  CHECK(spans.size() == corpus.articles.size());
}

TEST_CASE("technique pipeline end to end") {
  const auto a = Article::from_utf8("1", "Stop the steal. They lie. Stop the steal! Is it true? Patriots unite.");
  const std::vector<Article> articles = {a};
  const auto index = index_articles(articles);
  std::vector<TechniqueInstance> train = {
      {"1", {0, 14}, Technique::Slogans, 0},     {"1", {16, 24}, Technique::NameCalling, 1},
      {"1", {26, 40}, Technique::Repetition, 2}, {"1", {42, 53}, Technique::Doubt, 3},
      {"1", {54, 68}, Technique::FlagWaving, 4}, {"1", {54, 68}, Technique::Slogans, 5},
  };
  CHECK(tc_texts(train, index, Phase::Train, true)[2] == "Stop the steal Stop the steal");
  CHECK(tc_texts(train, index, Phase::Train, false)[2] == "Stop the steal");

  TCConfig config;
  config.features = TcFeatureSet::parse("q,repcount");
  config.linear_epochs = 5;
  config.mlp_epochs = 5;
  config.seed = 1;
  const SeqEmbeddingSource src{nullptr, 8, 0, false};
  const auto system = train_tc_system(train, index, src, config, {});
  CHECK(system.embedding == "hash:8:0");

  const auto out = predict_tc(system, train, index, src, {});
  REQUIRE(out.labels.size() == train.size());
  CHECK(out.labels[2] == Technique::Repetition);
  CHECK(out.branches[2] == Branch::Override);
  CHECK(out.labels[4] != out.labels[5]);
  const auto plain = predict_tc(system, train, index, src, {}, false);
  for (std::size_t i = 0; i < train.size(); ++i) CHECK(plain.labels[i] == plain.base[i].top());
  CHECK(predict_tc(system, train, index, src, {}).labels == out.labels);

  CHECK_THROWS_AS(predict_tc(system, train, index, SeqEmbeddingSource{nullptr, 16, 0, false}, {}), ConfigError);
  std::vector<TechniqueInstance> unknown = {{"9", {0, 3}, std::nullopt, 0}};
  CHECK_THROWS_AS(predict_tc(system, unknown, index, src, {}), FormatError);
}
