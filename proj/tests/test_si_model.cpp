#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "propdet/bilstm.hpp"
#include "propdet/error.hpp"
#include "propdet/si_model.hpp"

using namespace propdet;
using Batch = PaddedBatch<double>;

namespace {

Batch pack(const std::vector<Eigen::MatrixXd>& seqs, Eigen::Index dim) {
  std::vector<const Eigen::MatrixXd*> ptrs;
  for (const auto& s : seqs) ptrs.push_back(&s);
  return Batch::pack(ptrs, dim);
}

Eigen::MatrixXd random_seq(std::mt19937_64& rng, Eigen::Index dim, Eigen::Index len) {
  return nn::uniform<double>(dim, len, 1.0, rng);
}

// 8 sequences whose token label is I iff the first coordinate is positive.
SITrainingSet toy_set(std::uint64_t seed, Eigen::Index dim) {
  std::mt19937_64 rng(seed);
  SITrainingSet data;
  for (int s = 0; s < 8; ++s) {
    const auto len = std::uniform_int_distribution<Eigen::Index>(3, 9)(rng);
    auto x = random_seq(rng, dim, len);
    LabelSequence y;
    for (Eigen::Index t = 0; t < len; ++t) y.push_back(x(0, t) > 0 ? IoLabel::I : IoLabel::O);
    data.inputs.push_back(std::move(x));
    data.labels.push_back(std::move(y));
  }
  return data;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

TEST_CASE("zero parameters give uniform output") {
  const auto model = BiLstmTagger<double>::zeros(3, 4);
  std::mt19937_64 rng(1);
  const auto batch = pack({random_seq(rng, 3, 5)}, 3);
  const auto tr = forward(model, batch);
  for (const auto& p : tr.probs) {
    CHECK(p(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(p(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
  }
}

TEST_CASE("single step matches a hand evaluation of the gate equations") {
  auto model = BiLstmTagger<double>::zeros(1, 1);
  // Gate rows are input, forget, cell, output.
  model.forward.input_weights << 0.5, -0.3, 0.8, 0.2;
  model.forward.bias << 0.1, 1.0, -0.2, 0.05;
  model.backward.input_weights << -0.4, 0.6, 0.3, -0.7;
  model.backward.bias << 0.0, 1.0, 0.1, 0.2;
  model.output_weights << 0.9, -0.5, -1.1, 0.4;
  model.output_bias << 0.2, -0.1;
  const double x = 1.5;
  Eigen::MatrixXd seq(1, 1);
  seq << x;
  const auto tr = forward(model, pack({seq}, 1));

  // Forward direction, zero initial state: c = i * g, h = o * tanh(c).
  const double fi = sigmoid(0.5 * x + 0.1), fg = std::tanh(0.8 * x - 0.2), fo = sigmoid(0.2 * x + 0.05);
  const double hf = fo * std::tanh(fi * fg);
  const double bi = sigmoid(-0.4 * x), bg = std::tanh(0.3 * x + 0.1), bo = sigmoid(-0.7 * x + 0.2);
  const double hb = bo * std::tanh(bi * bg);
  const double l0 = 0.9 * hf - 0.5 * hb + 0.2;
  const double l1 = -1.1 * hf + 0.4 * hb - 0.1;
  const double p1 = std::exp(l1) / (std::exp(l0) + std::exp(l1));
  CHECK(tr.probs[0](1, 0) == doctest::Approx(p1).epsilon(1e-12));
  CHECK(tr.fwd.h[0](0, 0) == doctest::Approx(hf).epsilon(1e-12));
  CHECK(tr.bwd.h[0](0, 0) == doctest::Approx(hb).epsilon(1e-12));
}

TEST_CASE("outputs are distributions") {
  std::mt19937_64 rng(2);
  const auto model = BiLstmTagger<double>::random(4, 6, rng);
  const auto batch = pack({random_seq(rng, 4, 7), random_seq(rng, 4, 3)}, 4);
  const auto tr = forward(model, batch);
  for (const auto& p : tr.probs) {
    for (Eigen::Index j = 0; j < p.cols(); ++j) CHECK(std::abs(p.col(j).sum() - 1.0) < 1e-9);
  }
}

TEST_CASE("padding never leaks into real tokens") {
  std::mt19937_64 rng(3);
  const auto model = BiLstmTagger<double>::random(5, 8, rng);
  const auto a = random_seq(rng, 5, 4);
  const auto b = random_seq(rng, 5, 11);
  const auto c = random_seq(rng, 5, 1);
  const auto alone = si_probabilities(model, std::vector<Eigen::MatrixXd>{a}, 1);
  const auto mixed = si_probabilities(model, std::vector<Eigen::MatrixXd>{b, a, c}, 128);
  CHECK((alone[0] - mixed[1]).cwiseAbs().maxCoeff() < 1e-12);

  std::vector<Eigen::MatrixXd> many;
  for (int i = 0; i < 40; ++i) many.push_back(random_seq(rng, 5, std::uniform_int_distribution<Eigen::Index>(1, 12)(rng)));
  const auto one = si_probabilities(model, many, 1);
  const auto all = si_probabilities(model, many, 128);
  for (std::size_t i = 0; i < many.size(); ++i) CHECK((one[i] - all[i]).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("input dimension is checked") {
  std::mt19937_64 rng(4);
  const auto model = BiLstmTagger<double>::random(5, 2, rng);
  CHECK_THROWS_AS(si_probabilities(model, std::vector<Eigen::MatrixXd>{random_seq(rng, 4, 3)}), ShapeError);
}

TEST_CASE("unit class weights reduce to plain cross-entropy") {
  std::mt19937_64 rng(5);
  const auto model = BiLstmTagger<double>::random(3, 4, rng);
  const std::vector<Eigen::MatrixXd> seqs = {random_seq(rng, 3, 5), random_seq(rng, 3, 2)};
  const std::vector<std::vector<int>> labels = {{0, 1, 1, 0, 1}, {1, 0}};
  const auto batch = pack(seqs, 3);
  const auto tr = forward(model, batch);
  double plain = 0;
  int n = 0;
  for (std::size_t s = 0; s < seqs.size(); ++s) {
    for (std::size_t t = 0; t < labels[s].size(); ++t, ++n) {
      plain -= std::log(tr.probs[t](labels[s][t], static_cast<Eigen::Index>(s)));
    }
  }
  plain /= n;
  CHECK(std::abs(weighted_loss<double>(tr, batch, labels, {1.0, 1.0}) - plain) < 1e-9);
  CHECK(weighted_loss<double>(tr, batch, labels, {1.0, 6.5}) > plain);
}

TEST_CASE("analytic gradients match finite differences") {
  std::mt19937_64 rng(6);
  auto model = BiLstmTagger<double>::random(3, 4, rng);
  const std::array<double, 2> weights = {1.0, 6.5};
  SUBCASE("two-token sequence") {
    const std::vector<Eigen::MatrixXd> seqs = {random_seq(rng, 3, 2)};
    const std::vector<std::vector<int>> labels = {{1, 0}};
    const auto batch = pack(seqs, 3);
    const auto grad = backward<double>(model, batch, forward(model, batch), labels, weights);
    std::string worst;
    const double err = oracle::max_gradient_error(
        model, grad, [&] { return weighted_loss<double>(forward(model, batch), batch, labels, weights); }, 1e-4,
        &worst);
    CHECK_MESSAGE(err < 1e-4, worst);
  }
  SUBCASE("padded batch") {
    const std::vector<Eigen::MatrixXd> seqs = {random_seq(rng, 3, 4), random_seq(rng, 3, 1), random_seq(rng, 3, 3)};
    const std::vector<std::vector<int>> labels = {{1, 0, 0, 1}, {0}, {1, 1, 0}};
    const auto batch = pack(seqs, 3);
    const auto grad = backward<double>(model, batch, forward(model, batch), labels, weights);
    const double err = oracle::max_gradient_error(
        model, grad, [&] { return weighted_loss<double>(forward(model, batch), batch, labels, weights); });
    CHECK(err < 1e-4);
  }
}

TEST_CASE("training is deterministic and fits a toy set") {
  const auto data = toy_set(7, 6);
  SIConfig config;
  config.input_dim = 6;
  config.hidden = 16;
  config.epochs = 200;
  config.batch_size = 1;
  config.seed = 3;
  const auto a = train_si(config, data);
  const auto b = train_si(config, data);
  bool identical = true;
  std::vector<const Eigen::MatrixXd*> pa, pb;
  a.visit([&](const char*, const Eigen::MatrixXd& m) { pa.push_back(&m); });
  b.visit([&](const char*, const Eigen::MatrixXd& m) { pb.push_back(&m); });
  for (std::size_t i = 0; i < pa.size(); ++i) identical = identical && *pa[i] == *pb[i];
  CHECK(identical);

  const auto predicted = predict_si(a, data.inputs);
  std::size_t right = 0, total = 0;
  for (std::size_t s = 0; s < predicted.size(); ++s) {
    for (std::size_t t = 0; t < predicted[s].size(); ++t, ++total) right += predicted[s][t] == data.labels[s][t];
  }
  CHECK(static_cast<double>(right) / static_cast<double>(total) >= 0.99);
}

TEST_CASE("decision rule and validation") {
  CHECK(decide(0.7) == IoLabel::I);
  CHECK(decide(0.5) == IoLabel::I);
  CHECK(decide(0.4999) == IoLabel::O);

  SIConfig bad;
  bad.input_dim = 3;
  bad.dropout = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.dropout = 0.25;
  bad.hidden = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("non-finite loss aborts with epoch and batch") {
  auto data = toy_set(8, 3);
  data.inputs[0](0, 0) = std::nan("");
  SIConfig config;
  config.input_dim = 3;
  config.hidden = 2;
  config.epochs = 1;
  config.batch_size = 128;
  try {
    train_si(config, data);
    FAIL("expected a numeric error");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("epoch 1, batch 1") != std::string::npos);
  }
}

TEST_CASE("checkpoints round trip exactly") {
  std::mt19937_64 rng(9);
  SIModel model;
  model.config.input_dim = 5;
  model.config.hidden = 3;
  model.config.seed = 42;
  model.features = SiFeatureSet::parse("swn,pos");
  model.embedding = "hash:32:0";
  model.max_fragment_len = 20;
  model.params = BiLstmTagger<double>::random(5, 3, rng);
  std::stringstream buf;
  save_si_model(buf, model);
  const auto back = load_si_model(buf, "mem");
  CHECK(back.config.hidden == 3);
  CHECK(back.config.seed == 42);
  CHECK(back.features == model.features);
  CHECK(back.embedding == model.embedding);
  CHECK(back.max_fragment_len == 20);
  std::vector<const Eigen::MatrixXd*> pa, pb;
  model.params.visit([&](const char*, const Eigen::MatrixXd& m) { pa.push_back(&m); });
  back.params.visit([&](const char*, const Eigen::MatrixXd& m) { pb.push_back(&m); });
  REQUIRE(pa.size() == pb.size());
  for (std::size_t i = 0; i < pa.size(); ++i) CHECK(*pa[i] == *pb[i]);

  std::istringstream junk("not a model\n");
  CHECK_THROWS_AS(load_si_model(junk, "junk"), FormatError);
}
