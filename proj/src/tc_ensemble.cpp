#include "propdet/tc_ensemble.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "propdet/adam.hpp"
#include "propdet/checkpoint.hpp"
#include "propdet/error.hpp"
#include "propdet/log.hpp"

namespace propdet {

namespace {

constexpr const char* kMagic = "propdet-tc-model";
constexpr int kVersion = 1;

// Stage two and the alternative model draw from seeds derived from the base seed.
constexpr std::uint64_t kMlpSeedSalt = 0x6D6C70ULL;
constexpr std::uint64_t kAltSeedSalt = 0x616C74ULL;

Eigen::MatrixXd stack(const Eigen::MatrixXd& top, const Eigen::MatrixXd& bottom) {
  Eigen::MatrixXd out(top.rows() + bottom.rows(), top.cols());
  out.topRows(top.rows()) = top;
  out.bottomRows(bottom.rows()) = bottom;
  return out;
}

}  // namespace

void TCConfig::validate() const {
  if (!(linear_learning_rate > 0 && mlp_learning_rate > 0)) throw ConfigError("learning rates must be positive");
  if (linear_epochs < 0 || mlp_epochs < 0) throw ConfigError("epochs must be non-negative");
  if (!no_hidden && mlp_hidden < 1) throw ConfigError("hidden layer size must be positive");
  if (!(mlp_dropout >= 0.0 && mlp_dropout < 1.0)) throw ConfigError("dropout must be in [0,1)");
  if (batch_size < 1) throw ConfigError("batch size must be positive");
}

Eigen::MatrixXd TCBaseModel::probabilities(const Eigen::MatrixXd& embeddings,
                                           const Eigen::MatrixXd& feats) const {
  if (static_cast<std::size_t>(feats.rows()) != features.dim()) {
    throw ConfigError("model expects fragment features [" + features.to_string() + "] (" +
                      std::to_string(features.dim()) + " values), got " + std::to_string(feats.rows()));
  }
  const auto logits = forward(linear, embeddings).logits;
  return forward(mlp, stack(logits, feats)).probs;
}

Eigen::MatrixXd TCAltModel::probabilities(const Eigen::MatrixXd& embeddings) const {
  return forward(linear, embeddings).probs;
}

std::string_view branch_name(Branch b) {
  switch (b) {
    case Branch::Base: return "base";
    case Branch::Override: return "override";
    case Branch::Alternative: return "alternative";
    case Branch::RunnerUp: return "runner-up";
  }
  return "?";
}

namespace {

TCPrediction rank(std::size_t instance_id, const Eigen::VectorXd& probs, bool alt) {
  TCPrediction p;
  p.instance_id = instance_id;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    const auto t = alt ? from_alt_index(static_cast<int>(i)) : technique_at(static_cast<int>(i));
    p.ranking.emplace_back(t, probs[i]);
  }
  // Ties keep class order.
  std::stable_sort(p.ranking.begin(), p.ranking.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  p.branch = alt ? Branch::Alternative : Branch::Base;
  return p;
}

}  // namespace

TCPrediction rank_base(std::size_t instance_id, const Eigen::VectorXd& probs) {
  if (probs.size() != static_cast<Eigen::Index>(kNumTechniques)) throw ShapeError("base output must have 14 classes");
  return rank(instance_id, probs, false);
}

TCPrediction rank_alt(std::size_t instance_id, const Eigen::VectorXd& probs) {
  if (probs.size() != static_cast<Eigen::Index>(kNumAltTechniques)) {
    throw ShapeError("alternative output must have 13 classes");
  }
  return rank(instance_id, probs, true);
}

std::string rep_preprocess(const TechniqueInstance& instance, const Article& article, Phase phase,
                           const RepetitionIndex* index) {
  check_span(article, instance.span);
  const auto text = article.slice(instance.span.begin, instance.span.end);
  bool duplicate = false;
  if (phase == Phase::Train) {
    if (!instance.technique) {
      throw ConfigError("training-phase preprocessing needs a gold label (instance " +
                        std::to_string(instance.instance_id) + ")");
    }
    duplicate = *instance.technique == Technique::Repetition;
  } else {
    const auto stats = index ? index->stats(instance.span) : repetition_stats(article, instance.span);
    duplicate = stats.count >= 1;
  }
  return duplicate ? text + " " + text : text;
}

bool repetition_override(const RepetitionStats& stats) { return stats.count >= 1 && !stats.is_first; }

bool repetition_override(const TechniqueInstance& instance, const Article& article) {
  return repetition_override(repetition_stats(article, instance.span));
}

Technique resolve(const TCPrediction& base, bool override_repetition, const TCPrediction& alt) {
  if (override_repetition) return Technique::Repetition;
  if (base.top() == Technique::Repetition) return alt.top();
  return base.top();
}

std::vector<Technique> handle_duplicates(std::span<const TechniqueInstance> instances,
                                         std::span<const Technique> resolved,
                                         std::span<const TCPrediction> alt,
                                         std::span<const TCPrediction> base) {
  const auto n = instances.size();
  if (resolved.size() != n || alt.size() != n || base.size() != n) {
    throw ShapeError("duplicate handling needs one resolved label and prediction per instance");
  }
  std::vector<Technique> out(resolved.begin(), resolved.end());
  std::map<std::pair<std::string, CharSpan>, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < n; ++i) groups[{instances[i].article_id, instances[i].span}].push_back(i);

  auto best_unused = [&](std::size_t member, const std::set<Technique>& used) {
    for (const auto& [label, p] : base[member].ranking) {
      if (!used.count(label)) return label;
    }
    return base[member].top();  // more members than classes
  };

  for (const auto& [key, members] : groups) {
    if (members.size() < 2) continue;
    const auto first_label = out[members[0]];
    if (members.size() == 2) {
      const auto second = members[1];
      out[second] = alt[second].top();
      if (out[second] == first_label) out[second] = best_unused(second, {first_label});
      continue;
    }
    std::set<Technique> used = {first_label};
    for (std::size_t k = 1; k < members.size(); ++k) {
      out[members[k]] = best_unused(members[k], used);
      used.insert(out[members[k]]);
    }
  }
  return out;
}

FeedForward<double> fit_classifier(const Eigen::MatrixXd& inputs, std::span<const int> labels,
                                   Eigen::Index classes, Eigen::Index hidden, double dropout,
                                   double learning_rate, int epochs, int batch_size, std::uint64_t seed) {
  if (static_cast<std::size_t>(inputs.cols()) != labels.size()) throw ShapeError("one label per input column required");
  if (labels.empty()) throw ConfigError("training set is empty");
  std::mt19937_64 rng(seed);
  auto model = FeedForward<double>::random(inputs.rows(), hidden, classes, rng);
  Adam<double> adam({learning_rate, 0.9, 0.999, 1e-8});
  std::vector<Eigen::Index> order(labels.size());
  std::iota(order.begin(), order.end(), 0);
  const auto n = static_cast<Eigen::Index>(order.size());
  for (int epoch = 0; epoch < epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (Eigen::Index start = 0, batch = 0; start < n; start += batch_size, ++batch) {
      const auto stop = std::min<Eigen::Index>(n, start + batch_size);
      Eigen::MatrixXd x(inputs.rows(), stop - start);
      std::vector<int> y;
      for (Eigen::Index k = start; k < stop; ++k) {
        x.col(k - start) = inputs.col(order[static_cast<std::size_t>(k)]);
        y.push_back(labels[static_cast<std::size_t>(order[static_cast<std::size_t>(k)])]);
      }
      const auto trace = forward(model, x, dropout, &rng);
      const double loss = cross_entropy<double>(trace, y);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                           std::to_string(batch + 1));
      }
      adam.step(model, backward<double>(model, x, trace, y));
    }
  }
  return model;
}

TCBaseModel train_base(const Eigen::MatrixXd& embeddings, const Eigen::MatrixXd& features,
                       std::span<const Technique> labels, const TCConfig& config) {
  config.validate();
  if (static_cast<std::size_t>(features.rows()) != config.features.dim()) {
    throw ConfigError("feature matrix has " + std::to_string(features.rows()) + " rows, configuration [" +
                      config.features.to_string() + "] needs " + std::to_string(config.features.dim()));
  }
  if (features.cols() != embeddings.cols()) throw ShapeError("features and embeddings differ in instance count");
  std::vector<int> y(labels.size());
  std::transform(labels.begin(), labels.end(), y.begin(), index_of);
  TCBaseModel model;
  model.features = config.features;
  const auto classes = static_cast<Eigen::Index>(kNumTechniques);
  model.linear = fit_classifier(embeddings, y, classes, 0, 0.0, config.linear_learning_rate,
                                config.linear_epochs, config.batch_size, config.seed);
  const auto logits = forward(model.linear, embeddings).logits;
  model.mlp = fit_classifier(stack(logits, features), y, classes, config.no_hidden ? 0 : config.mlp_hidden,
                             config.mlp_dropout, config.mlp_learning_rate, config.mlp_epochs, config.batch_size,
                             config.seed ^ kMlpSeedSalt);
  return model;
}

TCAltModel train_alt(const Eigen::MatrixXd& embeddings, std::span<const Technique> labels,
                     const TCConfig& config) {
  config.validate();
  if (static_cast<std::size_t>(embeddings.cols()) != labels.size()) throw ShapeError("one label per embedding column required");
  std::vector<Eigen::Index> keep;
  std::vector<int> y;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == Technique::Repetition) continue;
    keep.push_back(static_cast<Eigen::Index>(i));
    y.push_back(alt_index(labels[i]));
  }
  const auto dropped = labels.size() - keep.size();
  if (dropped > 0) log::info("alternative model: dropped " + std::to_string(dropped) + " Repetition instances");
  Eigen::MatrixXd x(embeddings.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) x.col(static_cast<Eigen::Index>(k)) = embeddings.col(keep[k]);
  TCAltModel model;
  model.linear = fit_classifier(x, y, static_cast<Eigen::Index>(kNumAltTechniques), 0, 0.0,
                                config.linear_learning_rate, config.linear_epochs, config.batch_size,
                                config.seed ^ kAltSeedSalt);
  return model;
}

void save_tc_system(std::ostream& out, const TCSystem& system) {
  using checkpoint::format_double;
  const auto& c = system.config;
  out << kMagic << ' ' << kVersion << '\n';
  out << "config linear_learning_rate=" << format_double(c.linear_learning_rate)
      << " linear_epochs=" << c.linear_epochs << " mlp_learning_rate=" << format_double(c.mlp_learning_rate)
      << " mlp_epochs=" << c.mlp_epochs << " mlp_hidden=" << c.mlp_hidden
      << " mlp_dropout=" << format_double(c.mlp_dropout) << " no_hidden=" << c.no_hidden
      << " batch_size=" << c.batch_size << " seed=" << c.seed << " features=" << c.features.to_string()
      << " rep=" << c.repetition_preprocessing << '\n';
  out << "inputs embedding=" << system.embedding << " embedding_dim=" << system.base.linear.input_dim() << '\n';
  checkpoint::write_params(out, "base.linear", system.base.linear);
  checkpoint::write_params(out, "base.mlp", system.base.mlp);
  checkpoint::write_params(out, "alt.linear", system.alt.linear);
}

TCSystem load_tc_system(std::istream& in, const std::string& source) {
  checkpoint::Reader reader(in, source);
  if (reader.next_line() != std::string(kMagic) + " " + std::to_string(kVersion)) {
    reader.fail("not a version " + std::to_string(kVersion) + " technique-classifier model");
  }
  TCSystem system;
  Eigen::Index dim = 0;
  try {
    auto kv = reader.key_values("config");
    auto& c = system.config;
    c.linear_learning_rate = std::stod(kv.at("linear_learning_rate"));
    c.linear_epochs = std::stoi(kv.at("linear_epochs"));
    c.mlp_learning_rate = std::stod(kv.at("mlp_learning_rate"));
    c.mlp_epochs = std::stoi(kv.at("mlp_epochs"));
    c.mlp_hidden = std::stol(kv.at("mlp_hidden"));
    c.mlp_dropout = std::stod(kv.at("mlp_dropout"));
    c.no_hidden = kv.at("no_hidden") == "1";
    c.batch_size = std::stoi(kv.at("batch_size"));
    c.seed = std::stoull(kv.at("seed"));
    c.features = TcFeatureSet::parse(kv.at("features"));
    c.repetition_preprocessing = kv.at("rep") == "1";
    auto inputs = reader.key_values("inputs");
    system.embedding = inputs.at("embedding");
    dim = std::stol(inputs.at("embedding_dim"));
  } catch (const std::out_of_range&) {
    reader.fail("missing model header field");
  } catch (const std::invalid_argument&) {
    reader.fail("malformed model header value");
  }
  system.config.validate();
  const auto& c = system.config;
  const auto classes = static_cast<Eigen::Index>(kNumTechniques);
  system.base.features = c.features;
  system.base.linear = FeedForward<double>::zeros(dim, 0, classes);
  system.base.mlp = FeedForward<double>::zeros(classes + static_cast<Eigen::Index>(c.features.dim()),
                                               c.no_hidden ? 0 : c.mlp_hidden, classes);
  system.alt.linear = FeedForward<double>::zeros(dim, 0, static_cast<Eigen::Index>(kNumAltTechniques));
  checkpoint::read_params(reader, "base.linear", system.base.linear);
  checkpoint::read_params(reader, "base.mlp", system.base.mlp);
  checkpoint::read_params(reader, "alt.linear", system.alt.linear);
  return system;
}

void save_tc_system(const std::string& path, const TCSystem& system) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  save_tc_system(out, system);
}

TCSystem load_tc_system(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return load_tc_system(in, path);
}

}  // namespace propdet
