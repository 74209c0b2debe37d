#include "propdet/si_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>

#include "propdet/adam.hpp"
#include "propdet/checkpoint.hpp"
#include "propdet/error.hpp"

namespace propdet {

namespace {

constexpr const char* kMagic = "propdet-si-model";
constexpr int kVersion = 1;

std::vector<int> as_ints(const LabelSequence& labels) {
  std::vector<int> out(labels.size());
  std::transform(labels.begin(), labels.end(), out.begin(), [](IoLabel l) { return static_cast<int>(l); });
  return out;
}

}  // namespace

void SIConfig::validate() const {
  if (input_dim < 1) throw ConfigError("input_dim must be positive");
  if (hidden < 1) throw ConfigError("hidden must be at least 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("dropout must be in [0,1)");
  if (!(class_weight_o > 0.0 && class_weight_i > 0.0)) throw ConfigError("class weights must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (batch_size < 1) throw ConfigError("batch size must be positive");
}

BiLstmTagger<double> train_si(const SIConfig& config, const SITrainingSet& data,
                              const std::function<void(const SIEpochReport&)>& on_epoch) {
  config.validate();
  if (data.inputs.empty()) throw ConfigError("training set is empty");
  if (data.inputs.size() != data.labels.size()) throw ShapeError("inputs and labels differ in count");
  for (std::size_t s = 0; s < data.inputs.size(); ++s) {
    if (static_cast<std::size_t>(data.inputs[s].cols()) != data.labels[s].size()) {
      throw ShapeError("sequence " + std::to_string(s) + ": labels do not align with token vectors");
    }
  }

  std::mt19937_64 rng(config.seed);
  auto params = BiLstmTagger<double>::random(config.input_dim, config.hidden, rng);
  Adam<double> adam({config.learning_rate, 0.9, 0.999, 1e-8});
  const std::array<double, 2> weights = {config.class_weight_o, config.class_weight_i};

  std::vector<std::vector<int>> labels;
  labels.reserve(data.labels.size());
  for (const auto& l : data.labels) labels.push_back(as_ints(l));

  std::vector<std::size_t> order(data.inputs.size());
  std::iota(order.begin(), order.end(), 0);
  const auto batch_size = static_cast<std::size_t>(config.batch_size);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const auto stop = std::min(order.size(), start + batch_size);
      std::vector<const Eigen::MatrixXd*> seqs;
      std::vector<std::vector<int>> batch_labels;
      for (std::size_t k = start; k < stop; ++k) {
        seqs.push_back(&data.inputs[order[k]]);
        batch_labels.push_back(labels[order[k]]);
      }
      const auto batch = PaddedBatch<double>::pack(seqs, config.input_dim);
      const auto trace = forward(params, batch, config.dropout, &rng);
      const double loss = weighted_loss<double>(trace, batch, batch_labels, weights);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch + 1) + ", batch " +
                           std::to_string(batches + 1));
      }
      const auto grad = backward<double>(params, batch, trace, batch_labels, weights);
      adam.step(params, grad);
      loss_sum += loss;
      ++batches;
    }
    if (on_epoch) on_epoch({epoch + 1, loss_sum / static_cast<double>(std::max<std::size_t>(batches, 1))});
  }
  return params;
}

std::vector<Eigen::MatrixXd> si_probabilities(const BiLstmTagger<double>& params,
                                              std::span<const Eigen::MatrixXd> inputs, int batch_size) {
  if (batch_size < 1) throw ConfigError("batch size must be positive");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(inputs.size());
  for (std::size_t start = 0; start < inputs.size(); start += static_cast<std::size_t>(batch_size)) {
    const auto stop = std::min(inputs.size(), start + static_cast<std::size_t>(batch_size));
    std::vector<const Eigen::MatrixXd*> seqs;
    for (std::size_t k = start; k < stop; ++k) seqs.push_back(&inputs[k]);
    const auto batch = PaddedBatch<double>::pack(seqs, params.input_dim());
    const auto trace = forward(params, batch);
    for (std::size_t j = 0; j < seqs.size(); ++j) {
      const auto len = seqs[j]->cols();
      Eigen::MatrixXd probs(2, len);
      for (Eigen::Index t = 0; t < len; ++t) {
        probs.col(t) = trace.probs[static_cast<std::size_t>(t)].col(static_cast<Eigen::Index>(j));
      }
      out.push_back(std::move(probs));
    }
  }
  return out;
}

IoLabel decide(double p_inside) { return p_inside >= 0.5 ? IoLabel::I : IoLabel::O; }

std::vector<LabelSequence> predict_si(const BiLstmTagger<double>& params,
                                      std::span<const Eigen::MatrixXd> inputs, int batch_size) {
  if (!nn::all_finite(params)) throw NumericError("tagger parameters are not finite");
  std::vector<LabelSequence> out;
  for (const auto& probs : si_probabilities(params, inputs, batch_size)) {
    LabelSequence labels(static_cast<std::size_t>(probs.cols()));
    for (Eigen::Index t = 0; t < probs.cols(); ++t) labels[static_cast<std::size_t>(t)] = decide(probs(1, t));
    out.push_back(std::move(labels));
  }
  return out;
}

void save_si_model(std::ostream& out, const SIModel& model) {
  using checkpoint::format_double;
  const auto& c = model.config;
  out << kMagic << ' ' << kVersion << '\n';
  out << "config input_dim=" << c.input_dim << " hidden=" << c.hidden << " dropout=" << format_double(c.dropout)
      << " class_weight_o=" << format_double(c.class_weight_o)
      << " class_weight_i=" << format_double(c.class_weight_i)
      << " learning_rate=" << format_double(c.learning_rate) << " epochs=" << c.epochs
      << " batch_size=" << c.batch_size << " seed=" << c.seed << '\n';
  out << "inputs features=" << model.features.to_string() << " embedding=" << model.embedding
      << " max_fragment_len=" << model.max_fragment_len << '\n';
  checkpoint::write_params(out, "tagger", model.params);
}

SIModel load_si_model(std::istream& in, const std::string& source) {
  checkpoint::Reader reader(in, source);
  const auto magic = reader.next_line();
  if (magic != std::string(kMagic) + " " + std::to_string(kVersion)) {
    reader.fail("not a version " + std::to_string(kVersion) + " tagger checkpoint");
  }
  SIModel model;
  try {
    auto kv = reader.key_values("config");
    auto& c = model.config;
    c.input_dim = std::stol(kv.at("input_dim"));
    c.hidden = std::stol(kv.at("hidden"));
    c.dropout = std::stod(kv.at("dropout"));
    c.class_weight_o = std::stod(kv.at("class_weight_o"));
    c.class_weight_i = std::stod(kv.at("class_weight_i"));
    c.learning_rate = std::stod(kv.at("learning_rate"));
    c.epochs = std::stoi(kv.at("epochs"));
    c.batch_size = std::stoi(kv.at("batch_size"));
    c.seed = std::stoull(kv.at("seed"));
    auto inputs = reader.key_values("inputs");
    model.features = SiFeatureSet::parse(inputs.at("features"));
    model.embedding = inputs.at("embedding");
    model.max_fragment_len = std::stoul(inputs.at("max_fragment_len"));
  } catch (const std::out_of_range&) {
    reader.fail("missing checkpoint header field");
  } catch (const std::invalid_argument&) {
    reader.fail("malformed checkpoint header value");
  }
  model.config.validate();
  model.params = BiLstmTagger<double>::zeros(model.config.input_dim, model.config.hidden);
  checkpoint::read_params(reader, "tagger", model.params);
  return model;
}

void save_si_model(const std::string& path, const SIModel& model) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  save_si_model(out, model);
}

SIModel load_si_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return load_si_model(in, path);
}

}  // namespace propdet
