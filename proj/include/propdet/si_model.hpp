#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "propdet/bilstm.hpp"
#include "propdet/corpus.hpp"
#include "propdet/features.hpp"

namespace propdet {

/// Tagger hyperparameters. Defaults are the full-scale settings; desk-scale
/// runs shrink `hidden`.
struct SIConfig {
  Eigen::Index input_dim = 0;  // embedding dim + enabled token feature dims
  Eigen::Index hidden = 512;
  double dropout = 0.25;
  double class_weight_o = 1.0;
  double class_weight_i = 6.5;
  double learning_rate = 0.001;
  int epochs = 10;
  int batch_size = 128;
  std::uint64_t seed = 0;

  /// Throws ConfigError on out-of-range values.
  void validate() const;
};

/// Token input matrices (D x T, one column per token) with aligned I/O labels.
struct SITrainingSet {
  std::vector<Eigen::MatrixXd> inputs;
  std::vector<LabelSequence> labels;
};

/// Trained tagger plus what is needed to rebuild its inputs at prediction time.
struct SIModel {
  SIConfig config;
  SiFeatureSet features;
  std::string embedding;  // e.g. "hash:32:0" or "sidecar:768"
  std::size_t max_fragment_len = kDefaultMaxFragmentLen;
  BiLstmTagger<double> params;
};

struct SIEpochReport {
  int epoch = 0;
  double mean_loss = 0.0;
};

/// Adam on class-weighted cross-entropy. Initialization, shuffling and dropout
/// are driven by `config.seed` only. Throws NumericError on a non-finite loss.
BiLstmTagger<double> train_si(const SIConfig& config, const SITrainingSet& data,
                              const std::function<void(const SIEpochReport&)>& on_epoch = {});

/// Per-token (P(O), P(I)) with dropout disabled; one 2 x T matrix per sequence.
std::vector<Eigen::MatrixXd> si_probabilities(const BiLstmTagger<double>& params,
                                              std::span<const Eigen::MatrixXd> inputs,
                                              int batch_size = 128);

/// Argmax labels; an exact 0.5 tie goes to I.
std::vector<LabelSequence> predict_si(const BiLstmTagger<double>& params,
                                      std::span<const Eigen::MatrixXd> inputs, int batch_size = 128);

IoLabel decide(double p_inside);

void save_si_model(std::ostream& out, const SIModel& model);
SIModel load_si_model(std::istream& in, const std::string& source);
void save_si_model(const std::string& path, const SIModel& model);
SIModel load_si_model(const std::string& path);

}  // namespace propdet
