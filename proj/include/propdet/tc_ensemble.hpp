#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "propdet/corpus.hpp"
#include "propdet/feedforward.hpp"
#include "propdet/features.hpp"
#include "propdet/technique.hpp"

namespace propdet {

struct TCConfig {
  // Linear stage over sequence embeddings (base and alternative models).
  double linear_learning_rate = 0.01;
  int linear_epochs = 50;
  // Feature-augmented perceptron on top of the linear stage's logits.
  double mlp_learning_rate = 0.001;
  int mlp_epochs = 15;
  Eigen::Index mlp_hidden = 128;
  double mlp_dropout = 0.25;
  bool no_hidden = false;  // single-layer perceptron variant
  int batch_size = 128;
  std::uint64_t seed = 0;
  TcFeatureSet features;
  bool repetition_preprocessing = true;

  void validate() const;
};

/// Linear classifier over the sequence embedding, then a perceptron over its
/// pre-softmax logits concatenated with fragment features. 14 outputs.
struct TCBaseModel {
  FeedForward<double> linear;
  FeedForward<double> mlp;
  TcFeatureSet features;

  /// embeddings: D x N; features: F x N. Returns 14 x N probabilities.
  Eigen::MatrixXd probabilities(const Eigen::MatrixXd& embeddings, const Eigen::MatrixXd& features) const;
};

/// Linear classifier over the 13 non-Repetition classes.
struct TCAltModel {
  FeedForward<double> linear;

  /// 13 x N probabilities in alt_index order.
  Eigen::MatrixXd probabilities(const Eigen::MatrixXd& embeddings) const;
};

enum class Branch { Base, Override, Alternative, RunnerUp };
std::string_view branch_name(Branch b);

/// Labels best-first with their probabilities.
struct TCPrediction {
  std::size_t instance_id = 0;
  std::vector<std::pair<Technique, double>> ranking;
  Branch branch = Branch::Base;

  Technique top() const { return ranking.front().first; }
};

/// Builds a ranking from a 14-way (or 13-way alternative) probability column.
TCPrediction rank_base(std::size_t instance_id, const Eigen::VectorXd& probs);
TCPrediction rank_alt(std::size_t instance_id, const Eigen::VectorXd& probs);

enum class Phase { Train, Infer };

/// Text to embed for an instance. Training: doubled ("t t") iff the gold label
/// is Repetition. Inference: doubled iff the normalized span recurs elsewhere.
std::string rep_preprocess(const TechniqueInstance& instance, const Article& article, Phase phase,
                           const RepetitionIndex* index = nullptr);

/// Repetition iff the normalized span recurs and this is not its first occurrence.
bool repetition_override(const RepetitionStats& stats);
bool repetition_override(const TechniqueInstance& instance, const Article& article);

/// Override wins; an unconfirmed Repetition falls back to the alternative
/// model; otherwise the base model's top label.
Technique resolve(const TCPrediction& base, bool override_repetition, const TCPrediction& alt);

/// Re-labels instances sharing (article, span). The first member of a group
/// keeps its label. In a pair the second takes the alternative model's label,
/// or the base runner-up when that would repeat the first label. In groups of
/// three or more, member i takes the best base label not yet used in the group.
std::vector<Technique> handle_duplicates(std::span<const TechniqueInstance> instances,
                                         std::span<const Technique> resolved,
                                         std::span<const TCPrediction> alt,
                                         std::span<const TCPrediction> base);

/// Stage one then stage two; stage one is frozen while the perceptron trains.
/// labels are technique indices; embeddings D x N; features F x N.
TCBaseModel train_base(const Eigen::MatrixXd& embeddings, const Eigen::MatrixXd& features,
                       std::span<const Technique> labels, const TCConfig& config);

/// Drops Repetition rows (logging how many) and fits the 13-class classifier.
TCAltModel train_alt(const Eigen::MatrixXd& embeddings, std::span<const Technique> labels,
                     const TCConfig& config);

/// Softmax-regression / perceptron trainer shared by both stages.
FeedForward<double> fit_classifier(const Eigen::MatrixXd& inputs, std::span<const int> labels,
                                   Eigen::Index classes, Eigen::Index hidden, double dropout,
                                   double learning_rate, int epochs, int batch_size, std::uint64_t seed);

/// The full trained system, persisted as one file.
struct TCSystem {
  TCConfig config;
  std::string embedding;  // "hash:<dim>:<seed>" or "sidecar:<dim>"
  TCBaseModel base;
  TCAltModel alt;
};

void save_tc_system(std::ostream& out, const TCSystem& system);
TCSystem load_tc_system(std::istream& in, const std::string& source);
void save_tc_system(const std::string& path, const TCSystem& system);
TCSystem load_tc_system(const std::string& path);

}  // namespace propdet
