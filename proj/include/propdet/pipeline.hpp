#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "propdet/bilstm.hpp"
#include "propdet/corpus.hpp"
#include "propdet/embio.hpp"
#include "propdet/features.hpp"
#include "propdet/si_model.hpp"
#include "propdet/si_post.hpp"
#include "propdet/tc_ensemble.hpp"

namespace propdet {

/// Where vectors come from: a sidecar table ("sidecar:<dim>") or the hash
/// fallback ("hash:<dim>:<seed>").
struct EmbeddingSpec {
  enum class Kind { Hash, Sidecar } kind = Kind::Hash;
  Eigen::Index dim = 32;
  std::uint64_t seed = 0;

  static EmbeddingSpec parse(std::string_view text);
  std::string to_string() const;
  bool operator==(const EmbeddingSpec&) const = default;
};

/// Token vectors keyed by (article, fragment, token). A missing row throws
/// MissingEmbedding unless `allow_missing`, which substitutes the hash vector.
struct TokenEmbeddingSource {
  const TokenEmbeddingTable* table = nullptr;
  Eigen::Index hash_dim = 32;
  std::uint64_t hash_seed = 0;
  bool allow_missing = false;

  Eigen::Index dim() const { return table ? table->dim() : hash_dim; }
  EmbeddingSpec spec() const;
  Eigen::VectorXd lookup(const Fragment& fragment, std::size_t token_index) const;
};

/// Sequence vectors keyed by instance id, same fallback rules.
struct SeqEmbeddingSource {
  const SeqEmbeddingTable* table = nullptr;
  Eigen::Index hash_dim = 32;
  std::uint64_t hash_seed = 0;
  bool allow_missing = false;

  Eigen::Index dim() const { return table ? table->dim() : hash_dim; }
  EmbeddingSpec spec() const;
  Eigen::VectorXd lookup(std::size_t instance_id, std::string_view text) const;
};

/// Throws ConfigError when a loaded model was trained on other vectors.
void check_embedding(const std::string& model_embedding, const EmbeddingSpec& available);

// ---- span identification ---------------------------------------------------

struct SiInputs {
  std::vector<Fragment> fragments;
  std::vector<Eigen::MatrixXd> inputs;  // (embedding dim + feature dim) x tokens
};

std::vector<Fragment> split_corpus(std::span<const Article> articles, std::size_t max_len);

SiInputs build_si_inputs(std::span<const Article> articles, const TokenEmbeddingSource& embeddings,
                         const SiFeatureSet& features, const SiResources& resources,
                         std::size_t max_len = kDefaultMaxFragmentLen);

std::vector<LabelSequence> gold_labels(std::span<const Fragment> fragments, const SpanMap& gold);

/// Spans per article, with an (possibly empty) entry for every article given.
SpanMap spans_from_labels(std::span<const Article> articles, std::span<const Fragment> fragments,
                          std::span<const LabelSequence> labels);

/// Trains `runs` taggers concurrently, run r seeded with `config.seed + r`.
std::vector<BiLstmTagger<double>> train_si_runs(const SIConfig& config, const SITrainingSet& data,
                                                std::size_t runs);

/// Votes the runs' labels, converts to spans and optionally merges them.
SpanMap predict_si_spans(std::span<const BiLstmTagger<double>> runs, const SiInputs& inputs,
                         std::span<const Article> articles, bool merge, std::size_t min_gap = kDefaultMinGap);

// ---- technique classification ---------------------------------------------

using ArticleIndex = std::map<std::string, const Article*>;
ArticleIndex index_articles(std::span<const Article> articles);
const Article& find_article(const ArticleIndex& index, const std::string& id);

/// Texts handed to the sequence embedder, after optional repetition doubling.
std::vector<std::string> tc_texts(std::span<const TechniqueInstance> instances, const ArticleIndex& articles,
                                  Phase phase, bool repetition_preprocessing);

struct TcInputs {
  std::vector<std::string> texts;
  Eigen::MatrixXd embeddings;  // D x N
  Eigen::MatrixXd features;    // F x N
};

TcInputs build_tc_inputs(std::span<const TechniqueInstance> instances, const ArticleIndex& articles, Phase phase,
                         bool repetition_preprocessing, const SeqEmbeddingSource& embeddings,
                         const TcFeatureSet& features, const TcResources& resources);

/// Trains the base and alternative models; instances must be labeled.
TCSystem train_tc_system(std::span<const TechniqueInstance> instances, const ArticleIndex& articles,
                         const SeqEmbeddingSource& embeddings, const TCConfig& config,
                         const TcResources& resources);

struct TcOutput {
  std::vector<Technique> labels;
  std::vector<TCPrediction> base;
  std::vector<TCPrediction> alt;
  std::vector<Branch> branches;
};

/// With `postprocess` off every instance gets the base model's top label.
TcOutput predict_tc(const TCSystem& system, std::span<const TechniqueInstance> instances,
                    const ArticleIndex& articles, const SeqEmbeddingSource& embeddings,
                    const TcResources& resources, bool postprocess = true);

}  // namespace propdet
