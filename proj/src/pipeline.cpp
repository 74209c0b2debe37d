#include "propdet/pipeline.hpp"

#include <charconv>
#include <exception>
#include <thread>

#include "propdet/error.hpp"
#include "propdet/log.hpp"
#include "propdet/si_post.hpp"

namespace propdet {

namespace {

template <typename Int>
bool parse_int(std::string_view s, Int& out) {
  const auto* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && p == end;
}

}  // namespace

EmbeddingSpec EmbeddingSpec::parse(std::string_view text) {
  const auto bad = [&] {
    return ConfigError("embedding spec must be hash:<dim>:<seed> or sidecar:<dim>, got '" + std::string(text) + "'");
  };
  EmbeddingSpec spec;
  const auto c1 = text.find(':');
  if (c1 == std::string_view::npos) throw bad();
  const auto kind = text.substr(0, c1);
  auto rest = text.substr(c1 + 1);
  if (kind == "sidecar") {
    spec.kind = Kind::Sidecar;
    if (!parse_int(rest, spec.dim)) throw bad();
  } else if (kind == "hash") {
    const auto c2 = rest.find(':');
    if (c2 == std::string_view::npos || !parse_int(rest.substr(0, c2), spec.dim) ||
        !parse_int(rest.substr(c2 + 1), spec.seed)) {
      throw bad();
    }
  } else {
    throw bad();
  }
  if (spec.dim < 1) throw bad();
  return spec;
}

std::string EmbeddingSpec::to_string() const {
  if (kind == Kind::Sidecar) return "sidecar:" + std::to_string(dim);
  return "hash:" + std::to_string(dim) + ":" + std::to_string(seed);
}

EmbeddingSpec TokenEmbeddingSource::spec() const {
  if (table) return {EmbeddingSpec::Kind::Sidecar, table->dim(), 0};
  return {EmbeddingSpec::Kind::Hash, hash_dim, hash_seed};
}

Eigen::VectorXd TokenEmbeddingSource::lookup(const Fragment& fragment, std::size_t token_index) const {
  const auto& token = fragment.tokens.at(token_index);
  if (!table) return hash_embedding(token.text, hash_dim, hash_seed);
  if (const auto* v = table->find({fragment.article_id, fragment.index, token_index})) return *v;
  if (!allow_missing) {
    throw MissingEmbedding("no token embedding for article " + fragment.article_id + ", fragment " +
                           std::to_string(fragment.index) + ", token " + std::to_string(token_index) + " ('" +
                           token.text + "'); pass --allow-missing to use hash vectors");
  }
  return hash_embedding(token.text, table->dim(), hash_seed);
}

EmbeddingSpec SeqEmbeddingSource::spec() const {
  if (table) return {EmbeddingSpec::Kind::Sidecar, table->dim(), 0};
  return {EmbeddingSpec::Kind::Hash, hash_dim, hash_seed};
}

Eigen::VectorXd SeqEmbeddingSource::lookup(std::size_t instance_id, std::string_view text) const {
  if (!table) return hash_sequence_embedding(text, hash_dim, hash_seed);
  if (const auto* v = table->find(instance_id)) return *v;
  if (!allow_missing) {
    throw MissingEmbedding("no sequence embedding for instance " + std::to_string(instance_id) +
                           "; pass --allow-missing to use hash vectors");
  }
  return hash_sequence_embedding(text, table->dim(), hash_seed);
}

void check_embedding(const std::string& model_embedding, const EmbeddingSpec& available) {
  if (EmbeddingSpec::parse(model_embedding) != available) {
    throw ConfigError("model was trained on " + model_embedding + " vectors, but " + available.to_string() +
                      " were supplied");
  }
}

// ---- span identification ---------------------------------------------------

std::vector<Fragment> split_corpus(std::span<const Article> articles, std::size_t max_len) {
  std::vector<Fragment> out;
  for (const auto& a : articles) {
    auto f = split_fragments(a, max_len);
    out.insert(out.end(), std::make_move_iterator(f.begin()), std::make_move_iterator(f.end()));
  }
  return out;
}

SiInputs build_si_inputs(std::span<const Article> articles, const TokenEmbeddingSource& embeddings,
                         const SiFeatureSet& features, const SiResources& resources, std::size_t max_len) {
  SiInputs out;
  out.fragments = split_corpus(articles, max_len);
  const auto emb_dim = embeddings.dim();
  const auto feat_dim = static_cast<Eigen::Index>(features.dim());
  out.inputs.reserve(out.fragments.size());
  for (const auto& fragment : out.fragments) {
    const auto feats = token_features(fragment, features, resources);
    Eigen::MatrixXd m(emb_dim + feat_dim, static_cast<Eigen::Index>(fragment.size()));
    for (std::size_t t = 0; t < fragment.size(); ++t) {
      const auto col = static_cast<Eigen::Index>(t);
      m.col(col).head(emb_dim) = embeddings.lookup(fragment, t);
      if (feat_dim > 0) encode(feats[t], features, m.col(col).tail(feat_dim));
    }
    out.inputs.push_back(std::move(m));
  }
  return out;
}

std::vector<LabelSequence> gold_labels(std::span<const Fragment> fragments, const SpanMap& gold) {
  std::vector<LabelSequence> out;
  out.reserve(fragments.size());
  static const std::vector<CharSpan> kNone;
  for (const auto& f : fragments) {
    const auto it = gold.find(f.article_id);
    out.push_back(project_labels(f, it == gold.end() ? kNone : it->second));
  }
  return out;
}

SpanMap spans_from_labels(std::span<const Article> articles, std::span<const Fragment> fragments,
                          std::span<const LabelSequence> labels) {
  if (fragments.size() != labels.size()) throw ShapeError("one label sequence per fragment required");
  SpanMap out;
  for (const auto& a : articles) out[a.id];
  for (std::size_t i = 0; i < fragments.size(); ++i) {
    auto spans = labels_to_spans(fragments[i], labels[i]);
    auto& dst = out[fragments[i].article_id];
    dst.insert(dst.end(), spans.begin(), spans.end());
  }
  for (auto& [id, spans] : out) std::sort(spans.begin(), spans.end());
  return out;
}

std::vector<BiLstmTagger<double>> train_si_runs(const SIConfig& config, const SITrainingSet& data,
                                                std::size_t runs) {
  if (runs < 1) throw ConfigError("at least one training run required");
  std::vector<BiLstmTagger<double>> out(runs);
  std::vector<std::exception_ptr> errors(runs);
  std::vector<std::thread> workers;
  for (std::size_t r = 0; r < runs; ++r) {
    workers.emplace_back([&, r] {
      try {
        auto c = config;
        c.seed = config.seed + r;
        out[r] = train_si(c, data);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

SpanMap predict_si_spans(std::span<const BiLstmTagger<double>> runs, const SiInputs& inputs,
                         std::span<const Article> articles, bool merge, std::size_t min_gap) {
  std::vector<std::vector<LabelSequence>> votes;
  for (const auto& params : runs) votes.push_back(predict_si(params, inputs.inputs));
  const auto labels = majority_vote(votes, inputs.fragments);
  auto spans = spans_from_labels(articles, inputs.fragments, labels);
  return merge ? merge_spans(spans, min_gap) : spans;
}

// ---- technique classification ---------------------------------------------

ArticleIndex index_articles(std::span<const Article> articles) {
  ArticleIndex out;
  for (const auto& a : articles) out[a.id] = &a;
  return out;
}

const Article& find_article(const ArticleIndex& index, const std::string& id) {
  const auto it = index.find(id);
  if (it == index.end()) throw FormatError("instance refers to unknown article " + id);
  return *it->second;
}

namespace {

// One repetition index per article, built lazily.
class RepetitionCache {
 public:
  const RepetitionIndex& get(const Article& a) {
    auto it = cache_.find(a.id);
    if (it == cache_.end()) it = cache_.emplace(a.id, RepetitionIndex(a)).first;
    return it->second;
  }

 private:
  std::map<std::string, RepetitionIndex> cache_;
};

}  // namespace

std::vector<std::string> tc_texts(std::span<const TechniqueInstance> instances, const ArticleIndex& articles,
                                  Phase phase, bool repetition_preprocessing) {
  RepetitionCache reps;
  std::vector<std::string> out;
  out.reserve(instances.size());
  for (const auto& inst : instances) {
    const auto& a = find_article(articles, inst.article_id);
    if (repetition_preprocessing) {
      out.push_back(rep_preprocess(inst, a, phase, &reps.get(a)));
    } else {
      check_span(a, inst.span);
      out.push_back(a.slice(inst.span.begin, inst.span.end));
    }
  }
  return out;
}

TcInputs build_tc_inputs(std::span<const TechniqueInstance> instances, const ArticleIndex& articles, Phase phase,
                         bool repetition_preprocessing, const SeqEmbeddingSource& embeddings,
                         const TcFeatureSet& features, const TcResources& resources) {
  TcInputs out;
  out.texts = tc_texts(instances, articles, phase, repetition_preprocessing);
  const auto n = static_cast<Eigen::Index>(instances.size());
  out.embeddings.resize(embeddings.dim(), n);
  out.features.resize(static_cast<Eigen::Index>(features.dim()), n);
  RepetitionCache reps;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& inst = instances[static_cast<std::size_t>(i)];
    const auto& a = find_article(articles, inst.article_id);
    out.embeddings.col(i) = embeddings.lookup(inst.instance_id, out.texts[static_cast<std::size_t>(i)]);
    if (features.dim() > 0) {
      out.features.col(i) = encode(fragment_features(inst, a, resources, features, &reps.get(a)), features);
    }
  }
  return out;
}

TCSystem train_tc_system(std::span<const TechniqueInstance> instances, const ArticleIndex& articles,
                         const SeqEmbeddingSource& embeddings, const TCConfig& config,
                         const TcResources& resources) {
  config.validate();
  std::vector<Technique> labels;
  for (const auto& inst : instances) {
    if (!inst.technique) {
      throw ConfigError("training needs labeled instances; instance " + std::to_string(inst.instance_id) +
                        " has no technique");
    }
    labels.push_back(*inst.technique);
  }
  const auto inputs = build_tc_inputs(instances, articles, Phase::Train, config.repetition_preprocessing,
                                      embeddings, config.features, resources);
  TCSystem system;
  system.config = config;
  system.embedding = embeddings.spec().to_string();
  // Independent models; train them side by side.
  std::exception_ptr alt_error;
  std::thread alt_worker([&] {
    try {
      system.alt = train_alt(inputs.embeddings, labels, config);
    } catch (...) {
      alt_error = std::current_exception();
    }
  });
  try {
    system.base = train_base(inputs.embeddings, inputs.features, labels, config);
  } catch (...) {
    alt_worker.join();
    throw;
  }
  alt_worker.join();
  if (alt_error) std::rethrow_exception(alt_error);
  return system;
}

TcOutput predict_tc(const TCSystem& system, std::span<const TechniqueInstance> instances,
                    const ArticleIndex& articles, const SeqEmbeddingSource& embeddings,
                    const TcResources& resources, bool postprocess) {
  check_embedding(system.embedding, embeddings.spec());
  const auto& config = system.config;
  const auto inputs = build_tc_inputs(instances, articles, Phase::Infer, config.repetition_preprocessing,
                                      embeddings, config.features, resources);
  const auto base_probs = system.base.probabilities(inputs.embeddings, inputs.features);
  const auto alt_probs = system.alt.probabilities(inputs.embeddings);

  TcOutput out;
  RepetitionCache reps;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto col = static_cast<Eigen::Index>(i);
    const auto& inst = instances[i];
    out.base.push_back(rank_base(inst.instance_id, base_probs.col(col)));
    out.alt.push_back(rank_alt(inst.instance_id, alt_probs.col(col)));
    if (!postprocess) {
      out.labels.push_back(out.base.back().top());
      out.branches.push_back(Branch::Base);
      continue;
    }
    const auto& a = find_article(articles, inst.article_id);
    const bool override_rep = repetition_override(reps.get(a).stats(inst.span));
    out.labels.push_back(resolve(out.base.back(), override_rep, out.alt.back()));
    out.branches.push_back(override_rep                                      ? Branch::Override
                           : out.base.back().top() == Technique::Repetition ? Branch::Alternative
                                                                             : Branch::Base);
  }
  if (!postprocess) return out;

  const auto final_labels = handle_duplicates(instances, out.labels, out.alt, out.base);
  for (std::size_t i = 0; i < final_labels.size(); ++i) {
    if (final_labels[i] == out.labels[i]) continue;
    out.branches[i] = final_labels[i] == out.alt[i].top() ? Branch::Alternative : Branch::RunnerUp;
  }
  out.labels = final_labels;
  return out;
}

}  // namespace propdet
