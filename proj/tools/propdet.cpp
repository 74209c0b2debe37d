// propdet: command-line front end for span identification and technique
// classification.
#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "propdet/error.hpp"
#include "propdet/log.hpp"
#include "propdet/pipeline.hpp"
#include "propdet/scorer.hpp"

namespace fs = std::filesystem;
using namespace propdet;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNumeric = 3;

// Shortest round-trip decimal, always with a fractional part ("1.0", "0.5").
std::string fmt(double x) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  std::string s(buf, end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  if (const auto dir = fs::path(path).parent_path(); !dir.empty()) fs::create_directories(dir);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

// Backslash escapes so instance texts stay one TSV field.
std::string escape_field(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\\': out += "\\\\"; break;
      default: out += c;
    }
  }
  return out;
}

void write_row(std::ostream& out, const Eigen::VectorXd& v) {
  char buf[32];
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.6g", v[i]);
    out << (i ? " " : "") << buf;
  }
}

// ---- shared option groups -------------------------------------------------

struct TokenEmbeddingOpts {
  std::string file;
  Eigen::Index hash_dim = 32;
  std::uint64_t hash_seed = 0;
  bool allow_missing = false;
  std::optional<TokenEmbeddingTable> table;

  void add(CLI::App* app) {
    app->add_option("--embeddings", file, "Token embedding sidecar (#dim=<d> TSV)");
    app->add_option("--hash-dim", hash_dim, "Hash fallback dimension when no sidecar is given");
    app->add_option("--hash-seed", hash_seed, "Hash fallback seed");
    app->add_flag("--allow-missing", allow_missing, "Substitute hash vectors for missing sidecar rows");
  }
  TokenEmbeddingSource source() {
    if (!file.empty() && !table) table = read_token_embeddings(file);
    return {table ? &*table : nullptr, hash_dim, hash_seed, allow_missing};
  }
};

struct SeqEmbeddingOpts {
  std::string file;
  Eigen::Index hash_dim = 32;
  std::uint64_t hash_seed = 0;
  bool allow_missing = false;
  std::optional<SeqEmbeddingTable> table;

  void add(CLI::App* app) {
    app->add_option("--embeddings", file, "Sequence embedding sidecar keyed by instance id");
    app->add_option("--hash-dim", hash_dim, "Hash fallback dimension when no sidecar is given");
    app->add_option("--hash-seed", hash_seed, "Hash fallback seed");
    app->add_flag("--allow-missing", allow_missing, "Substitute hash vectors for missing sidecar rows");
  }
  SeqEmbeddingSource source() {
    if (!file.empty() && !table) table = read_seq_embeddings(file);
    return {table ? &*table : nullptr, hash_dim, hash_seed, allow_missing};
  }
};

struct SiResourceOpts {
  std::string swn, arglex, pos;
  std::optional<SentimentLexicon> swn_lex;
  std::optional<ArguingLexicon> al_lex;
  std::optional<AnnotationTable> pos_table;

  void add(CLI::App* app) {
    app->add_option("--swn", swn, "SentiWordNet TSV");
    app->add_option("--arglex", arglex, "Arguing Lexicon directory of *.patterns files");
    app->add_option("--pos-annotations", pos, "POS annotation TSV (fallback tagger when absent)");
  }
  // Only loads what the feature set needs.
  SiResources load(const SiFeatureSet& set) {
    if (set.sentiment && !swn.empty() && !swn_lex) swn_lex = SentimentLexicon::load(swn);
    if (set.arguing && !arglex.empty() && !al_lex) al_lex = ArguingLexicon::load(arglex);
    if (set.pos && !pos.empty() && !pos_table) pos_table = AnnotationTable::load(pos);
    return {swn_lex ? &*swn_lex : nullptr, al_lex ? &*al_lex : nullptr, pos_table ? &*pos_table : nullptr};
  }
};

struct TcResourceOpts {
  std::string arglex, entities, emotions;
  std::optional<ArguingLexicon> al_lex;
  std::optional<AnnotationTable> ne_table;
  std::optional<EmotionTable> emo_table;

  void add(CLI::App* app) {
    app->add_option("--arglex", arglex, "Arguing Lexicon directory");
    app->add_option("--ne-annotations", entities, "Named-entity annotation TSV");
    app->add_option("--emotions", emotions, "Per-instance emotion scores TSV");
  }
  TcResources load(const TcFeatureSet& set) {
    if (set.arguing && !arglex.empty() && !al_lex) al_lex = ArguingLexicon::load(arglex);
    if ((set.ne2 || set.ne6) && !ne_table) {
      if (entities.empty()) throw ConfigError("ne2/ne6 features need --ne-annotations");
      ne_table = AnnotationTable::load(entities);
    }
    if (set.emotion && !emotions.empty() && !emo_table) emo_table = EmotionTable::load(emotions);
    return {al_lex ? &*al_lex : nullptr, ne_table ? &*ne_table : nullptr, emo_table ? &*emo_table : nullptr};
  }
};

struct SiTrainOpts {
  std::string features = "swn,al,pos";
  SIConfig config;
  std::size_t max_len = kDefaultMaxFragmentLen;

  void add(CLI::App* app) {
    app->add_option("--features", features, "Token feature groups: swn,al,pos or none");
    app->add_option("--hidden", config.hidden, "LSTM hidden size per direction");
    app->add_option("--dropout", config.dropout);
    app->add_option("--weight-o", config.class_weight_o, "Loss weight of class O");
    app->add_option("--weight-i", config.class_weight_i, "Loss weight of class I");
    app->add_option("--lr", config.learning_rate, "Adam learning rate");
    app->add_option("--epochs", config.epochs);
    app->add_option("--batch-size", config.batch_size);
    app->add_option("--seed", config.seed);
    app->add_option("--max-len", max_len, "Maximum fragment length in tokens");
  }
};

struct TcTrainOpts {
  std::string features = "none";
  TCConfig config;
  bool no_rep = false;

  void add(CLI::App* app) {
    app->add_option("--features", features, "Fragment features: ne2,ne6,al,q,repcount,seqlen,america,reductio,emotion");
    app->add_option("--linear-lr", config.linear_learning_rate);
    app->add_option("--linear-epochs", config.linear_epochs);
    app->add_option("--mlp-lr", config.mlp_learning_rate);
    app->add_option("--mlp-epochs", config.mlp_epochs);
    app->add_option("--mlp-hidden", config.mlp_hidden);
    app->add_option("--mlp-dropout", config.mlp_dropout);
    app->add_flag("--no-hidden", config.no_hidden, "Single-layer perceptron instead of the MLP");
    app->add_option("--batch-size", config.batch_size);
    app->add_option("--seed", config.seed);
    app->add_flag("--no-rep", no_rep, "Disable repetition pre-processing");
  }
  TCConfig resolved() const {
    auto c = config;
    c.features = TcFeatureSet::parse(features);
    c.repetition_preprocessing = !no_rep;
    return c;
  }
};

// Gold spans with an entry for every article; rows naming other articles are dropped.
SpanMap gold_for(std::span<const Article> articles, const std::string& path) {
  SpanMap gold;
  for (const auto& a : articles) gold[a.id];
  for (auto& [id, spans] : load_si_spans(path)) {
    const auto it = gold.find(id);
    if (it == gold.end()) {
      log::warn(path + ": article " + id + " is not in the corpus, its spans are ignored");
      continue;
    }
    it->second = std::move(spans);
  }
  return gold;
}

std::string si_run_path(const std::string& base, std::size_t runs, std::size_t r) {
  return runs == 1 ? base : base + "." + std::to_string(r + 1);
}

void write_spans(const std::string& path, const SpanMap& spans) {
  auto out = open_out(path);
  write_si_spans(out, spans);
}

// Trains k taggers; returns the models with their shared input description.
std::vector<SIModel> train_si_models(const std::vector<Article>& articles, const SpanMap& gold,
                                     TokenEmbeddingOpts& emb, SiResourceOpts& res, const SiTrainOpts& opts,
                                     const SiFeatureSet& features, std::size_t runs) {
  const auto src = emb.source();
  const auto inputs = build_si_inputs(articles, src, features, res.load(features), opts.max_len);
  SITrainingSet data{inputs.inputs, gold_labels(inputs.fragments, gold)};
  auto config = opts.config;
  config.input_dim = src.dim() + static_cast<Eigen::Index>(features.dim());
  log::info("training " + std::to_string(runs) + " tagger(s) on " + std::to_string(data.inputs.size()) +
            " fragments, input dim " + std::to_string(config.input_dim));

  std::vector<BiLstmTagger<double>> params;
  if (runs == 1) {
    params.push_back(train_si(config, data, [](const SIEpochReport& r) {
      log::info("epoch " + std::to_string(r.epoch) + " loss " + fmt(r.mean_loss));
    }));
  } else {
    params = train_si_runs(config, data, runs);
  }
  std::vector<SIModel> models;
  for (std::size_t r = 0; r < runs; ++r) {
    auto c = config;
    c.seed = config.seed + r;
    models.push_back({c, features, src.spec().to_string(), opts.max_len, std::move(params[r])});
  }
  return models;
}

// ---- subcommands ------------------------------------------------------------

struct Preprocess {
  std::string articles, out, instances, phase = "infer";
  std::size_t max_len = kDefaultMaxFragmentLen;
  bool labeled = false, no_rep = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("preprocess", "Dump fragments (or technique instance texts) for the extractor");
    c->add_option("--articles", articles, "Directory of article<id>.txt")->required();
    c->add_option("--out", out, "Output TSV")->required();
    c->add_option("--max-len", max_len, "Maximum fragment length in tokens");
    c->add_option("--instances", instances, "Technique instance TSV; switches to instance-text mode");
    c->add_option("--phase", phase, "train or infer (repetition pre-processing)")
        ->check(CLI::IsMember({"train", "infer"}));
    c->add_flag("--labeled", labeled, "Instance file carries gold techniques");
    c->add_flag("--no-rep", no_rep, "Disable repetition pre-processing");
    c->callback([this] { run(); });
  }
  void run() {
    const auto arts = load_articles(articles);
    auto o = open_out(out);
    if (instances.empty()) {
      // article_id, fragment_index, token_index, begin, end, token
      for (const auto& f : split_corpus(arts, max_len)) {
        for (std::size_t t = 0; t < f.tokens.size(); ++t) {
          const auto& tok = f.tokens[t];
          o << f.article_id << '\t' << f.index << '\t' << t << '\t' << tok.begin << '\t' << tok.end << '\t'
            << escape_field(tok.text) << '\n';
        }
      }
      return;
    }
    const auto p = phase == "train" ? Phase::Train : Phase::Infer;
    const auto insts = load_tc_instances(instances, labeled || p == Phase::Train);
    const auto index = index_articles(arts);
    const auto texts = tc_texts(insts, index, p, !no_rep);
    for (std::size_t i = 0; i < insts.size(); ++i) {
      o << insts[i].instance_id << '\t' << escape_field(texts[i]) << '\n';
    }
  }
};

struct Featurize {
  std::string articles, out, instances, features;
  std::size_t max_len = kDefaultMaxFragmentLen;
  SiResourceOpts si_res;
  TcResourceOpts tc_res;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("featurize", "Write token features (or fragment features with --instances)");
    c->add_option("--articles", articles)->required();
    c->add_option("--out", out)->required();
    c->add_option("--features", features, "Feature toggles (default swn,al,pos for tokens, none for instances)");
    c->add_option("--max-len", max_len);
    c->add_option("--instances", instances, "Technique instance TSV; switches to fragment-feature mode");
    c->add_option("--swn", si_res.swn);
    c->add_option("--arglex", si_res.arglex);
    c->add_option("--pos-annotations", si_res.pos);
    c->add_option("--ne-annotations", tc_res.entities);
    c->add_option("--emotions", tc_res.emotions);
    c->callback([this] { run(); });
  }
  void run() {
    const auto arts = load_articles(articles);
    auto o = open_out(out);
    if (instances.empty()) {
      const auto set = SiFeatureSet::parse(features.empty() ? "swn,al,pos" : features);
      const auto res = si_res.load(set);
      o << "#dim=" << set.dim() << '\n';
      Eigen::VectorXd v(static_cast<Eigen::Index>(set.dim()));
      for (const auto& f : split_corpus(arts, max_len)) {
        const auto feats = token_features(f, set, res);
        for (std::size_t t = 0; t < feats.size(); ++t) {
          encode(feats[t], set, v);
          o << f.article_id << '\t' << f.index << '\t' << t << '\t';
          write_row(o, v);
          o << '\n';
        }
      }
      return;
    }
    const auto set = TcFeatureSet::parse(features.empty() ? "none" : features);
    tc_res.arglex = si_res.arglex;
    const auto res = tc_res.load(set);
    const auto insts = load_tc_instances(instances, false);
    const auto index = index_articles(arts);
    o << "#dim=" << set.dim() << '\n';
    for (const auto& inst : insts) {
      o << inst.instance_id << '\t';
      write_row(o, encode(fragment_features(inst, find_article(index, inst.article_id), res, set), set));
      o << '\n';
    }
  }
};

struct TrainSi {
  std::string articles, gold, out;
  std::size_t runs = 1;
  TokenEmbeddingOpts emb;
  SiResourceOpts res;
  SiTrainOpts opts;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("train-si", "Train the span tagger (k concurrent runs with --runs k)");
    c->add_option("--articles", articles)->required();
    c->add_option("--gold", gold, "Gold span TSV")->required();
    c->add_option("--out", out, "Model file; with --runs k, files <out>.1 .. <out>.k")->required();
    c->add_option("--runs", runs, "Number of independently seeded runs (seed, seed+1, ...)")
        ->check(CLI::PositiveNumber);
    emb.add(c);
    res.add(c);
    opts.add(c);
    c->callback([this] { run(); });
  }
  void run() {
    const auto arts = load_articles(articles);
    const auto models =
        train_si_models(arts, gold_for(arts, gold), emb, res, opts, SiFeatureSet::parse(opts.features), runs);
    for (std::size_t r = 0; r < models.size(); ++r) save_si_model(si_run_path(out, runs, r), models[r]);
  }
};

struct PredictSi {
  std::string articles, models, out;
  bool merge = false;
  std::size_t min_gap = kDefaultMinGap;
  int batch_size = 128;
  TokenEmbeddingOpts emb;
  SiResourceOpts res;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("predict-si", "Tag articles; several models are combined by majority vote");
    c->add_option("--articles", articles)->required();
    c->add_option("--model", models, "Model file, or comma-separated list for voting")->required();
    c->add_option("--out", out, "Predicted span TSV")->required();
    c->add_flag("--merge", merge, "Merge spans closer than --min-gap characters");
    c->add_option("--min-gap", min_gap);
    c->add_option("--batch-size", batch_size);
    emb.add(c);
    res.add(c);
    c->callback([this] { run(); });
  }
  void run() {
    std::vector<SIModel> loaded;
    for (const auto& path : split_list(models, ',')) loaded.push_back(load_si_model(path));
    if (loaded.empty()) throw ConfigError("--model names no files");
    const auto& first = loaded.front();
    for (const auto& m : loaded) {
      if (m.features != first.features || m.embedding != first.embedding ||
          m.max_fragment_len != first.max_fragment_len) {
        throw ConfigError("models to be voted were trained on different inputs");
      }
    }
    const auto src = emb.source();
    check_embedding(first.embedding, src.spec());
    const auto arts = load_articles(articles);
    const auto inputs = build_si_inputs(arts, src, first.features, res.load(first.features), first.max_fragment_len);
    std::vector<std::vector<LabelSequence>> runs;
    for (const auto& m : loaded) runs.push_back(predict_si(m.params, inputs.inputs, batch_size));
    auto spans = spans_from_labels(arts, inputs.fragments, majority_vote(runs, inputs.fragments));
    if (merge) spans = merge_spans(spans, min_gap);
    write_spans(out, spans);
  }
};

struct Vote {
  std::string runs, articles, out;
  std::size_t max_len = kDefaultMaxFragmentLen;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("vote", "Token-wise majority vote over k prediction files");
    c->add_option("--runs", runs, "Comma-separated prediction TSVs")->required();
    c->add_option("--articles", articles, "Articles the predictions refer to")->required();
    c->add_option("--out", out)->required();
    c->add_option("--max-len", max_len, "Fragment length used by the taggers");
    c->callback([this] { run(); });
  }
  void run() {
    const auto arts = load_articles(articles);
    const auto fragments = split_corpus(arts, max_len);
    std::vector<std::vector<LabelSequence>> labels;
    for (const auto& path : split_list(runs, ',')) {
      const auto spans = gold_for(arts, path);
      labels.push_back(gold_labels(fragments, spans));
    }
    if (labels.empty()) throw ConfigError("--runs names no files");
    write_spans(out, spans_from_labels(arts, fragments, majority_vote(labels, fragments)));
  }
};

struct Merge {
  std::string in, out;
  std::size_t min_gap = kDefaultMinGap;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("merge", "Merge predicted spans separated by fewer than --min-gap characters");
    c->add_option("--in", in)->required();
    c->add_option("--out", out)->required();
    c->add_option("--min-gap", min_gap);
    c->callback([this] { run(); });
  }
  void run() { write_spans(out, merge_spans(load_si_spans(in), min_gap)); }
};

struct ScoreSi {
  std::string pred, gold, articles;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("score-si", "Character-overlap precision, recall and F1");
    c->add_option("--pred", pred)->required();
    c->add_option("--gold", gold)->required();
    c->add_option("--articles", articles, "Corpus directory; articles without gold spans count as empty");
    c->callback([this] { run(); });
  }
  void run() {
    SpanMap g;
    if (!articles.empty()) g = gold_for(load_articles(articles), gold);
    else g = load_si_spans(gold);
    const auto s = score_si(load_si_spans(pred), g);
    std::cout << fmt(s.precision) << '\t' << fmt(s.recall) << '\t' << fmt(s.f1) << '\n';
  }
};

struct TrainTc {
  std::string articles, instances, out;
  SeqEmbeddingOpts emb;
  TcResourceOpts res;
  TcTrainOpts opts;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("train-tc", "Train the base and alternative technique classifiers");
    c->add_option("--articles", articles)->required();
    c->add_option("--instances", instances, "Labeled instance TSV")->required();
    c->add_option("--out", out, "Model file")->required();
    emb.add(c);
    res.add(c);
    opts.add(c);
    c->callback([this] { run(); });
  }
  void run() {
    const auto arts = load_articles(articles);
    const auto insts = load_tc_instances(instances, true);
    const auto config = opts.resolved();
    const auto system = train_tc_system(insts, index_articles(arts), emb.source(), config, res.load(config.features));
    save_tc_system(out, system);
  }
};

struct PredictTc {
  std::string articles, instances, model, out, branches;
  bool no_postprocess = false;
  SeqEmbeddingOpts emb;
  TcResourceOpts res;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("predict-tc", "Label technique instances");
    c->add_option("--articles", articles)->required();
    c->add_option("--instances", instances, "Instance TSV; the technique column is ignored")->required();
    c->add_option("--model", model)->required();
    c->add_option("--out", out)->required();
    c->add_option("--branches", branches, "Also write which rule produced each label");
    c->add_flag("--no-postprocess", no_postprocess, "Base model's top label only");
    emb.add(c);
    res.add(c);
    c->callback([this] { run(); });
  }
  void run() {
    const auto system = load_tc_system(model);
    const auto arts = load_articles(articles);
    const auto insts = load_tc_instances(instances, false);
    const auto result = predict_tc(system, insts, index_articles(arts), emb.source(),
                                   res.load(system.config.features), !no_postprocess);
    auto o = open_out(out);
    write_tc_predictions(o, insts, result.labels);
    if (!branches.empty()) {
      auto b = open_out(branches);
      for (std::size_t i = 0; i < insts.size(); ++i) {
        b << insts[i].instance_id << '\t' << branch_name(result.branches[i]) << '\n';
      }
    }
  }
};

std::vector<Technique> aligned_labels(const std::vector<TechniqueInstance>& pred,
                                      const std::vector<TechniqueInstance>& gold, const std::string& pred_path) {
  if (pred.size() != gold.size()) {
    throw FormatError(pred_path, 0, std::to_string(pred.size()) + " predictions for " +
                                        std::to_string(gold.size()) + " gold instances");
  }
  std::vector<Technique> out;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (pred[i].article_id != gold[i].article_id || pred[i].span != gold[i].span) {
      throw FormatError(pred_path, i + 1, "row does not match gold instance " + std::to_string(i + 1));
    }
    out.push_back(*pred[i].technique);
  }
  return out;
}

struct ScoreTc {
  std::string pred, gold, confusion = "confusion.tsv", report;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("score-tc", "Micro F1, per-class table and confusion matrix");
    c->add_option("--pred", pred)->required();
    c->add_option("--gold", gold)->required();
    c->add_option("--confusion", confusion, "Confusion matrix output");
    c->add_option("--report", report, "Also write the per-class table to this file");
    c->callback([this] { run(); });
  }
  void run() {
    const auto p = load_tc_instances(pred, true);
    const auto g = load_tc_instances(gold, true);
    std::vector<Technique> gl;
    for (const auto& i : g) gl.push_back(*i.technique);
    const auto score = score_tc(aligned_labels(p, g, pred), gl);
    std::cout << "micro_f1\t" << fmt(score.micro_f1) << '\n';
    write_tc_report(std::cout, score);
    auto c = open_out(confusion);
    write_confusion(c, score);
    if (!report.empty()) {
      auto r = open_out(report);
      write_tc_report(r, score);
    }
  }
};

// Trains every configuration of a feature grid and tabulates dev scores.
struct Ablate {
  std::string task = "si", grid, articles, gold, instances, dev_articles, dev_gold, dev_instances, out;
  std::size_t runs = kDefaultVotingRuns, min_gap = kDefaultMinGap;
  TokenEmbeddingOpts si_emb;
  SiResourceOpts si_res;
  SiTrainOpts si_opts;
  SeqEmbeddingOpts tc_emb;
  TcResourceOpts tc_res;
  TcTrainOpts tc_opts;
  std::optional<int> batch_size;
  std::uint64_t seed = 0;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("ablate", "Feature-toggle grid; writes one table row per configuration");
    c->add_option("--task", task)->check(CLI::IsMember({"si", "tc"}));
    c->add_option("--grid", grid, "Semicolon-separated feature sets, e.g. \"none;swn;swn,al,pos\"")->required();
    c->add_option("--articles", articles, "Training articles")->required();
    c->add_option("--gold", gold, "Training spans (si)");
    c->add_option("--instances", instances, "Training instances (tc)");
    c->add_option("--dev-articles", dev_articles)->required();
    c->add_option("--dev-gold", dev_gold, "Development spans (si)");
    c->add_option("--dev-instances", dev_instances, "Labeled development instances (tc)");
    c->add_option("--out", out, "Table TSV")->required();
    c->add_option("--runs", runs, "Voting runs (si)")->check(CLI::PositiveNumber);
    c->add_option("--min-gap", min_gap);
    // Both tasks share the embedding flags.
    c->add_option("--embeddings", si_emb.file, "Token (si) or sequence (tc) sidecar");
    c->add_option("--hash-dim", si_emb.hash_dim);
    c->add_option("--hash-seed", si_emb.hash_seed);
    c->add_flag("--allow-missing", si_emb.allow_missing);
    c->add_option("--swn", si_res.swn);
    c->add_option("--arglex", si_res.arglex);
    c->add_option("--pos-annotations", si_res.pos);
    c->add_option("--ne-annotations", tc_res.entities);
    c->add_option("--emotions", tc_res.emotions);
    c->add_option("--hidden", si_opts.config.hidden);
    c->add_option("--dropout", si_opts.config.dropout);
    c->add_option("--weight-o", si_opts.config.class_weight_o);
    c->add_option("--weight-i", si_opts.config.class_weight_i);
    c->add_option("--lr", si_opts.config.learning_rate);
    c->add_option("--epochs", si_opts.config.epochs);
    c->add_option("--batch-size", batch_size);
    c->add_option("--seed", seed, "Base seed for every trained model");
    c->add_option("--max-len", si_opts.max_len);
    c->add_option("--linear-lr", tc_opts.config.linear_learning_rate);
    c->add_option("--linear-epochs", tc_opts.config.linear_epochs);
    c->add_option("--mlp-lr", tc_opts.config.mlp_learning_rate);
    c->add_option("--mlp-epochs", tc_opts.config.mlp_epochs);
    c->add_option("--mlp-hidden", tc_opts.config.mlp_hidden);
    c->add_option("--mlp-dropout", tc_opts.config.mlp_dropout);
    c->add_flag("--no-hidden", tc_opts.config.no_hidden);
    c->callback([this] { run(); });
  }

  void run() {
    si_opts.config.seed = seed;
    tc_opts.config.seed = seed;
    if (batch_size) si_opts.config.batch_size = tc_opts.config.batch_size = *batch_size;
    auto o = open_out(out);
    if (task == "si") run_si(o);
    else run_tc(o);
  }

  void run_si(std::ostream& o) {
    if (gold.empty() || dev_gold.empty()) throw ConfigError("ablate --task si needs --gold and --dev-gold");
    const auto train = load_articles(articles);
    const auto dev = load_articles(dev_articles);
    const auto train_gold = gold_for(train, gold);
    const auto dg = gold_for(dev, dev_gold);
    o << "configuration\tprecision\trecall\tf1\n";
    auto row = [&](const std::string& name, const SpanMap& pred) {
      const auto s = score_si(pred, dg);
      o << name << '\t' << fmt(s.precision) << '\t' << fmt(s.recall) << '\t' << fmt(s.f1) << '\n';
      log::info(name + ": F1 " + fmt(s.f1));
    };
    for (const auto& entry : split_list(grid, ';')) {
      const auto set = SiFeatureSet::parse(entry);
      const auto models = train_si_models(train, train_gold, si_emb, si_res, si_opts, set, runs);
      const auto inputs = build_si_inputs(dev, si_emb.source(), set, si_res.load(set), si_opts.max_len);
      std::vector<std::vector<LabelSequence>> labels;
      for (const auto& m : models) labels.push_back(predict_si(m.params, inputs.inputs));
      const auto name = "features=" + set.to_string();
      row(name, spans_from_labels(dev, inputs.fragments, labels.front()));
      auto voted = spans_from_labels(dev, inputs.fragments, majority_vote(labels, inputs.fragments));
      if (runs > 1) row(name + " + majority voting", voted);
      row(name + (runs > 1 ? " + majority voting" : "") + " + span merging", merge_spans(voted, min_gap));
    }
  }

  void run_tc(std::ostream& o) {
    if (instances.empty() || dev_instances.empty()) {
      throw ConfigError("ablate --task tc needs --instances and --dev-instances");
    }
    tc_emb.file = si_emb.file;
    tc_emb.hash_dim = si_emb.hash_dim;
    tc_emb.hash_seed = si_emb.hash_seed;
    tc_emb.allow_missing = si_emb.allow_missing;
    tc_res.arglex = si_res.arglex;

    const auto train = load_articles(articles);
    const auto dev = load_articles(dev_articles);
    const auto train_index = index_articles(train);
    const auto dev_index = index_articles(dev);
    const auto train_insts = load_tc_instances(instances, true);
    const auto dev_insts = load_tc_instances(dev_instances, true);
    std::vector<Technique> dev_gold_labels;
    for (const auto& i : dev_insts) dev_gold_labels.push_back(*i.technique);
    const auto src = tc_emb.source();

    o << "configuration\tmicro_f1\n";
    auto row = [&](const std::string& name, const std::vector<Technique>& pred) {
      const auto f1 = score_tc(pred, dev_gold_labels).micro_f1;
      o << name << '\t' << fmt(f1) << '\n';
      log::info(name + ": micro F1 " + fmt(f1));
    };
    for (const auto& entry : split_list(grid, ';')) {
      auto config = tc_opts.config;
      config.features = TcFeatureSet::parse(entry);
      const auto res = tc_res.load(config.features);
      const auto name = "features=" + config.features.to_string();

      config.repetition_preprocessing = false;
      const auto plain = train_tc_system(train_insts, train_index, src, config, res);
      row(name, predict_tc(plain, dev_insts, dev_index, src, res, false).labels);

      config.repetition_preprocessing = true;
      const auto rep = train_tc_system(train_insts, train_index, src, config, res);
      row(name + " + repetition pre-processing", predict_tc(rep, dev_insts, dev_index, src, res, false).labels);
      row(name + " + repetition pre-processing + label post-processing",
          predict_tc(rep, dev_insts, dev_index, src, res, true).labels);
    }
  }
};

// `--config FILE` lines (key=value, # comments) become `--key=value` arguments
// placed right after the subcommand, so explicit flags that follow win.
std::vector<std::string> expand_config(std::vector<std::string> args, const std::vector<std::string>& subcommands) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
      break;
    }
  }
  if (config_path.empty()) return args;

  std::ifstream in(config_path);
  if (!in) throw IoError("cannot open " + config_path);
  std::vector<std::string> extra;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) throw FormatError(config_path, lineno, "expected key=value");
    auto key = line.substr(0, eq);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    auto value = line.substr(line.find_first_not_of(" \t", eq + 1) == std::string::npos
                                 ? line.size()
                                 : line.find_first_not_of(" \t", eq + 1));
    extra.push_back("--" + key + "=" + value);
  }
  auto pos = args.begin() + 1;
  for (auto it = args.begin() + 1; it != args.end(); ++it) {
    if (std::find(subcommands.begin(), subcommands.end(), *it) != subcommands.end()) {
      pos = it + 1;
      break;
    }
  }
  args.insert(pos, extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Propaganda span identification and technique classification"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress progress and warnings");
  app.set_config();  // disable CLI11's own config handling; --config is ours
  app.add_option("--config", "key=value file; explicit flags win");

  Preprocess preprocess;
  Featurize featurize;
  TrainSi train_si_cmd;
  PredictSi predict_si_cmd;
  Vote vote_cmd;
  Merge merge_cmd;
  ScoreSi score_si_cmd;
  TrainTc train_tc_cmd;
  PredictTc predict_tc_cmd;
  ScoreTc score_tc_cmd;
  Ablate ablate;
  preprocess.add(app);
  featurize.add(app);
  train_si_cmd.add(app);
  predict_si_cmd.add(app);
  vote_cmd.add(app);
  merge_cmd.add(app);
  score_si_cmd.add(app);
  train_tc_cmd.add(app);
  predict_tc_cmd.add(app);
  score_tc_cmd.add(app);
  ablate.add(app);
  app.parse_complete_callback([&] { log::set_quiet(quiet); });

  std::vector<std::string> subcommands;
  for (const auto* sub : app.get_subcommands({})) subcommands.push_back(sub->get_name());

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = expand_config(std::move(args), subcommands);
    args.erase(args.begin());  // program name
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  } catch (const NumericError& e) {
    std::cerr << "propdet: numerical failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    // IoError, FormatError, ConfigError, ShapeError, MissingEmbedding, span range errors.
    std::cerr << "propdet: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
