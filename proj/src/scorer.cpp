#include "propdet/scorer.hpp"

#include <ostream>

#include "propdet/error.hpp"

namespace propdet {

double harmonic_mean(double precision, double recall) {
  return precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
}

SIScore score_si(const SpanMap& pred, const SpanMap& gold) {
  double precision_sum = 0.0, recall_sum = 0.0;
  std::size_t pred_count = 0, gold_count = 0;
  for (const auto& [id, spans] : gold) gold_count += spans.size();
  for (const auto& [id, spans] : pred) {
    const auto it = gold.find(id);
    if (it == gold.end()) throw FormatError("prediction for article " + id + " which is not in the gold corpus");
    pred_count += spans.size();
    for (const auto& s : spans) {
      for (const auto& t : it->second) {
        const auto common = static_cast<double>(s.overlap(t));
        if (common == 0.0) continue;
        precision_sum += common / static_cast<double>(s.length());
        recall_sum += common / static_cast<double>(t.length());
      }
    }
  }
  SIScore score;
  score.precision = pred_count > 0 ? precision_sum / static_cast<double>(pred_count) : 0.0;
  score.recall = gold_count > 0 ? recall_sum / static_cast<double>(gold_count) : 0.0;
  score.f1 = harmonic_mean(score.precision, score.recall);
  return score;
}

TCScore score_tc(std::span<const Technique> pred, std::span<const Technique> gold) {
  if (pred.size() != gold.size()) {
    throw ShapeError("prediction count " + std::to_string(pred.size()) + " differs from gold count " +
                     std::to_string(gold.size()));
  }
  TCScore score;
  long correct = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    score.confusion(index_of(gold[i]), index_of(pred[i])) += 1;
    if (pred[i] == gold[i]) ++correct;
  }
  for (std::size_t c = 0; c < kNumTechniques; ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    const long tp = score.confusion(ci, ci);
    const long gold_c = score.confusion.row(ci).sum();
    const long pred_c = score.confusion.col(ci).sum();
    score.gold_count[c] = gold_c;
    score.precision[c] = pred_c > 0 ? static_cast<double>(tp) / static_cast<double>(pred_c) : 0.0;
    score.recall[c] = gold_c > 0 ? static_cast<double>(tp) / static_cast<double>(gold_c) : 0.0;
    score.f1[c] = harmonic_mean(score.precision[c], score.recall[c]);
  }
  // Every instance carries exactly one gold and one predicted label, so
  // micro precision and recall both reduce to accuracy.
  score.micro_f1 = pred.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(pred.size());
  return score;
}

void write_tc_report(std::ostream& out, const TCScore& score) {
  long total = 0;
  for (long c : score.gold_count) total += c;
  out << "technique\tproportion\tprecision\trecall\tf1\n";
  for (auto t : all_techniques()) {
    const auto c = static_cast<std::size_t>(index_of(t));
    const double share = total > 0 ? static_cast<double>(score.gold_count[c]) / static_cast<double>(total) : 0.0;
    out << display_name(t) << '\t' << share << '\t' << score.precision[c] << '\t' << score.recall[c] << '\t'
        << score.f1[c] << '\n';
  }
  out << "All classes\t1\t" << score.micro_f1 << '\t' << score.micro_f1 << '\t' << score.micro_f1 << '\n';
}

void write_confusion(std::ostream& out, const TCScore& score) {
  out << "gold\\predicted";
  for (auto t : all_techniques()) out << '\t' << task_name(t);
  out << '\n';
  for (auto t : all_techniques()) {
    out << task_name(t);
    for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(kNumTechniques); ++j) {
      out << '\t' << score.confusion(index_of(t), j);
    }
    out << '\n';
  }
}

}  // namespace propdet
