#pragma once

#include <array>
#include <iosfwd>
#include <span>

#include <Eigen/Core>

#include "propdet/corpus.hpp"
#include "propdet/technique.hpp"

namespace propdet {

struct SIScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

double harmonic_mean(double precision, double recall);

/// Character-overlap score. Each predicted span s earns sum_t |s n t| / |s| over
/// gold spans t of the same article; precision divides the total by the number
/// of predicted spans. Recall is the mirror image, normalized by gold lengths
/// and the gold span count. Throws FormatError when `pred` names an article
/// that `gold` does not contain.
SIScore score_si(const SpanMap& pred, const SpanMap& gold);

using ConfusionMatrix = Eigen::Matrix<long, kNumTechniques, kNumTechniques>;

struct TCScore {
  double micro_f1 = 0.0;
  std::array<double, kNumTechniques> precision{};
  std::array<double, kNumTechniques> recall{};
  std::array<double, kNumTechniques> f1{};
  std::array<long, kNumTechniques> gold_count{};
  ConfusionMatrix confusion = ConfusionMatrix::Zero();  // rows gold, columns predicted
};

/// Micro-averaged F1 over single-label instances (equal to accuracy), per-class
/// F1 and the confusion matrix. Throws ShapeError on a length mismatch.
TCScore score_tc(std::span<const Technique> pred, std::span<const Technique> gold);

/// Per-class table: technique, share of gold, precision, recall, F1; then "All classes".
void write_tc_report(std::ostream& out, const TCScore& score);
void write_confusion(std::ostream& out, const TCScore& score);

}  // namespace propdet
