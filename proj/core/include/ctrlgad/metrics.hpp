#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace ctrlgad {

/// Anomaly scores with ground truth. The mask restricts evaluation to the
/// test split; empty means evaluate everything. Anomalies (label 1) are the
/// positive class.
struct RankedScores {
  std::vector<double> scores;
  std::vector<int> labels;
  std::vector<std::uint8_t> mask;
};

/// Mann-Whitney AUROC: fraction of (positive, negative) pairs ranked
/// correctly, ties worth half. Requires both classes inside the mask.
double auroc(const RankedScores& r);

/// Average precision: mean of precision at each positive's rank in
/// descending-score order, ties broken by original index.
double auprc(const RankedScores& r);

/// Fraction of positives among the top-k scores; k defaults to the positive
/// count inside the mask. Ties break by original index; explicit k = 0 is an
/// error.
double rec_at_k(const RankedScores& r, std::optional<std::size_t> k = std::nullopt);

struct MetricTriple {
  double auroc = 0.0;
  double auprc = 0.0;
  double rec_at_k = 0.0;
};

struct MetricSummary {
  MetricTriple mean;
  MetricTriple sd;  // population standard deviation across seeds
  std::vector<MetricTriple> per_seed;
};

/// Mean and standard deviation across per-seed metric triples.
MetricSummary aggregate(const std::vector<MetricTriple>& per_seed);

}  // namespace ctrlgad
