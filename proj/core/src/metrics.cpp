#include "ctrlgad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "ctrlgad/errors.hpp"

namespace ctrlgad {
namespace {

struct MaskedEntry {
  double score;
  int label;
  std::size_t index;  // original position, for stable tie handling
};

std::vector<MaskedEntry> masked_entries(const RankedScores& r) {
  if (r.scores.size() != r.labels.size())
    throw PreconditionError("metrics: scores and labels lengths differ");
  if (!r.mask.empty() && r.mask.size() != r.scores.size())
    throw PreconditionError("metrics: mask length does not match scores");
  std::vector<MaskedEntry> entries;
  for (std::size_t i = 0; i < r.scores.size(); ++i) {
    if (!r.mask.empty() && r.mask[i] == 0) continue;
    if (!std::isfinite(r.scores[i]))
      throw PreconditionError("metrics: non-finite score at index " + std::to_string(i));
    if (r.labels[i] != 0 && r.labels[i] != 1)
      throw PreconditionError("metrics: label at index " + std::to_string(i) +
                              " is not 0 or 1");
    entries.push_back({r.scores[i], r.labels[i], i});
  }
  return entries;
}

std::size_t positive_count(const std::vector<MaskedEntry>& entries) {
  return static_cast<std::size_t>(
      std::count_if(entries.begin(), entries.end(),
                    [](const MaskedEntry& e) { return e.label == 1; }));
}

/// Descending score, original index breaking ties.
void sort_ranked(std::vector<MaskedEntry>& entries) {
  std::sort(entries.begin(), entries.end(), [](const MaskedEntry& a, const MaskedEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.index < b.index;
  });
}

}  // namespace

double auroc(const RankedScores& r) {
  auto entries = masked_entries(r);
  const std::size_t positives = positive_count(entries);
  const std::size_t negatives = entries.size() - positives;
  if (positives == 0 || negatives == 0)
    throw PreconditionError("auroc is undefined when the mask holds a single class");

  // Midrank rank-sum form of the Mann-Whitney statistic; tied groups share
  // the average rank, which credits each tied pair with 1/2.
  std::sort(entries.begin(), entries.end(),
            [](const MaskedEntry& a, const MaskedEntry& b) { return a.score < b.score; });
  double positive_rank_sum = 0.0;
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t j = i;
    while (j < entries.size() && entries[j].score == entries[i].score) ++j;
    const double midrank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t)
      if (entries[t].label == 1) positive_rank_sum += midrank;
    i = j;
  }
  const double p = static_cast<double>(positives);
  const double u = positive_rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

double auprc(const RankedScores& r) {
  auto entries = masked_entries(r);
  const std::size_t positives = positive_count(entries);
  if (positives == 0 || positives == entries.size())
    throw PreconditionError("auprc is undefined when the mask holds a single class");
  sort_ranked(entries);
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < entries.size(); ++rank) {
    if (entries[rank].label != 1) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(rank + 1);
  }
  return sum / static_cast<double>(positives);
}

double rec_at_k(const RankedScores& r, std::optional<std::size_t> k) {
  auto entries = masked_entries(r);
  const std::size_t positives = positive_count(entries);
  if (positives == 0)
    throw PreconditionError("rec_at_k is undefined without positives in the mask");
  if (k.has_value() && *k == 0)
    throw ConfigError("rec_at_k: k must be positive (omit it to use the positive count)");
  const std::size_t top = k.value_or(positives);
  if (top > entries.size())
    throw PreconditionError("rec_at_k: k = " + std::to_string(top) + " exceeds the " +
                            std::to_string(entries.size()) + " masked entries");
  sort_ranked(entries);
  std::size_t hits = 0;
  for (std::size_t rank = 0; rank < top; ++rank)
    if (entries[rank].label == 1) ++hits;
  return static_cast<double>(hits) / static_cast<double>(positives);
}

MetricSummary aggregate(const std::vector<MetricTriple>& per_seed) {
  if (per_seed.empty()) throw PreconditionError("aggregate: no metric rows");
  const double count = static_cast<double>(per_seed.size());
  MetricSummary summary;
  summary.per_seed = per_seed;
  for (const MetricTriple& t : per_seed) {
    summary.mean.auroc += t.auroc / count;
    summary.mean.auprc += t.auprc / count;
    summary.mean.rec_at_k += t.rec_at_k / count;
  }
  for (const MetricTriple& t : per_seed) {
    const double da = t.auroc - summary.mean.auroc;
    const double dp = t.auprc - summary.mean.auprc;
    const double dr = t.rec_at_k - summary.mean.rec_at_k;
    summary.sd.auroc += da * da / count;
    summary.sd.auprc += dp * dp / count;
    summary.sd.rec_at_k += dr * dr / count;
  }
  summary.sd.auroc = std::sqrt(summary.sd.auroc);
  summary.sd.auprc = std::sqrt(summary.sd.auprc);
  summary.sd.rec_at_k = std::sqrt(summary.sd.rec_at_k);
  return summary;
}

}  // namespace ctrlgad
