#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ctrlgad/augmentation.hpp"
#include "ctrlgad/controllability.hpp"
#include "ctrlgad/errors.hpp"
#include "ctrlgad/gnn.hpp"
#include "ctrlgad/injection.hpp"
#include "ctrlgad/metrics.hpp"

namespace ctrlgad {

/// Error raised by the orchestrator, tagged with the stage that failed so
/// the CLI can map it to an exit code.
class StageError : public Error {
public:
  StageError(std::string stage, const std::string& msg)
      : Error("[" + stage + "] " + msg), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

struct SyntheticSpec {
  std::size_t num_nodes = 200;
  std::size_t feature_dim = 16;
  std::size_t communities = 4;
  double intra_p = 0.05;
  double inter_p = 0.002;
  double feature_noise = 0.3;
  std::uint64_t seed = 0;
};

struct DatasetConfig {
  enum class Kind { synthetic, files, container };
  Kind kind = Kind::synthetic;
  SyntheticSpec synthetic;
  std::filesystem::path edge_file, feature_file, label_file;  // kind == files
  std::filesystem::path container;                            // kind == container
};

struct ExperimentConfig {
  DatasetConfig dataset;
  std::optional<InjectionConfig> structural;
  std::optional<InjectionConfig> contextual;
  ControllabilityConfig controllability;
  AugmentationMode augmentation = AugmentationMode::weight;
  std::vector<std::size_t> bins = {10};  // several entries = bin-size sweep
  ModelConfig model;
  TrainConfig training;
  std::filesystem::path output_dir = "out";
  std::size_t workers = 0;  // parallel seed jobs; 0 = hardware default
};

struct ArmReport {
  std::string name;  // "baseline" or "augmented"
  MetricSummary metrics;
};

struct EvaluationReport {
  std::string config_snapshot;  // canonical JSON, round-trips to the config
  std::string config_hash;      // fnv1a-64 of the snapshot, hex
  std::size_t num_nodes = 0;
  std::size_t num_edges = 0;
  std::size_t anomaly_count = 0;
  double anomaly_prevalence = 0.0;
  std::size_t bins_used = 0;  // 0 when attributes were not produced
  std::vector<std::uint64_t> seeds;
  std::vector<ArmReport> arms;
  std::vector<std::pair<std::string, double>> timings;  // stage, seconds
  std::vector<std::string> notes;
};

/// Full protocol for one bin count: build/load the dataset, inject, score,
/// augment, then per seed train the baseline and augmented arms on identical
/// splits and evaluate on the test mask. Per-seed rows are flushed to
/// output_dir as they finish, so partial results survive an abort.
EvaluationReport run_experiment(const ExperimentConfig& cfg);

struct SweepReport {
  std::vector<EvaluationReport> by_bins;  // aligned with cfg.bins
  std::size_t best_bins = 0;              // arg-max of augmented mean AUPRC
};

/// run_experiment once per bin count; single-entry bins degenerates to one run.
SweepReport run_sweep(const ExperimentConfig& cfg);

enum class ReportFormat { json, csv, markdown };

/// Deterministic rendering of a report; markdown pairs the augmented and
/// baseline columns per metric.
std::string render_report(const EvaluationReport& report, ReportFormat format);

/// Writes report.json, report.csv, and report.md under out_dir.
void emit_report(const EvaluationReport& report, const std::filesystem::path& out_dir);

/// JSON config dialect. Parsing rejects unknown keys; serializing then
/// re-parsing yields an equivalent config.
ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig load_config_file(const std::filesystem::path& file);
std::string config_to_json(const ExperimentConfig& cfg);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace ctrlgad
