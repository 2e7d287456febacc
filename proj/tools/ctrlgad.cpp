#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ctrlgad/augmentation.hpp"
#include "ctrlgad/controllability.hpp"
#include "ctrlgad/errors.hpp"
#include "ctrlgad/gnn.hpp"
#include "ctrlgad/graph.hpp"
#include "ctrlgad/injection.hpp"
#include "ctrlgad/metrics.hpp"
#include "ctrlgad/pipeline.hpp"

namespace {

using nlohmann::ordered_json;

int exit_code_for(const std::string& stage) {
  if (stage == "config") return 2;
  if (stage == "dataset") return 3;
  if (stage == "inject") return 4;
  if (stage == "controllability") return 5;
  if (stage == "augment") return 6;
  if (stage == "train") return 7;
  if (stage == "evaluate") return 8;
  if (stage == "report") return 9;
  return 1;
}

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ctrlgad::StageError&) {
    throw;
  } catch (const ctrlgad::Error& e) {
    throw ctrlgad::StageError(name, e.what());
  }
}

std::string strip(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_double_field(const std::string& field, std::size_t lineno) {
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(field, &consumed);
  } catch (const std::exception&) {
    throw ctrlgad::ParseError("not a number: '" + field + "'", lineno);
  }
  if (consumed != field.size())
    throw ctrlgad::ParseError("trailing characters after number: '" + field + "'", lineno);
  return value;
}

/// Accepts either a bare score per line or "node,score" rows; a single
/// leading header line is skipped.
std::vector<double> read_scores_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ctrlgad::IoError("cannot open scores file " + file.string());
  std::vector<double> scores;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string row = strip(line);
    if (row.empty()) continue;
    const auto comma = row.rfind(',');
    const std::string field = strip(comma == std::string::npos ? row : row.substr(comma + 1));
    if (lineno == 1 && !field.empty() &&
        field.find_first_not_of("+-.0123456789eE") != std::string::npos)
      continue;  // header
    scores.push_back(parse_double_field(field, lineno));
  }
  if (scores.empty()) throw ctrlgad::ParseError("no scores in " + file.string(), lineno);
  return scores;
}

void write_text(const std::filesystem::path& file, const std::string& text) {
  if (!file.parent_path().empty()) std::filesystem::create_directories(file.parent_path());
  std::ofstream out(file);
  if (!out) throw ctrlgad::IoError("cannot open " + file.string() + " for writing");
  out << text;
  if (!out) throw ctrlgad::IoError("failed writing " + file.string());
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-")
    std::cout << text;
  else
    write_text(out_path, text);
}

std::string scores_to_csv(const std::vector<double>& scores) {
  std::ostringstream out;
  out << "node,score\n" << std::setprecision(17);
  for (std::size_t i = 0; i < scores.size(); ++i) out << i << ',' << scores[i] << '\n';
  return out.str();
}

std::vector<int> read_labels_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ctrlgad::IoError("cannot open label file " + file.string());
  std::vector<int> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string row = strip(line);
    if (row.empty()) continue;
    if (row == "0" || row == "1")
      labels.push_back(row == "1");
    else
      throw ctrlgad::ParseError("label must be 0 or 1, got '" + row + "'", lineno);
  }
  return labels;
}

/// split.csv rows are "node,train" with train in {0, 1}.
std::vector<std::uint8_t> read_split_csv(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ctrlgad::IoError("cannot open split file " + file.string());
  std::vector<std::uint8_t> train_mask;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string row = strip(line);
    if (row.empty()) continue;
    if (lineno == 1 && row.find("node") != std::string::npos) continue;
    const auto comma = row.rfind(',');
    const std::string field = strip(comma == std::string::npos ? row : row.substr(comma + 1));
    if (field == "0" || field == "1")
      train_mask.push_back(field == "1");
    else
      throw ctrlgad::ParseError("split flag must be 0 or 1, got '" + field + "'", lineno);
  }
  return train_mask;
}

struct GraphInputs {
  std::string container;
  std::string edges, features, labels;

  void attach(CLI::App* cmd) {
    cmd->add_option("--graph", container, "Graph container (JSON)");
    cmd->add_option("--edges", edges, "Edge list CSV (source,target per line)");
    cmd->add_option("--features", features, "Feature rows CSV, one per node");
    cmd->add_option("--labels", labels, "Node labels, one 0/1 per line");
  }

  ctrlgad::Graph load() const {
    return stage("dataset", [&] {
      if (!container.empty()) {
        if (!edges.empty() || !features.empty() || !labels.empty())
          throw ctrlgad::ConfigError("--graph excludes --edges/--features/--labels");
        return ctrlgad::load_graph_json(container);
      }
      if (edges.empty() || features.empty() || labels.empty())
        throw ctrlgad::ConfigError(
            "provide --graph or all of --edges, --features, --labels");
      ctrlgad::LoadDiagnostics diag;
      ctrlgad::Graph g = ctrlgad::load_graph(edges, features, labels, &diag);
      if (diag.duplicate_edges > 0)
        std::cerr << "warning: dropped " << diag.duplicate_edges << " duplicate edges\n";
      if (diag.remapped) std::cerr << "warning: node ids were remapped to 0..N-1\n";
      return g;
    });
  }
};

int run_pipeline(const std::string& config_path, const std::string& out_override,
                 std::size_t workers_override, bool workers_set,
                 const std::string& format_name) {
  ctrlgad::ExperimentConfig cfg =
      stage("config", [&] { return ctrlgad::load_config_file(config_path); });
  if (!out_override.empty()) cfg.output_dir = out_override;
  if (workers_set) cfg.workers = workers_override;

  ctrlgad::ReportFormat format = ctrlgad::ReportFormat::markdown;
  if (format_name == "json") format = ctrlgad::ReportFormat::json;
  if (format_name == "csv") format = ctrlgad::ReportFormat::csv;

  if (cfg.bins.size() == 1) {
    const ctrlgad::EvaluationReport report = ctrlgad::run_experiment(cfg);
    std::cout << ctrlgad::render_report(report, format);
    return 0;
  }

  const ctrlgad::SweepReport sweep = ctrlgad::run_sweep(cfg);
  ordered_json summary;
  summary["best_bins"] = sweep.best_bins;
  auto& runs = summary["runs"] = ordered_json::array();
  for (std::size_t i = 0; i < sweep.by_bins.size(); ++i) {
    const ctrlgad::EvaluationReport& report = sweep.by_bins[i];
    const ctrlgad::ArmReport& lead = report.arms.front();
    runs.push_back({{"bins", cfg.bins[i]},
                    {"arm", lead.name},
                    {"mean_auprc", lead.metrics.mean.auprc},
                    {"mean_auroc", lead.metrics.mean.auroc}});
  }
  stage("report", [&] {
    write_text(cfg.output_dir / "sweep.json", summary.dump(2) + "\n");
  });
  std::cout << summary.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Controllability-augmented graph anomaly detection toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ctrlgad 0.1.0");

  // pipeline
  std::string pipe_config, pipe_out, pipe_format = "markdown";
  std::size_t pipe_workers = 0;
  auto* pipe = app.add_subcommand("pipeline", "Run the full experiment protocol");
  pipe->add_option("--config", pipe_config, "Experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  pipe->add_option("--out", pipe_out, "Output directory (overrides config)");
  auto* pipe_workers_opt =
      pipe->add_option("--workers", pipe_workers, "Parallel seed jobs (overrides config)");
  pipe->add_option("--format", pipe_format, "Report format printed to stdout")
      ->check(CLI::IsMember({"json", "csv", "markdown"}));

  // ac-score
  GraphInputs score_in;
  std::string score_out, score_format = "csv", score_backend = "auto";
  double score_step = 0.2, score_horizon = 0.0;
  bool score_trapezoid = false, score_no_symmetrize = false, score_gramian = false;
  auto* ac = app.add_subcommand("ac-score", "Compute average-controllability scores");
  score_in.attach(ac);
  ac->add_option("--step", score_step, "Quadrature step size");
  ac->add_option("--horizon", score_horizon, "Integration horizon (0 = adaptive)");
  ac->add_flag("--trapezoid", score_trapezoid, "Apply the trapezoid end correction");
  ac->add_option("--backend", score_backend, "Gramian backend")
      ->check(CLI::IsMember({"auto", "recurrence", "spectral"}));
  ac->add_flag("--no-symmetrize", score_no_symmetrize, "Score the graph as-is");
  ac->add_flag("--gramian", score_gramian, "Include the Gramian in JSON output");
  ac->add_option("--out", score_out, "Output file ('-' = stdout)");
  ac->add_option("--format", score_format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));

  // augment
  GraphInputs aug_in;
  std::string aug_scores, aug_mode = "weight", aug_out;
  std::size_t aug_bins = 10;
  bool aug_no_symmetrize = false;
  auto* aug = app.add_subcommand("augment", "Inject scores into the topology");
  aug_in.attach(aug);
  aug->add_option("--scores", aug_scores, "Controllability scores CSV")
      ->required()
      ->check(CLI::ExistingFile);
  aug->add_option("--mode", aug_mode, "Augmentation mode")
      ->check(CLI::IsMember({"weight", "attr", "both"}));
  aug->add_option("--bins", aug_bins, "Histogram bin count for attr modes");
  aug->add_flag("--no-symmetrize", aug_no_symmetrize, "Augment the graph as-is");
  aug->add_option("--out", aug_out, "Augmented container (JSON)")->required();

  // inject
  GraphInputs inj_in;
  std::string inj_kind, inj_out, inj_manifest;
  ctrlgad::InjectionConfig inj_cfg;
  auto* inj = app.add_subcommand("inject", "Plant labeled anomalies");
  inj_in.attach(inj);
  inj->add_option("--kind", inj_kind, "structural or contextual")
      ->required()
      ->check(CLI::IsMember({"structural", "contextual"}));
  inj->add_option("--m", inj_cfg.m, "Number of groups (structural) or always 1-sized sets");
  inj->add_option("--n", inj_cfg.n, "Nodes per group");
  inj->add_option("--p", inj_cfg.p, "Within-group edge drop probability");
  inj->add_option("--q", inj_cfg.q, "Candidate pool size (contextual)");
  inj->add_option("--seed", inj_cfg.seed, "RNG seed");
  inj->add_option("--out", inj_out, "Output container (JSON)")->required();
  inj->add_option("--manifest", inj_manifest, "Manifest path (JSON)");

  // train
  std::string train_graph, train_conv = "weighted_gcn", train_class_weight = "auto";
  std::string train_out = "out";
  std::size_t train_hidden = 32, train_layers = 2, train_epochs = 200;
  double train_dropout = 0.0, train_lr = 0.01, train_frac = 0.7;
  bool train_no_stratify = false;
  std::uint64_t train_seed = 0;
  auto* tr = app.add_subcommand("train", "Train a detector on one seed");
  tr->add_option("--graph", train_graph, "Graph or augmented container (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  tr->add_option("--conv", train_conv, "Convolution type")
      ->check(CLI::IsMember({"weighted_gcn", "sage_mean", "gin_sum", "edge_attr_conv"}));
  tr->add_option("--hidden", train_hidden, "Hidden width");
  tr->add_option("--layers", train_layers, "Convolution layers");
  tr->add_option("--dropout", train_dropout, "Dropout rate");
  tr->add_option("--epochs", train_epochs, "Training epochs");
  tr->add_option("--lr", train_lr, "Adam learning rate");
  tr->add_option("--class-weight", train_class_weight, "'auto' or a positive number");
  tr->add_option("--train-frac", train_frac, "Training fraction of nodes");
  tr->add_flag("--no-stratify", train_no_stratify, "Split without stratifying by label");
  tr->add_option("--seed", train_seed, "Seed for split, init, and dropout");
  tr->add_option("--out", train_out, "Output directory");

  // evaluate
  std::string eval_scores, eval_labels, eval_graph, eval_mask, eval_on = "test";
  std::string eval_out, eval_format = "json";
  std::size_t eval_k = 0;
  bool eval_k_set = false;
  auto* ev = app.add_subcommand("evaluate", "Rank scores against ground truth");
  ev->add_option("--scores", eval_scores, "Scores CSV")->required()->check(CLI::ExistingFile);
  ev->add_option("--labels", eval_labels, "Label file, one 0/1 per line");
  ev->add_option("--graph", eval_graph, "Graph container holding the labels");
  ev->add_option("--mask", eval_mask, "split.csv restricting evaluation");
  ev->add_option("--on", eval_on, "Which side of the split to score")
      ->check(CLI::IsMember({"test", "train", "all"}));
  ev->add_option("--k", eval_k, "Top-k cutoff (default: positive count)")
      ->each([&](const std::string&) { eval_k_set = true; });
  ev->add_option("--out", eval_out, "Output file ('-' = stdout)");
  ev->add_option("--format", eval_format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (pipe->parsed())
      return run_pipeline(pipe_config, pipe_out, pipe_workers,
                          pipe_workers_opt->count() > 0, pipe_format);

    if (ac->parsed()) {
      const ctrlgad::Graph g = score_in.load();
      ctrlgad::ControllabilityConfig cfg;
      cfg.step_size = score_step;
      cfg.horizon = score_horizon;
      cfg.trapezoid = score_trapezoid;
      cfg.symmetrize_first = !score_no_symmetrize;
      cfg.keep_gramian = score_gramian;
      if (score_backend == "recurrence")
        cfg.backend = ctrlgad::ControllabilityConfig::Backend::recurrence;
      else if (score_backend == "spectral")
        cfg.backend = ctrlgad::ControllabilityConfig::Backend::spectral;
      const ctrlgad::ControllabilityResult result =
          stage("controllability", [&] { return ctrlgad::average_controllability(g, cfg); });
      for (const std::string& w : result.warnings) std::cerr << "warning: " << w << '\n';
      if (score_format == "json") {
        ordered_json j;
        j["scores"] = result.scores;
        j["spectral_radius"] = result.spectral_radius;
        j["spectral_abscissa"] = result.spectral_abscissa;
        j["steps_used"] = result.steps_used;
        j["horizon_used"] = result.horizon_used;
        j["warnings"] = result.warnings;
        if (score_gramian) {
          auto& rows = j["gramian"] = ordered_json::array();
          for (Eigen::Index i = 0; i < result.gramian.rows(); ++i) {
            ordered_json row = ordered_json::array();
            for (Eigen::Index c = 0; c < result.gramian.cols(); ++c)
              row.push_back(result.gramian(i, c));
            rows.push_back(std::move(row));
          }
        }
        emit(j.dump(2) + "\n", score_out);
      } else {
        emit(scores_to_csv(result.scores), score_out);
      }
      return 0;
    }

    if (aug->parsed()) {
      ctrlgad::Graph g = aug_in.load();
      if (!aug_no_symmetrize) g = ctrlgad::symmetrize(g);
      const std::vector<double> scores = stage("augment", [&] {
        return read_scores_csv(aug_scores);
      });
      ctrlgad::AugmentationMode mode = ctrlgad::AugmentationMode::weight;
      if (aug_mode == "attr") mode = ctrlgad::AugmentationMode::attr;
      if (aug_mode == "both") mode = ctrlgad::AugmentationMode::both;
      const ctrlgad::AugmentedGraph augmented = stage("augment", [&] {
        return ctrlgad::augment_graph(g, scores, mode, aug_bins);
      });
      stage("report", [&] { ctrlgad::save_augmented_json(augmented, aug_out); });
      std::cout << "augmented " << augmented.base.num_edges() << " edges (mode " << aug_mode
                << ")\n";
      return 0;
    }

    if (inj->parsed()) {
      const ctrlgad::Graph g = inj_in.load();
      const ctrlgad::InjectionOutcome outcome = stage("inject", [&] {
        return inj_kind == "structural" ? ctrlgad::inject_structural(g, inj_cfg)
                                        : ctrlgad::inject_contextual(g, inj_cfg);
      });
      stage("report", [&] {
        ctrlgad::save_graph_json(outcome.graph, inj_out);
        if (!inj_manifest.empty()) {
          ordered_json manifest;
          manifest["kind"] = inj_kind;
          manifest["seed"] = inj_cfg.seed;
          manifest["selected_nodes"] = outcome.selected_nodes;
          manifest["new_edges"] = outcome.new_edges;
          write_text(inj_manifest, manifest.dump(2) + "\n");
        }
      });
      std::cout << "planted " << outcome.selected_nodes.size() << " " << inj_kind
                << " anomalies (" << outcome.new_edges << " new connections)\n";
      return 0;
    }

    if (tr->parsed()) {
      ctrlgad::AugmentedGraph ag = stage("dataset", [&] {
        try {
          return ctrlgad::load_augmented_json(train_graph);
        } catch (const ctrlgad::ValidationError&) {
          ctrlgad::AugmentedGraph plain;
          plain.base = ctrlgad::load_graph_json(train_graph);
          return plain;
        }
      });
      ctrlgad::ModelConfig mcfg;
      mcfg.conv_type = ctrlgad::conv_type_from_string(train_conv);
      mcfg.hidden_dim = train_hidden;
      mcfg.layers = train_layers;
      mcfg.dropout = train_dropout;
      mcfg.attr_dim = ag.attr_dim;
      ctrlgad::TrainConfig tcfg;
      tcfg.epochs = train_epochs;
      tcfg.learning_rate = train_lr;
      tcfg.train_fraction = train_frac;
      tcfg.stratified = !train_no_stratify;
      tcfg.seeds = {train_seed};
      if (train_class_weight != "auto")
        tcfg.class_weight = parse_double_field(train_class_weight, 0);

      const ctrlgad::TrainResult result =
          stage("train", [&] { return ctrlgad::train(ag, mcfg, tcfg, train_seed); });
      const Eigen::VectorXd scores = ctrlgad::anomaly_scores(result.model, ag);

      stage("report", [&] {
        const std::filesystem::path dir = train_out;
        std::filesystem::create_directories(dir);
        ctrlgad::save_model_json(result.model, dir / "checkpoint.json");
        std::ostringstream trace;
        trace << "epoch,loss\n" << std::setprecision(17);
        for (std::size_t e = 0; e < result.loss_trace.size(); ++e)
          trace << e << ',' << result.loss_trace[e] << '\n';
        write_text(dir / "loss_trace.csv", trace.str());
        write_text(dir / "scores.csv",
                   scores_to_csv({scores.data(), scores.data() + scores.size()}));
        std::ostringstream split;
        split << "node,train\n";
        for (std::size_t i = 0; i < result.split.train_mask.size(); ++i)
          split << i << ',' << int(result.split.train_mask[i]) << '\n';
        write_text(dir / "split.csv", split.str());
      });
      std::cout << "final loss " << result.loss_trace.back() << ", class weight "
                << result.class_weight_used << ", outputs in " << train_out << "\n";
      return 0;
    }

    if (ev->parsed()) {
      ctrlgad::RankedScores ranked;
      ranked.scores = stage("evaluate", [&] { return read_scores_csv(eval_scores); });
      ranked.labels = stage("dataset", [&]() -> std::vector<int> {
        if (!eval_graph.empty()) return ctrlgad::load_graph_json(eval_graph).labels;
        if (!eval_labels.empty()) return read_labels_file(eval_labels);
        throw ctrlgad::ConfigError("provide --labels or --graph for ground truth");
      });
      if (!eval_mask.empty() && eval_on != "all") {
        const std::vector<std::uint8_t> train_mask =
            stage("evaluate", [&] { return read_split_csv(eval_mask); });
        ranked.mask.resize(train_mask.size());
        for (std::size_t i = 0; i < train_mask.size(); ++i)
          ranked.mask[i] = eval_on == "train" ? train_mask[i] : !train_mask[i];
      }
      const auto metrics = stage("evaluate", [&] {
        ctrlgad::MetricTriple t;
        t.auroc = ctrlgad::auroc(ranked);
        t.auprc = ctrlgad::auprc(ranked);
        t.rec_at_k = eval_k_set ? ctrlgad::rec_at_k(ranked, eval_k)
                                : ctrlgad::rec_at_k(ranked);
        return t;
      });
      if (eval_format == "json") {
        ordered_json j{{"auroc", metrics.auroc},
                       {"auprc", metrics.auprc},
                       {"rec_at_k", metrics.rec_at_k}};
        emit(j.dump(2) + "\n", eval_out);
      } else {
        std::ostringstream out;
        out << "metric,value\n" << std::setprecision(17);
        out << "auroc," << metrics.auroc << "\nauprc," << metrics.auprc << "\nrec_at_k,"
            << metrics.rec_at_k << '\n';
        emit(out.str(), eval_out);
      }
      return 0;
    }
  } catch (const ctrlgad::StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.stage());
  } catch (const ctrlgad::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
