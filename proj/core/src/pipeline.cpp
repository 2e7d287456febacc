#include "ctrlgad/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "json_detail.hpp"

namespace ctrlgad {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_full(double v) {
  std::ostringstream out;
  out << std::setprecision(17) << v;
  return out.str();
}

std::string format_short(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4) << v;
  return out.str();
}

void expect_keys(const json& j, std::initializer_list<const char*> allowed,
                 const std::string& section) {
  if (!j.is_object()) throw ConfigError("config section '" + section + "' must be an object");
  for (const auto& item : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(),
                     [&](const char* k) { return item.key() == k; }))
      throw ConfigError("unknown key '" + item.key() + "' in config section '" + section +
                        "'");
  }
}

template <typename T>
T get_or(const json& j, const char* key, T fallback, const std::string& section) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("config key '" + section + "." + key + "' has the wrong type");
  }
}

AugmentationMode mode_from_string(const std::string& name) {
  if (name == "none") return AugmentationMode::none;
  if (name == "weight") return AugmentationMode::weight;
  if (name == "attr") return AugmentationMode::attr;
  if (name == "both") return AugmentationMode::both;
  throw ConfigError("unknown augmentation mode '" + name +
                    "' (expected none, weight, attr, or both)");
}

std::string to_string(AugmentationMode mode) {
  switch (mode) {
    case AugmentationMode::none: return "none";
    case AugmentationMode::weight: return "weight";
    case AugmentationMode::attr: return "attr";
    case AugmentationMode::both: return "both";
  }
  throw ConfigError("unknown augmentation mode value");
}

ControllabilityConfig::Backend backend_from_string(const std::string& name) {
  if (name == "auto") return ControllabilityConfig::Backend::auto_select;
  if (name == "recurrence") return ControllabilityConfig::Backend::recurrence;
  if (name == "spectral") return ControllabilityConfig::Backend::spectral;
  throw ConfigError("unknown controllability backend '" + name +
                    "' (expected auto, recurrence, or spectral)");
}

std::string to_string(ControllabilityConfig::Backend backend) {
  switch (backend) {
    case ControllabilityConfig::Backend::auto_select: return "auto";
    case ControllabilityConfig::Backend::recurrence: return "recurrence";
    case ControllabilityConfig::Backend::spectral: return "spectral";
  }
  throw ConfigError("unknown controllability backend value");
}

InjectionConfig parse_injection(const json& j, bool structural, const std::string& section) {
  if (structural)
    expect_keys(j, {"m", "n", "p", "seed"}, section);
  else
    expect_keys(j, {"m", "n", "q", "seed"}, section);
  InjectionConfig cfg;
  cfg.m = get_or<std::size_t>(j, "m", cfg.m, section);
  cfg.n = get_or<std::size_t>(j, "n", cfg.n, section);
  if (structural)
    cfg.p = get_or<double>(j, "p", cfg.p, section);
  else
    cfg.q = get_or<std::size_t>(j, "q", cfg.q, section);
  cfg.seed = get_or<std::uint64_t>(j, "seed", structural ? 1 : 2, section);
  return cfg;
}

}  // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

ExperimentConfig parse_config_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid config JSON: ") + e.what());
  }
  expect_keys(j,
              {"dataset", "injection", "controllability", "augmentation", "model",
               "training", "output_dir", "workers"},
              "top level");

  ExperimentConfig cfg;
  if (j.contains("dataset")) {
    const json& d = j.at("dataset");
    const auto kind = get_or<std::string>(d, "type", "synthetic", "dataset");
    if (kind == "synthetic") {
      expect_keys(d,
                  {"type", "num_nodes", "feature_dim", "communities", "intra_p", "inter_p",
                   "feature_noise", "seed"},
                  "dataset");
      cfg.dataset.kind = DatasetConfig::Kind::synthetic;
      SyntheticSpec& s = cfg.dataset.synthetic;
      s.num_nodes = get_or<std::size_t>(d, "num_nodes", s.num_nodes, "dataset");
      s.feature_dim = get_or<std::size_t>(d, "feature_dim", s.feature_dim, "dataset");
      s.communities = get_or<std::size_t>(d, "communities", s.communities, "dataset");
      s.intra_p = get_or<double>(d, "intra_p", s.intra_p, "dataset");
      s.inter_p = get_or<double>(d, "inter_p", s.inter_p, "dataset");
      s.feature_noise = get_or<double>(d, "feature_noise", s.feature_noise, "dataset");
      s.seed = get_or<std::uint64_t>(d, "seed", s.seed, "dataset");
    } else if (kind == "files") {
      expect_keys(d, {"type", "edges", "features", "labels"}, "dataset");
      cfg.dataset.kind = DatasetConfig::Kind::files;
      cfg.dataset.edge_file = get_or<std::string>(d, "edges", "", "dataset");
      cfg.dataset.feature_file = get_or<std::string>(d, "features", "", "dataset");
      cfg.dataset.label_file = get_or<std::string>(d, "labels", "", "dataset");
      if (cfg.dataset.edge_file.empty() || cfg.dataset.feature_file.empty() ||
          cfg.dataset.label_file.empty())
        throw ConfigError("dataset type 'files' needs edges, features, and labels paths");
    } else if (kind == "container") {
      expect_keys(d, {"type", "path"}, "dataset");
      cfg.dataset.kind = DatasetConfig::Kind::container;
      cfg.dataset.container = get_or<std::string>(d, "path", "", "dataset");
      if (cfg.dataset.container.empty())
        throw ConfigError("dataset type 'container' needs a path");
    } else {
      throw ConfigError("unknown dataset type '" + kind +
                        "' (expected synthetic, files, or container)");
    }
  }

  if (j.contains("injection")) {
    const json& inj = j.at("injection");
    expect_keys(inj, {"structural", "contextual"}, "injection");
    if (inj.contains("structural"))
      cfg.structural = parse_injection(inj.at("structural"), true, "injection.structural");
    if (inj.contains("contextual"))
      cfg.contextual = parse_injection(inj.at("contextual"), false, "injection.contextual");
  }

  if (j.contains("controllability")) {
    const json& c = j.at("controllability");
    expect_keys(c, {"step_size", "horizon", "trapezoid", "symmetrize_first", "backend"},
                "controllability");
    cfg.controllability.step_size =
        get_or<double>(c, "step_size", cfg.controllability.step_size, "controllability");
    cfg.controllability.horizon =
        get_or<double>(c, "horizon", cfg.controllability.horizon, "controllability");
    cfg.controllability.trapezoid =
        get_or<bool>(c, "trapezoid", cfg.controllability.trapezoid, "controllability");
    cfg.controllability.symmetrize_first = get_or<bool>(
        c, "symmetrize_first", cfg.controllability.symmetrize_first, "controllability");
    cfg.controllability.backend = backend_from_string(
        get_or<std::string>(c, "backend", "auto", "controllability"));
  }

  if (j.contains("augmentation")) {
    const json& a = j.at("augmentation");
    expect_keys(a, {"mode", "bins"}, "augmentation");
    cfg.augmentation =
        mode_from_string(get_or<std::string>(a, "mode", "weight", "augmentation"));
    if (a.contains("bins")) {
      if (a.at("bins").is_array())
        cfg.bins = a.at("bins").get<std::vector<std::size_t>>();
      else
        cfg.bins = {get_or<std::size_t>(a, "bins", 10, "augmentation")};
      if (cfg.bins.empty()) throw ConfigError("augmentation.bins must not be empty");
      for (std::size_t k : cfg.bins)
        if (k == 0) throw ConfigError("augmentation.bins entries must be positive");
    }
  }

  if (j.contains("model")) {
    const json& m = j.at("model");
    expect_keys(m, {"conv_type", "hidden_dim", "layers", "dropout"}, "model");
    cfg.model.conv_type =
        conv_type_from_string(get_or<std::string>(m, "conv_type", "weighted_gcn", "model"));
    cfg.model.hidden_dim = get_or<std::size_t>(m, "hidden_dim", cfg.model.hidden_dim, "model");
    cfg.model.layers = get_or<std::size_t>(m, "layers", cfg.model.layers, "model");
    cfg.model.dropout = get_or<double>(m, "dropout", cfg.model.dropout, "model");
  }

  if (j.contains("training")) {
    const json& t = j.at("training");
    expect_keys(t,
                {"epochs", "learning_rate", "class_weight", "train_fraction", "stratified",
                 "seeds"},
                "training");
    cfg.training.epochs = get_or<std::size_t>(t, "epochs", cfg.training.epochs, "training");
    cfg.training.learning_rate =
        get_or<double>(t, "learning_rate", cfg.training.learning_rate, "training");
    if (t.contains("class_weight")) {
      if (t.at("class_weight").is_string()) {
        if (t.at("class_weight").get<std::string>() != "auto")
          throw ConfigError("training.class_weight must be 'auto' or a positive number");
        cfg.training.class_weight = 0.0;
      } else {
        cfg.training.class_weight = get_or<double>(t, "class_weight", 0.0, "training");
        if (!(cfg.training.class_weight > 0.0))
          throw ConfigError("training.class_weight must be 'auto' or a positive number");
      }
    }
    cfg.training.train_fraction =
        get_or<double>(t, "train_fraction", cfg.training.train_fraction, "training");
    cfg.training.stratified =
        get_or<bool>(t, "stratified", cfg.training.stratified, "training");
    if (t.contains("seeds")) {
      cfg.training.seeds = t.at("seeds").get<std::vector<std::uint64_t>>();
      if (cfg.training.seeds.empty()) throw ConfigError("training.seeds must not be empty");
    }
  }

  cfg.output_dir = get_or<std::string>(j, "output_dir", cfg.output_dir.string(), "top level");
  cfg.workers = get_or<std::size_t>(j, "workers", cfg.workers, "top level");
  return cfg;
}

ExperimentConfig load_config_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open config file " + file.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_json(buffer.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  ordered_json j;
  ordered_json dataset;
  switch (cfg.dataset.kind) {
    case DatasetConfig::Kind::synthetic: {
      const SyntheticSpec& s = cfg.dataset.synthetic;
      dataset = {{"type", "synthetic"},      {"num_nodes", s.num_nodes},
                 {"feature_dim", s.feature_dim}, {"communities", s.communities},
                 {"intra_p", s.intra_p},     {"inter_p", s.inter_p},
                 {"feature_noise", s.feature_noise}, {"seed", s.seed}};
      break;
    }
    case DatasetConfig::Kind::files:
      dataset = {{"type", "files"},
                 {"edges", cfg.dataset.edge_file.string()},
                 {"features", cfg.dataset.feature_file.string()},
                 {"labels", cfg.dataset.label_file.string()}};
      break;
    case DatasetConfig::Kind::container:
      dataset = {{"type", "container"}, {"path", cfg.dataset.container.string()}};
      break;
  }
  j["dataset"] = std::move(dataset);

  ordered_json injection = ordered_json::object();
  if (cfg.structural)
    injection["structural"] = {{"m", cfg.structural->m},
                               {"n", cfg.structural->n},
                               {"p", cfg.structural->p},
                               {"seed", cfg.structural->seed}};
  if (cfg.contextual)
    injection["contextual"] = {{"m", cfg.contextual->m},
                               {"n", cfg.contextual->n},
                               {"q", cfg.contextual->q},
                               {"seed", cfg.contextual->seed}};
  j["injection"] = std::move(injection);

  j["controllability"] = {{"step_size", cfg.controllability.step_size},
                          {"horizon", cfg.controllability.horizon},
                          {"trapezoid", cfg.controllability.trapezoid},
                          {"symmetrize_first", cfg.controllability.symmetrize_first},
                          {"backend", to_string(cfg.controllability.backend)}};
  j["augmentation"] = {{"mode", to_string(cfg.augmentation)}, {"bins", cfg.bins}};
  j["model"] = {{"conv_type", to_string(cfg.model.conv_type)},
                {"hidden_dim", cfg.model.hidden_dim},
                {"layers", cfg.model.layers},
                {"dropout", cfg.model.dropout}};
  ordered_json training = {{"epochs", cfg.training.epochs},
                           {"learning_rate", cfg.training.learning_rate},
                           {"train_fraction", cfg.training.train_fraction},
                           {"stratified", cfg.training.stratified},
                           {"seeds", cfg.training.seeds}};
  if (cfg.training.class_weight > 0.0)
    training["class_weight"] = cfg.training.class_weight;
  else
    training["class_weight"] = "auto";
  j["training"] = std::move(training);
  j["output_dir"] = cfg.output_dir.string();
  j["workers"] = cfg.workers;
  return j.dump(2);
}

namespace {

struct StageTimer {
  std::vector<std::pair<std::string, double>>& timings;

  template <typename F>
  auto run(const std::string& stage, F&& f) -> decltype(f()) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(f())>) {
        f();
        timings.emplace_back(stage, elapsed(start));
        return;
      } else {
        auto result = f();
        timings.emplace_back(stage, elapsed(start));
        return result;
      }
    } catch (const StageError&) {
      timings.emplace_back(stage, elapsed(start));
      throw;
    } catch (const Error& e) {
      timings.emplace_back(stage, elapsed(start));
      throw StageError(stage, e.what());
    } catch (const std::exception& e) {
      timings.emplace_back(stage, elapsed(start));
      throw StageError(stage, e.what());
    }
  }

  static double elapsed(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

struct SeedRow {
  MetricTriple baseline;
  MetricTriple augmented;
  bool has_augmented = false;
  bool done = false;
};

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

MetricTriple evaluate_arm(const AugmentedGraph& graph, const ModelConfig& mcfg,
                          const TrainConfig& tcfg, std::uint64_t seed, const Split& split) {
  const TrainResult result = train(graph, mcfg, tcfg, seed, &split);
  RankedScores ranked;
  ranked.scores = to_vector(anomaly_scores(result.model, graph));
  ranked.labels = graph.base.labels;
  ranked.mask = split.test_mask();
  MetricTriple triple;
  triple.auroc = auroc(ranked);
  triple.auprc = auprc(ranked);
  triple.rec_at_k = rec_at_k(ranked);
  return triple;
}

void flush_partial_rows(const std::filesystem::path& out_dir, std::size_t bins_used,
                        const std::vector<std::uint64_t>& seeds,
                        const std::vector<SeedRow>& rows, bool augmented_arm) {
  std::ostringstream csv;
  csv << "bins,arm,seed,auroc,auprc,rec_at_k\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].done) continue;
    if (augmented_arm)
      csv << bins_used << ",augmented," << seeds[i] << ','
          << format_full(rows[i].augmented.auroc) << ','
          << format_full(rows[i].augmented.auprc) << ','
          << format_full(rows[i].augmented.rec_at_k) << '\n';
    csv << bins_used << ",baseline," << seeds[i] << ','
        << format_full(rows[i].baseline.auroc) << ','
        << format_full(rows[i].baseline.auprc) << ','
        << format_full(rows[i].baseline.rec_at_k) << '\n';
  }
  detail::write_text_file(out_dir / "partial_results.csv", csv.str());
}

}  // namespace

EvaluationReport run_experiment(const ExperimentConfig& cfg) {
  if (cfg.bins.size() != 1)
    throw StageError("config", "run_experiment expects exactly one bin count; use run_sweep");
  const std::size_t bins = cfg.bins.front();
  const bool wants_attrs = cfg.augmentation == AugmentationMode::attr ||
                           cfg.augmentation == AugmentationMode::both;
  const bool attr_model = cfg.model.conv_type == ConvType::edge_attr_conv;
  if (cfg.augmentation == AugmentationMode::attr && !attr_model)
    throw StageError("config", "attr augmentation requires conv_type edge_attr_conv");
  if (cfg.augmentation == AugmentationMode::weight && attr_model)
    throw StageError("config",
                     "weight augmentation feeds no signal to edge_attr_conv; use attr or both");
  if (attr_model && cfg.augmentation == AugmentationMode::none)
    throw StageError("config", "edge_attr_conv needs attr augmentation");

  EvaluationReport report;
  StageTimer timer{report.timings};

  ExperimentConfig snapshot_cfg = cfg;
  snapshot_cfg.bins = {bins};
  report.config_snapshot = config_to_json(snapshot_cfg);
  std::ostringstream hash_hex;
  hash_hex << std::hex << std::setw(16) << std::setfill('0') << fnv1a64(report.config_snapshot);
  report.config_hash = hash_hex.str();
  report.seeds = cfg.training.seeds;

  Graph g = timer.run("dataset", [&] {
    switch (cfg.dataset.kind) {
      case DatasetConfig::Kind::synthetic: {
        const SyntheticSpec& s = cfg.dataset.synthetic;
        return generate_clean_graph(s.num_nodes, s.feature_dim, s.communities, s.intra_p,
                                    s.inter_p, s.seed, s.feature_noise);
      }
      case DatasetConfig::Kind::files:
        return load_graph(cfg.dataset.edge_file, cfg.dataset.feature_file,
                          cfg.dataset.label_file);
      case DatasetConfig::Kind::container:
        return load_graph_json(cfg.dataset.container);
    }
    throw ConfigError("unknown dataset kind");
  });

  timer.run("inject", [&] {
    if (cfg.structural) {
      InjectionOutcome outcome = inject_structural(g, *cfg.structural);
      g = std::move(outcome.graph);
      report.notes.push_back("structural injection: " +
                             std::to_string(outcome.selected_nodes.size()) + " nodes, " +
                             std::to_string(outcome.new_edges) + " new connections");
    }
    if (cfg.contextual) {
      InjectionOutcome outcome = inject_contextual(g, *cfg.contextual);
      g = std::move(outcome.graph);
      report.notes.push_back("contextual injection: " +
                             std::to_string(outcome.selected_nodes.size()) + " nodes");
    }
  });

  const Graph g_sym = timer.run("prepare", [&] { return symmetrize(g); });
  report.num_nodes = g_sym.num_nodes;
  report.num_edges = g_sym.num_edges();
  report.anomaly_count = static_cast<std::size_t>(
      std::count(g_sym.labels.begin(), g_sym.labels.end(), 1));
  report.anomaly_prevalence =
      static_cast<double>(report.anomaly_count) / static_cast<double>(g_sym.num_nodes);

  std::vector<double> scores;
  if (cfg.augmentation != AugmentationMode::none) {
    scores = timer.run("controllability", [&] {
      ControllabilityResult result = average_controllability(g_sym, cfg.controllability);
      for (const std::string& w : result.warnings)
        report.notes.push_back("controllability: " + w);
      return std::move(result.scores);
    });
  }

  AugmentedGraph augmented;
  AugmentedGraph baseline;
  timer.run("augment", [&] {
    baseline.base = g_sym;
    if (attr_model) {
      // The baseline arm feeds edge_attr_conv a constant encoding: zero
      // scores collapse the histogram, so every edge carries the bin-0
      // one-hot and the attributes convey nothing.
      baseline = encode_edge_attrs(g_sym, std::vector<double>(g_sym.num_nodes, 0.0), bins);
    }
    if (cfg.augmentation != AugmentationMode::none)
      augmented = augment_graph(g_sym, scores, cfg.augmentation, bins);
    report.bins_used = wants_attrs ? bins : 0;
  });

  ModelConfig mcfg = cfg.model;
  if (attr_model) mcfg.attr_dim = bins;

  const bool has_augmented_arm = cfg.augmentation != AugmentationMode::none;
  const std::vector<std::uint64_t>& seeds = cfg.training.seeds;
  std::vector<SeedRow> rows(seeds.size());
  std::vector<std::exception_ptr> failures(seeds.size());

  timer.run("train", [&] {
    std::filesystem::create_directories(cfg.output_dir);
    std::size_t workers = cfg.workers ? cfg.workers : std::thread::hardware_concurrency();
    workers = std::clamp<std::size_t>(workers, 1, seeds.size());

    std::atomic<std::size_t> next{0};
    auto run_jobs = [&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= seeds.size()) break;
        try {
          const Split split = make_split(g_sym.labels, cfg.training.train_fraction,
                                         cfg.training.stratified, seeds[i]);
          rows[i].baseline = evaluate_arm(baseline, mcfg, cfg.training, seeds[i], split);
          if (has_augmented_arm)
            rows[i].augmented = evaluate_arm(augmented, mcfg, cfg.training, seeds[i], split);
          rows[i].has_augmented = has_augmented_arm;
          rows[i].done = true;
        } catch (...) {
          failures[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(run_jobs);
    run_jobs();
    for (std::thread& t : pool) t.join();

    flush_partial_rows(cfg.output_dir, report.bins_used, seeds, rows, has_augmented_arm);
    for (std::size_t i = 0; i < failures.size(); ++i) {
      if (!failures[i]) continue;
      try {
        std::rethrow_exception(failures[i]);
      } catch (const std::exception& e) {
        throw Error("seed " + std::to_string(seeds[i]) + ": " + e.what());
      }
    }
  });

  timer.run("evaluate", [&] {
    std::vector<MetricTriple> baseline_rows, augmented_rows;
    for (const SeedRow& row : rows) {
      baseline_rows.push_back(row.baseline);
      if (row.has_augmented) augmented_rows.push_back(row.augmented);
    }
    if (has_augmented_arm)
      report.arms.push_back({"augmented", aggregate(augmented_rows)});
    report.arms.push_back({"baseline", aggregate(baseline_rows)});
  });

  timer.run("report", [&] { emit_report(report, cfg.output_dir); });
  return report;
}

SweepReport run_sweep(const ExperimentConfig& cfg) {
  if (cfg.bins.empty()) throw StageError("config", "bins must not be empty");
  SweepReport sweep;
  double best_auprc = -1.0;
  for (std::size_t k : cfg.bins) {
    ExperimentConfig run_cfg = cfg;
    run_cfg.bins = {k};
    if (cfg.bins.size() > 1)
      run_cfg.output_dir = cfg.output_dir / ("bins_" + std::to_string(k));
    EvaluationReport report = run_experiment(run_cfg);
    const ArmReport& lead = report.arms.front();
    if (lead.metrics.mean.auprc > best_auprc) {
      best_auprc = lead.metrics.mean.auprc;
      sweep.best_bins = k;
    }
    sweep.by_bins.push_back(std::move(report));
  }
  return sweep;
}

namespace {

ordered_json triple_to_json(const MetricTriple& t) {
  return {{"auroc", t.auroc}, {"auprc", t.auprc}, {"rec_at_k", t.rec_at_k}};
}

}  // namespace

std::string render_report(const EvaluationReport& report, ReportFormat format) {
  switch (format) {
    case ReportFormat::json: {
      ordered_json j;
      j["config_hash"] = report.config_hash;
      j["num_nodes"] = report.num_nodes;
      j["num_edges"] = report.num_edges;
      j["anomaly_count"] = report.anomaly_count;
      j["anomaly_prevalence"] = report.anomaly_prevalence;
      j["bins_used"] = report.bins_used;
      j["seeds"] = report.seeds;
      auto& arms = j["arms"] = ordered_json::array();
      for (const ArmReport& arm : report.arms) {
        ordered_json a;
        a["name"] = arm.name;
        a["mean"] = triple_to_json(arm.metrics.mean);
        a["sd"] = triple_to_json(arm.metrics.sd);
        auto& per_seed = a["per_seed"] = ordered_json::array();
        for (std::size_t i = 0; i < arm.metrics.per_seed.size(); ++i) {
          ordered_json row = triple_to_json(arm.metrics.per_seed[i]);
          row["seed"] = i < report.seeds.size() ? report.seeds[i] : i;
          per_seed.push_back(std::move(row));
        }
        arms.push_back(std::move(a));
      }
      auto& timings = j["timings"] = ordered_json::array();
      for (const auto& [stage, seconds] : report.timings)
        timings.push_back({{"stage", stage}, {"seconds", seconds}});
      j["notes"] = report.notes;
      j["config"] = json::parse(report.config_snapshot);
      return j.dump(2) + "\n";
    }
    case ReportFormat::csv: {
      std::ostringstream out;
      out << "arm,seed,auroc,auprc,rec_at_k\n";
      for (const ArmReport& arm : report.arms) {
        for (std::size_t i = 0; i < arm.metrics.per_seed.size(); ++i) {
          const MetricTriple& t = arm.metrics.per_seed[i];
          out << arm.name << ',' << (i < report.seeds.size() ? report.seeds[i] : i) << ','
              << format_full(t.auroc) << ',' << format_full(t.auprc) << ','
              << format_full(t.rec_at_k) << '\n';
        }
        out << arm.name << ",mean," << format_full(arm.metrics.mean.auroc) << ','
            << format_full(arm.metrics.mean.auprc) << ','
            << format_full(arm.metrics.mean.rec_at_k) << '\n';
        out << arm.name << ",sd," << format_full(arm.metrics.sd.auroc) << ','
            << format_full(arm.metrics.sd.auprc) << ','
            << format_full(arm.metrics.sd.rec_at_k) << '\n';
      }
      return out.str();
    }
    case ReportFormat::markdown: {
      std::ostringstream out;
      out << "# Experiment report\n\n";
      out << "- config hash: `" << report.config_hash << "`\n";
      out << "- nodes: " << report.num_nodes << ", edges: " << report.num_edges << "\n";
      out << "- anomalies: " << report.anomaly_count << " (prevalence "
          << format_short(report.anomaly_prevalence) << ")\n";
      if (report.bins_used > 0) out << "- bins: " << report.bins_used << "\n";
      out << "- seeds: " << report.seeds.size() << "\n\n";

      const ArmReport* ours = nullptr;
      const ArmReport* baseline = nullptr;
      for (const ArmReport& arm : report.arms) {
        if (arm.name == "augmented") ours = &arm;
        if (arm.name == "baseline") baseline = &arm;
      }
      auto cell = [](const ArmReport* arm, double MetricTriple::*field) {
        if (!arm) return std::string("n/a");
        return format_short(arm->metrics.mean.*field) + " ± " +
               format_short(arm->metrics.sd.*field);
      };
      out << "| Metric | Ours | Baseline |\n|---|---|---|\n";
      out << "| AUROC | " << cell(ours, &MetricTriple::auroc) << " | "
          << cell(baseline, &MetricTriple::auroc) << " |\n";
      out << "| AUPRC | " << cell(ours, &MetricTriple::auprc) << " | "
          << cell(baseline, &MetricTriple::auprc) << " |\n";
      out << "| Rec@K | " << cell(ours, &MetricTriple::rec_at_k) << " | "
          << cell(baseline, &MetricTriple::rec_at_k) << " |\n";
      if (!report.notes.empty()) {
        out << "\n";
        for (const std::string& note : report.notes) out << "- " << note << "\n";
      }
      return out.str();
    }
  }
  throw ConfigError("unknown report format");
}

void emit_report(const EvaluationReport& report, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string());
  detail::write_text_file(out_dir / "report.json", render_report(report, ReportFormat::json));
  detail::write_text_file(out_dir / "report.csv", render_report(report, ReportFormat::csv));
  detail::write_text_file(out_dir / "report.md", render_report(report, ReportFormat::markdown));
}

}  // namespace ctrlgad
