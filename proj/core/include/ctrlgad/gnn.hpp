#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ctrlgad/augmentation.hpp"

namespace ctrlgad {

enum class ConvType { weighted_gcn, sage_mean, gin_sum, edge_attr_conv };

ConvType conv_type_from_string(const std::string& name);
std::string to_string(ConvType type);

struct ModelConfig {
  ConvType conv_type = ConvType::weighted_gcn;
  std::size_t hidden_dim = 32;
  std::size_t layers = 2;
  double dropout = 0.0;
  std::size_t attr_dim = 0;  // required for edge_attr_conv, ignored otherwise
};

/// One message-passing layer. Unused tensors for a given conv type stay
/// 0 x 0 and are skipped by the parameter registry.
struct ConvLayer {
  Eigen::MatrixXd w_neigh;  // in x hidden; the single transform for gin_sum
  Eigen::MatrixXd w_self;   // in x hidden; empty for gin_sum
  Eigen::MatrixXd bias;     // 1 x hidden
  Eigen::MatrixXd b_msg;    // 1 x hidden; edge_attr_conv message bias
  Eigen::MatrixXd gin_eps;  // 1 x 1 learnable self coefficient, starts at 0
};

struct ModelState {
  ModelConfig config;
  std::size_t input_dim = 0;
  std::vector<ConvLayer> conv;
  Eigen::MatrixXd w_attr;  // attr_dim x hidden, shared by all edge_attr_conv layers
  Eigen::MatrixXd w_head;  // hidden x 2
  Eigen::MatrixXd b_head;  // 1 x 2

  /// Every parameter tensor in a fixed order (layer by layer, then the
  /// shared encoder and head). Gradients and optimizer buffers align with
  /// this order.
  std::vector<Eigen::MatrixXd*> param_refs();
  std::vector<const Eigen::MatrixXd*> param_refs() const;
  std::vector<std::string> param_names() const;
};

/// Glorot-uniform initialized model; deterministic per seed.
ModelState build_model(const ModelConfig& cfg, std::size_t input_dim, std::uint64_t seed);

using Gradients = std::vector<Eigen::MatrixXd>;  // aligned with param_refs()

/// Intermediate activations captured during forward for exact reverse-mode
/// gradients. Layout is private to the engine; callers just hand it back.
struct ForwardTrace {
  std::vector<Eigen::MatrixXd> layer_inputs;    // per layer, nodes x in_dim
  std::vector<Eigen::MatrixXd> pre_activation;  // per layer, nodes x hidden
  std::vector<Eigen::MatrixXd> messages;        // per layer, nodes x hidden
  std::vector<Eigen::MatrixXd> edge_pre_msg;    // per layer, edges x hidden (edge_attr_conv)
  std::vector<Eigen::MatrixXd> dropout_mask;    // per layer, empty when dropout off
  Eigen::MatrixXd final_hidden;                 // nodes x hidden, after last activation
};

/// Per-node logits (num_nodes x 2). Pass a trace to enable backward; pass an
/// Rng-seed via train for dropout. With dropout 0 the pass is deterministic.
Eigen::MatrixXd forward(const ModelState& model, const AugmentedGraph& graph,
                        ForwardTrace* trace = nullptr, std::uint64_t dropout_seed = 0,
                        bool training = false);

/// Ratio of benign to anomalous labels inside the mask. Throws when the mask
/// holds no anomalies.
double auto_class_weight(const std::vector<int>& labels,
                         const std::vector<std::uint8_t>& mask);

/// Mean over masked nodes of cross-entropy, anomaly class scaled by
/// class_weight. Empty mask means all nodes.
double loss(const Eigen::MatrixXd& logits, const std::vector<int>& labels,
            const std::vector<std::uint8_t>& mask, double class_weight);

/// d loss / d logits for the loss above.
Eigen::MatrixXd loss_grad(const Eigen::MatrixXd& logits, const std::vector<int>& labels,
                          const std::vector<std::uint8_t>& mask, double class_weight);

/// Exact gradients for every parameter, reverse-mode through the trace.
Gradients backward(const ModelState& model, const AugmentedGraph& graph,
                   const ForwardTrace& trace, const Eigen::MatrixXd& dlogits);

/// Convenience wrapper: forward + loss + backward in one call.
Gradients parameter_gradients(const ModelState& model, const AugmentedGraph& graph,
                              const std::vector<int>& labels,
                              const std::vector<std::uint8_t>& mask, double class_weight);

struct Adam {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::vector<Eigen::MatrixXd> m;
  std::vector<Eigen::MatrixXd> v;
  std::size_t step_count = 0;

  void step(ModelState& model, const Gradients& grads);
};

struct TrainConfig {
  std::size_t epochs = 200;
  double learning_rate = 0.01;
  double class_weight = 0.0;  // 0 means auto (benign / anomalous on the train split)
  double train_fraction = 0.7;
  bool stratified = true;
  std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
};

struct Split {
  std::vector<std::uint8_t> train_mask;  // 1 = train, 0 = test, per node
  std::vector<std::uint8_t> test_mask() const;
};

/// Stratified (or plain) random split; deterministic per seed.
Split make_split(const std::vector<int>& labels, double train_fraction,
                 bool stratified, std::uint64_t seed);

struct TrainResult {
  ModelState model;
  std::vector<double> loss_trace;  // one entry per epoch
  Split split;
  double class_weight_used = 0.0;
};

/// Full-batch Adam training for one seed. The split is derived from the seed
/// unless one is supplied. Throws NumericError if the loss goes non-finite.
TrainResult train(const AugmentedGraph& graph, const ModelConfig& mcfg,
                  const TrainConfig& tcfg, std::uint64_t seed,
                  const Split* fixed_split = nullptr);

/// Softmax probability of the anomaly class per node.
Eigen::VectorXd anomaly_scores(const ModelState& model, const AugmentedGraph& graph);

/// Portable JSON checkpoint (config, shapes, tensors). Round-trips exactly.
void save_model_json(const ModelState& model, const std::filesystem::path& file);
ModelState load_model_json(const std::filesystem::path& file);

}  // namespace ctrlgad
