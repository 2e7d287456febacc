#include "ctrlgad/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <nlohmann/json.hpp>

#include "ctrlgad/errors.hpp"
#include "ctrlgad/rng.hpp"
#include "json_detail.hpp"

namespace ctrlgad {
namespace {

/// Edge arrays with the per-edge aggregation coefficient of the active conv
/// type baked in. Absent weights count as 1.
struct EdgeContext {
  std::vector<std::size_t> src;
  std::vector<std::size_t> tgt;
  Eigen::VectorXd coeff;
};

EdgeContext build_edge_context(const ModelState& model, const AugmentedGraph& graph) {
  const Graph& g = graph.base;
  const std::size_t num_edges = g.num_edges();
  EdgeContext ctx;
  ctx.src.reserve(num_edges);
  ctx.tgt.reserve(num_edges);
  for (const Edge& e : g.edges) {
    ctx.src.push_back(e.source);
    ctx.tgt.push_back(e.target);
  }

  Eigen::VectorXd w = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(num_edges));
  if (graph.has_weights()) {
    if (graph.edge_weights.size() != num_edges)
      throw PreconditionError("gnn: edge weight count does not match the edge count");
    for (std::size_t e = 0; e < num_edges; ++e) {
      if (!(graph.edge_weights[e] > 0.0) || !std::isfinite(graph.edge_weights[e]))
        throw PreconditionError("gnn: edge weights must be positive and finite");
      w(static_cast<Eigen::Index>(e)) = graph.edge_weights[e];
    }
  }

  Eigen::VectorXd weighted_in = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.num_nodes));
  Eigen::VectorXd count_in = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.num_nodes));
  for (std::size_t e = 0; e < num_edges; ++e) {
    weighted_in(static_cast<Eigen::Index>(ctx.tgt[e])) += w(static_cast<Eigen::Index>(e));
    count_in(static_cast<Eigen::Index>(ctx.tgt[e])) += 1.0;
  }

  ctx.coeff.resize(static_cast<Eigen::Index>(num_edges));
  for (std::size_t e = 0; e < num_edges; ++e) {
    const auto ei = static_cast<Eigen::Index>(e);
    const auto s = static_cast<Eigen::Index>(ctx.src[e]);
    const auto t = static_cast<Eigen::Index>(ctx.tgt[e]);
    switch (model.config.conv_type) {
      case ConvType::weighted_gcn: {
        // Symmetric normalization by weighted degree; degree-0 endpoints
        // (possible only on raw directed input) normalize by 1.
        const double ds = weighted_in(s) > 0.0 ? weighted_in(s) : 1.0;
        const double dt = weighted_in(t) > 0.0 ? weighted_in(t) : 1.0;
        ctx.coeff(ei) = w(ei) / std::sqrt(ds * dt);
        break;
      }
      case ConvType::sage_mean:
        ctx.coeff(ei) = w(ei) / weighted_in(t);
        break;
      case ConvType::gin_sum:
        ctx.coeff(ei) = w(ei);
        break;
      case ConvType::edge_attr_conv:
        ctx.coeff(ei) = 1.0 / count_in(t);
        break;
    }
  }
  return ctx;
}

/// out.row(t) += coeff_e * x.row(s) over edges (s -> t).
Eigen::MatrixXd aggregate(const EdgeContext& ctx, const Eigen::MatrixXd& x,
                          std::size_t num_nodes) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_nodes), x.cols());
  for (std::size_t e = 0; e < ctx.src.size(); ++e)
    out.row(static_cast<Eigen::Index>(ctx.tgt[e])) +=
        ctx.coeff(static_cast<Eigen::Index>(e)) * x.row(static_cast<Eigen::Index>(ctx.src[e]));
  return out;
}

/// Adjoint of aggregate: out.row(s) += coeff_e * x.row(t).
Eigen::MatrixXd aggregate_adjoint(const EdgeContext& ctx, const Eigen::MatrixXd& x,
                                  std::size_t num_nodes) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_nodes), x.cols());
  for (std::size_t e = 0; e < ctx.src.size(); ++e)
    out.row(static_cast<Eigen::Index>(ctx.src[e])) +=
        ctx.coeff(static_cast<Eigen::Index>(e)) * x.row(static_cast<Eigen::Index>(ctx.tgt[e]));
  return out;
}

/// Per-edge aggregation for edge messages: out.row(t) += coeff_e * msg.row(e).
Eigen::MatrixXd aggregate_messages(const EdgeContext& ctx, const Eigen::MatrixXd& msg,
                                   std::size_t num_nodes) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_nodes), msg.cols());
  for (std::size_t e = 0; e < ctx.src.size(); ++e)
    out.row(static_cast<Eigen::Index>(ctx.tgt[e])) +=
        ctx.coeff(static_cast<Eigen::Index>(e)) * msg.row(static_cast<Eigen::Index>(e));
  return out;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& x, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t e = 0; e < rows.size(); ++e)
    out.row(static_cast<Eigen::Index>(e)) = x.row(static_cast<Eigen::Index>(rows[e]));
  return out;
}

Eigen::MatrixXd relu(const Eigen::MatrixXd& x) { return x.cwiseMax(0.0); }

Eigen::MatrixXd relu_gate(const Eigen::MatrixXd& pre, const Eigen::MatrixXd& grad) {
  return (pre.array() > 0.0).select(grad, Eigen::MatrixXd::Zero(grad.rows(), grad.cols()));
}

void glorot_fill(Eigen::MatrixXd& m, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-limit, limit);
}

void validate_model_input(const ModelState& model, const AugmentedGraph& graph) {
  if (graph.base.num_nodes == 0) throw PreconditionError("gnn: graph has no nodes");
  if (graph.base.feature_dim() != model.input_dim)
    throw ConfigError("gnn: graph feature dimension " +
                      std::to_string(graph.base.feature_dim()) +
                      " does not match the model input dimension " +
                      std::to_string(model.input_dim));
  if (model.config.conv_type == ConvType::edge_attr_conv) {
    if (!graph.has_attrs())
      throw PreconditionError("gnn: edge_attr_conv needs edge attributes; augment first");
    if (graph.attr_dim != model.config.attr_dim)
      throw ConfigError("gnn: attribute dimension " + std::to_string(graph.attr_dim) +
                        " does not match the model attr_dim " +
                        std::to_string(model.config.attr_dim));
    if (graph.edge_attr_bins.size() != graph.base.num_edges())
      throw PreconditionError("gnn: edge attribute count does not match the edge count");
  }
}

}  // namespace

ConvType conv_type_from_string(const std::string& name) {
  if (name == "weighted_gcn") return ConvType::weighted_gcn;
  if (name == "sage_mean") return ConvType::sage_mean;
  if (name == "gin_sum") return ConvType::gin_sum;
  if (name == "edge_attr_conv") return ConvType::edge_attr_conv;
  throw ConfigError("unknown conv type '" + name +
                    "' (expected weighted_gcn, sage_mean, gin_sum, or edge_attr_conv)");
}

std::string to_string(ConvType type) {
  switch (type) {
    case ConvType::weighted_gcn: return "weighted_gcn";
    case ConvType::sage_mean: return "sage_mean";
    case ConvType::gin_sum: return "gin_sum";
    case ConvType::edge_attr_conv: return "edge_attr_conv";
  }
  throw ConfigError("unknown conv type value");
}

std::vector<Eigen::MatrixXd*> ModelState::param_refs() {
  std::vector<Eigen::MatrixXd*> refs;
  for (ConvLayer& layer : conv) {
    refs.push_back(&layer.w_neigh);
    if (layer.w_self.size() > 0) refs.push_back(&layer.w_self);
    refs.push_back(&layer.bias);
    if (layer.b_msg.size() > 0) refs.push_back(&layer.b_msg);
    if (layer.gin_eps.size() > 0) refs.push_back(&layer.gin_eps);
  }
  if (w_attr.size() > 0) refs.push_back(&w_attr);
  refs.push_back(&w_head);
  refs.push_back(&b_head);
  return refs;
}

std::vector<const Eigen::MatrixXd*> ModelState::param_refs() const {
  auto refs = const_cast<ModelState*>(this)->param_refs();
  return {refs.begin(), refs.end()};
}

std::vector<std::string> ModelState::param_names() const {
  std::vector<std::string> names;
  for (std::size_t l = 0; l < conv.size(); ++l) {
    const std::string prefix = "conv" + std::to_string(l) + ".";
    names.push_back(prefix + "w_neigh");
    if (conv[l].w_self.size() > 0) names.push_back(prefix + "w_self");
    names.push_back(prefix + "bias");
    if (conv[l].b_msg.size() > 0) names.push_back(prefix + "b_msg");
    if (conv[l].gin_eps.size() > 0) names.push_back(prefix + "gin_eps");
  }
  if (w_attr.size() > 0) names.push_back("w_attr");
  names.push_back("w_head");
  names.push_back("b_head");
  return names;
}

ModelState build_model(const ModelConfig& cfg, std::size_t input_dim, std::uint64_t seed) {
  if (cfg.hidden_dim < 1) throw ConfigError("gnn: hidden_dim must be at least 1");
  if (cfg.layers < 1) throw ConfigError("gnn: layers must be at least 1");
  if (cfg.dropout < 0.0 || cfg.dropout >= 1.0)
    throw ConfigError("gnn: dropout must lie in [0, 1)");
  if (cfg.conv_type == ConvType::edge_attr_conv && cfg.attr_dim < 1)
    throw ConfigError("gnn: edge_attr_conv requires attr_dim >= 1");
  if (input_dim < 1) throw ConfigError("gnn: input feature dimension must be at least 1");

  ModelState model;
  model.config = cfg;
  model.input_dim = input_dim;
  Rng rng(seed);
  const auto h = static_cast<Eigen::Index>(cfg.hidden_dim);
  for (std::size_t l = 0; l < cfg.layers; ++l) {
    const auto in = static_cast<Eigen::Index>(l == 0 ? input_dim : cfg.hidden_dim);
    ConvLayer layer;
    layer.w_neigh.resize(in, h);
    glorot_fill(layer.w_neigh, rng);
    if (cfg.conv_type != ConvType::gin_sum) {
      layer.w_self.resize(in, h);
      glorot_fill(layer.w_self, rng);
    }
    layer.bias = Eigen::MatrixXd::Zero(1, h);
    if (cfg.conv_type == ConvType::edge_attr_conv) layer.b_msg = Eigen::MatrixXd::Zero(1, h);
    if (cfg.conv_type == ConvType::gin_sum) layer.gin_eps = Eigen::MatrixXd::Zero(1, 1);
    model.conv.push_back(std::move(layer));
  }
  if (cfg.conv_type == ConvType::edge_attr_conv) {
    model.w_attr.resize(static_cast<Eigen::Index>(cfg.attr_dim), h);
    glorot_fill(model.w_attr, rng);
  }
  model.w_head.resize(h, 2);
  glorot_fill(model.w_head, rng);
  model.b_head = Eigen::MatrixXd::Zero(1, 2);
  return model;
}

Eigen::MatrixXd forward(const ModelState& model, const AugmentedGraph& graph,
                        ForwardTrace* trace, std::uint64_t dropout_seed, bool training) {
  validate_model_input(model, graph);
  const std::size_t n = graph.base.num_nodes;
  const EdgeContext ctx = build_edge_context(model, graph);
  const bool use_dropout = training && model.config.dropout > 0.0;
  Rng dropout_rng(dropout_seed);

  if (trace) {
    *trace = {};
    trace->layer_inputs.reserve(model.conv.size());
    trace->pre_activation.reserve(model.conv.size());
    trace->messages.resize(model.conv.size());
    trace->edge_pre_msg.resize(model.conv.size());
    trace->dropout_mask.resize(model.conv.size());
  }

  Eigen::MatrixXd h = graph.base.features;
  for (std::size_t l = 0; l < model.conv.size(); ++l) {
    const ConvLayer& layer = model.conv[l];
    if (trace) trace->layer_inputs.push_back(h);

    Eigen::MatrixXd pre;
    switch (model.config.conv_type) {
      case ConvType::weighted_gcn: {
        const Eigen::MatrixXd z = h * layer.w_neigh;
        pre = aggregate(ctx, z, n) + h * layer.w_self;
        break;
      }
      case ConvType::sage_mean: {
        const Eigen::MatrixXd mean = aggregate(ctx, h, n);
        if (trace) trace->messages[l] = mean;
        pre = mean * layer.w_neigh + h * layer.w_self;
        break;
      }
      case ConvType::gin_sum: {
        const Eigen::MatrixXd combined =
            (1.0 + layer.gin_eps(0, 0)) * h + aggregate(ctx, h, n);
        if (trace) trace->messages[l] = combined;
        pre = combined * layer.w_neigh;
        break;
      }
      case ConvType::edge_attr_conv: {
        Eigen::MatrixXd msg_pre = gather_rows(h, ctx.src) * layer.w_neigh;
        for (std::size_t e = 0; e < ctx.src.size(); ++e)
          msg_pre.row(static_cast<Eigen::Index>(e)) +=
              model.w_attr.row(static_cast<Eigen::Index>(graph.edge_attr_bins[e]));
        msg_pre.rowwise() += layer.b_msg.row(0);
        if (trace) trace->edge_pre_msg[l] = msg_pre;
        pre = aggregate_messages(ctx, relu(msg_pre), n) + h * layer.w_self;
        break;
      }
    }
    pre.rowwise() += layer.bias.row(0);
    if (trace) trace->pre_activation.push_back(pre);

    h = relu(pre);
    if (use_dropout) {
      Eigen::MatrixXd mask(h.rows(), h.cols());
      const double keep_scale = 1.0 / (1.0 - model.config.dropout);
      for (Eigen::Index i = 0; i < mask.rows(); ++i)
        for (Eigen::Index j = 0; j < mask.cols(); ++j)
          mask(i, j) = dropout_rng.uniform() < model.config.dropout ? 0.0 : keep_scale;
      h = h.cwiseProduct(mask);
      if (trace) trace->dropout_mask[l] = std::move(mask);
    }
  }
  if (trace) trace->final_hidden = h;

  Eigen::MatrixXd logits = h * model.w_head;
  logits.rowwise() += model.b_head.row(0);
  if (!logits.allFinite()) throw NumericError("gnn: forward produced non-finite logits");
  return logits;
}

double auto_class_weight(const std::vector<int>& labels,
                         const std::vector<std::uint8_t>& mask) {
  if (!mask.empty() && mask.size() != labels.size())
    throw PreconditionError("gnn: mask length does not match labels");
  std::size_t benign = 0;
  std::size_t anomalous = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!mask.empty() && mask[i] == 0) continue;
    (labels[i] == 1 ? anomalous : benign) += 1;
  }
  if (anomalous == 0)
    throw ConfigError("gnn: training split has no anomalies; set class_weight explicitly");
  if (benign == 0)
    throw ConfigError("gnn: training split has no benign nodes; set class_weight explicitly");
  return static_cast<double>(benign) / static_cast<double>(anomalous);
}

namespace {

struct LossTerms {
  double value = 0.0;
  Eigen::MatrixXd dlogits;
};

LossTerms loss_terms(const Eigen::MatrixXd& logits, const std::vector<int>& labels,
                     const std::vector<std::uint8_t>& mask, double class_weight,
                     bool want_grad) {
  if (static_cast<std::size_t>(logits.rows()) != labels.size())
    throw PreconditionError("gnn: logits row count does not match labels");
  if (logits.cols() != 2) throw PreconditionError("gnn: logits must have 2 columns");
  if (!mask.empty() && mask.size() != labels.size())
    throw PreconditionError("gnn: mask length does not match labels");
  if (!(class_weight > 0.0) || !std::isfinite(class_weight))
    throw ConfigError("gnn: class_weight must be positive and finite");

  std::size_t count = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (mask.empty() || mask[i] != 0) ++count;
  if (count == 0) throw PreconditionError("gnn: loss mask selects no nodes");

  LossTerms out;
  if (want_grad) out.dlogits = Eigen::MatrixXd::Zero(logits.rows(), 2);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!mask.empty() && mask[i] == 0) continue;
    const auto row = static_cast<Eigen::Index>(i);
    const int y = labels[i];
    if (y != 0 && y != 1)
      throw PreconditionError("gnn: label at index " + std::to_string(i) + " is not 0 or 1");
    const double w = y == 1 ? class_weight : 1.0;
    const double l0 = logits(row, 0);
    const double l1 = logits(row, 1);
    const double m = std::max(l0, l1);
    const double lse = m + std::log(std::exp(l0 - m) + std::exp(l1 - m));
    out.value += w * (lse - logits(row, y));
    if (want_grad) {
      const double p0 = std::exp(l0 - lse);
      const double p1 = std::exp(l1 - lse);
      out.dlogits(row, 0) = w * (p0 - (y == 0 ? 1.0 : 0.0)) / static_cast<double>(count);
      out.dlogits(row, 1) = w * (p1 - (y == 1 ? 1.0 : 0.0)) / static_cast<double>(count);
    }
  }
  out.value /= static_cast<double>(count);
  return out;
}

}  // namespace

double loss(const Eigen::MatrixXd& logits, const std::vector<int>& labels,
            const std::vector<std::uint8_t>& mask, double class_weight) {
  return loss_terms(logits, labels, mask, class_weight, false).value;
}

Eigen::MatrixXd loss_grad(const Eigen::MatrixXd& logits, const std::vector<int>& labels,
                          const std::vector<std::uint8_t>& mask, double class_weight) {
  return loss_terms(logits, labels, mask, class_weight, true).dlogits;
}

Gradients backward(const ModelState& model, const AugmentedGraph& graph,
                   const ForwardTrace& trace, const Eigen::MatrixXd& dlogits) {
  validate_model_input(model, graph);
  if (trace.layer_inputs.size() != model.conv.size() ||
      trace.pre_activation.size() != model.conv.size())
    throw PreconditionError("gnn: trace does not match the model layout");
  const std::size_t n = graph.base.num_nodes;
  const EdgeContext ctx = build_edge_context(model, graph);

  Eigen::MatrixXd grad_w_head = trace.final_hidden.transpose() * dlogits;
  Eigen::MatrixXd grad_b_head = dlogits.colwise().sum();
  Eigen::MatrixXd dh = dlogits * model.w_head.transpose();

  Eigen::MatrixXd grad_w_attr;
  if (model.w_attr.size() > 0)
    grad_w_attr = Eigen::MatrixXd::Zero(model.w_attr.rows(), model.w_attr.cols());

  struct LayerGrads {
    Eigen::MatrixXd w_neigh, w_self, bias, b_msg, gin_eps;
  };
  std::vector<LayerGrads> layer_grads(model.conv.size());

  for (std::size_t li = model.conv.size(); li-- > 0;) {
    const ConvLayer& layer = model.conv[li];
    const Eigen::MatrixXd& h = trace.layer_inputs[li];
    const Eigen::MatrixXd& pre = trace.pre_activation[li];
    LayerGrads& grads = layer_grads[li];

    if (li < trace.dropout_mask.size() && trace.dropout_mask[li].size() > 0)
      dh = dh.cwiseProduct(trace.dropout_mask[li]);
    const Eigen::MatrixXd dpre = relu_gate(pre, dh);
    grads.bias = dpre.colwise().sum();

    switch (model.config.conv_type) {
      case ConvType::weighted_gcn: {
        const Eigen::MatrixXd dz = aggregate_adjoint(ctx, dpre, n);
        grads.w_neigh = h.transpose() * dz;
        grads.w_self = h.transpose() * dpre;
        dh = dz * layer.w_neigh.transpose() + dpre * layer.w_self.transpose();
        break;
      }
      case ConvType::sage_mean: {
        const Eigen::MatrixXd& mean = trace.messages[li];
        grads.w_neigh = mean.transpose() * dpre;
        grads.w_self = h.transpose() * dpre;
        const Eigen::MatrixXd dmean = dpre * layer.w_neigh.transpose();
        dh = aggregate_adjoint(ctx, dmean, n) + dpre * layer.w_self.transpose();
        break;
      }
      case ConvType::gin_sum: {
        const Eigen::MatrixXd& combined = trace.messages[li];
        grads.w_neigh = combined.transpose() * dpre;
        const Eigen::MatrixXd dcombined = dpre * layer.w_neigh.transpose();
        grads.gin_eps = Eigen::MatrixXd::Constant(1, 1, dcombined.cwiseProduct(h).sum());
        dh = (1.0 + layer.gin_eps(0, 0)) * dcombined + aggregate_adjoint(ctx, dcombined, n);
        break;
      }
      case ConvType::edge_attr_conv: {
        const Eigen::MatrixXd& msg_pre = trace.edge_pre_msg[li];
        grads.w_self = h.transpose() * dpre;
        Eigen::MatrixXd dmsg(msg_pre.rows(), msg_pre.cols());
        for (std::size_t e = 0; e < ctx.src.size(); ++e)
          dmsg.row(static_cast<Eigen::Index>(e)) =
              ctx.coeff(static_cast<Eigen::Index>(e)) *
              dpre.row(static_cast<Eigen::Index>(ctx.tgt[e]));
        const Eigen::MatrixXd dmsg_pre = relu_gate(msg_pre, dmsg);
        grads.w_neigh = gather_rows(h, ctx.src).transpose() * dmsg_pre;
        grads.b_msg = dmsg_pre.colwise().sum();
        for (std::size_t e = 0; e < ctx.src.size(); ++e)
          grad_w_attr.row(static_cast<Eigen::Index>(graph.edge_attr_bins[e])) +=
              dmsg_pre.row(static_cast<Eigen::Index>(e));
        const Eigen::MatrixXd dsrc = dmsg_pre * layer.w_neigh.transpose();
        dh = dpre * layer.w_self.transpose();
        for (std::size_t e = 0; e < ctx.src.size(); ++e)
          dh.row(static_cast<Eigen::Index>(ctx.src[e])) +=
              dsrc.row(static_cast<Eigen::Index>(e));
        break;
      }
    }
  }

  Gradients out;
  const auto names = model.param_names();
  for (std::size_t li = 0; li < model.conv.size(); ++li) {
    const LayerGrads& grads = layer_grads[li];
    out.push_back(grads.w_neigh);
    if (model.conv[li].w_self.size() > 0) out.push_back(grads.w_self);
    out.push_back(grads.bias);
    if (model.conv[li].b_msg.size() > 0) out.push_back(grads.b_msg);
    if (model.conv[li].gin_eps.size() > 0) out.push_back(grads.gin_eps);
  }
  if (model.w_attr.size() > 0) out.push_back(grad_w_attr);
  out.push_back(grad_w_head);
  out.push_back(grad_b_head);

  for (std::size_t i = 0; i < out.size(); ++i)
    if (!out[i].allFinite())
      throw NumericError("gnn: non-finite gradient in " + names[i]);
  return out;
}

Gradients parameter_gradients(const ModelState& model, const AugmentedGraph& graph,
                              const std::vector<int>& labels,
                              const std::vector<std::uint8_t>& mask, double class_weight) {
  ForwardTrace trace;
  const Eigen::MatrixXd logits = forward(model, graph, &trace);
  const Eigen::MatrixXd dlogits = loss_grad(logits, labels, mask, class_weight);
  return backward(model, graph, trace, dlogits);
}

void Adam::step(ModelState& model, const Gradients& grads) {
  auto refs = model.param_refs();
  if (grads.size() != refs.size())
    throw PreconditionError("adam: gradient count does not match the parameter count");
  if (m.empty()) {
    for (const Eigen::MatrixXd* p : refs) {
      m.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
      v.push_back(Eigen::MatrixXd::Zero(p->rows(), p->cols()));
    }
  }
  ++step_count;
  const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_count));
  const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_count));
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (grads[i].rows() != refs[i]->rows() || grads[i].cols() != refs[i]->cols())
      throw PreconditionError("adam: gradient shape mismatch at parameter " +
                              std::to_string(i));
    m[i] = beta1 * m[i] + (1.0 - beta1) * grads[i];
    v[i] = beta2 * v[i] + (1.0 - beta2) * grads[i].cwiseProduct(grads[i]);
    const Eigen::ArrayXXd m_hat = m[i].array() / bc1;
    const Eigen::ArrayXXd v_hat = v[i].array() / bc2;
    refs[i]->array() -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
  }
}

std::vector<std::uint8_t> Split::test_mask() const {
  std::vector<std::uint8_t> out(train_mask.size());
  for (std::size_t i = 0; i < train_mask.size(); ++i) out[i] = train_mask[i] ? 0 : 1;
  return out;
}

Split make_split(const std::vector<int>& labels, double train_fraction,
                 bool stratified, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("split: train_fraction must lie in (0, 1)");
  if (labels.empty()) throw PreconditionError("split: no labels");

  Rng rng(seed);
  Split split;
  split.train_mask.assign(labels.size(), 0);

  auto assign_class = [&](std::vector<std::size_t> indices) {
    if (indices.empty()) return;
    rng.shuffle(indices);
    std::size_t take = static_cast<std::size_t>(
        std::floor(train_fraction * static_cast<double>(indices.size()) + 1e-12));
    // Keep both sides non-empty whenever the class has at least 2 members.
    if (indices.size() >= 2) take = std::clamp<std::size_t>(take, 1, indices.size() - 1);
    else take = 1;
    for (std::size_t i = 0; i < take; ++i) split.train_mask[indices[i]] = 1;
  };

  if (stratified) {
    std::vector<std::size_t> benign, anomalous;
    for (std::size_t i = 0; i < labels.size(); ++i)
      (labels[i] == 1 ? anomalous : benign).push_back(i);
    assign_class(std::move(benign));
    assign_class(std::move(anomalous));
  } else {
    std::vector<std::size_t> all(labels.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    assign_class(std::move(all));
  }
  return split;
}

TrainResult train(const AugmentedGraph& graph, const ModelConfig& mcfg,
                  const TrainConfig& tcfg, std::uint64_t seed, const Split* fixed_split) {
  if (tcfg.epochs < 1) throw ConfigError("train: epochs must be at least 1");
  if (!(tcfg.learning_rate > 0.0)) throw ConfigError("train: learning_rate must be positive");
  if (tcfg.class_weight < 0.0) throw ConfigError("train: class_weight must be non-negative");
  const std::vector<int>& labels = graph.base.labels;

  TrainResult result;
  if (fixed_split) {
    if (fixed_split->train_mask.size() != labels.size())
      throw PreconditionError("train: supplied split does not match the node count");
    result.split = *fixed_split;
  } else {
    result.split = make_split(labels, tcfg.train_fraction, tcfg.stratified, seed);
  }

  result.class_weight_used =
      tcfg.class_weight > 0.0 ? tcfg.class_weight
                              : auto_class_weight(labels, result.split.train_mask);

  result.model = build_model(mcfg, graph.base.feature_dim(), seed);
  Adam adam;
  adam.learning_rate = tcfg.learning_rate;

  result.loss_trace.reserve(tcfg.epochs);
  for (std::size_t epoch = 0; epoch < tcfg.epochs; ++epoch) {
    ForwardTrace trace;
    const std::uint64_t dropout_seed = seed ^ (0x9e3779b97f4a7c15ull * (epoch + 1));
    const Eigen::MatrixXd logits = forward(result.model, graph, &trace, dropout_seed, true);
    const double epoch_loss =
        loss(logits, labels, result.split.train_mask, result.class_weight_used);
    if (!std::isfinite(epoch_loss))
      throw NumericError("train: loss diverged at epoch " + std::to_string(epoch));
    result.loss_trace.push_back(epoch_loss);
    const Eigen::MatrixXd dlogits =
        loss_grad(logits, labels, result.split.train_mask, result.class_weight_used);
    adam.step(result.model, backward(result.model, graph, trace, dlogits));
  }
  return result;
}

Eigen::VectorXd anomaly_scores(const ModelState& model, const AugmentedGraph& graph) {
  const Eigen::MatrixXd logits = forward(model, graph);
  Eigen::VectorXd scores(logits.rows());
  for (Eigen::Index i = 0; i < logits.rows(); ++i)
    scores(i) = 1.0 / (1.0 + std::exp(logits(i, 0) - logits(i, 1)));
  return scores;
}

void save_model_json(const ModelState& model, const std::filesystem::path& file) {
  nlohmann::ordered_json j;
  j["conv_type"] = to_string(model.config.conv_type);
  j["hidden_dim"] = model.config.hidden_dim;
  j["layers"] = model.config.layers;
  j["dropout"] = model.config.dropout;
  j["attr_dim"] = model.config.attr_dim;
  j["input_dim"] = model.input_dim;
  auto& params = j["params"] = nlohmann::ordered_json::array();
  const auto refs = model.param_refs();
  const auto names = model.param_names();
  for (std::size_t i = 0; i < refs.size(); ++i) {
    nlohmann::ordered_json entry;
    entry["name"] = names[i];
    entry["rows"] = refs[i]->rows();
    entry["cols"] = refs[i]->cols();
    auto& data = entry["data"] = nlohmann::ordered_json::array();
    for (Eigen::Index r = 0; r < refs[i]->rows(); ++r)
      for (Eigen::Index c = 0; c < refs[i]->cols(); ++c) data.push_back((*refs[i])(r, c));
    params.push_back(std::move(entry));
  }
  detail::write_text_file(file, j.dump(2) + "\n");
}

ModelState load_model_json(const std::filesystem::path& file) {
  const nlohmann::json j = detail::parse_json_file(file);
  try {
    ModelConfig cfg;
    cfg.conv_type = conv_type_from_string(j.at("conv_type").get<std::string>());
    cfg.hidden_dim = j.at("hidden_dim").get<std::size_t>();
    cfg.layers = j.at("layers").get<std::size_t>();
    cfg.dropout = j.at("dropout").get<double>();
    cfg.attr_dim = j.at("attr_dim").get<std::size_t>();
    ModelState model = build_model(cfg, j.at("input_dim").get<std::size_t>(), 0);

    auto refs = model.param_refs();
    const auto names = model.param_names();
    const auto& params = j.at("params");
    if (params.size() != refs.size())
      throw ValidationError("checkpoint parameter count does not match the architecture");
    for (std::size_t i = 0; i < refs.size(); ++i) {
      const auto& entry = params.at(i);
      if (entry.at("name").get<std::string>() != names[i])
        throw ValidationError("checkpoint parameter order mismatch at " + names[i]);
      const auto rows = entry.at("rows").get<Eigen::Index>();
      const auto cols = entry.at("cols").get<Eigen::Index>();
      if (rows != refs[i]->rows() || cols != refs[i]->cols())
        throw ValidationError("checkpoint shape mismatch at " + names[i]);
      const auto& data = entry.at("data");
      if (static_cast<Eigen::Index>(data.size()) != rows * cols)
        throw ValidationError("checkpoint data length mismatch at " + names[i]);
      std::size_t flat = 0;
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c)
          (*refs[i])(r, c) = data.at(flat++).get<double>();
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("bad model checkpoint " + file.string() + ": " + e.what());
  }
}

}  // namespace ctrlgad
