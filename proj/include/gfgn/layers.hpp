#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gfgn/error.hpp"
#include "gfgn/features.hpp"
#include "gfgn/graph.hpp"
#include "gfgn/rng.hpp"
#include "gfgn/tensor.hpp"

namespace gfgn {

// ---------------------------------------------------------------------------
// Layers. All of them share the transform-then-gate structure
//
//   out_i = act( (1 - s) ⊙ z_i  +  s ⊙ Σ_{j ∈ N~(i)} z_j / sqrt(d~_i d~_j) )
//
// where z = H W are the transformed features, N~ is the closed (self-
// inclusive) neighborhood, d~ the augmented degree, and the gate s comes from
// a learned score head at one of three granularities:
//   graph:    one score vector shared by all nodes (mean-pooled features),
//   neighbor: one score vector per node (own + neighborhood-mean features),
//   pair:     one score vector per directed edge of the augmented adjacency.
// s = 0 reduces to a plain MLP layer, s = 1 to graph convolution. Scores are
// ordinary tape values: training gradients flow through them.
// ---------------------------------------------------------------------------

enum class Variant { mlp, gcn, gfgn_graph, gfgn_neighbor, gfgn_pair };
enum class Activation { identity, relu };
enum class InitKind { glorot, identity };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::mlp: return "mlp";
    case Variant::gcn: return "gcn";
    case Variant::gfgn_graph: return "gfgn-graph";
    case Variant::gfgn_neighbor: return "gfgn-neighbor";
    case Variant::gfgn_pair: return "gfgn-pair";
  }
  return "?";
}

inline Variant parse_variant(const std::string& name) {
  if (name == "mlp") return Variant::mlp;
  if (name == "gcn") return Variant::gcn;
  if (name == "gfgn-graph") return Variant::gfgn_graph;
  if (name == "gfgn-neighbor") return Variant::gfgn_neighbor;
  if (name == "gfgn-pair") return Variant::gfgn_pair;
  throw ConfigError("unknown model variant '" + name +
                    "' (expected mlp, gcn, gfgn-graph, gfgn-neighbor, gfgn-pair)");
}

inline bool is_gated(Variant v) {
  return v == Variant::gfgn_graph || v == Variant::gfgn_neighbor || v == Variant::gfgn_pair;
}

// Number of feature blocks feeding the score head: the graph variant pools
// one block, neighbor and pair concatenate two.
inline int score_input_blocks(Variant v) {
  switch (v) {
    case Variant::gfgn_graph: return 1;
    case Variant::gfgn_neighbor: return 2;
    case Variant::gfgn_pair: return 2;
    default: return 0;
  }
}

inline Tensor apply_activation(const Tensor& t, Activation act) {
  return act == Activation::relu ? relu(t) : t;
}

// --------------------------- layer parameters -------------------------------

// One layer's weights: per-head transforms w[k] (D_in x dh) and, for gated
// variants, per-head score weights w_s[k] ((blocks * dh) x dh).
struct GfgnLayerParams {
  Variant variant = Variant::mlp;
  double lambda = 1.0;
  std::vector<Tensor> w;
  std::vector<Tensor> w_s;
  std::vector<Tensor> bias;  // optional per-head 1 x dh, empty when disabled

  std::size_t heads() const { return w.size(); }
  std::size_t head_dim() const { return w.empty() ? 0 : w[0].cols(); }
  std::size_t out_dim() const { return heads() * head_dim(); }
};

// Per-layer gate scores. `values` is 1 x D_out for the graph variant,
// n x D_out for neighbor, and E x D_out for pair, where E counts the directed
// edges of the augmented adjacency; src/dst give the endpoints row by row for
// the pair variant (empty otherwise).
struct ScoreRecord {
  Variant variant = Variant::mlp;
  Tensor values;
  std::vector<int> src, dst;
};

// ----------------------- precomputed graph structures -----------------------

// Directed edges of A + I sorted by (src, dst): one row per ordered pair
// (i, j) with j in the closed neighborhood of i, including (i, i).
struct PairIndex {
  std::vector<int> src, dst;
  std::shared_ptr<const std::vector<double>> edge_weight;  // 1/sqrt(d~_i d~_j)
  std::shared_ptr<const std::vector<double>> inv_deg_aug;  // 1/d~_i, per node
};

inline PairIndex build_pair_index(const Graph& g) {
  PairIndex p;
  auto weights = std::make_shared<std::vector<double>>();
  auto inv_deg = std::make_shared<std::vector<double>>(static_cast<std::size_t>(g.n));
  for (int i = 0; i < g.n; ++i)
    (*inv_deg)[static_cast<std::size_t>(i)] = 1.0 / g.deg_aug[static_cast<std::size_t>(i)];
  for (int i = 0; i < g.n; ++i) {
    const double di = g.deg_aug[static_cast<std::size_t>(i)];
    bool self_done = false;
    for (int e = g.offsets[i]; e < g.offsets[i + 1]; ++e) {
      const int j = g.targets[e];
      if (!self_done && i < j) {
        p.src.push_back(i);
        p.dst.push_back(i);
        weights->push_back(1.0 / di);
        self_done = true;
      }
      p.src.push_back(i);
      p.dst.push_back(j);
      weights->push_back(1.0 / std::sqrt(di * g.deg_aug[static_cast<std::size_t>(j)]));
    }
    if (!self_done) {
      p.src.push_back(i);
      p.dst.push_back(i);
      weights->push_back(1.0 / di);
    }
  }
  p.edge_weight = std::move(weights);
  p.inv_deg_aug = std::move(inv_deg);
  return p;
}

// Operators a model needs for a given graph, built once and shared.
struct GraphOps {
  int n = 0;
  OpPtr ahat;                              // normalized augmented adjacency
  OpPtr mean;                              // closed-neighborhood mean
  std::shared_ptr<const PairIndex> pairs;  // for the pair variant

  static GraphOps build(const Graph& g, Variant v) {
    GraphOps ops;
    ops.n = g.n;
    if (v != Variant::mlp) ops.ahat = std::make_shared<const SparseOperator>(normalized_adjacency(g));
    if (v == Variant::gfgn_neighbor)
      ops.mean = std::make_shared<const SparseOperator>(neighborhood_mean_operator(g));
    if (v == Variant::gfgn_pair) ops.pairs = std::make_shared<const PairIndex>(build_pair_index(g));
    return ops;
  }
};

// ------------------------------ layer cores ---------------------------------

namespace detail {

inline Tensor concat_all(const std::vector<Tensor>& parts) {
  Tensor out = parts.front();
  for (std::size_t k = 1; k < parts.size(); ++k) out = concat_cols(out, parts[k]);
  return out;
}

// Copies columns [from, to) of a constant override into a fresh tensor.
inline Tensor slice_cols_const(const Tensor& t, std::size_t from, std::size_t to) {
  Tensor out(t.rows(), to - from);
  for (std::size_t i = 0; i < t.rows(); ++i)
    for (std::size_t j = from; j < to; ++j) out.at(i, j - from) = t.at(i, j);
  return out;
}

inline void check_override_shape(const Tensor& ov, std::size_t rows, std::size_t cols,
                                 const char* what) {
  if (ov.rows() != rows || ov.cols() != cols)
    throw DimensionError(std::string("score_override for the ") + what + " variant must be " +
                         std::to_string(rows) + "x" + std::to_string(cols) + ", got " +
                         ov.shape_str());
}

}  // namespace detail

// Core of every gated layer: given per-head transformed features, compute the
// per-head gate and blend the identity and aggregation paths. `score_override`
// bypasses the learned score entirely (test hook; treated as a constant).
inline std::pair<Tensor, ScoreRecord> gated_layer_apply(
    const GraphOps& ops, const std::vector<Tensor>& z_heads, const GfgnLayerParams& params,
    Activation act, const std::optional<Tensor>& score_override = {}) {
  if (!is_gated(params.variant)) throw ConfigError("gated_layer_apply: variant is not gated");
  if (z_heads.size() != params.heads())
    throw DimensionError("gated_layer_apply: " + std::to_string(z_heads.size()) +
                         " transformed blocks for " + std::to_string(params.heads()) + " heads");
  if (!ops.ahat && params.variant != Variant::gfgn_pair)
    throw ConfigError("gated_layer_apply: graph operators were not built for this variant");
  if (params.variant == Variant::gfgn_neighbor && !ops.mean)
    throw ConfigError("gated_layer_apply: neighborhood-mean operator missing");
  if (params.variant == Variant::gfgn_pair && !ops.pairs)
    throw ConfigError("gated_layer_apply: pair index missing");
  const std::size_t n = z_heads.front().rows();
  const std::size_t dh = z_heads.front().cols();
  const std::size_t d_out = params.out_dim();
  const bool pair = params.variant == Variant::gfgn_pair;
  const bool neighbor = params.variant == Variant::gfgn_neighbor;
  const std::size_t score_rows = params.variant == Variant::gfgn_graph
                                     ? 1
                                     : (neighbor ? n : ops.pairs->src.size());
  if (score_override) detail::check_override_shape(*score_override, score_rows, d_out, to_string(params.variant));

  std::vector<Tensor> outs(params.heads());
  std::vector<Tensor> scores(params.heads());
  for (std::size_t k = 0; k < params.heads(); ++k) {
    const Tensor& z = z_heads[k];
    if (z.rows() != n || z.cols() != dh)
      throw DimensionError("gated_layer_apply: inconsistent head shapes");

    Tensor s;  // gate scores for this head
    if (score_override) {
      s = detail::slice_cols_const(*score_override, k * dh, (k + 1) * dh);
    } else {
      const Tensor& ws = params.w_s[k];
      Tensor score_in;  // rows match the score granularity
      if (params.variant == Variant::gfgn_graph) {
        score_in = row_mean(z);
      } else if (neighbor) {
        score_in = concat_cols(z, spmm(ops.mean, z));
      } else {
        const Tensor zi = gather_rows(z, ops.pairs->src);
        const Tensor zj = gather_rows(z, ops.pairs->dst);
        score_in = concat_cols(zi, zj);
      }
      s = scale(sigmoid(matmul(score_in, ws)), params.lambda);
    }
    scores[k] = s;

    if (!pair) {
      // identity path gated by (1 - s), aggregation path gated by s
      const Tensor ones(s.rows(), dh, 1.0);
      const Tensor agg = spmm(ops.ahat, z);
      outs[k] = add(mul(z, sub(ones, s)), mul(agg, s));
    } else {
      // per-edge gates: self coefficient 1 - mean_j s_ij, aggregation
      // Σ_j s_ij ⊙ z_j w_ij over the closed neighborhood
      const Tensor zj = gather_rows(z, ops.pairs->dst);
      const Tensor agg =
          segment_sum_rows(scale_rows(mul(s, zj), ops.pairs->edge_weight), ops.pairs->src, n);
      const Tensor mean_s =
          scale_rows(segment_sum_rows(s, ops.pairs->src, n), ops.pairs->inv_deg_aug);
      const Tensor ones(n, dh, 1.0);
      outs[k] = add(mul(z, sub(ones, mean_s)), agg);
    }
  }

  ScoreRecord rec;
  rec.variant = params.variant;
  rec.values = detail::concat_all(scores);
  if (pair) {
    rec.src = ops.pairs->src;
    rec.dst = ops.pairs->dst;
  }
  return {apply_activation(detail::concat_all(outs), act), rec};
}

// Ungated layers through the same per-head plumbing.
inline Tensor plain_layer_apply(const GraphOps& ops, const std::vector<Tensor>& z_heads,
                                Variant variant, Activation act) {
  const Tensor z = detail::concat_all(z_heads);
  if (variant == Variant::mlp) return apply_activation(z, act);
  if (variant == Variant::gcn) return apply_activation(spmm(ops.ahat, z), act);
  throw ConfigError("plain_layer_apply: variant is gated");
}

// ------------------------- spec-surface layer ops ---------------------------

inline Tensor mlp_forward(const Tensor& h, const Tensor& w, Activation act) {
  return apply_activation(matmul(h, w), act);
}

inline Tensor gcn_forward(const Graph& g, const Tensor& h, const Tensor& w, Activation act) {
  const GraphOps ops = GraphOps::build(g, Variant::gcn);
  return apply_activation(spmm(ops.ahat, matmul(h, w)), act);
}

namespace detail {

inline std::vector<Tensor> project_heads(const Tensor& h, const GfgnLayerParams& params) {
  std::vector<Tensor> z(params.heads());
  for (std::size_t k = 0; k < params.heads(); ++k) {
    z[k] = matmul(h, params.w[k]);
    if (!params.bias.empty()) z[k] = add(z[k], params.bias[k]);
  }
  return z;
}

inline std::pair<Tensor, ScoreRecord> gfgn_forward(const Graph& g, const Tensor& h,
                                                   const GfgnLayerParams& params, Activation act,
                                                   const std::optional<Tensor>& score_override,
                                                   Variant expect) {
  if (params.variant != expect)
    throw ConfigError(std::string("layer parameters are for ") + to_string(params.variant) +
                      ", expected " + to_string(expect));
  const GraphOps ops = GraphOps::build(g, expect);
  return gated_layer_apply(ops, project_heads(h, params), params, act, score_override);
}

}  // namespace detail

inline std::pair<Tensor, ScoreRecord> gfgn_graph_forward(
    const Graph& g, const Tensor& h, const GfgnLayerParams& params, Activation act,
    const std::optional<Tensor>& score_override = {}) {
  return detail::gfgn_forward(g, h, params, act, score_override, Variant::gfgn_graph);
}

inline std::pair<Tensor, ScoreRecord> gfgn_neighbor_forward(
    const Graph& g, const Tensor& h, const GfgnLayerParams& params, Activation act,
    const std::optional<Tensor>& score_override = {}) {
  return detail::gfgn_forward(g, h, params, act, score_override, Variant::gfgn_neighbor);
}

inline std::pair<Tensor, ScoreRecord> gfgn_pair_forward(
    const Graph& g, const Tensor& h, const GfgnLayerParams& params, Activation act,
    const std::optional<Tensor>& score_override = {}) {
  return detail::gfgn_forward(g, h, params, act, score_override, Variant::gfgn_pair);
}

// --------------------------------- model ------------------------------------

struct ModelConfig {
  Variant variant = Variant::gfgn_graph;
  int in_dim = 0;
  int num_classes = 0;
  int heads = 8;
  int units = 8;  // hidden width = heads * units
  double lambda = 1.0;
  double dropout = 0.5;
  InitKind init = InitKind::glorot;
  bool bias = false;

  int hidden() const { return heads * units; }

  void validate() const {
    if (in_dim <= 0 || num_classes <= 1)
      throw ConfigError("ModelConfig: need in_dim > 0 and num_classes > 1");
    if (heads < 1 || units < 1) throw ConfigError("ModelConfig: heads and units must be >= 1");
    if (lambda < 0.0) throw ConfigError("ModelConfig: lambda must be >= 0");
    if (!(dropout >= 0.0 && dropout < 1.0))
      throw ConfigError("ModelConfig: dropout must lie in [0, 1)");
    if (init == InitKind::identity && in_dim != hidden())
      throw ConfigError("ModelConfig: identity init needs in_dim == heads * units");
  }
};

// Two-layer model: a multi-head hidden layer with ReLU, then a single-head
// output layer with identity activation (gated for the gfgn variants, so the
// output layer has its own score head over the class dimension). Dropout is
// applied to the input features and between the layers.
struct Model {
  ModelConfig cfg;
  GfgnLayerParams layer1;
  GfgnLayerParams layer2;

  std::vector<Tensor> parameters() const {
    std::vector<Tensor> out;
    for (const GfgnLayerParams* layer : {&layer1, &layer2}) {
      for (const Tensor& t : layer->w) out.push_back(t);
      for (const Tensor& t : layer->w_s) out.push_back(t);
      for (const Tensor& t : layer->bias) out.push_back(t);
    }
    return out;
  }

  std::size_t parameter_count() const {
    std::size_t total = 0;
    for (const Tensor& t : parameters()) total += t.size();
    return total;
  }

  Tensor forward(const GraphOps& ops, const FeatureMatrix& x, bool training, Rng& dropout_rng,
                 ScoreRecord* scores1 = nullptr, ScoreRecord* scores2 = nullptr) const {
    const FeatureMatrix xd = feature_dropout(x, cfg.dropout, training, dropout_rng);
    std::vector<Tensor> z1(layer1.heads());
    for (std::size_t k = 0; k < layer1.heads(); ++k) {
      z1[k] = feature_project(xd, layer1.w[k]);
      if (!layer1.bias.empty()) z1[k] = add(z1[k], layer1.bias[k]);
    }
    Tensor h1;
    if (is_gated(cfg.variant)) {
      auto [out, rec] = gated_layer_apply(ops, z1, layer1, Activation::relu);
      if (scores1) *scores1 = rec;
      h1 = out;
    } else {
      h1 = plain_layer_apply(ops, z1, cfg.variant, Activation::relu);
    }
    const Tensor h1d = dropout(h1, cfg.dropout, training, dropout_rng);
    std::vector<Tensor> z2(1);
    z2[0] = matmul(h1d, layer2.w[0]);
    if (!layer2.bias.empty()) z2[0] = add(z2[0], layer2.bias[0]);
    if (is_gated(cfg.variant)) {
      auto [logits, rec] = gated_layer_apply(ops, z2, layer2, Activation::identity);
      if (scores2) *scores2 = rec;
      return logits;
    }
    return plain_layer_apply(ops, z2, cfg.variant, Activation::identity);
  }
};

// Parameter initialization. Transform weights draw from per-(layer, head)
// substreams that do not depend on the variant, so models that differ only in
// gating start from identical transforms; score weights draw from separate
// substreams. Biases (when enabled) start at zero.
inline Model build_model(const ModelConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  Model m;
  m.cfg = cfg;
  const bool gated = is_gated(cfg.variant);
  const int blocks = score_input_blocks(cfg.variant);

  m.layer1.variant = cfg.variant;
  m.layer1.lambda = cfg.lambda;
  // The gated variants split the hidden layer into `heads` column blocks. The
  // MLP baseline mirrors that block structure (same per-block substreams and
  // Glorot fans), so a gated model with lambda = 0 and an MLP started from the
  // same seed are the same function with the same parameters step for step.
  // Block splitting does not change the function class: the blocks
  // concatenate back into one hidden-layer weight matrix. GCN keeps the
  // customary single full-width transform.
  const int h1_heads = cfg.variant == Variant::gcn ? 1 : cfg.heads;
  const int h1_dim = cfg.variant == Variant::gcn ? cfg.hidden() : cfg.units;
  for (int k = 0; k < h1_heads; ++k) {
    Rng wrng(derive_seed(seed, "w", 1, static_cast<std::uint64_t>(k)));
    if (cfg.init == InitKind::identity) {
      // Column block k of the D_in x D_in identity.
      Tensor w(static_cast<std::size_t>(cfg.in_dim), static_cast<std::size_t>(h1_dim), 0.0, true);
      for (std::size_t c = 0; c < w.cols(); ++c)
        w.at(static_cast<std::size_t>(k) * w.cols() + c, c) = 1.0;
      m.layer1.w.push_back(w);
    } else {
      m.layer1.w.push_back(glorot_uniform(static_cast<std::size_t>(cfg.in_dim),
                                          static_cast<std::size_t>(h1_dim), wrng));
    }
    if (gated) {
      Rng srng(derive_seed(seed, "ws", 1, static_cast<std::uint64_t>(k)));
      m.layer1.w_s.push_back(glorot_uniform(static_cast<std::size_t>(blocks * h1_dim),
                                            static_cast<std::size_t>(h1_dim), srng));
    }
    if (cfg.bias) m.layer1.bias.push_back(Tensor(1, static_cast<std::size_t>(h1_dim), 0.0, true));
  }

  m.layer2.variant = cfg.variant;
  m.layer2.lambda = cfg.lambda;
  {
    Rng wrng(derive_seed(seed, "w", 2, 0));
    m.layer2.w.push_back(glorot_uniform(static_cast<std::size_t>(cfg.hidden()),
                                        static_cast<std::size_t>(cfg.num_classes), wrng));
    if (gated) {
      Rng srng(derive_seed(seed, "ws", 2, 0));
      m.layer2.w_s.push_back(glorot_uniform(static_cast<std::size_t>(blocks * cfg.num_classes),
                                            static_cast<std::size_t>(cfg.num_classes), srng));
    }
    if (cfg.bias)
      m.layer2.bias.push_back(Tensor(1, static_cast<std::size_t>(cfg.num_classes), 0.0, true));
  }
  return m;
}

}  // namespace gfgn
