// gfgn: command-line toolkit for feature-gated graph networks — training,
// hyperparameter sweeps, noise-robustness sweeps, gating-score export,
// spectral filter analysis, gradient checking, and synthetic-data generation.
//
// Exit codes: 0 success, 1 check failed, 2 configuration error, 3 data error,
// 4 numerical failure.

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gfgn/data.hpp"
#include "gfgn/graph.hpp"
#include "gfgn/io.hpp"
#include "gfgn/layers.hpp"
#include "gfgn/spectral.hpp"
#include "gfgn/tensor.hpp"
#include "gfgn/training.hpp"

namespace {

using gfgn::ConfigError;
using gfgn::Dataset;
using gfgn::Graph;
using gfgn::GraphOps;
using gfgn::Model;
using gfgn::Rng;
using gfgn::RunResult;
using gfgn::ScoreRecord;
using gfgn::Tensor;
using gfgn::TrainConfig;
using gfgn::Variant;

// ------------------------------ shared flags ---------------------------------

struct TrainFlags {
  std::string dataset;
  std::string model = "gcn";
  double lr = 0.05;
  double dropout = 0.5;
  double lambda = 1.0;
  double weight_decay = 5e-4;
  int epochs = 1000;
  int patience = 100;
  int heads = 8;
  int hidden = 64;  // total hidden units across heads
  std::uint64_t seed = 0;
  int splits = 10;
  int repeats = 10;
  std::string init = "glorot";
  std::string row_normalize = "auto";
  std::string out;
};

void add_protocol_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--lr", f.lr, "learning rate");
  cmd->add_option("--dropout", f.dropout, "dropout probability");
  cmd->add_option("--weight-decay", f.weight_decay, "L2 coefficient on all weights");
  cmd->add_option("--epochs", f.epochs, "maximum training epochs");
  cmd->add_option("--patience", f.patience, "early-stopping patience (epochs)");
  cmd->add_option("--heads", f.heads, "attention-free heads (hidden splits into this many blocks)");
  cmd->add_option("--hidden", f.hidden, "total hidden units (must divide evenly by --heads)");
  cmd->add_option("--seed", f.seed, "master seed; splits and repeats derive from it");
  cmd->add_option("--splits", f.splits, "number of random splits");
  cmd->add_option("--repeats", f.repeats, "training repeats per split");
  cmd->add_option("--init", f.init, "weight init: glorot|identity");
  cmd->add_option("--row-normalize", f.row_normalize, "L1 row normalization: auto|on|off");
}

void add_dataset_flag(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--dataset", f.dataset, "dataset directory")->required();
}

void add_model_flag(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--model", f.model, "mlp|gcn|gfgn-graph|gfgn-neighbor|gfgn-pair");
  cmd->add_option("--lambda", f.lambda, "gate ceiling (0 disables gating)");
}

TrainConfig to_config(const TrainFlags& f) {
  TrainConfig cfg;
  cfg.variant = gfgn::parse_variant(f.model);
  cfg.lr = f.lr;
  cfg.dropout = f.dropout;
  cfg.lambda = f.lambda;
  cfg.weight_decay = f.weight_decay;
  cfg.epochs = f.epochs;
  cfg.patience = f.patience;
  if (f.heads < 1 || f.hidden < 1 || f.hidden % f.heads != 0)
    throw ConfigError("--hidden (" + std::to_string(f.hidden) +
                      ") must be a positive multiple of --heads (" + std::to_string(f.heads) + ")");
  cfg.heads = f.heads;
  cfg.units = f.hidden / f.heads;
  cfg.init = gfgn::parse_init(f.init);
  cfg.seed = f.seed;
  cfg.splits = f.splits;
  cfg.repeats = f.repeats;
  cfg.row_normalize = gfgn::parse_row_normalize(f.row_normalize);
  cfg.validate();
  return cfg;
}

// --------------------------------- train -------------------------------------

int run_train(const TrainFlags& f) {
  const TrainConfig cfg = to_config(f);
  const Dataset data = gfgn::load_dataset(f.dataset, cfg.row_normalize);
  const RunResult result = gfgn::train_full(data, cfg);
  std::printf("%s ± %s\n", gfgn::fmt_double(result.mean).c_str(),
              gfgn::fmt_double(result.stddev).c_str());
  if (!f.out.empty()) {
    const std::string hash = gfgn::dataset_content_hash(f.dataset);
    gfgn::write_file_atomic(f.out, gfgn::train_results_json(data, f.dataset, hash, cfg, result));
    std::printf("wrote %s (%zu runs)\n", f.out.c_str(), result.runs.size());
  }
  return 0;
}

// --------------------------------- sweep --------------------------------------

struct SweepFlags {
  TrainFlags base;
  std::vector<double> lrs{0.005, 0.05};
  std::vector<double> dropouts{0.5, 0.8};
  std::vector<double> lambdas{0.5, 1.0, 2.0};
  std::vector<double> weight_decays{5e-4, 5e-5};
};

int run_sweep(const SweepFlags& f) {
  const TrainConfig base = to_config(f.base);
  const Dataset data = gfgn::load_dataset(f.base.dataset, base.row_normalize);
  const gfgn::SweepResult result =
      gfgn::sweep(data, base, f.lrs, f.dropouts, f.lambdas, f.weight_decays);
  const gfgn::SweepRow& best = result.rows[result.best_index];
  std::printf("best row %zu of %zu: lr=%s dropout=%s lambda=%s weight_decay=%s\n",
              result.best_index, result.rows.size(), gfgn::fmt_double(best.config.lr).c_str(),
              gfgn::fmt_double(best.config.dropout).c_str(),
              gfgn::fmt_double(best.config.lambda).c_str(),
              gfgn::fmt_double(best.config.weight_decay).c_str());
  std::printf("%s ± %s\n", gfgn::fmt_double(best.result.mean).c_str(),
              gfgn::fmt_double(best.result.stddev).c_str());
  if (!f.base.out.empty()) {
    const std::string hash = gfgn::dataset_content_hash(f.base.dataset);
    gfgn::write_file_atomic(f.base.out,
                            gfgn::sweep_results_json(data, f.base.dataset, hash, base, f.lrs,
                                                     f.dropouts, f.lambdas, f.weight_decays,
                                                     result));
    std::printf("wrote %s\n", f.base.out.c_str());
  }
  return 0;
}

// ------------------------------- noise-sweep ----------------------------------

struct NoiseFlags {
  TrainFlags base;
  std::vector<double> ratios{0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
  std::vector<std::string> models{"gcn", "gfgn-graph"};
};

int run_noise_sweep(const NoiseFlags& f) {
  for (double r : f.ratios)
    if (r < 0.0) throw ConfigError("noise ratios must be >= 0");
  if (f.models.empty()) throw ConfigError("--models needs at least one model");
  const Dataset data = gfgn::load_dataset(f.base.dataset,
                                          gfgn::parse_row_normalize(f.base.row_normalize));
  std::vector<gfgn::NoiseSweepRow> rows;
  for (std::size_t ri = 0; ri < f.ratios.size(); ++ri) {
    // One noise graph per (ratio, seed), shared by every model and run.
    Dataset noisy = data;
    noisy.graph = gfgn::add_random_edges(data.graph, f.ratios[ri],
                                         gfgn::derive_seed(f.base.seed, "noise", ri));
    for (const std::string& model : f.models) {
      TrainFlags tf = f.base;
      tf.model = model;
      const TrainConfig cfg = to_config(tf);
      const RunResult result = gfgn::train_full(noisy, cfg);
      rows.push_back({f.ratios[ri], model, result.mean, result.stddev});
      std::printf("ratio %s %s: %s ± %s\n", gfgn::fmt_double(f.ratios[ri]).c_str(), model.c_str(),
                  gfgn::fmt_double(result.mean).c_str(), gfgn::fmt_double(result.stddev).c_str());
    }
  }
  if (!f.base.out.empty()) {
    TrainFlags tf = f.base;
    nlohmann::ordered_json echo = gfgn::config_json(to_config(tf));
    echo.erase("model");
    echo.erase("lambda");
    echo["models"] = f.models;
    echo["ratios"] = f.ratios;
    echo["dataset"] = f.base.dataset;
    echo["content_hash"] = gfgn::dataset_content_hash(f.base.dataset);
    gfgn::write_file_atomic(f.base.out, gfgn::noise_sweep_csv(rows, echo));
    std::printf("wrote %s (%zu rows)\n", f.base.out.c_str(), rows.size());
  }
  return 0;
}

// ------------------------------- dump-scores ----------------------------------

struct DumpFlags {
  TrainFlags base;
  int layer = 1;
};

int run_dump_scores(const DumpFlags& f) {
  const TrainConfig cfg = to_config(f.base);
  if (!gfgn::is_gated(cfg.variant))
    throw ConfigError(std::string(gfgn::to_string(cfg.variant)) + " has no gating scores");
  if (f.layer != 1 && f.layer != 2) throw ConfigError("--layer must be 1 or 2");
  const Dataset data = gfgn::load_dataset(f.base.dataset, cfg.row_normalize);
  const GraphOps ops = GraphOps::build(data.graph, cfg.variant);
  const gfgn::Split split =
      data.fixed_split ? *data.fixed_split
                       : gfgn::random_split(data.n(), gfgn::derive_seed(cfg.seed, "split", 0));

  // Train the (split 0, repeat 0) run of the standard protocol, then read the
  // gating scores off the restored best-epoch model in evaluation mode.
  Model model;
  const gfgn::TrainOutcome outcome =
      gfgn::train_one(data, ops, split, cfg, gfgn::derive_seed(cfg.seed, "run", 0, 0), nullptr,
                      &model);
  Rng eval_rng(0);
  ScoreRecord s1, s2;
  model.forward(ops, data.features, false, eval_rng, &s1, &s2);
  const ScoreRecord& rec = f.layer == 1 ? s1 : s2;

  nlohmann::ordered_json echo = gfgn::config_json(cfg);
  echo["layer"] = f.layer;
  echo["dataset"] = f.base.dataset;
  echo["content_hash"] = gfgn::dataset_content_hash(f.base.dataset);
  gfgn::write_file_atomic(f.base.out, gfgn::scores_csv(rec, echo));
  std::printf("trained to epoch %d (val %s); wrote %s\n", outcome.best_epoch,
              gfgn::fmt_double(outcome.val_accuracy).c_str(), f.base.out.c_str());
  return 0;
}

// --------------------------------- spectral -----------------------------------

struct SpectralFlags {
  std::string dataset;
  int max_nodes = 512;
  std::string s_grid = "0.1:1.0:0.1";
  int k = 2;
  std::string out;
};

std::vector<double> parse_s_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  parts.push_back(cur);
  const auto to_double = [&](const std::string& p) {
    char* end = nullptr;
    const double v = std::strtod(p.c_str(), &end);
    if (end == p.c_str() || *end != '\0')
      throw ConfigError("--s-grid: cannot parse '" + p + "' in '" + text + "'");
    return v;
  };
  if (parts.size() == 1) return {to_double(parts[0])};
  if (parts.size() != 3)
    throw ConfigError("--s-grid expects VALUE or START:STOP:STEP, got '" + text + "'");
  const double start = to_double(parts[0]), stop = to_double(parts[1]), step = to_double(parts[2]);
  if (step <= 0.0 || stop < start) throw ConfigError("--s-grid needs STEP > 0 and STOP >= START");
  const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) values.push_back(start + static_cast<double>(i) * step);
  return values;
}

// Connected-first induced subgraph: breadth-first from the highest-degree
// node (then from the next unvisited highest-degree node for extra
// components) until max_nodes nodes are collected; kept nodes are relabeled
// in ascending original order.
Graph induced_subgraph(const Graph& g, int max_nodes) {
  std::vector<int> by_degree(static_cast<std::size_t>(g.n));
  for (int i = 0; i < g.n; ++i) by_degree[static_cast<std::size_t>(i)] = i;
  std::stable_sort(by_degree.begin(), by_degree.end(),
                   [&](int a, int b) { return g.degree(a) > g.degree(b); });

  std::vector<bool> visited(static_cast<std::size_t>(g.n), false);
  std::vector<int> kept;
  kept.reserve(static_cast<std::size_t>(max_nodes));
  std::size_t seed_pos = 0;
  while (static_cast<int>(kept.size()) < max_nodes && seed_pos < by_degree.size()) {
    while (seed_pos < by_degree.size() && visited[static_cast<std::size_t>(by_degree[seed_pos])])
      ++seed_pos;
    if (seed_pos == by_degree.size()) break;
    std::queue<int> frontier;
    frontier.push(by_degree[seed_pos]);
    visited[static_cast<std::size_t>(by_degree[seed_pos])] = true;
    while (!frontier.empty() && static_cast<int>(kept.size()) < max_nodes) {
      const int i = frontier.front();
      frontier.pop();
      kept.push_back(i);
      for (int e = g.offsets[static_cast<std::size_t>(i)];
           e < g.offsets[static_cast<std::size_t>(i) + 1]; ++e) {
        const int j = g.targets[static_cast<std::size_t>(e)];
        if (!visited[static_cast<std::size_t>(j)]) {
          visited[static_cast<std::size_t>(j)] = true;
          frontier.push(j);
        }
      }
    }
  }

  std::sort(kept.begin(), kept.end());
  std::vector<int> newid(static_cast<std::size_t>(g.n), -1);
  for (std::size_t k = 0; k < kept.size(); ++k) newid[static_cast<std::size_t>(kept[k])] =
      static_cast<int>(k);
  std::vector<std::pair<int, int>> edges;
  for (int i : kept)
    for (int e = g.offsets[static_cast<std::size_t>(i)];
         e < g.offsets[static_cast<std::size_t>(i) + 1]; ++e) {
      const int j = g.targets[static_cast<std::size_t>(e)];
      if (i < j && newid[static_cast<std::size_t>(j)] >= 0)
        edges.push_back({newid[static_cast<std::size_t>(i)], newid[static_cast<std::size_t>(j)]});
    }
  return gfgn::load_edges(edges, static_cast<int>(kept.size()));
}

int run_spectral(const SpectralFlags& f) {
  if (f.max_nodes < 1) throw ConfigError("--max-nodes must be >= 1");
  if (f.k < 0) throw ConfigError("--k must be >= 0");
  const std::vector<double> s_values = parse_s_grid(f.s_grid);
  const Dataset data = gfgn::load_dataset(f.dataset);
  const Graph graph = data.graph.n > f.max_nodes ? induced_subgraph(data.graph, f.max_nodes)
                                                 : data.graph;

  // Classical (un-augmented) normalized Laplacian: its [0, 2] spectrum is what
  // the gate's frequency response (1 - s*lambda)^K is stated over.
  const gfgn::SparseOperator lap = gfgn::normalized_laplacian(graph, false);
  const Tensor dense = gfgn::spmm(lap, gfgn::identity_matrix(static_cast<std::size_t>(graph.n)));
  const gfgn::EigenDecomposition eig = gfgn::eig_symmetric(dense);

  const std::size_t n = static_cast<std::size_t>(graph.n);
  std::vector<gfgn::SpectralRow> rows;
  rows.reserve(s_values.size() * n);
  for (double s : s_values) {
    const std::vector<double> coeffs = gfgn::filter_coefficients(eig.eigenvalues, s, f.k);
    for (std::size_t i = 0; i < n; ++i) {
      Tensor u(n, 1);
      for (std::size_t r = 0; r < n; ++r) u.at(r, 0) = eig.eigenvectors.at(r, i);
      const Tensor filtered = gfgn::polynomial_filter_apply(lap, u, s, f.k);
      double residual = 0.0;
      for (std::size_t r = 0; r < n; ++r)
        residual = std::max(residual, std::abs(filtered.at(r, 0) - coeffs[i] * u.at(r, 0)));
      rows.push_back({eig.eigenvalues[i], s, f.k, coeffs[i], residual});
    }
  }

  nlohmann::ordered_json echo;
  echo["dataset"] = f.dataset;
  echo["content_hash"] = gfgn::dataset_content_hash(f.dataset);
  echo["nodes"] = graph.n;
  echo["max_nodes"] = f.max_nodes;
  echo["s_grid"] = f.s_grid;
  echo["K"] = f.k;
  gfgn::write_file_atomic(f.out, gfgn::spectral_csv(rows, echo));
  std::printf("%d nodes, eigenvalues in [%s, %s]; wrote %s (%zu rows)\n", graph.n,
              gfgn::fmt_double(eig.eigenvalues.front()).c_str(),
              gfgn::fmt_double(eig.eigenvalues.back()).c_str(), f.out.c_str(), rows.size());
  return 0;
}

// -------------------------------- gradcheck -----------------------------------

struct GradcheckFlags {
  std::string model = "gfgn-pair";
  int n = 6;
  std::uint64_t seed = 0;
  bool perturb = false;  // test hook: corrupt one analytic gradient entry
};

int run_gradcheck(const GradcheckFlags& f) {
  if (f.n < 2) throw ConfigError("--n must be >= 2");
  const Variant variant = gfgn::parse_variant(f.model);
  const int in_dim = 5, num_classes = 3;

  // Random tiny instance: Erdős–Rényi edges, Gaussian features, random labels.
  Rng graph_rng(gfgn::derive_seed(f.seed, "graph"));
  std::vector<std::pair<int, int>> edges;
  for (int i = 0; i < f.n; ++i)
    for (int j = i + 1; j < f.n; ++j)
      if (graph_rng.next_double() < 0.45) edges.push_back({i, j});
  const Graph graph = gfgn::load_edges(edges, f.n);
  Tensor x(static_cast<std::size_t>(f.n), in_dim);
  for (std::size_t e = 0; e < x.size(); ++e) x.value()[e] = graph_rng.normal();
  const gfgn::FeatureMatrix features = gfgn::FeatureMatrix::from_dense(x);
  std::vector<int> labels(static_cast<std::size_t>(f.n));
  for (int& l : labels) l = static_cast<int>(graph_rng.below(num_classes));
  std::vector<int> all_nodes(static_cast<std::size_t>(f.n));
  for (int i = 0; i < f.n; ++i) all_nodes[static_cast<std::size_t>(i)] = i;

  gfgn::ModelConfig mc;
  mc.variant = variant;
  mc.in_dim = in_dim;
  mc.num_classes = num_classes;
  mc.heads = 2;
  mc.units = 3;
  mc.lambda = 1.0;
  mc.dropout = 0.0;
  const Model model = gfgn::build_model(mc, gfgn::derive_seed(f.seed, "init"));
  const GraphOps ops = GraphOps::build(graph, variant);

  const auto loss_value = [&]() {
    Rng r0(0);
    const Tensor logits = model.forward(ops, features, false, r0);
    return gfgn::softmax_cross_entropy(logits, labels, all_nodes).value()[0];
  };

  std::vector<std::pair<std::string, Tensor>> named;
  for (std::size_t k = 0; k < model.layer1.w.size(); ++k)
    named.push_back({"layer1.w[" + std::to_string(k) + "]", model.layer1.w[k]});
  for (std::size_t k = 0; k < model.layer1.w_s.size(); ++k)
    named.push_back({"layer1.w_s[" + std::to_string(k) + "]", model.layer1.w_s[k]});
  for (std::size_t k = 0; k < model.layer2.w.size(); ++k)
    named.push_back({"layer2.w[" + std::to_string(k) + "]", model.layer2.w[k]});
  for (std::size_t k = 0; k < model.layer2.w_s.size(); ++k)
    named.push_back({"layer2.w_s[" + std::to_string(k) + "]", model.layer2.w_s[k]});

  // Analytic gradients in one reverse sweep.
  {
    gfgn::Tape tape;
    gfgn::Tape::Scope scope(tape);
    Rng r0(0);
    const Tensor logits = model.forward(ops, features, false, r0);
    const Tensor loss = gfgn::softmax_cross_entropy(logits, labels, all_nodes);
    for (const auto& [name, p] : named) p.zero_grad();
    tape.backward(loss);
  }
  if (f.perturb && !named.empty()) named.front().second.grad()[0] += 1e-2;

  // Central differences, parameter by parameter.
  const double h = 1e-5;
  double worst = 0.0;
  std::string worst_name = "none";
  for (const auto& [name, p] : named) {
    for (std::size_t e = 0; e < p.size(); ++e) {
      const double keep = p.value()[e];
      p.value()[e] = keep + h;
      const double up = loss_value();
      p.value()[e] = keep - h;
      const double down = loss_value();
      p.value()[e] = keep;
      const double numeric = (up - down) / (2.0 * h);
      const double analytic = p.grad()[e];
      const double rel = std::abs(analytic - numeric) /
                         std::max({std::abs(analytic), std::abs(numeric), 1e-8});
      if (rel > worst) {
        worst = rel;
        worst_name = name;
      }
    }
  }

  std::printf("max relative gradient error %.3e (parameter %s)\n", worst, worst_name.c_str());
  if (worst < 1e-4) return 0;
  std::fprintf(stderr, "gradient check FAILED: %s deviates by %.3e (tolerance 1e-4)\n",
               worst_name.c_str(), worst);
  return 1;
}

// ----------------------------- synth / homophily ------------------------------

struct SynthFlags {
  std::string spec;
  std::string out;
};

int run_synth(const SynthFlags& f) {
  const gfgn::SynthSpec spec = gfgn::parse_synth_spec(f.spec);
  const Dataset data = gfgn::generate_synthetic(spec);
  gfgn::write_dataset(data, f.out);

  nlohmann::ordered_json echo;  // generation config echoed into the artifact
  echo["name"] = spec.name;
  echo["n"] = spec.n;
  echo["num_classes"] = spec.num_classes;
  echo["dim"] = spec.dim;
  echo["homophilous_dims"] = spec.homophilous_dims;
  echo["p_in"] = spec.p_in;
  echo["p_out"] = spec.p_out;
  echo["signal_strength"] = spec.signal_strength;
  echo["seed"] = spec.seed;
  gfgn::write_file_atomic(std::filesystem::path(f.out) / "synth-spec.json", echo.dump(2) + "\n");

  std::printf("wrote %s: %d nodes, %zu edges, homophily %s\n", f.out.c_str(), data.n(),
              data.graph.num_undirected_edges(),
              gfgn::fmt_double(gfgn::edge_homophily(data.graph, data.labels)).c_str());
  return 0;
}

int run_homophily(const std::string& dataset) {
  const Dataset data = gfgn::load_dataset(dataset);
  std::printf("%s\n", gfgn::fmt_double(gfgn::edge_homophily(data.graph, data.labels)).c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"feature-gated graph network toolkit"};
  app.require_subcommand(1);

  TrainFlags train_flags;
  CLI::App* train = app.add_subcommand("train", "train one model, aggregate splits × repeats");
  add_dataset_flag(train, train_flags);
  add_model_flag(train, train_flags);
  add_protocol_flags(train, train_flags);
  train->add_option("--out", train_flags.out, "results JSON path");

  SweepFlags sweep_flags;
  CLI::App* sweep = app.add_subcommand("sweep", "full hyperparameter grid for one model");
  add_dataset_flag(sweep, sweep_flags.base);
  add_model_flag(sweep, sweep_flags.base);
  add_protocol_flags(sweep, sweep_flags.base);
  sweep->add_option("--lrs", sweep_flags.lrs, "learning-rate grid")->delimiter(',');
  sweep->add_option("--dropouts", sweep_flags.dropouts, "dropout grid")->delimiter(',');
  sweep->add_option("--lambdas", sweep_flags.lambdas, "gate-ceiling grid")->delimiter(',');
  sweep->add_option("--weight-decays", sweep_flags.weight_decays, "weight-decay grid")
      ->delimiter(',');
  sweep->add_option("--out", sweep_flags.base.out, "results JSON path");

  NoiseFlags noise_flags;
  CLI::App* noise = app.add_subcommand("noise-sweep", "accuracy under random added edges");
  add_dataset_flag(noise, noise_flags.base);
  noise->add_option("--lambda", noise_flags.base.lambda, "gate ceiling for gated models");
  add_protocol_flags(noise, noise_flags.base);
  noise->add_option("--ratios", noise_flags.ratios, "added-edge ratios, fractions of |E|")
      ->delimiter(',');
  noise->add_option("--models", noise_flags.models, "models to compare")->delimiter(',');
  noise->add_option("--out", noise_flags.base.out, "CSV path");

  DumpFlags dump_flags;
  CLI::App* dump = app.add_subcommand("dump-scores", "train once and export gating scores");
  add_dataset_flag(dump, dump_flags.base);
  add_model_flag(dump, dump_flags.base);
  add_protocol_flags(dump, dump_flags.base);
  dump->add_option("--layer", dump_flags.layer, "1 (hidden) or 2 (output)");
  dump->add_option("--out", dump_flags.base.out, "CSV path")->required();

  SpectralFlags spectral_flags;
  CLI::App* spectral = app.add_subcommand("spectral", "filter frequency response on a dataset graph");
  spectral->add_option("--dataset", spectral_flags.dataset, "dataset directory")->required();
  spectral->add_option("--max-nodes", spectral_flags.max_nodes,
                       "cap; larger graphs analyze an induced subgraph");
  spectral->add_option("--s-grid", spectral_flags.s_grid, "VALUE or START:STOP:STEP");
  spectral->add_option("--k", spectral_flags.k, "filter power (layer count)");
  spectral->add_option("--out", spectral_flags.out, "CSV path")->required();

  GradcheckFlags grad_flags;
  CLI::App* grad = app.add_subcommand("gradcheck", "finite-difference gradient audit");
  grad->add_option("--model", grad_flags.model, "mlp|gcn|gfgn-graph|gfgn-neighbor|gfgn-pair");
  grad->add_option("--n", grad_flags.n, "nodes in the random test graph");
  grad->add_option("--seed", grad_flags.seed, "instance seed");
  grad->add_flag("--perturb-grad", grad_flags.perturb,
                 "corrupt one analytic gradient entry (negative-control test hook)")
      ->group("");  // hidden

  SynthFlags synth_flags;
  CLI::App* synth = app.add_subcommand("synth", "generate a synthetic dataset directory");
  synth->add_option("--spec", synth_flags.spec, "spec JSON path")->required();
  synth->add_option("--out", synth_flags.out, "output dataset directory")->required();

  std::string homophily_dataset;
  CLI::App* homophily = app.add_subcommand("homophily", "print the edge homophily fraction");
  homophily->add_option("--dataset", homophily_dataset, "dataset directory")->required();

  int exit_code = 0;
  train->callback([&]() { exit_code = run_train(train_flags); });
  sweep->callback([&]() { exit_code = run_sweep(sweep_flags); });
  noise->callback([&]() { exit_code = run_noise_sweep(noise_flags); });
  dump->callback([&]() { exit_code = run_dump_scores(dump_flags); });
  spectral->callback([&]() { exit_code = run_spectral(spectral_flags); });
  grad->callback([&]() { exit_code = run_gradcheck(grad_flags); });
  synth->callback([&]() { exit_code = run_synth(synth_flags); });
  homophily->callback([&]() { exit_code = run_homophily(homophily_dataset); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const gfgn::ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 2;
  } catch (const gfgn::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const gfgn::DimensionError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 3;
  } catch (const gfgn::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  return exit_code;
}
