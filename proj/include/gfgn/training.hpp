#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gfgn/data.hpp"
#include "gfgn/error.hpp"
#include "gfgn/layers.hpp"
#include "gfgn/rng.hpp"
#include "gfgn/tensor.hpp"

namespace gfgn {

// ---------------------------------------------------------------------------
// Full-batch transductive training: Adam with L2 regularization, early
// stopping on validation accuracy with best-epoch parameter restore, and
// seeded multi-split/multi-repeat aggregation.
// ---------------------------------------------------------------------------

struct TrainConfig {
  Variant variant = Variant::gcn;
  double lr = 0.05;
  double dropout = 0.5;
  double lambda = 1.0;
  double weight_decay = 5e-4;
  int epochs = 1000;
  int patience = 100;
  int heads = 8;
  int units = 8;  // per head; total hidden width = heads * units
  InitKind init = InitKind::glorot;
  std::uint64_t seed = 0;
  int splits = 10;
  int repeats = 10;
  RowNormalize row_normalize = RowNormalize::automatic;  // recorded in results

  void validate() const {
    if (lr <= 0.0) throw ConfigError("TrainConfig: lr must be positive");
    if (!(dropout >= 0.0 && dropout < 1.0))
      throw ConfigError("TrainConfig: dropout must lie in [0, 1)");
    if (lambda < 0.0) throw ConfigError("TrainConfig: lambda must be >= 0");
    if (weight_decay < 0.0) throw ConfigError("TrainConfig: weight_decay must be >= 0");
    if (epochs < 1) throw ConfigError("TrainConfig: epochs must be >= 1");
    if (patience < 1 || patience > epochs)
      throw ConfigError("TrainConfig: patience must lie in [1, epochs]");
    if (heads < 1 || units < 1) throw ConfigError("TrainConfig: heads and units must be >= 1");
    if (splits < 1 || repeats < 1)
      throw ConfigError("TrainConfig: splits and repeats must be >= 1");
  }

  ModelConfig model_config(int in_dim, int num_classes) const {
    ModelConfig m;
    m.variant = variant;
    m.in_dim = in_dim;
    m.num_classes = num_classes;
    m.heads = heads;
    m.units = units;
    m.lambda = lambda;
    m.dropout = dropout;
    m.init = init;
    return m;
  }
};

// ---------------------------------- Adam ------------------------------------

struct AdamState {
  struct Slot {
    std::vector<double> m, v;
  };
  std::vector<Slot> slots;
  int t = 0;

  static AdamState for_params(const std::vector<Tensor>& params) {
    AdamState s;
    s.slots.resize(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
      s.slots[i].m.assign(params[i].size(), 0.0);
      s.slots[i].v.assign(params[i].size(), 0.0);
    }
    return s;
  }
};

// Classical Adam (β1=0.9, β2=0.999, ε=1e-8) applied to grad + weight_decay ·
// param, updating parameter values in place.
inline void adam_step(const std::vector<Tensor>& params, AdamState& state, double lr,
                      double weight_decay) {
  if (state.slots.size() != params.size())
    throw DimensionError("adam_step: " + std::to_string(state.slots.size()) + " state slots for " +
                         std::to_string(params.size()) + " parameters");
  constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  ++state.t;
  const double bc1 = 1.0 - std::pow(beta1, state.t);
  const double bc2 = 1.0 - std::pow(beta2, state.t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    const Tensor& p = params[i];
    AdamState::Slot& slot = state.slots[i];
    if (slot.m.size() != p.size())
      throw DimensionError("adam_step: state slot " + std::to_string(i) + " has " +
                           std::to_string(slot.m.size()) + " entries for parameter " +
                           p.shape_str());
    std::vector<double>& value = p.value();
    const std::vector<double>& grad = p.grad();
    for (std::size_t e = 0; e < value.size(); ++e) {
      const double g = grad[e] + weight_decay * value[e];
      slot.m[e] = beta1 * slot.m[e] + (1.0 - beta1) * g;
      slot.v[e] = beta2 * slot.v[e] + (1.0 - beta2) * g * g;
      value[e] -= lr * (slot.m[e] / bc1) / (std::sqrt(slot.v[e] / bc2) + eps);
    }
  }
}

// -------------------------------- evaluation ---------------------------------

// Argmax-of-logits accuracy over an index set; ties break toward the smaller
// class index.
inline double evaluate(const Tensor& logits, const std::vector<int>& labels,
                       const std::vector<int>& indices) {
  if (indices.empty()) throw ConfigError("evaluate: empty index set");
  int hits = 0;
  for (int i : indices) {
    if (i < 0 || static_cast<std::size_t>(i) >= logits.rows())
      throw DimensionError("evaluate: node index " + std::to_string(i) + " outside logits");
    int best = 0;
    for (std::size_t c = 1; c < logits.cols(); ++c)
      if (logits.at(static_cast<std::size_t>(i), c) >
          logits.at(static_cast<std::size_t>(i), static_cast<std::size_t>(best)))
        best = static_cast<int>(c);
    hits += best == labels[static_cast<std::size_t>(i)];
  }
  return static_cast<double>(hits) / static_cast<double>(indices.size());
}

// ------------------------------ single run ----------------------------------

struct TrainOutcome {
  double test_accuracy = 0.0;
  double val_accuracy = 0.0;
  int best_epoch = 0;     // 1-based epoch whose parameters were restored
  int stopped_epoch = 0;  // last epoch actually trained
};

// Trains one model on one split. Deterministic per seed: parameter init and
// dropout masks derive from disjoint substreams of `seed`. Tracks the best
// validation accuracy (strict improvement, first best wins), stops after
// `patience` epochs without improvement, restores the best-epoch parameters,
// and reports test accuracy there.
inline TrainOutcome train_one(const Dataset& data, const GraphOps& ops, const Split& split,
                              const TrainConfig& cfg, std::uint64_t seed,
                              std::vector<double>* loss_log = nullptr,
                              Model* trained_out = nullptr) {
  cfg.validate();
  const Model model = build_model(cfg.model_config(data.dim(), data.num_classes),
                                  derive_seed(seed, "init"));
  const std::vector<Tensor> params = model.parameters();
  AdamState adam = AdamState::for_params(params);
  Rng dropout_rng(derive_seed(seed, "dropout"));

  double best_val = -1.0;
  TrainOutcome out;
  std::vector<std::vector<double>> best_values;
  int epochs_since_improvement = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    {
      Tape tape;
      Tape::Scope scope(tape);
      const Tensor logits = model.forward(ops, data.features, true, dropout_rng);
      const Tensor loss = softmax_cross_entropy(logits, data.labels, split.train);
      const double loss_value = loss.value()[0];
      if (!std::isfinite(loss_value))
        throw NumericalError("training loss became non-finite at epoch " + std::to_string(epoch));
      if (loss_log) loss_log->push_back(loss_value);
      for (const Tensor& p : params) p.zero_grad();
      tape.backward(loss);
    }
    adam_step(params, adam, cfg.lr, cfg.weight_decay);
    out.stopped_epoch = epoch;

    Rng eval_rng(0);  // evaluation consumes no randomness
    const Tensor eval_logits = model.forward(ops, data.features, false, eval_rng);
    const double val = evaluate(eval_logits, data.labels, split.val);
    if (val > best_val) {
      best_val = val;
      out.best_epoch = epoch;
      best_values.clear();
      for (const Tensor& p : params) best_values.push_back(p.value());
      epochs_since_improvement = 0;
    } else if (++epochs_since_improvement >= cfg.patience) {
      break;
    }
  }

  for (std::size_t i = 0; i < params.size(); ++i) params[i].value() = best_values[i];
  Rng eval_rng(0);
  const Tensor logits = model.forward(ops, data.features, false, eval_rng);
  out.val_accuracy = best_val;
  out.test_accuracy = evaluate(logits, data.labels, split.test);
  if (trained_out) *trained_out = model;  // carries the restored best-epoch parameters
  return out;
}

// ------------------------- multi-run aggregation -----------------------------

struct RunEntry {
  int split_index = 0;
  int repeat_index = 0;
  double test_accuracy = 0.0;
  double val_accuracy = 0.0;
  int best_epoch = 0;
};

struct RunResult {
  std::vector<RunEntry> runs;  // in (split, repeat) order
  double mean = 0.0;           // of test accuracies
  double stddev = 0.0;         // sample standard deviation (0 for one run)
  double val_mean = 0.0;
  double wall_seconds = 0.0;   // never serialized into result files
};

// Worker count: GFGN_THREADS when set, otherwise the hardware concurrency,
// never more than the number of jobs.
inline int worker_count(std::size_t jobs) {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char* env = std::getenv("GFGN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) n = static_cast<int>(v);
  }
  if (static_cast<std::size_t>(n) > jobs) n = static_cast<int>(jobs);
  return n < 1 ? 1 : n;
}

// Runs cfg.splits × cfg.repeats independent trainings. Splits are seeded from
// (seed, split index) unless the dataset ships a fixed split, in which case
// every slot uses it; run seeds derive from (seed, split index, repeat).
// Results land in deterministic (split, repeat) order however many worker
// threads execute them.
inline RunResult train_full(const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const GraphOps ops = GraphOps::build(data.graph, cfg.variant);

  std::vector<Split> splits;
  splits.reserve(static_cast<std::size_t>(cfg.splits));
  for (int s = 0; s < cfg.splits; ++s)
    splits.push_back(data.fixed_split ? *data.fixed_split
                                      : random_split(data.n(), derive_seed(cfg.seed, "split",
                                                                           static_cast<std::uint64_t>(s))));

  const std::size_t jobs = static_cast<std::size_t>(cfg.splits) * static_cast<std::size_t>(cfg.repeats);
  RunResult result;
  result.runs.resize(jobs);

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  const auto worker = [&]() {
    while (true) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs) return;
      {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (first_error) return;
      }
      const int split_index = static_cast<int>(j) / cfg.repeats;
      const int repeat_index = static_cast<int>(j) % cfg.repeats;
      try {
        const std::uint64_t run_seed =
            derive_seed(cfg.seed, "run", static_cast<std::uint64_t>(split_index),
                        static_cast<std::uint64_t>(repeat_index));
        const TrainOutcome outcome =
            train_one(data, ops, splits[static_cast<std::size_t>(split_index)], cfg, run_seed);
        RunEntry& entry = result.runs[j];
        entry.split_index = split_index;
        entry.repeat_index = repeat_index;
        entry.test_accuracy = outcome.test_accuracy;
        entry.val_accuracy = outcome.val_accuracy;
        entry.best_epoch = outcome.best_epoch;
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  const int workers = worker_count(jobs);
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  double sum = 0.0, val_sum = 0.0;
  for (const RunEntry& r : result.runs) {
    sum += r.test_accuracy;
    val_sum += r.val_accuracy;
  }
  result.mean = sum / static_cast<double>(jobs);
  result.val_mean = val_sum / static_cast<double>(jobs);
  if (jobs > 1) {
    double ss = 0.0;
    for (const RunEntry& r : result.runs) {
      const double d = r.test_accuracy - result.mean;
      ss += d * d;
    }
    result.stddev = std::sqrt(ss / static_cast<double>(jobs - 1));
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

// --------------------------------- sweeps ------------------------------------

struct SweepRow {
  TrainConfig config;
  RunResult result;
};

struct SweepResult {
  std::vector<SweepRow> rows;     // Cartesian order: lr, dropout, lambda, wd
  std::size_t best_index = 0;     // best mean validation accuracy, first wins ties
};

// Full Cartesian grid over the four tuned hyperparameters; every combination
// trains with the same split/repeat protocol, and the winner is the row with
// the highest mean validation accuracy (earlier rows win ties).
inline SweepResult sweep(const Dataset& data, const TrainConfig& base,
                         const std::vector<double>& lrs, const std::vector<double>& dropouts,
                         const std::vector<double>& lambdas,
                         const std::vector<double>& weight_decays) {
  if (lrs.empty() || dropouts.empty() || lambdas.empty() || weight_decays.empty())
    throw ConfigError("sweep: every grid dimension needs at least one value");
  SweepResult out;
  for (double lr : lrs)
    for (double dropout : dropouts)
      for (double lambda : lambdas)
        for (double wd : weight_decays) {
          TrainConfig cfg = base;
          cfg.lr = lr;
          cfg.dropout = dropout;
          cfg.lambda = lambda;
          cfg.weight_decay = wd;
          out.rows.push_back({cfg, train_full(data, cfg)});
        }
  for (std::size_t i = 1; i < out.rows.size(); ++i)
    if (out.rows[i].result.val_mean > out.rows[out.best_index].result.val_mean) out.best_index = i;
  return out;
}

}  // namespace gfgn
