#pragma once

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "gfgn/data.hpp"
#include "gfgn/error.hpp"
#include "gfgn/layers.hpp"
#include "gfgn/training.hpp"

namespace gfgn {

// ---------------------------------------------------------------------------
// Result-artifact plumbing: content hashing of dataset directories, atomic
// file writes, and the JSON/CSV serializers every subcommand shares. All
// output is deterministic: identical inputs produce byte-identical files.
// ---------------------------------------------------------------------------

// ------------------------------- hashing ------------------------------------

inline std::string sha1_hex(const void* data, std::size_t len) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int digest_len = 0;
  if (EVP_Digest(data, len, digest.data(), &digest_len, EVP_sha1(), nullptr) != 1)
    throw NumericalError("sha1: digest computation failed");
  static const char hex[] = "0123456789abcdef";
  std::string out(static_cast<std::size_t>(digest_len) * 2, '0');
  for (unsigned int i = 0; i < digest_len; ++i) {
    out[2 * i] = hex[digest[i] >> 4];
    out[2 * i + 1] = hex[digest[i] & 0xf];
  }
  return out;
}

// Hash of a byte string the way git hashes a blob: sha1("blob <len>\0" + bytes).
inline std::string git_blob_hash(const std::string& content) {
  std::string framed = "blob " + std::to_string(content.size());
  framed.push_back('\0');
  framed += content;
  return sha1_hex(framed.data(), framed.size());
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

// Content hash of a dataset directory: a manifest of per-file git blob hashes
// (fixed file order, only files present), itself hashed as a blob. Any edit
// to any dataset file changes the result.
inline std::string dataset_content_hash(const std::filesystem::path& directory) {
  static const char* const names[] = {"edges.tsv", "features.tsv", "labels.tsv", "meta.json",
                                      "splits.json"};
  std::string manifest;
  bool any = false;
  for (const char* name : names) {
    const std::filesystem::path p = directory / name;
    if (!std::filesystem::exists(p)) continue;
    manifest += git_blob_hash(read_file_bytes(p));
    manifest += "  ";
    manifest += name;
    manifest += '\n';
    any = true;
  }
  if (!any) throw DataError("no dataset files found in " + directory.string());
  return git_blob_hash(manifest);
}

// ----------------------------- atomic writes ---------------------------------

// Writes via a temp file in the same directory plus rename, so a crash never
// leaves a half-written artifact and re-runs replace files atomically.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  try {
    const fs::path dir = path.parent_path();
    if (!dir.empty()) fs::create_directories(dir);
    fs::path tmp = path;
    tmp += ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw DataError("cannot write " + tmp.string());
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      out.flush();
      if (!out) throw DataError("short write to " + tmp.string());
    }
    fs::rename(tmp, path);
  } catch (const std::filesystem::filesystem_error& e) {
    throw DataError("writing " + path.string() + ": " + e.what());
  }
}

// ------------------------------ formatting -----------------------------------

// Shortest decimal form that round-trips to the same double (CSV cells).
inline std::string fmt_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline const char* to_string(InitKind k) { return k == InitKind::glorot ? "glorot" : "identity"; }

inline InitKind parse_init(const std::string& name) {
  if (name == "glorot") return InitKind::glorot;
  if (name == "identity") return InitKind::identity;
  throw ConfigError("unknown init '" + name + "' (expected glorot or identity)");
}

inline const char* to_string(RowNormalize r) {
  switch (r) {
    case RowNormalize::automatic: return "auto";
    case RowNormalize::on: return "on";
    default: return "off";
  }
}

// ------------------------------ JSON pieces ----------------------------------

inline nlohmann::ordered_json dataset_json(const Dataset& d, const std::string& directory,
                                           const std::string& content_hash) {
  nlohmann::ordered_json j;
  j["name"] = d.name;
  j["directory"] = directory;
  j["content_hash"] = content_hash;
  j["nodes"] = d.n();
  j["undirected_edges"] = d.graph.num_undirected_edges();
  j["feature_dim"] = d.dim();
  j["classes"] = d.num_classes;
  j["synthetic"] = d.synthetic;
  j["fixed_split"] = d.fixed_split.has_value();
  return j;
}

inline nlohmann::ordered_json config_json(const TrainConfig& cfg) {
  nlohmann::ordered_json j;
  j["model"] = to_string(cfg.variant);
  j["lr"] = cfg.lr;
  j["dropout"] = cfg.dropout;
  j["lambda"] = cfg.lambda;
  j["weight_decay"] = cfg.weight_decay;
  j["epochs"] = cfg.epochs;
  j["patience"] = cfg.patience;
  j["heads"] = cfg.heads;
  j["units_per_head"] = cfg.units;
  j["hidden"] = cfg.heads * cfg.units;
  j["init"] = to_string(cfg.init);
  j["seed"] = cfg.seed;
  j["splits"] = cfg.splits;
  j["repeats"] = cfg.repeats;
  j["row_normalize"] = to_string(cfg.row_normalize);
  return j;
}

inline nlohmann::ordered_json optimizer_json() {
  nlohmann::ordered_json j;
  j["name"] = "adam";
  j["beta1"] = 0.9;
  j["beta2"] = 0.999;
  j["eps"] = 1e-8;
  return j;
}

// Per-run entries plus aggregates; wall time is deliberately absent so that
// identical invocations serialize byte-identically.
inline void append_result_fields(nlohmann::ordered_json& j, const RunResult& r) {
  nlohmann::ordered_json runs = nlohmann::ordered_json::array();
  for (const RunEntry& e : r.runs) {
    nlohmann::ordered_json run;
    run["split"] = e.split_index;
    run["repeat"] = e.repeat_index;
    run["test_accuracy"] = e.test_accuracy;
    run["val_accuracy"] = e.val_accuracy;
    run["best_epoch"] = e.best_epoch;
    runs.push_back(std::move(run));
  }
  j["runs"] = std::move(runs);
  j["mean"] = r.mean;
  j["std"] = r.stddev;
  j["val_mean"] = r.val_mean;
}

inline std::string train_results_json(const Dataset& d, const std::string& directory,
                                      const std::string& content_hash, const TrainConfig& cfg,
                                      const RunResult& result) {
  nlohmann::ordered_json j;
  j["command"] = "train";
  j["dataset"] = dataset_json(d, directory, content_hash);
  j["config"] = config_json(cfg);
  j["optimizer"] = optimizer_json();
  append_result_fields(j, result);
  return j.dump(2) + "\n";
}

inline std::string sweep_results_json(const Dataset& d, const std::string& directory,
                                      const std::string& content_hash, const TrainConfig& base,
                                      const std::vector<double>& lrs,
                                      const std::vector<double>& dropouts,
                                      const std::vector<double>& lambdas,
                                      const std::vector<double>& weight_decays,
                                      const SweepResult& sweep) {
  nlohmann::ordered_json j;
  j["command"] = "sweep";
  j["dataset"] = dataset_json(d, directory, content_hash);
  j["base_config"] = config_json(base);
  j["optimizer"] = optimizer_json();
  nlohmann::ordered_json grid;
  grid["lr"] = lrs;
  grid["dropout"] = dropouts;
  grid["lambda"] = lambdas;
  grid["weight_decay"] = weight_decays;
  j["grid"] = std::move(grid);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const SweepRow& row : sweep.rows) {
    nlohmann::ordered_json r;
    r["config"] = config_json(row.config);
    append_result_fields(r, row.result);
    rows.push_back(std::move(r));
  }
  j["rows"] = std::move(rows);
  j["best_index"] = sweep.best_index;
  j["best_config"] = config_json(sweep.rows[sweep.best_index].config);
  return j.dump(2) + "\n";
}

// ------------------------------- CSV pieces ----------------------------------

// Every CSV artifact opens with its generating config echoed as a single
// comment line, keeping artifacts self-describing.
inline std::string csv_prelude(const std::string& command, const nlohmann::ordered_json& config) {
  return "# gfgn " + command + "\n# config " + config.dump() + "\n";
}

// graph variant: one row per hidden dimension; neighbor: per (node, dim);
// pair: per (directed edge, dim).
inline std::string scores_csv(const ScoreRecord& rec, const nlohmann::ordered_json& config) {
  std::string out = csv_prelude("dump-scores", config);
  const Tensor& s = rec.values;
  switch (rec.variant) {
    case Variant::gfgn_graph:
      out += "dim,score\n";
      for (std::size_t c = 0; c < s.cols(); ++c)
        out += std::to_string(c) + "," + fmt_double(s.at(0, c)) + "\n";
      break;
    case Variant::gfgn_neighbor:
      out += "node,dim,score\n";
      for (std::size_t r = 0; r < s.rows(); ++r)
        for (std::size_t c = 0; c < s.cols(); ++c)
          out += std::to_string(r) + "," + std::to_string(c) + "," + fmt_double(s.at(r, c)) + "\n";
      break;
    case Variant::gfgn_pair:
      out += "src,dst,dim,score\n";
      for (std::size_t r = 0; r < s.rows(); ++r)
        for (std::size_t c = 0; c < s.cols(); ++c)
          out += std::to_string(rec.src[r]) + "," + std::to_string(rec.dst[r]) + "," +
                 std::to_string(c) + "," + fmt_double(s.at(r, c)) + "\n";
      break;
    default:
      throw ConfigError(std::string(to_string(rec.variant)) + " produces no gating scores");
  }
  return out;
}

struct SpectralRow {
  double eigenvalue = 0.0;
  double s = 0.0;
  int k = 0;
  double coefficient = 0.0;
  double residual = 0.0;  // max-norm gap between the applied filter and the
                          // eigendecomposition form, per eigenpair
};

inline std::string spectral_csv(const std::vector<SpectralRow>& rows,
                                const nlohmann::ordered_json& config) {
  std::string out = csv_prelude("spectral", config);
  out += "eigenvalue,s,K,coefficient,residual\n";
  for (const SpectralRow& r : rows)
    out += fmt_double(r.eigenvalue) + "," + fmt_double(r.s) + "," + std::to_string(r.k) + "," +
           fmt_double(r.coefficient) + "," + fmt_double(r.residual) + "\n";
  return out;
}

struct NoiseSweepRow {
  double ratio = 0.0;
  std::string model;
  double mean = 0.0;
  double stddev = 0.0;
};

inline std::string noise_sweep_csv(const std::vector<NoiseSweepRow>& rows,
                                   const nlohmann::ordered_json& config) {
  std::string out = csv_prelude("noise-sweep", config);
  out += "ratio,model,mean,std\n";
  for (const NoiseSweepRow& r : rows)
    out += fmt_double(r.ratio) + "," + r.model + "," + fmt_double(r.mean) + "," +
           fmt_double(r.stddev) + "\n";
  return out;
}

}  // namespace gfgn
