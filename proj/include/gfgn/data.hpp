#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <numeric>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "gfgn/error.hpp"
#include "gfgn/features.hpp"
#include "gfgn/graph.hpp"
#include "gfgn/rng.hpp"
#include "gfgn/tensor.hpp"

namespace gfgn {

// ---------------------------------------------------------------------------
// Dataset ingestion and generation. On-disk layout of a dataset directory:
//   edges.tsv     one "src<TAB>dst" pair per line ('#' comments allowed)
//   features.tsv  n rows of D tab-separated decimals
//   labels.tsv    one class index per line
//   meta.json     optional: {"name": ..., "synthetic": bool}
//   splits.json   optional: {"train": [...], "val": [...], "test": [...]}
// ---------------------------------------------------------------------------

struct Split {
  std::vector<int> train, val, test;
};

struct Dataset {
  Graph graph;
  FeatureMatrix features;
  std::vector<int> labels;
  int num_classes = 0;
  std::string name;
  bool synthetic = false;
  std::optional<Split> fixed_split;  // from splits.json when present

  int n() const { return graph.n; }
  int dim() const { return features.cols; }

  void validate() const {
    if (features.rows != graph.n)
      throw DataError("dataset '" + name + "': " + std::to_string(features.rows) +
                      " feature rows for " + std::to_string(graph.n) + " nodes");
    if (static_cast<int>(labels.size()) != graph.n)
      throw DataError("dataset '" + name + "': " + std::to_string(labels.size()) +
                      " labels for " + std::to_string(graph.n) + " nodes");
    if (num_classes < 2) throw DataError("dataset '" + name + "': needs at least 2 classes");
    std::vector<bool> seen(static_cast<std::size_t>(num_classes), false);
    for (std::size_t i = 0; i < labels.size(); ++i) {
      const int l = labels[i];
      if (l < 0 || l >= num_classes)
        throw DataError("dataset '" + name + "': label " + std::to_string(l) + " of node " +
                        std::to_string(i) + " outside [0, " + std::to_string(num_classes) + ")");
      seen[static_cast<std::size_t>(l)] = true;
    }
    for (int c = 0; c < num_classes; ++c)
      if (!seen[static_cast<std::size_t>(c)])
        throw DataError("dataset '" + name + "': class " + std::to_string(c) +
                        " has no nodes");
  }
};

enum class RowNormalize { automatic, on, off };

inline RowNormalize parse_row_normalize(const std::string& s) {
  if (s == "auto") return RowNormalize::automatic;
  if (s == "on") return RowNormalize::on;
  if (s == "off") return RowNormalize::off;
  throw ConfigError("row-normalize must be auto, on, or off, got '" + s + "'");
}

namespace detail {

inline std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path.string() + ": cannot open");
  return in;
}

inline void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

// Parses one row of tab-separated decimals; complains with file:line context.
inline void parse_double_row(const std::string& line, const std::string& where,
                             std::vector<double>& out) {
  out.clear();
  const char* p = line.c_str();
  while (true) {
    char* end = nullptr;
    const double v = std::strtod(p, &end);
    if (end == p) throw DataError(where + ": expected a number, got '" + std::string(p) + "'");
    out.push_back(v);
    p = end;
    if (*p == '\0') break;
    if (*p != '\t') throw DataError(where + ": expected a tab separator, got '" +
                                    std::string(1, *p) + "'");
    ++p;
  }
}

inline FeatureMatrix read_features_tsv(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  FeatureMatrix f;
  f.offsets.push_back(0);
  std::string line;
  std::vector<double> row;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    parse_double_row(line, path.string() + ":" + std::to_string(lineno), row);
    if (f.rows == 0) {
      f.cols = static_cast<int>(row.size());
    } else if (static_cast<int>(row.size()) != f.cols) {
      throw DataError(path.string() + ":" + std::to_string(lineno) + ": row has " +
                      std::to_string(row.size()) + " columns, expected " + std::to_string(f.cols));
    }
    for (std::size_t j = 0; j < row.size(); ++j)
      if (row[j] != 0.0) {
        f.col_idx.push_back(static_cast<int>(j));
        f.values.push_back(row[j]);
      }
    ++f.rows;
    f.offsets.push_back(static_cast<int>(f.col_idx.size()));
  }
  if (f.rows == 0) throw DataError(path.string() + ": no feature rows");
  return f;
}

inline std::vector<int> read_labels_tsv(const std::filesystem::path& path) {
  std::ifstream in = open_or_throw(path);
  std::vector<int> labels;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    if (line.empty()) continue;
    char* end = nullptr;
    const long v = std::strtol(line.c_str(), &end, 10);
    if (end == line.c_str() || *end != '\0')
      throw DataError(path.string() + ":" + std::to_string(lineno) +
                      ": expected a class index, got '" + line + "'");
    labels.push_back(static_cast<int>(v));
  }
  if (labels.empty()) throw DataError(path.string() + ": no labels");
  return labels;
}

inline std::vector<int> read_index_array(const nlohmann::json& j, const std::string& key,
                                         int n, const std::string& where) {
  if (!j.contains(key) || !j[key].is_array())
    throw DataError(where + ": missing index array '" + key + "'");
  std::vector<int> out;
  for (const auto& v : j[key]) {
    if (!v.is_number_integer()) throw DataError(where + ": non-integer index in '" + key + "'");
    const int idx = v.get<int>();
    if (idx < 0 || idx >= n)
      throw DataError(where + ": index " + std::to_string(idx) + " in '" + key +
                      "' outside [0, " + std::to_string(n) + ")");
    out.push_back(idx);
  }
  if (out.empty()) throw DataError(where + ": '" + key + "' is empty");
  return out;
}

}  // namespace detail

inline void validate_split(const Split& s, int n, const std::string& where) {
  std::vector<int> mark(static_cast<std::size_t>(n), 0);
  for (const std::vector<int>* part : {&s.train, &s.val, &s.test}) {
    if (part->empty()) throw DataError(where + ": empty split part");
    for (int idx : *part) {
      if (idx < 0 || idx >= n)
        throw DataError(where + ": index " + std::to_string(idx) + " outside [0, " +
                        std::to_string(n) + ")");
      if (mark[static_cast<std::size_t>(idx)]++)
        throw DataError(where + ": node " + std::to_string(idx) +
                        " appears in more than one split part");
    }
  }
}

inline Dataset load_dataset(const std::string& directory,
                            RowNormalize normalize = RowNormalize::automatic) {
  namespace fs = std::filesystem;
  const fs::path dir(directory);
  if (!fs::is_directory(dir)) throw DataError(directory + ": not a dataset directory");

  Dataset d;
  d.name = dir.filename().string().empty() ? dir.parent_path().filename().string()
                                           : dir.filename().string();
  const fs::path meta_path = dir / "meta.json";
  if (fs::exists(meta_path)) {
    std::ifstream in = detail::open_or_throw(meta_path);
    nlohmann::json meta;
    try {
      in >> meta;
    } catch (const nlohmann::json::exception& e) {
      throw DataError(meta_path.string() + ": " + e.what());
    }
    if (meta.contains("name") && meta["name"].is_string()) d.name = meta["name"].get<std::string>();
    if (meta.contains("synthetic") && meta["synthetic"].is_boolean())
      d.synthetic = meta["synthetic"].get<bool>();
  }

  d.features = detail::read_features_tsv(dir / "features.tsv");
  d.labels = detail::read_labels_tsv(dir / "labels.tsv");
  if (static_cast<int>(d.labels.size()) != d.features.rows)
    throw DataError(directory + ": " + std::to_string(d.labels.size()) + " labels for " +
                    std::to_string(d.features.rows) + " feature rows");
  const int n = d.features.rows;
  d.graph = load_edges_file((dir / "edges.tsv").string(), n);

  int max_label = -1;
  for (int l : d.labels) max_label = std::max(max_label, l);
  d.num_classes = max_label + 1;

  const bool do_normalize =
      normalize == RowNormalize::on || (normalize == RowNormalize::automatic && !d.synthetic);
  if (do_normalize) d.features.l1_normalize_rows();

  const fs::path splits_path = dir / "splits.json";
  if (fs::exists(splits_path)) {
    std::ifstream in = detail::open_or_throw(splits_path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw DataError(splits_path.string() + ": " + e.what());
    }
    Split s;
    s.train = detail::read_index_array(j, "train", n, splits_path.string());
    s.val = detail::read_index_array(j, "val", n, splits_path.string());
    s.test = detail::read_index_array(j, "test", n, splits_path.string());
    validate_split(s, n, splits_path.string());
    d.fixed_split = std::move(s);
  }

  d.validate();
  return d;
}

// Writes the on-disk layout documented above; %.17g keeps doubles bit-exact
// through a write/load round trip (load with normalization off).
inline void write_dataset(const Dataset& d, const std::string& directory) {
  namespace fs = std::filesystem;
  const fs::path dir(directory);
  fs::create_directories(dir);

  {
    std::ofstream out(dir / "edges.tsv");
    if (!out) throw DataError((dir / "edges.tsv").string() + ": cannot write");
    for (int u = 0; u < d.graph.n; ++u)
      for (int e = d.graph.offsets[u]; e < d.graph.offsets[u + 1]; ++e) {
        const int v = d.graph.targets[e];
        if (u < v) out << u << '\t' << v << '\n';
      }
  }
  {
    std::ofstream out(dir / "features.tsv");
    if (!out) throw DataError((dir / "features.tsv").string() + ": cannot write");
    char buf[32];
    std::vector<double> row(static_cast<std::size_t>(d.features.cols));
    for (int i = 0; i < d.features.rows; ++i) {
      std::fill(row.begin(), row.end(), 0.0);
      for (int e = d.features.offsets[i]; e < d.features.offsets[i + 1]; ++e)
        row[static_cast<std::size_t>(d.features.col_idx[e])] = d.features.values[e];
      for (std::size_t j = 0; j < row.size(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", row[j]);
        if (j) out << '\t';
        out << buf;
      }
      out << '\n';
    }
  }
  {
    std::ofstream out(dir / "labels.tsv");
    if (!out) throw DataError((dir / "labels.tsv").string() + ": cannot write");
    for (int l : d.labels) out << l << '\n';
  }
  {
    nlohmann::ordered_json meta;
    meta["name"] = d.name;
    meta["synthetic"] = d.synthetic;
    std::ofstream out(dir / "meta.json");
    if (!out) throw DataError((dir / "meta.json").string() + ": cannot write");
    out << meta.dump(2) << '\n';
  }
  if (d.fixed_split) {
    nlohmann::ordered_json j;
    j["train"] = d.fixed_split->train;
    j["val"] = d.fixed_split->val;
    j["test"] = d.fixed_split->test;
    std::ofstream out(dir / "splits.json");
    if (!out) throw DataError((dir / "splits.json").string() + ": cannot write");
    out << j.dump(2) << '\n';
  }
}

// ------------------------------ random splits -------------------------------

// Seeded shuffle, then contiguous slices with floored cumulative boundaries:
// train gets [0, floor(r0 n)), val gets [floor(r0 n), floor((r0+r1) n)), and
// the remainder is the test set (183 nodes at 48/32/20 -> 87/59/37).
inline Split random_split(int n, std::uint64_t seed,
                          const std::array<double, 3>& ratios = {0.48, 0.32, 0.20}) {
  for (double r : ratios)
    if (r <= 0.0) throw ConfigError("random_split: ratios must be positive");
  if (std::abs(ratios[0] + ratios[1] + ratios[2] - 1.0) > 1e-9)
    throw ConfigError("random_split: ratios must sum to 1");
  const int b1 = static_cast<int>(std::floor(ratios[0] * n));
  const int b2 = static_cast<int>(std::floor((ratios[0] + ratios[1]) * n));
  if (b1 < 1 || b2 - b1 < 1 || n - b2 < 1)
    throw ConfigError("random_split: n=" + std::to_string(n) +
                      " is too small for three nonempty parts at these ratios");

  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (int i = n - 1; i > 0; --i)
    std::swap(order[static_cast<std::size_t>(i)],
              order[rng.below(static_cast<std::uint64_t>(i) + 1)]);

  Split s;
  s.train.assign(order.begin(), order.begin() + b1);
  s.val.assign(order.begin() + b1, order.begin() + b2);
  s.test.assign(order.begin() + b2, order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

// --------------------------- synthetic generator ----------------------------

// Stochastic block model with per-dimension label signal: nodes get uniform
// labels; same-label pairs connect with probability p_in, different-label
// pairs with p_out; each homophilous feature dimension is assigned one class
// (cyclically) and adds +signal_strength to that class's nodes on top of unit
// Gaussian noise; all other dimensions are pure noise.
struct SynthSpec {
  int n = 400;
  int num_classes = 4;
  int dim = 16;
  std::vector<int> homophilous_dims;
  double p_in = 0.05;
  double p_out = 0.005;
  double signal_strength = 1.0;
  std::uint64_t seed = 0;
  std::string name = "synthetic";

  void validate() const {
    if (n < 2 || num_classes < 2 || dim < 1)
      throw ConfigError("SynthSpec: need n >= 2, num_classes >= 2, dim >= 1");
    if (!(0.0 <= p_out && p_out < p_in && p_in <= 1.0))
      throw ConfigError("SynthSpec: need 0 <= p_out < p_in <= 1");
    if (signal_strength < 0.0) throw ConfigError("SynthSpec: signal_strength must be >= 0");
    std::vector<bool> seen(static_cast<std::size_t>(dim), false);
    for (int d : homophilous_dims) {
      if (d < 0 || d >= dim)
        throw ConfigError("SynthSpec: homophilous dim " + std::to_string(d) + " outside [0, " +
                          std::to_string(dim) + ")");
      if (seen[static_cast<std::size_t>(d)])
        throw ConfigError("SynthSpec: homophilous dim " + std::to_string(d) + " listed twice");
      seen[static_cast<std::size_t>(d)] = true;
    }
  }
};

inline Dataset generate_synthetic(const SynthSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);

  std::vector<int> labels(static_cast<std::size_t>(spec.n));
  for (int& l : labels) l = static_cast<int>(rng.below(static_cast<std::uint64_t>(spec.num_classes)));

  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < spec.n; ++u)
    for (int v = u + 1; v < spec.n; ++v) {
      const double p = labels[static_cast<std::size_t>(u)] == labels[static_cast<std::size_t>(v)]
                           ? spec.p_in
                           : spec.p_out;
      if (rng.next_double() < p) edges.emplace_back(u, v);
    }

  // dimension -> class assignment for the homophilous dims, cyclic over
  // classes in listed order
  std::vector<int> dim_class(static_cast<std::size_t>(spec.dim), -1);
  for (std::size_t k = 0; k < spec.homophilous_dims.size(); ++k)
    dim_class[static_cast<std::size_t>(spec.homophilous_dims[k])] =
        static_cast<int>(k % static_cast<std::size_t>(spec.num_classes));

  Tensor x(static_cast<std::size_t>(spec.n), static_cast<std::size_t>(spec.dim));
  for (int i = 0; i < spec.n; ++i)
    for (int j = 0; j < spec.dim; ++j) {
      double v = rng.normal();
      if (dim_class[static_cast<std::size_t>(j)] == labels[static_cast<std::size_t>(i)])
        v += spec.signal_strength;
      x.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = v;
    }

  Dataset d;
  d.graph = load_edges(edges, spec.n);
  d.features = FeatureMatrix::from_dense(x);
  d.labels = std::move(labels);
  d.num_classes = spec.num_classes;
  d.name = spec.name;
  d.synthetic = true;
  return d;
}

inline SynthSpec parse_synth_spec(const std::string& path) {
  std::ifstream in = detail::open_or_throw(path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  SynthSpec spec;
  try {
    if (j.contains("n")) spec.n = j["n"].get<int>();
    if (j.contains("num_classes")) spec.num_classes = j["num_classes"].get<int>();
    if (j.contains("dim")) spec.dim = j["dim"].get<int>();
    if (j.contains("homophilous_dims"))
      spec.homophilous_dims = j["homophilous_dims"].get<std::vector<int>>();
    if (j.contains("p_in")) spec.p_in = j["p_in"].get<double>();
    if (j.contains("p_out")) spec.p_out = j["p_out"].get<double>();
    if (j.contains("signal_strength")) spec.signal_strength = j["signal_strength"].get<double>();
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("name")) spec.name = j["name"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  spec.validate();
  return spec;
}

}  // namespace gfgn
