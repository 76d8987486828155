#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "gfgn/error.hpp"
#include "gfgn/rng.hpp"
#include "gfgn/tensor.hpp"

namespace gfgn {

// ---------------------------------------------------------------------------
// Undirected simple graph in compressed sparse row form. The stored adjacency
// is canonical: symmetric, no self-edges, no duplicates, targets sorted within
// each row. deg_aug[i] = 1 + deg(i) is the degree after the implicit identity
// augmentation used by the normalized aggregation operator.
// ---------------------------------------------------------------------------

struct Graph {
  int n = 0;
  std::vector<int> offsets;        // size n + 1
  std::vector<int> targets;        // size 2 * |E|, sorted within each row
  std::vector<double> deg_aug;     // size n, deg_aug[i] = 1 + deg(i)

  int degree(int i) const { return offsets[i + 1] - offsets[i]; }
  std::size_t num_undirected_edges() const { return targets.size() / 2; }

  bool has_edge(int u, int v) const {
    const auto begin = targets.begin() + offsets[u];
    const auto end = targets.begin() + offsets[u + 1];
    return std::binary_search(begin, end, v);
  }
};

// Weighted sparse operator (same CSR layout, possibly with diagonal entries).
struct SparseOperator {
  int n = 0;
  std::vector<int> offsets;
  std::vector<int> targets;
  std::vector<double> weights;
};

using OpPtr = std::shared_ptr<const SparseOperator>;

// --------------------------- construction ----------------------------------

// Builds the canonical CSR graph from an edge list: validates endpoints,
// drops self-edges, symmetrizes, and deduplicates.
inline Graph load_edges(const std::vector<std::pair<int, int>>& edges, int n) {
  if (n < 0) throw DataError("load_edges: negative node count");
  std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const auto [u, v] = edges[e];
    if (u < 0 || u >= n || v < 0 || v >= n)
      throw DataError("load_edges: edge " + std::to_string(e) + " = (" + std::to_string(u) +
                      ", " + std::to_string(v) + ") out of range for " + std::to_string(n) +
                      " nodes");
    if (u == v) continue;  // self-edges are dropped; augmentation re-adds the diagonal
    adj[static_cast<std::size_t>(u)].insert(v);
    adj[static_cast<std::size_t>(v)].insert(u);
  }
  Graph g;
  g.n = n;
  g.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 0; i < n; ++i)
    g.offsets[static_cast<std::size_t>(i) + 1] =
        g.offsets[static_cast<std::size_t>(i)] + static_cast<int>(adj[static_cast<std::size_t>(i)].size());
  g.targets.reserve(static_cast<std::size_t>(g.offsets.back()));
  for (int i = 0; i < n; ++i)
    for (const int j : adj[static_cast<std::size_t>(i)]) g.targets.push_back(j);
  g.deg_aug.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) g.deg_aug[static_cast<std::size_t>(i)] = 1.0 + g.degree(i);
  return g;
}

// Parses an edge-list file: one "src<TAB>dst" pair per line, 0-indexed;
// blank lines and lines starting with '#' are ignored.
inline std::vector<std::pair<int, int>> parse_edge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  std::vector<std::pair<int, int>> edges;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    const char* p = line.c_str() + start;
    char* after = nullptr;
    const long u = std::strtol(p, &after, 10);
    if (after == p || *after != '\t')
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected 'src<TAB>dst', got '" + line + "'");
    p = after + 1;
    const long v = std::strtol(p, &after, 10);
    if (after == p)
      throw DataError(path + ":" + std::to_string(lineno) +
                      ": expected 'src<TAB>dst', got '" + line + "'");
    while (*after == ' ' || *after == '\t') ++after;
    if (*after != '\0')
      throw DataError(path + ":" + std::to_string(lineno) + ": trailing characters in '" + line +
                      "'");
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
  }
  return edges;
}

inline Graph load_edges_file(const std::string& path, int n) {
  const auto edges = parse_edge_file(path);
  try {
    return load_edges(edges, n);
  } catch (const DataError& err) {
    throw DataError(path + ": " + err.what());
  }
}

// ----------------------------- operators -----------------------------------

// Symmetrically normalized adjacency with identity augmentation: entry (i, j)
// is 1 / sqrt(deg_aug(i) * deg_aug(j)) for j adjacent to i or j = i.
inline SparseOperator normalized_adjacency(const Graph& g) {
  SparseOperator op;
  op.n = g.n;
  op.offsets.assign(static_cast<std::size_t>(g.n) + 1, 0);
  for (int i = 0; i < g.n; ++i)
    op.offsets[static_cast<std::size_t>(i) + 1] =
        op.offsets[static_cast<std::size_t>(i)] + g.degree(i) + 1;  // +1: diagonal
  op.targets.reserve(static_cast<std::size_t>(op.offsets.back()));
  op.weights.reserve(static_cast<std::size_t>(op.offsets.back()));
  for (int i = 0; i < g.n; ++i) {
    const double di = g.deg_aug[static_cast<std::size_t>(i)];
    bool diag_done = false;
    for (int e = g.offsets[static_cast<std::size_t>(i)]; e < g.offsets[static_cast<std::size_t>(i) + 1]; ++e) {
      const int j = g.targets[static_cast<std::size_t>(e)];
      if (!diag_done && i < j) {
        op.targets.push_back(i);
        op.weights.push_back(1.0 / di);
        diag_done = true;
      }
      op.targets.push_back(j);
      op.weights.push_back(1.0 / std::sqrt(di * g.deg_aug[static_cast<std::size_t>(j)]));
    }
    if (!diag_done) {
      op.targets.push_back(i);
      op.weights.push_back(1.0 / di);
    }
  }
  return op;
}

// Symmetrically normalized Laplacian. With self_loops = true this is
// I - normalized_adjacency (augmented degrees). With self_loops = false it is
// I - D^{-1/2} A D^{-1/2} over raw degrees, except that an isolated node uses
// a sentinel degree of 1 and takes a zero diagonal, keeping the spectrum in
// [0, 2] and leaving constant signals on isolated nodes unpenalized.
inline SparseOperator normalized_laplacian(const Graph& g, bool self_loops) {
  SparseOperator op;
  op.n = g.n;
  op.offsets.assign(static_cast<std::size_t>(g.n) + 1, 0);
  for (int i = 0; i < g.n; ++i)
    op.offsets[static_cast<std::size_t>(i) + 1] =
        op.offsets[static_cast<std::size_t>(i)] + g.degree(i) + 1;
  const std::size_t total = static_cast<std::size_t>(op.offsets.back());
  op.targets.reserve(total);
  op.weights.reserve(total);
  for (int i = 0; i < g.n; ++i) {
    const bool isolated = g.degree(i) == 0;
    const double di = self_loops ? g.deg_aug[static_cast<std::size_t>(i)]
                                 : (isolated ? 1.0 : static_cast<double>(g.degree(i)));
    const double diag = self_loops ? 1.0 - 1.0 / di : (isolated ? 0.0 : 1.0);
    bool diag_done = false;
    for (int e = g.offsets[static_cast<std::size_t>(i)]; e < g.offsets[static_cast<std::size_t>(i) + 1]; ++e) {
      const int j = g.targets[static_cast<std::size_t>(e)];
      if (!diag_done && i < j) {
        op.targets.push_back(i);
        op.weights.push_back(diag);
        diag_done = true;
      }
      const double dj = self_loops ? g.deg_aug[static_cast<std::size_t>(j)]
                                   : static_cast<double>(g.degree(j));
      op.targets.push_back(j);
      op.weights.push_back(-1.0 / std::sqrt(di * dj));
    }
    if (!diag_done) {
      op.targets.push_back(i);
      op.weights.push_back(diag);
    }
  }
  return op;
}

// Row-normalized augmented adjacency: entry (i, j) = 1 / deg_aug(i) for
// j in the closed neighborhood of i. Applying it to node features yields the
// mean over the closed neighborhood.
inline SparseOperator neighborhood_mean_operator(const Graph& g) {
  SparseOperator op = normalized_adjacency(g);
  for (int i = 0; i < g.n; ++i) {
    const double inv = 1.0 / g.deg_aug[static_cast<std::size_t>(i)];
    for (int e = op.offsets[static_cast<std::size_t>(i)]; e < op.offsets[static_cast<std::size_t>(i) + 1]; ++e)
      op.weights[static_cast<std::size_t>(e)] = inv;
  }
  return op;
}

// Dense copy of a sparse operator (test and spectral-analysis use).
inline Tensor dense(const SparseOperator& op) {
  Tensor out(static_cast<std::size_t>(op.n), static_cast<std::size_t>(op.n), 0.0);
  for (int i = 0; i < op.n; ++i)
    for (int e = op.offsets[static_cast<std::size_t>(i)]; e < op.offsets[static_cast<std::size_t>(i) + 1]; ++e)
      out.at(static_cast<std::size_t>(i), static_cast<std::size_t>(op.targets[static_cast<std::size_t>(e)])) =
          op.weights[static_cast<std::size_t>(e)];
  return out;
}

// ------------------------------- spmm ---------------------------------------

// Sparse-times-dense product on the autodiff tape: out = op * h. The backward
// pass applies the transpose, iterating rows in the same fixed order, so both
// directions are bitwise deterministic.
inline Tensor spmm(const OpPtr& op, const Tensor& h) {
  if (static_cast<std::size_t>(op->n) != h.rows())
    throw DimensionError("spmm: operator is " + std::to_string(op->n) + "x" +
                         std::to_string(op->n) + " but dense input is " + h.shape_str());
  const std::size_t n = h.cols();
  Tensor out(static_cast<std::size_t>(op->n), n, 0.0, h.requires_grad());
  {
    const double* hv = h.value().data();
    double* ov = out.value().data();
    for (int i = 0; i < op->n; ++i) {
      double* orow = ov + static_cast<std::size_t>(i) * n;
      for (int e = op->offsets[static_cast<std::size_t>(i)]; e < op->offsets[static_cast<std::size_t>(i) + 1]; ++e) {
        const double w = op->weights[static_cast<std::size_t>(e)];
        const double* hrow = hv + static_cast<std::size_t>(op->targets[static_cast<std::size_t>(e)]) * n;
        for (std::size_t j = 0; j < n; ++j) orow[j] += w * hrow[j];
      }
    }
  }
  detail::record_if_tracked("spmm", out, [op, h, out]() mutable {
    const std::size_t n = h.cols();
    std::vector<double>& hg = h.grad();
    const std::vector<double>& og = out.grad();
    for (int i = 0; i < op->n; ++i) {
      const double* orow = og.data() + static_cast<std::size_t>(i) * n;
      for (int e = op->offsets[static_cast<std::size_t>(i)]; e < op->offsets[static_cast<std::size_t>(i) + 1]; ++e) {
        const double w = op->weights[static_cast<std::size_t>(e)];
        double* hrow = hg.data() + static_cast<std::size_t>(op->targets[static_cast<std::size_t>(e)]) * n;
        for (std::size_t j = 0; j < n; ++j) hrow[j] += w * orow[j];
      }
    }
  });
  return out;
}

inline Tensor spmm(const SparseOperator& op, const Tensor& h) {
  return spmm(std::make_shared<const SparseOperator>(op), h);
}

// Plain (tape-free) sparse matrix-vector product.
inline std::vector<double> spmv(const SparseOperator& op, const std::vector<double>& x) {
  if (x.size() != static_cast<std::size_t>(op.n))
    throw DimensionError("spmv: operator is " + std::to_string(op.n) + "x" +
                         std::to_string(op.n) + " but vector has " + std::to_string(x.size()) +
                         " entries");
  std::vector<double> y(static_cast<std::size_t>(op.n), 0.0);
  for (int i = 0; i < op.n; ++i)
    for (int e = op.offsets[static_cast<std::size_t>(i)]; e < op.offsets[static_cast<std::size_t>(i) + 1]; ++e)
      y[static_cast<std::size_t>(i)] +=
          op.weights[static_cast<std::size_t>(e)] * x[static_cast<std::size_t>(op.targets[static_cast<std::size_t>(e)])];
  return y;
}

// --------------------------- noise injection --------------------------------

// Adds round(ratio * |E|) uniformly random absent edges (half-up rounding).
// Sampling is rejection-based over node pairs, so the result depends only on
// the seed, never on iteration order of any container.
inline Graph add_random_edges(const Graph& g, double ratio, std::uint64_t seed) {
  if (ratio < 0.0) throw ConfigError("add_random_edges: negative ratio");
  const std::size_t existing = g.num_undirected_edges();
  const std::size_t to_add =
      static_cast<std::size_t>(std::floor(ratio * static_cast<double>(existing) + 0.5));
  const std::size_t max_pairs =
      static_cast<std::size_t>(g.n) * (static_cast<std::size_t>(g.n) - 1) / 2;
  if (existing + to_add > max_pairs)
    throw ConfigError("add_random_edges: cannot add " + std::to_string(to_add) +
                      " edges; only " + std::to_string(max_pairs - existing) +
                      " absent pairs exist");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(existing + to_add);
  for (int i = 0; i < g.n; ++i)
    for (int e = g.offsets[static_cast<std::size_t>(i)]; e < g.offsets[static_cast<std::size_t>(i) + 1]; ++e) {
      const int j = g.targets[static_cast<std::size_t>(e)];
      if (i < j) edges.emplace_back(i, j);
    }
  Rng rng(seed);
  std::set<std::pair<int, int>> added;
  while (added.size() < to_add) {
    int u = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.n)));
    int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(g.n)));
    if (u == v) continue;
    if (u > v) std::swap(u, v);
    if (g.has_edge(u, v)) continue;
    if (!added.emplace(u, v).second) continue;
    edges.emplace_back(u, v);
  }
  return load_edges(edges, g.n);
}

// ------------------------------ homophily -----------------------------------

// Fraction of undirected edges whose endpoints share a label.
// Returns 0 for an edgeless graph (the fraction is undefined there).
inline double edge_homophily(const Graph& g, const std::vector<int>& labels) {
  if (labels.size() != static_cast<std::size_t>(g.n))
    throw DimensionError("edge_homophily: " + std::to_string(labels.size()) + " labels for " +
                         std::to_string(g.n) + " nodes");
  std::size_t same = 0, total = 0;
  for (int i = 0; i < g.n; ++i)
    for (int e = g.offsets[static_cast<std::size_t>(i)]; e < g.offsets[static_cast<std::size_t>(i) + 1]; ++e) {
      const int j = g.targets[static_cast<std::size_t>(e)];
      if (i < j) {
        ++total;
        same += labels[static_cast<std::size_t>(i)] == labels[static_cast<std::size_t>(j)];
      }
    }
  return total == 0 ? 0.0 : static_cast<double>(same) / static_cast<double>(total);
}

// Deterministic induced subgraph for spectral analysis on large graphs:
// breadth-first from the highest-degree node (ties to the smaller id) until
// max_nodes nodes are collected; node ids are relabeled in visit order.
inline Graph induced_subgraph_bfs(const Graph& g, int max_nodes, std::vector<int>* kept = nullptr) {
  if (max_nodes <= 0) throw ConfigError("induced_subgraph_bfs: max_nodes must be positive");
  if (g.n <= max_nodes) {
    if (kept) {
      kept->resize(static_cast<std::size_t>(g.n));
      for (int i = 0; i < g.n; ++i) (*kept)[static_cast<std::size_t>(i)] = i;
    }
    return g;
  }
  int start = 0;
  for (int i = 1; i < g.n; ++i)
    if (g.degree(i) > g.degree(start)) start = i;
  std::vector<int> order;
  std::vector<int> newid(static_cast<std::size_t>(g.n), -1);
  std::vector<int> queue{start};
  newid[static_cast<std::size_t>(start)] = 0;
  order.push_back(start);
  for (std::size_t head = 0; head < queue.size() && order.size() < static_cast<std::size_t>(max_nodes); ++head) {
    const int u = queue[head];
    for (int e = g.offsets[static_cast<std::size_t>(u)]; e < g.offsets[static_cast<std::size_t>(u) + 1]; ++e) {
      const int v = g.targets[static_cast<std::size_t>(e)];
      if (newid[static_cast<std::size_t>(v)] != -1) continue;
      newid[static_cast<std::size_t>(v)] = static_cast<int>(order.size());
      order.push_back(v);
      queue.push_back(v);
      if (order.size() == static_cast<std::size_t>(max_nodes)) break;
    }
    // If BFS exhausts a component early, seed the next unvisited node.
    if (head + 1 == queue.size() && order.size() < static_cast<std::size_t>(max_nodes)) {
      for (int v = 0; v < g.n; ++v)
        if (newid[static_cast<std::size_t>(v)] == -1) {
          newid[static_cast<std::size_t>(v)] = static_cast<int>(order.size());
          order.push_back(v);
          queue.push_back(v);
          break;
        }
    }
  }
  std::vector<std::pair<int, int>> edges;
  for (const int u : order)
    for (int e = g.offsets[static_cast<std::size_t>(u)]; e < g.offsets[static_cast<std::size_t>(u) + 1]; ++e) {
      const int v = g.targets[static_cast<std::size_t>(e)];
      if (newid[static_cast<std::size_t>(v)] != -1 && u < v)
        edges.emplace_back(newid[static_cast<std::size_t>(u)], newid[static_cast<std::size_t>(v)]);
    }
  if (kept) *kept = order;
  return load_edges(edges, max_nodes);
}

}  // namespace gfgn
