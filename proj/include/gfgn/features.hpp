#pragma once

#include <string>
#include <vector>

#include "gfgn/error.hpp"
#include "gfgn/rng.hpp"
#include "gfgn/tensor.hpp"

namespace gfgn {

// ---------------------------------------------------------------------------
// Node features in compressed sparse row form. Citation-style feature
// matrices are overwhelmingly zero, so the input projection works directly on
// stored nonzeros; results match the dense path exactly because accumulation
// visits columns in the same ascending order and skipped zeros contribute
// nothing.
// ---------------------------------------------------------------------------

struct FeatureMatrix {
  int rows = 0;
  int cols = 0;
  std::vector<int> offsets;   // rows + 1
  std::vector<int> col_idx;   // ascending within each row
  std::vector<double> values;

  static FeatureMatrix from_dense(const Tensor& t) {
    FeatureMatrix f;
    f.rows = static_cast<int>(t.rows());
    f.cols = static_cast<int>(t.cols());
    f.offsets.assign(t.rows() + 1, 0);
    for (std::size_t i = 0; i < t.rows(); ++i) {
      for (std::size_t j = 0; j < t.cols(); ++j)
        if (t.at(i, j) != 0.0) {
          f.col_idx.push_back(static_cast<int>(j));
          f.values.push_back(t.at(i, j));
        }
      f.offsets[i + 1] = static_cast<int>(f.col_idx.size());
    }
    return f;
  }

  Tensor to_dense() const {
    Tensor t(static_cast<std::size_t>(rows), static_cast<std::size_t>(cols), 0.0);
    for (int i = 0; i < rows; ++i)
      for (int e = offsets[i]; e < offsets[i + 1]; ++e)
        t.at(static_cast<std::size_t>(i), static_cast<std::size_t>(col_idx[e])) = values[e];
    return t;
  }

  std::size_t nnz() const { return values.size(); }

  // Scales every stored value in each row so the row sums of absolute values
  // are 1 (rows that are entirely zero stay zero).
  void l1_normalize_rows() {
    for (int i = 0; i < rows; ++i) {
      double norm = 0.0;
      for (int e = offsets[i]; e < offsets[i + 1]; ++e) norm += std::abs(values[e]);
      if (norm == 0.0) continue;
      for (int e = offsets[i]; e < offsets[i + 1]; ++e) values[e] /= norm;
    }
  }
};

// Inverted dropout over the stored nonzeros: one draw per stored entry, kept
// entries scaled by 1/(1-p). Zero entries of the logical matrix are untouched
// (dropping a zero is a no-op), so this matches dense dropout in value while
// consuming one stream position per nonzero.
inline FeatureMatrix feature_dropout(const FeatureMatrix& x, double p, bool training, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0))
    throw ConfigError("feature_dropout: rate must lie in [0, 1), got " + std::to_string(p));
  if (!training || p == 0.0) return x;
  FeatureMatrix out = x;
  const double keep_scale = 1.0 / (1.0 - p);
  for (double& v : out.values) v = rng.next_double() >= p ? v * keep_scale : 0.0;
  return out;
}

// Dense projection of sparse features: out = x * w, recorded on the tape with
// a gradient for w only (input features are observed data, never trained).
inline Tensor feature_project(const FeatureMatrix& x, const Tensor& w) {
  if (static_cast<std::size_t>(x.cols) != w.rows())
    throw DimensionError("feature_project: features are " + std::to_string(x.rows) + "x" +
                         std::to_string(x.cols) + " but weights are " + w.shape_str());
  const std::size_t n = w.cols();
  auto xp = std::make_shared<const FeatureMatrix>(x);
  Tensor out(static_cast<std::size_t>(x.rows), n, 0.0, w.requires_grad());
  {
    const double* wv = w.value().data();
    double* ov = out.value().data();
    for (int i = 0; i < x.rows; ++i) {
      double* orow = ov + static_cast<std::size_t>(i) * n;
      for (int e = x.offsets[i]; e < x.offsets[i + 1]; ++e) {
        const double xv = x.values[e];
        const double* wrow = wv + static_cast<std::size_t>(x.col_idx[e]) * n;
        for (std::size_t j = 0; j < n; ++j) orow[j] += xv * wrow[j];
      }
    }
  }
  detail::record_if_tracked("feature_project", out, [xp, w, out]() mutable {
    const std::size_t n = w.cols();
    std::vector<double>& wg = w.grad();
    const std::vector<double>& og = out.grad();
    for (int i = 0; i < xp->rows; ++i) {
      const double* orow = og.data() + static_cast<std::size_t>(i) * n;
      for (int e = xp->offsets[i]; e < xp->offsets[i + 1]; ++e) {
        const double xv = xp->values[e];
        double* wrow = wg.data() + static_cast<std::size_t>(xp->col_idx[e]) * n;
        for (std::size_t j = 0; j < n; ++j) wrow[j] += xv * orow[j];
      }
    }
  });
  return out;
}

}  // namespace gfgn
