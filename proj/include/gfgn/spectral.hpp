#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "gfgn/error.hpp"
#include "gfgn/graph.hpp"
#include "gfgn/tensor.hpp"

namespace gfgn {

// ---------------------------------------------------------------------------
// Spectral analysis of normalized Laplacians: a full symmetric eigensolve via
// cyclic Jacobi rotations, and the frequency response (1 - s*lambda)^K of the
// K-fold gated aggregation filter (I - s L)^K.
// ---------------------------------------------------------------------------

struct EigenDecomposition {
  std::vector<double> eigenvalues;  // ascending
  Tensor eigenvectors;              // column k pairs with eigenvalues[k]
};

// Cyclic Jacobi eigensolver for symmetric matrices. Sweeps rotate out every
// off-diagonal entry in a fixed (p, q) order until the off-diagonal Frobenius
// norm falls below 1e-12; more than 100 sweeps raises NumericalError.
// Asymmetric input (beyond 1e-10) is rejected.
inline EigenDecomposition eig_symmetric(const Tensor& m) {
  if (m.rows() != m.cols())
    throw DimensionError("eig_symmetric: matrix must be square, got " + m.shape_str());
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(m.at(i, j) - m.at(j, i)) > 1e-10)
        throw DimensionError("eig_symmetric: input not symmetric at (" + std::to_string(i) +
                             ", " + std::to_string(j) + ")");

  std::vector<double> a = m.value();
  Tensor v = identity_matrix(n);
  const auto off_norm = [&]() {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) acc += a[i * n + j] * a[i * n + j];
    return std::sqrt(acc);
  };

  bool converged = off_norm() < 1e-12;
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a[p * n + q];
        if (apq == 0.0) continue;
        const double tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
        const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {  // rotate rows/cols p and q
          const double akp = a[k * n + p], akq = a[k * n + q];
          a[k * n + p] = c * akp - s * akq;
          a[k * n + q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p * n + k], aqk = a[q * n + k];
          a[p * n + k] = c * apk - s * aqk;
          a[q * n + k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {  // accumulate eigenvectors
          const double vkp = v.at(k, p), vkq = v.at(k, q);
          v.at(k, p) = c * vkp - s * vkq;
          v.at(k, q) = s * vkp + c * vkq;
        }
      }
    converged = off_norm() < 1e-12;
  }
  if (!converged)
    throw NumericalError("eig_symmetric: no convergence within 100 Jacobi sweeps");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a[x * n + x] < a[y * n + y]; });
  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = Tensor(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a[order[k] * n + order[k]];
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors.at(i, k) = v.at(i, order[k]);
  }
  return out;
}

// Frequency response of the K-fold gated aggregation: (1 - s*lambda)^K
// evaluated at each eigenvalue. K = 0 gives the all-pass response.
inline std::vector<double> filter_coefficients(const std::vector<double>& eigenvalues, double s,
                                               int k) {
  if (k < 0) throw ConfigError("filter_coefficients: K must be >= 0");
  std::vector<double> out(eigenvalues.size());
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const double base = 1.0 - s * eigenvalues[i];
    double acc = 1.0;
    for (int rep = 0; rep < k; ++rep) acc *= base;
    out[i] = acc;
  }
  return out;
}

// Applies (I - s L)^K to a dense signal without eigendecomposition.
inline Tensor polynomial_filter_apply(const SparseOperator& l, const Tensor& h, double s, int k) {
  if (k < 0) throw ConfigError("polynomial_filter_apply: K must be >= 0");
  if (h.rows() != static_cast<std::size_t>(l.n))
    throw DimensionError("polynomial_filter_apply: operator is " + std::to_string(l.n) + "x" +
                         std::to_string(l.n) + " but signal is " + h.shape_str());
  Tensor y = h.clone_values();
  for (int rep = 0; rep < k; ++rep) {
    const Tensor ly = spmm(l, y);
    Tensor next(y.rows(), y.cols());
    for (std::size_t i = 0; i < y.size(); ++i)
      next.value()[i] = y.value()[i] - s * ly.value()[i];
    y = next;
  }
  return y;
}

}  // namespace gfgn
