#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "gfgn/error.hpp"
#include "gfgn/graph.hpp"
#include "gfgn/tensor.hpp"

namespace gfgn {

// ---------------------------------------------------------------------------
// Graph signal denoising: minimize g(f) = ||f - x||^2 + c * f^T L f over
// signals f, where x is the noisy observation and L a normalized Laplacian.
// The unique minimizer is (I + cL)^{-1} x; gradient descent on g with step
// size eps performs, per step, exactly the degree-normalized neighborhood
// averaging used by graph convolution layers.
// ---------------------------------------------------------------------------

struct DenoiseProblem {
  Tensor x;           // n x 1 observed signal
  double c = 1.0;     // smoothness weight, must be >= 0
  SparseOperator L;   // n x n normalized Laplacian

  void validate() const {
    if (!x.defined() || x.cols() != 1)
      throw DimensionError("DenoiseProblem: x must be n x 1");
    if (static_cast<std::size_t>(L.n) != x.rows())
      throw DimensionError("DenoiseProblem: L is " + std::to_string(L.n) + "x" +
                           std::to_string(L.n) + " but x has " + std::to_string(x.rows()) +
                           " rows");
    if (c < 0.0) throw ConfigError("DenoiseProblem: smoothness weight c must be >= 0");
  }
};

namespace detail {

// Dense Cholesky factorization (in place, lower triangle) and solve.
// Throws NumericalError if the matrix is not positive definite.
inline std::vector<double> cholesky_solve(std::vector<double> m, std::size_t n,
                                          std::vector<double> b) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = m[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= m[j * n + k] * m[j * n + k];
    if (d <= 0.0)
      throw NumericalError("cholesky_solve: matrix not positive definite at pivot " +
                           std::to_string(j));
    const double ljj = std::sqrt(d);
    m[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = m[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= m[i * n + k] * m[j * n + k];
      m[i * n + j] = v / ljj;
    }
  }
  // forward substitution: L y = b
  for (std::size_t i = 0; i < n; ++i) {
    double v = b[i];
    for (std::size_t k = 0; k < i; ++k) v -= m[i * n + k] * b[k];
    b[i] = v / m[i * n + i];
  }
  // back substitution: L^T f = y
  for (std::size_t i = n; i-- > 0;) {
    double v = b[i];
    for (std::size_t k = i + 1; k < n; ++k) v -= m[k * n + i] * b[k];
    b[i] = v / m[i * n + i];
  }
  return b;
}

}  // namespace detail

// Exact minimizer f* = (I + cL)^{-1} x via dense Cholesky.
inline Tensor denoise_closed_form(const DenoiseProblem& p) {
  p.validate();
  const std::size_t n = p.x.rows();
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 1.0;
  for (int i = 0; i < p.L.n; ++i)
    for (int e = p.L.offsets[i]; e < p.L.offsets[i + 1]; ++e)
      m[static_cast<std::size_t>(i) * n + static_cast<std::size_t>(p.L.targets[e])] +=
          p.c * p.L.weights[e];
  std::vector<double> f = detail::cholesky_solve(std::move(m), n, p.x.value());
  Tensor out(n, 1);
  out.value() = std::move(f);
  return out;
}

// One gradient-descent step on g from the current iterate f:
// f' = f - eps * (2 (f - x) + 2 c L f).
inline Tensor denoise_gradient_step(const DenoiseProblem& p, const Tensor& f, double eps) {
  p.validate();
  if (f.rows() != p.x.rows() || f.cols() != 1)
    throw DimensionError("denoise_gradient_step: iterate must match x, got " + f.shape_str());
  const std::size_t n = f.rows();
  const std::vector<double> lf = spmv(p.L, f.value());
  Tensor out(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double grad = 2.0 * (f.value()[i] - p.x.value()[i]) + 2.0 * p.c * lf[i];
    out.value()[i] = f.value()[i] - eps * grad;
  }
  return out;
}

// Gradient descent from f = x until the sup-norm step change drops below tol.
// Returns (iterate, steps taken); steps == max_iters means "not converged".
// Divergence — non-finite values, or step sizes growing for 10 consecutive
// iterations — raises NumericalError naming the unstable step size.
inline std::pair<Tensor, int> denoise_iterate(const DenoiseProblem& p, double eps, int max_iters,
                                              double tol) {
  p.validate();
  if (eps <= 0.0) throw ConfigError("denoise_iterate: step size must be positive");
  if (max_iters <= 0) throw ConfigError("denoise_iterate: max_iters must be positive");
  Tensor f = p.x.clone_values();
  double prev_step = std::numeric_limits<double>::infinity();
  int growth_streak = 0;
  for (int k = 1; k <= max_iters; ++k) {
    const Tensor next = denoise_gradient_step(p, f, eps);
    double step = 0.0;
    for (std::size_t i = 0; i < f.rows(); ++i)
      step = std::max(step, std::abs(next.value()[i] - f.value()[i]));
    if (!std::isfinite(step))
      throw NumericalError("denoise_iterate: non-finite iterate at step " + std::to_string(k) +
                           "; eps = " + std::to_string(eps) + " is unstable for this problem");
    growth_streak = step > prev_step ? growth_streak + 1 : 0;
    if (growth_streak >= 10)
      throw NumericalError("denoise_iterate: step norms grew for 10 consecutive iterations; "
                           "eps = " + std::to_string(eps) + " is unstable for this problem");
    f = next;
    if (step < tol) return {f, k};
    prev_step = step;
  }
  return {f, max_iters};
}

// Smoothness functional f^T L f.
inline double smoothness(const Tensor& f, const SparseOperator& l) {
  if (f.cols() != 1 || f.rows() != static_cast<std::size_t>(l.n))
    throw DimensionError("smoothness: signal must be " + std::to_string(l.n) + " x 1, got " +
                         f.shape_str());
  const std::vector<double> lf = spmv(l, f.value());
  double acc = 0.0;
  for (std::size_t i = 0; i < f.rows(); ++i) acc += f.value()[i] * lf[i];
  return acc;
}

}  // namespace gfgn
