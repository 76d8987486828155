#pragma once

// Independent reference implementations used as test oracles. Everything here
// is written as plain loops over plain containers, deliberately avoiding the
// library's own kernels, so that a bug in the library cannot hide in its own
// oracle.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "gfgn/tensor.hpp"

namespace oracle {

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-8});
}

// Central-difference gradient check. `make_loss` must rebuild the full forward
// pass from the current parameter values and return a 1x1 loss tensor; it is
// invoked once under a fresh tape for the analytic gradients and twice per
// parameter entry (eager, no tape) for the numeric ones. Returns the worst
// relative error over all entries of all listed parameters.
inline double max_grad_rel_err(const std::vector<gfgn::Tensor>& params,
                               const std::function<gfgn::Tensor()>& make_loss, double h = 1e-5) {
  for (const gfgn::Tensor& p : params) p.zero_grad();
  std::vector<std::vector<double>> analytic;
  {
    gfgn::Tape tape;
    gfgn::Tape::Scope scope(tape);
    gfgn::Tensor loss = make_loss();
    tape.backward(loss);
    for (const gfgn::Tensor& p : params) analytic.push_back(p.grad());
  }
  double worst = 0.0;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    gfgn::Tensor p = params[pi];
    for (std::size_t e = 0; e < p.size(); ++e) {
      const double x0 = p.value()[e];
      p.value()[e] = x0 + h;
      const double fp = make_loss().value()[0];
      p.value()[e] = x0 - h;
      const double fm = make_loss().value()[0];
      p.value()[e] = x0;
      const double numeric = (fp - fm) / (2.0 * h);
      worst = std::max(worst, rel_err(analytic[pi][e], numeric));
    }
  }
  return worst;
}

// Plain triple-loop matrix product oracle.
inline std::vector<double> dense_matmul(const std::vector<double>& a, std::size_t m, std::size_t k,
                                        const std::vector<double>& b, std::size_t n) {
  std::vector<double> out(m * n, 0.0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t kk = 0; kk < k; ++kk) acc += a[i * k + kk] * b[kk * n + j];
      out[i * n + j] = acc;
    }
  return out;
}

// Dense matrix-vector product.
inline std::vector<double> dense_matvec(const std::vector<double>& a, std::size_t n,
                                        const std::vector<double>& x) {
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) y[i] += a[i * n + j] * x[j];
  return y;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace oracle
