#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "gfgn/error.hpp"
#include "gfgn/rng.hpp"

namespace gfgn {

// ---------------------------------------------------------------------------
// Dense 2-D tensor of 64-bit floats with reverse-mode automatic
// differentiation. A Tensor is a cheap shared handle to its storage; gradient
// buffers live alongside values and are accumulated (+=) by the tape's
// backward pass. All kernels are single-threaded loops with a fixed traversal
// order, so every forward/backward value is bitwise reproducible.
// ---------------------------------------------------------------------------

struct TensorData {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> value;
  std::vector<double> grad;  // sized lazily on first accumulation
  bool requires_grad = false;
};

class Tensor {
 public:
  Tensor() = default;
  Tensor(std::size_t rows, std::size_t cols, double fill = 0.0, bool requires_grad = false)
      : d_(std::make_shared<TensorData>()) {
    d_->rows = rows;
    d_->cols = cols;
    d_->value.assign(rows * cols, fill);
    d_->requires_grad = requires_grad;
  }

  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows,
                          bool requires_grad = false) {
    const std::size_t m = rows.size();
    const std::size_t n = m == 0 ? 0 : rows.begin()->size();
    Tensor t(m, n, 0.0, requires_grad);
    std::size_t i = 0;
    for (const auto& row : rows) {
      if (row.size() != n) throw DimensionError("from_rows: ragged initializer");
      std::size_t j = 0;
      for (const double v : row) t.at(i, j++) = v;
      ++i;
    }
    return t;
  }

  // A Tensor is a shared handle: a const handle still refers to mutable
  // storage (like a const shared_ptr), so accessors are const-qualified and
  // return references into the shared buffers.
  bool defined() const { return static_cast<bool>(d_); }
  std::size_t rows() const { return d_->rows; }
  std::size_t cols() const { return d_->cols; }
  std::size_t size() const { return d_->value.size(); }

  double& at(std::size_t i, std::size_t j) const { return d_->value[i * d_->cols + j]; }

  std::vector<double>& value() const { return d_->value; }

  bool requires_grad() const { return d_->requires_grad; }
  const Tensor& set_requires_grad(bool flag) const {
    d_->requires_grad = flag;
    return *this;
  }

  // Gradient buffer, allocated (zero-filled) on first touch.
  std::vector<double>& grad() const {
    ensure_grad();
    return d_->grad;
  }
  double grad_at(std::size_t i, std::size_t j) const {
    ensure_grad();
    return d_->grad[i * d_->cols + j];
  }

  void ensure_grad() const {
    if (d_->grad.size() != d_->value.size()) d_->grad.assign(d_->value.size(), 0.0);
  }
  void zero_grad() const { d_->grad.assign(d_->value.size(), 0.0); }

  // Value-only copy; the clone shares nothing with the source.
  Tensor clone_values() const {
    Tensor t(rows(), cols());
    t.d_->value = d_->value;
    return t;
  }

  std::shared_ptr<TensorData> data_ptr() const { return d_; }

  std::string shape_str() const {
    std::ostringstream os;
    os << rows() << "x" << cols();
    return os.str();
  }

 private:
  std::shared_ptr<TensorData> d_;
};

// ---------------------------------------------------------------------------
// Tape: an append-only ledger of operation records. Each op executed while a
// tape is active appends one record; backward() replays the records in exact
// reverse insertion order, accumulating into input gradients. Calling
// backward() again without zeroing gradients accumulates again.
// ---------------------------------------------------------------------------

class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // RAII activation: ops record onto the innermost active tape.
  class Scope {
   public:
    explicit Scope(Tape& tape) : prev_(active_slot()) { active_slot() = &tape; }
    ~Scope() { active_slot() = prev_; }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    Tape* prev_;
  };

  static Tape* active() { return active_slot(); }

  void record(const char* op, std::shared_ptr<TensorData> output, std::function<void()> backprop) {
    records_.push_back({op, std::move(output), std::move(backprop)});
  }

  std::size_t size() const { return records_.size(); }
  const char* op_name(std::size_t i) const { return records_[i].op; }
  void clear() { records_.clear(); }

  // Seeds d(loss)/d(loss) = 1 and sweeps the ledger backwards. Gradients of
  // op outputs (intermediates) are transient per sweep; leaf gradients are
  // only ever accumulated, so a second backward() adds a second copy.
  void backward(const Tensor& loss) {
    if (loss.rows() != 1 || loss.cols() != 1)
      throw DimensionError("backward: loss must be 1x1, got " + loss.shape_str());
    for (Record& r : records_) r.output->grad.assign(r.output->value.size(), 0.0);
    loss.grad()[0] += 1.0;
    for (std::size_t i = records_.size(); i-- > 0;) records_[i].backprop();
  }

 private:
  struct Record {
    const char* op;
    std::shared_ptr<TensorData> output;
    std::function<void()> backprop;
  };

  static Tape*& active_slot() {
    thread_local Tape* slot = nullptr;
    return slot;
  }

  std::vector<Record> records_;
};

namespace detail {

inline void record_if_tracked(const char* op, const Tensor& out, std::function<void()> backprop) {
  Tape* tape = Tape::active();
  if (tape != nullptr && out.requires_grad()) tape->record(op, out.data_ptr(), std::move(backprop));
}

inline bool any_requires_grad(const Tensor& a) { return a.requires_grad(); }
inline bool any_requires_grad(const Tensor& a, const Tensor& b) {
  return a.requires_grad() || b.requires_grad();
}

}  // namespace detail

// ----------------------------- matmul -------------------------------------

inline Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matmul: inner dimensions differ, " + a.shape_str() + " vs " +
                         b.shape_str());
  const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out(m, n, 0.0, detail::any_requires_grad(a, b));
  {
    const double* av = a.value().data();
    const double* bv = b.value().data();
    double* ov = out.value().data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t kk = 0; kk < k; ++kk) {
        const double aik = av[i * k + kk];
        const double* brow = bv + kk * n;
        double* orow = ov + i * n;
        for (std::size_t j = 0; j < n; ++j) orow[j] += aik * brow[j];
      }
  }
  detail::record_if_tracked("matmul", out, [a, b, out]() mutable {
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    const std::vector<double>& og = out.grad();
    if (a.requires_grad()) {
      std::vector<double>& ag = a.grad();
      const double* bv = b.value().data();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t kk = 0; kk < k; ++kk) {
          double acc = 0.0;
          const double* orow = og.data() + i * n;
          const double* brow = bv + kk * n;
          for (std::size_t j = 0; j < n; ++j) acc += orow[j] * brow[j];
          ag[i * k + kk] += acc;
        }
    }
    if (b.requires_grad()) {
      std::vector<double>& bg = b.grad();
      const double* av = a.value().data();
      for (std::size_t i = 0; i < m; ++i) {
        const double* orow = og.data() + i * n;
        for (std::size_t kk = 0; kk < k; ++kk) {
          const double aik = av[i * k + kk];
          double* brow = bg.data() + kk * n;
          for (std::size_t j = 0; j < n; ++j) brow[j] += aik * orow[j];
        }
      }
    }
  });
  return out;
}

// ------------------------- elementwise family ------------------------------

enum class EwKind { add, sub, mul, sigmoid, relu, scale };

namespace detail {

// Binary elementwise ops accept equal shapes, or a 1xN second operand that is
// broadcast across rows of an MxN first operand.
inline bool broadcast_ok(const Tensor& a, const Tensor& b) {
  if (a.rows() == b.rows() && a.cols() == b.cols()) return true;
  return b.rows() == 1 && b.cols() == a.cols();
}

inline void check_binary(const char* op, const Tensor& a, const Tensor& b) {
  if (!broadcast_ok(a, b))
    throw DimensionError(std::string(op) + ": incompatible shapes " + a.shape_str() + " vs " +
                         b.shape_str());
}

}  // namespace detail

inline Tensor elementwise(const Tensor& a, EwKind kind, const Tensor* b_opt = nullptr,
                          double alpha = 0.0) {
  const std::size_t m = a.rows(), n = a.cols();
  switch (kind) {
    case EwKind::add:
    case EwKind::sub:
    case EwKind::mul: {
      const Tensor& b = *b_opt;
      const char* name = kind == EwKind::add ? "add" : (kind == EwKind::sub ? "sub" : "mul");
      detail::check_binary(name, a, b);
      const bool bcast = b.rows() == 1 && m != 1;
      Tensor out(m, n, 0.0, detail::any_requires_grad(a, b));
      const double* av = a.value().data();
      const double* bv = b.value().data();
      double* ov = out.value().data();
      for (std::size_t i = 0; i < m; ++i) {
        const double* brow = bcast ? bv : bv + i * n;
        for (std::size_t j = 0; j < n; ++j) {
          const double x = av[i * n + j], y = brow[j];
          ov[i * n + j] = kind == EwKind::add ? x + y : (kind == EwKind::sub ? x - y : x * y);
        }
      }
      detail::record_if_tracked(name, out, [a, b, out, kind, bcast]() mutable {
        const std::size_t m = a.rows(), n = a.cols();
        const std::vector<double>& og = out.grad();
        if (a.requires_grad()) {
          std::vector<double>& ag = a.grad();
          const double* bv = b.value().data();
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
              const double g = og[i * n + j];
              if (kind == EwKind::mul)
                ag[i * n + j] += g * (bcast ? bv[j] : bv[i * n + j]);
              else
                ag[i * n + j] += g;
            }
        }
        if (b.requires_grad()) {
          std::vector<double>& bg = b.grad();
          const double* av = a.value().data();
          const double sign = kind == EwKind::sub ? -1.0 : 1.0;
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) {
              const double g = og[i * n + j];
              const std::size_t bj = bcast ? j : i * n + j;
              if (kind == EwKind::mul)
                bg[bj] += g * av[i * n + j];
              else
                bg[bj] += sign * g;
            }
        }
      });
      return out;
    }
    case EwKind::sigmoid: {
      Tensor out(m, n, 0.0, a.requires_grad());
      for (std::size_t i = 0; i < m * n; ++i) {
        const double x = a.value()[i];
        // Split by sign to avoid exp overflow on large |x|.
        out.value()[i] = x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                                  : std::exp(x) / (1.0 + std::exp(x));
      }
      detail::record_if_tracked("sigmoid", out, [a, out]() mutable {
        const std::vector<double>& og = out.grad();
        std::vector<double>& ag = a.grad();
        for (std::size_t i = 0; i < out.size(); ++i) {
          const double s = out.value()[i];
          ag[i] += og[i] * s * (1.0 - s);
        }
      });
      return out;
    }
    case EwKind::relu: {
      Tensor out(m, n, 0.0, a.requires_grad());
      for (std::size_t i = 0; i < m * n; ++i) out.value()[i] = a.value()[i] > 0.0 ? a.value()[i] : 0.0;
      detail::record_if_tracked("relu", out, [a, out]() mutable {
        const std::vector<double>& og = out.grad();
        std::vector<double>& ag = a.grad();
        for (std::size_t i = 0; i < out.size(); ++i)
          if (a.value()[i] > 0.0) ag[i] += og[i];
      });
      return out;
    }
    case EwKind::scale: {
      Tensor out(m, n, 0.0, a.requires_grad());
      for (std::size_t i = 0; i < m * n; ++i) out.value()[i] = alpha * a.value()[i];
      detail::record_if_tracked("scale", out, [a, out, alpha]() mutable {
        const std::vector<double>& og = out.grad();
        std::vector<double>& ag = a.grad();
        for (std::size_t i = 0; i < out.size(); ++i) ag[i] += alpha * og[i];
      });
      return out;
    }
  }
  throw ConfigError("elementwise: unknown kind");
}

inline Tensor add(const Tensor& a, const Tensor& b) { return elementwise(a, EwKind::add, &b); }
inline Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(a, EwKind::sub, &b); }
inline Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(a, EwKind::mul, &b); }
inline Tensor sigmoid(const Tensor& a) { return elementwise(a, EwKind::sigmoid); }
inline Tensor relu(const Tensor& a) { return elementwise(a, EwKind::relu); }
inline Tensor scale(const Tensor& a, double alpha) {
  return elementwise(a, EwKind::scale, nullptr, alpha);
}

// --------------------------- concat_cols -----------------------------------

inline Tensor concat_cols(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows())
    throw DimensionError("concat_cols: row counts differ, " + a.shape_str() + " vs " +
                         b.shape_str());
  const std::size_t m = a.rows(), p = a.cols(), q = b.cols();
  Tensor out(m, p + q, 0.0, detail::any_requires_grad(a, b));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < p; ++j) out.at(i, j) = a.at(i, j);
    for (std::size_t j = 0; j < q; ++j) out.at(i, p + j) = b.at(i, j);
  }
  detail::record_if_tracked("concat_cols", out, [a, b, out]() mutable {
    const std::size_t m = a.rows(), p = a.cols(), q = b.cols();
    if (a.requires_grad()) {
      std::vector<double>& ag = a.grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < p; ++j) ag[i * p + j] += out.grad_at(i, j);
    }
    if (b.requires_grad()) {
      std::vector<double>& bg = b.grad();
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < q; ++j) bg[i * q + j] += out.grad_at(i, p + j);
    }
  });
  return out;
}

// ----------------------------- row_mean ------------------------------------

// Mean over the row index: an MxN input pools to a 1xN row vector.
inline Tensor row_mean(const Tensor& a) {
  const std::size_t m = a.rows(), n = a.cols();
  if (m == 0) throw DimensionError("row_mean: empty input");
  Tensor out(1, n, 0.0, a.requires_grad());
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out.value()[j] += a.at(i, j);
  const double inv = 1.0 / static_cast<double>(m);
  for (std::size_t j = 0; j < n; ++j) out.value()[j] *= inv;
  detail::record_if_tracked("row_mean", out, [a, out]() mutable {
    const std::size_t m = a.rows(), n = a.cols();
    const double inv = 1.0 / static_cast<double>(m);
    std::vector<double>& ag = a.grad();
    const std::vector<double>& og = out.grad();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) ag[i * n + j] += og[j] * inv;
  });
  return out;
}

// ------------------------------ sum_all ------------------------------------

inline Tensor sum_all(const Tensor& a) {
  Tensor out(1, 1, 0.0, a.requires_grad());
  double acc = 0.0;
  for (const double v : a.value()) acc += v;
  out.value()[0] = acc;
  detail::record_if_tracked("sum_all", out, [a, out]() mutable {
    const double g = out.grad()[0];
    std::vector<double>& ag = a.grad();
    for (std::size_t i = 0; i < a.size(); ++i) ag[i] += g;
  });
  return out;
}

// ------------------------------ dropout ------------------------------------

// Inverted dropout: kept entries are scaled by 1/(1-p) at train time so that
// inference applies no rescaling. p = 0 or training = false return the input
// handle unchanged (exact identity).
inline Tensor dropout(const Tensor& a, double p, bool training, Rng& rng) {
  if (!(p >= 0.0 && p < 1.0))
    throw ConfigError("dropout: rate must lie in [0, 1), got " + std::to_string(p));
  if (!training || p == 0.0) return a;
  const double keep_scale = 1.0 / (1.0 - p);
  auto mask = std::make_shared<std::vector<double>>(a.size());
  Tensor out(a.rows(), a.cols(), 0.0, a.requires_grad());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double mult = rng.next_double() >= p ? keep_scale : 0.0;
    (*mask)[i] = mult;
    out.value()[i] = a.value()[i] * mult;
  }
  detail::record_if_tracked("dropout", out, [a, out, mask]() mutable {
    const std::vector<double>& og = out.grad();
    std::vector<double>& ag = a.grad();
    for (std::size_t i = 0; i < out.size(); ++i) ag[i] += og[i] * (*mask)[i];
  });
  return out;
}

// ----------------------- softmax cross-entropy ------------------------------

// Mean negative log-likelihood over the masked rows, with per-row max
// subtraction for overflow safety. labels[i] must be a valid class for every
// masked row i.
inline Tensor softmax_cross_entropy(const Tensor& logits, const std::vector<int>& labels,
                                    const std::vector<int>& mask) {
  const std::size_t m = logits.rows(), c = logits.cols();
  if (labels.size() != m)
    throw DimensionError("softmax_cross_entropy: " + std::to_string(labels.size()) +
                         " labels for " + std::to_string(m) + " rows");
  if (mask.empty()) throw DimensionError("softmax_cross_entropy: empty mask");
  for (const int i : mask) {
    if (i < 0 || static_cast<std::size_t>(i) >= m)
      throw DimensionError("softmax_cross_entropy: mask index " + std::to_string(i) +
                           " out of range for " + std::to_string(m) + " rows");
    if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= c)
      throw DimensionError("softmax_cross_entropy: label " + std::to_string(labels[i]) +
                           " at row " + std::to_string(i) + " outside [0, " + std::to_string(c) +
                           ")");
  }
  auto probs = std::make_shared<std::vector<double>>(mask.size() * c);
  double loss = 0.0;
  for (std::size_t r = 0; r < mask.size(); ++r) {
    const std::size_t i = static_cast<std::size_t>(mask[r]);
    double mx = logits.at(i, 0);
    for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, logits.at(i, j));
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(logits.at(i, j) - mx);
    const double logz = std::log(z);
    loss += logz - (logits.at(i, static_cast<std::size_t>(labels[i])) - mx);
    for (std::size_t j = 0; j < c; ++j)
      (*probs)[r * c + j] = std::exp(logits.at(i, j) - mx) / z;
  }
  const double inv = 1.0 / static_cast<double>(mask.size());
  Tensor out(1, 1, loss * inv, logits.requires_grad());
  detail::record_if_tracked("softmax_cross_entropy", out,
                            [logits, out, probs, labels, mask, inv]() mutable {
    const double g = out.grad()[0] * inv;
    const std::size_t c = logits.cols();
    std::vector<double>& lg = logits.grad();
    for (std::size_t r = 0; r < mask.size(); ++r) {
      const std::size_t i = static_cast<std::size_t>(mask[r]);
      for (std::size_t j = 0; j < c; ++j) {
        const double p = (*probs)[r * c + j];
        const double y = static_cast<std::size_t>(labels[i]) == j ? 1.0 : 0.0;
        lg[i * c + j] += g * (p - y);
      }
    }
  });
  return out;
}

// ---------------------------- gather_rows ----------------------------------

inline Tensor gather_rows(const Tensor& a, const std::vector<int>& idx) {
  const std::size_t n = a.cols();
  Tensor out(idx.size(), n, 0.0, a.requires_grad());
  for (std::size_t r = 0; r < idx.size(); ++r) {
    const int i = idx[r];
    if (i < 0 || static_cast<std::size_t>(i) >= a.rows())
      throw DimensionError("gather_rows: index " + std::to_string(i) + " out of range for " +
                           a.shape_str());
    for (std::size_t j = 0; j < n; ++j) out.at(r, j) = a.at(static_cast<std::size_t>(i), j);
  }
  detail::record_if_tracked("gather_rows", out, [a, out, idx]() mutable {
    const std::size_t n = a.cols();
    std::vector<double>& ag = a.grad();
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const std::size_t i = static_cast<std::size_t>(idx[r]);
      for (std::size_t j = 0; j < n; ++j) ag[i * n + j] += out.grad_at(r, j);
    }
  });
  return out;
}

// -------------------------- segment_sum_rows --------------------------------

// Sums row r of the input into output row seg[r]. Used to reduce per-edge
// quantities back to nodes; rows with the same segment id accumulate in input
// order, so results are deterministic.
inline Tensor segment_sum_rows(const Tensor& a, const std::vector<int>& seg,
                               std::size_t num_segments) {
  if (seg.size() != a.rows())
    throw DimensionError("segment_sum_rows: " + std::to_string(seg.size()) + " ids for " +
                         a.shape_str());
  const std::size_t n = a.cols();
  Tensor out(num_segments, n, 0.0, a.requires_grad());
  for (std::size_t r = 0; r < seg.size(); ++r) {
    const int s = seg[r];
    if (s < 0 || static_cast<std::size_t>(s) >= num_segments)
      throw DimensionError("segment_sum_rows: segment id " + std::to_string(s) +
                           " outside [0, " + std::to_string(num_segments) + ")");
    for (std::size_t j = 0; j < n; ++j) out.at(static_cast<std::size_t>(s), j) += a.at(r, j);
  }
  detail::record_if_tracked("segment_sum_rows", out, [a, out, seg]() mutable {
    const std::size_t n = a.cols();
    std::vector<double>& ag = a.grad();
    for (std::size_t r = 0; r < seg.size(); ++r) {
      const std::size_t s = static_cast<std::size_t>(seg[r]);
      for (std::size_t j = 0; j < n; ++j) ag[r * n + j] += out.grad_at(s, j);
    }
  });
  return out;
}

// ---------------------------- scale_rows -----------------------------------

// Multiplies row i by the constant w[i]. The weights are plain data (degree
// reciprocals and the like), not differentiated.
inline Tensor scale_rows(const Tensor& a, std::shared_ptr<const std::vector<double>> w) {
  if (w->size() != a.rows())
    throw DimensionError("scale_rows: " + std::to_string(w->size()) + " weights for " +
                         a.shape_str());
  const std::size_t n = a.cols();
  Tensor out(a.rows(), n, 0.0, a.requires_grad());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < n; ++j) out.at(i, j) = a.at(i, j) * (*w)[i];
  detail::record_if_tracked("scale_rows", out, [a, out, w]() mutable {
    const std::size_t n = a.cols();
    std::vector<double>& ag = a.grad();
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < n; ++j) ag[i * n + j] += out.grad_at(i, j) * (*w)[i];
  });
  return out;
}

inline Tensor scale_rows(const Tensor& a, const std::vector<double>& w) {
  return scale_rows(a, std::make_shared<const std::vector<double>>(w));
}

// ----------------------------- backward ------------------------------------

inline void backward(const Tensor& loss) {
  Tape* tape = Tape::active();
  if (tape == nullptr) throw ConfigError("backward: no active tape");
  tape->backward(loss);
}

// --------------------------- initializers ----------------------------------

// Glorot/Xavier uniform: U(-a, a) with a = sqrt(6 / (fan_in + fan_out)),
// drawn row-major so the consumed stream length is rows*cols.
inline Tensor glorot_uniform(std::size_t rows, std::size_t cols, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(rows + cols));
  Tensor t(rows, cols, 0.0, true);
  for (std::size_t i = 0; i < t.size(); ++i) t.value()[i] = rng.uniform(-a, a);
  return t;
}

inline Tensor identity_matrix(std::size_t n, bool requires_grad = false) {
  Tensor t(n, n, 0.0, requires_grad);
  for (std::size_t i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

}  // namespace gfgn
