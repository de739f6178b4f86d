#include "mvn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace mvn {

namespace {
void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.same_shape(b))
    throw ShapeError(std::string(op) + ": shapes " + std::to_string(a.rows) + "x" +
                     std::to_string(a.cols) + " vs " + std::to_string(b.rows) + "x" +
                     std::to_string(b.cols));
}
}  // namespace

Val Tape::push(TapeNode n) {
  nodes_.push_back(std::move(n));
  return Val{static_cast<int32_t>(nodes_.size() - 1)};
}

Val Tape::leaf(Matrix v, bool needs_grad) {
  TapeNode n;
  n.op = Op::Leaf;
  n.needs_grad = needs_grad;
  n.val = std::move(v);
  return push(std::move(n));
}

const Matrix& Tape::grad(Val v) const {
  const TapeNode& n = nodes_[v.i];
  if (n.grad.rows == 0)
    throw ContractError("gradient not computed; run backward first");
  return n.grad;
}

Val Tape::matmul(Val a, Val b) {
  TapeNode n;
  n.op = Op::MatMul;
  n.a = a.i;
  n.b = b.i;
  n.needs_grad = nodes_[a.i].needs_grad || nodes_[b.i].needs_grad;
  mm_nn(n.val, nodes_[a.i].val, nodes_[b.i].val);
  return push(std::move(n));
}

Val Tape::add(Val a, Val b) {
  const Matrix& x = nodes_[a.i].val;
  const Matrix& y = nodes_[b.i].val;
  require_same_shape(x, y, "add");
  TapeNode n;
  n.op = Op::Add;
  n.a = a.i;
  n.b = b.i;
  n.needs_grad = nodes_[a.i].needs_grad || nodes_[b.i].needs_grad;
  n.val = x;
  for (size_t i = 0; i < y.size(); ++i) n.val.d[i] += y.d[i];
  return push(std::move(n));
}

Val Tape::add_rowvec(Val a, Val row) {
  const Matrix& x = nodes_[a.i].val;
  const Matrix& r = nodes_[row.i].val;
  if (r.rows != 1 || r.cols != x.cols)
    throw ShapeError("add_rowvec: row must be 1x" + std::to_string(x.cols));
  TapeNode n;
  n.op = Op::AddRowVec;
  n.a = a.i;
  n.b = row.i;
  n.needs_grad = nodes_[a.i].needs_grad || nodes_[row.i].needs_grad;
  n.val = x;
  for (int i = 0; i < x.rows; ++i) {
    double* vi = n.val.row(i);
    for (int j = 0; j < x.cols; ++j) vi[j] += r.d[j];
  }
  return push(std::move(n));
}

Val Tape::sub(Val a, Val b) {
  const Matrix& x = nodes_[a.i].val;
  const Matrix& y = nodes_[b.i].val;
  require_same_shape(x, y, "sub");
  TapeNode n;
  n.op = Op::Sub;
  n.a = a.i;
  n.b = b.i;
  n.needs_grad = nodes_[a.i].needs_grad || nodes_[b.i].needs_grad;
  n.val = x;
  for (size_t i = 0; i < y.size(); ++i) n.val.d[i] -= y.d[i];
  return push(std::move(n));
}

Val Tape::mul(Val a, Val b) {
  const Matrix& x = nodes_[a.i].val;
  const Matrix& y = nodes_[b.i].val;
  require_same_shape(x, y, "mul");
  TapeNode n;
  n.op = Op::Mul;
  n.a = a.i;
  n.b = b.i;
  n.needs_grad = nodes_[a.i].needs_grad || nodes_[b.i].needs_grad;
  n.val = x;
  for (size_t i = 0; i < y.size(); ++i) n.val.d[i] *= y.d[i];
  return push(std::move(n));
}

Val Tape::sigmoid(Val a) {
  TapeNode n;
  n.op = Op::Sigmoid;
  n.a = a.i;
  n.needs_grad = nodes_[a.i].needs_grad;
  n.val = nodes_[a.i].val;
  for (auto& x : n.val.d) x = 1.0 / (1.0 + std::exp(-x));
  return push(std::move(n));
}

Val Tape::tanh(Val a) {
  TapeNode n;
  n.op = Op::Tanh;
  n.a = a.i;
  n.needs_grad = nodes_[a.i].needs_grad;
  n.val = nodes_[a.i].val;
  for (auto& x : n.val.d) x = std::tanh(x);
  return push(std::move(n));
}

Val Tape::one_minus(Val a) {
  TapeNode n;
  n.op = Op::OneMinus;
  n.a = a.i;
  n.needs_grad = nodes_[a.i].needs_grad;
  n.val = nodes_[a.i].val;
  for (auto& x : n.val.d) x = 1.0 - x;
  return push(std::move(n));
}

Val Tape::scale(Val a, double s) {
  TapeNode n;
  n.op = Op::Scale;
  n.a = a.i;
  n.scalar = s;
  n.needs_grad = nodes_[a.i].needs_grad;
  n.val = nodes_[a.i].val;
  for (auto& x : n.val.d) x *= s;
  return push(std::move(n));
}

Val Tape::slice_rows(Val a, int r0, int r1) {
  const Matrix& x = nodes_[a.i].val;
  if (r0 < 0 || r1 > x.rows || r0 >= r1)
    throw IndexError("slice_rows: [" + std::to_string(r0) + ", " + std::to_string(r1) +
                     ") out of " + std::to_string(x.rows) + " rows");
  TapeNode n;
  n.op = Op::SliceRows;
  n.a = a.i;
  n.i0 = r0;
  n.i1 = r1;
  n.needs_grad = nodes_[a.i].needs_grad;
  n.val = Matrix(r1 - r0, x.cols);
  std::copy(x.row(r0), x.row(r0) + n.val.size(), n.val.d.begin());
  return push(std::move(n));
}

Val Tape::concat_rows(const std::vector<Val>& parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no operands");
  int cols = nodes_[parts[0].i].val.cols;
  int rows = 0;
  bool needs = false;
  for (Val p : parts) {
    const Matrix& m = nodes_[p.i].val;
    if (m.cols != cols) throw ShapeError("concat_rows: ragged column counts");
    rows += m.rows;
    needs = needs || nodes_[p.i].needs_grad;
  }
  TapeNode n;
  n.op = Op::ConcatRows;
  n.needs_grad = needs;
  n.val = Matrix(rows, cols);
  n.list.reserve(parts.size());
  int r = 0;
  for (Val p : parts) {
    const Matrix& m = nodes_[p.i].val;
    std::copy(m.d.begin(), m.d.end(), n.val.row(r));
    r += m.rows;
    n.list.push_back(p.i);
  }
  return push(std::move(n));
}

Val Tape::sum(Val a) {
  TapeNode n;
  n.op = Op::Sum;
  n.a = a.i;
  n.needs_grad = nodes_[a.i].needs_grad;
  double acc = 0.0;
  for (double x : nodes_[a.i].val.d) acc += x;
  n.val = Matrix(1, 1, {acc});
  return push(std::move(n));
}

std::vector<double> softmax(const std::vector<double>& logits) {
  double mx = logits[0];
  for (double x : logits) mx = std::max(mx, x);
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - mx);
    z += p[i];
  }
  for (auto& x : p) x /= z;
  return p;
}

std::pair<double, std::vector<double>> softmax_cross_entropy(
    const std::vector<double>& logits, int label) {
  if (logits.size() < 2) throw ShapeError("softmax_cross_entropy: need >= 2 classes");
  if (label < 0 || label >= static_cast<int>(logits.size()))
    throw IndexError("softmax_cross_entropy: label " + std::to_string(label) +
                     " out of range for " + std::to_string(logits.size()) + " classes");
  // max-subtracted log-sum-exp
  double mx = logits[0];
  for (double x : logits) mx = std::max(mx, x);
  double z = 0.0;
  for (double x : logits) z += std::exp(x - mx);
  double loss = std::log(z) - (logits[label] - mx);
  std::vector<double> grad = softmax(logits);
  grad[label] -= 1.0;
  return {loss, grad};
}

Val Tape::softmax_xent_mean(Val logits, const std::vector<int>& labels) {
  const Matrix& x = nodes_[logits.i].val;
  if (static_cast<int>(labels.size()) != x.rows)
    throw ShapeError("softmax_xent_mean: " + std::to_string(labels.size()) +
                     " labels for " + std::to_string(x.rows) + " rows");
  TapeNode n;
  n.op = Op::SoftmaxXentMean;
  n.a = logits.i;
  n.needs_grad = nodes_[logits.i].needs_grad;
  n.cache = Matrix(x.rows, x.cols);
  n.list.assign(labels.begin(), labels.end());
  double total = 0.0;
  std::vector<double> row(x.cols);
  for (int t = 0; t < x.rows; ++t) {
    for (int j = 0; j < x.cols; ++j) row[j] = x.at(t, j);
    auto [loss, grad] = softmax_cross_entropy(row, labels[t]);
    total += loss;
    // cache softmax probabilities (grad + onehot)
    for (int j = 0; j < x.cols; ++j)
      n.cache.at(t, j) = grad[j] + (j == labels[t] ? 1.0 : 0.0);
  }
  n.val = Matrix(1, 1, {total / x.rows});
  return push(std::move(n));
}

void Tape::zero_grad() {
  for (auto& n : nodes_)
    for (auto& g : n.grad.d) g = 0.0;
}

namespace {
Matrix& ensure_grad(TapeNode& n) {
  if (n.grad.rows == 0) n.grad = Matrix(n.val.rows, n.val.cols);
  return n.grad;
}
}  // namespace

void Tape::backward(Val root) {
  TapeNode& r = nodes_[root.i];
  if (r.val.rows != 1 || r.val.cols != 1)
    throw ContractError("backward: root must be scalar (1x1), got " +
                        std::to_string(r.val.rows) + "x" + std::to_string(r.val.cols));
  ensure_grad(r).d[0] += 1.0;

  for (int32_t i = root.i; i >= 0; --i) {
    TapeNode& n = nodes_[i];
    if (!n.needs_grad || n.grad.rows == 0) continue;
    const Matrix& g = n.grad;
    switch (n.op) {
      case Op::Leaf:
        break;
      case Op::MatMul: {
        TapeNode& a = nodes_[n.a];
        TapeNode& b = nodes_[n.b];
        if (a.needs_grad) mm_nt(ensure_grad(a), g, b.val, /*accumulate=*/true);
        if (b.needs_grad) mm_tn(ensure_grad(b), a.val, g, /*accumulate=*/true);
        break;
      }
      case Op::Add: {
        for (int32_t s : {n.a, n.b}) {
          TapeNode& o = nodes_[s];
          if (!o.needs_grad) continue;
          Matrix& og = ensure_grad(o);
          for (size_t k = 0; k < g.size(); ++k) og.d[k] += g.d[k];
        }
        break;
      }
      case Op::AddRowVec: {
        TapeNode& a = nodes_[n.a];
        if (a.needs_grad) {
          Matrix& ag = ensure_grad(a);
          for (size_t k = 0; k < g.size(); ++k) ag.d[k] += g.d[k];
        }
        TapeNode& b = nodes_[n.b];
        if (b.needs_grad) {
          Matrix& bg = ensure_grad(b);
          for (int r2 = 0; r2 < g.rows; ++r2) {
            const double* gr = g.row(r2);
            for (int j = 0; j < g.cols; ++j) bg.d[j] += gr[j];
          }
        }
        break;
      }
      case Op::Sub: {
        TapeNode& a = nodes_[n.a];
        if (a.needs_grad) {
          Matrix& ag = ensure_grad(a);
          for (size_t k = 0; k < g.size(); ++k) ag.d[k] += g.d[k];
        }
        TapeNode& b = nodes_[n.b];
        if (b.needs_grad) {
          Matrix& bg = ensure_grad(b);
          for (size_t k = 0; k < g.size(); ++k) bg.d[k] -= g.d[k];
        }
        break;
      }
      case Op::Mul: {
        TapeNode& a = nodes_[n.a];
        TapeNode& b = nodes_[n.b];
        if (a.needs_grad) {
          Matrix& ag = ensure_grad(a);
          for (size_t k = 0; k < g.size(); ++k) ag.d[k] += g.d[k] * b.val.d[k];
        }
        if (b.needs_grad) {
          Matrix& bg = ensure_grad(b);
          for (size_t k = 0; k < g.size(); ++k) bg.d[k] += g.d[k] * a.val.d[k];
        }
        break;
      }
      case Op::Sigmoid: {
        TapeNode& a = nodes_[n.a];
        if (a.needs_grad) {
          Matrix& ag = ensure_grad(a);
          for (size_t k = 0; k < g.size(); ++k) {
            double y = n.val.d[k];
            ag.d[k] += g.d[k] * y * (1.0 - y);
          }
        }
        break;
      }
      case Op::Tanh: {
        TapeNode& a = nodes_[n.a];
        if (a.needs_grad) {
          Matrix& ag = ensure_grad(a);
          for (size_t k = 0; k < g.size(); ++k) {
            double y = n.val.d[k];
            ag.d[k] += g.d[k] * (1.0 - y * y);
          }
        }
        break;
      }
      case Op::OneMinus: {
        TapeNode& a = nodes_[n.a];
        if (a.needs_grad) {
          Matrix& ag = ensure_grad(a);
          for (size_t k = 0; k < g.size(); ++k) ag.d[k] -= g.d[k];
        }
        break;
      }
      case Op::Scale: {
        TapeNode& a = nodes_[n.a];
        if (a.needs_grad) {
          Matrix& ag = ensure_grad(a);
          for (size_t k = 0; k < g.size(); ++k) ag.d[k] += g.d[k] * n.scalar;
        }
        break;
      }
      case Op::SliceRows: {
        TapeNode& a = nodes_[n.a];
        if (a.needs_grad) {
          Matrix& ag = ensure_grad(a);
          double* dst = ag.row(n.i0);
          for (size_t k = 0; k < g.size(); ++k) dst[k] += g.d[k];
        }
        break;
      }
      case Op::ConcatRows: {
        int r0 = 0;
        for (int32_t s : n.list) {
          TapeNode& o = nodes_[s];
          int nr = o.val.rows;
          if (o.needs_grad) {
            Matrix& og = ensure_grad(o);
            const double* src = g.row(r0);
            for (size_t k = 0; k < og.size(); ++k) og.d[k] += src[k];
          }
          r0 += nr;
        }
        break;
      }
      case Op::Sum: {
        TapeNode& a = nodes_[n.a];
        if (a.needs_grad) {
          Matrix& ag = ensure_grad(a);
          double s = g.d[0];
          for (auto& x : ag.d) x += s;
        }
        break;
      }
      case Op::SoftmaxXentMean: {
        TapeNode& a = nodes_[n.a];
        if (a.needs_grad) {
          Matrix& ag = ensure_grad(a);
          double s = g.d[0] / n.cache.rows;
          for (int t = 0; t < n.cache.rows; ++t) {
            const double* p = n.cache.row(t);
            double* dst = ag.row(t);
            int label = n.list[t];
            for (int j = 0; j < n.cache.cols; ++j)
              dst[j] += s * (p[j] - (j == label ? 1.0 : 0.0));
          }
        }
        break;
      }
    }
  }
}

}  // namespace mvn
