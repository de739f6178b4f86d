#pragma once

#include <cstdint>
#include <deque>
#include <utility>
#include <vector>

#include "mvn/matrix.hpp"

namespace mvn {

// Recorded operation kinds. Creation order is a topological order by
// construction, so backward() is a single reverse sweep.
enum class Op : uint8_t {
  Leaf,
  MatMul,
  Add,
  AddRowVec,  // broadcast a 1xN row over an MxN matrix
  Sub,
  Mul,  // elementwise
  Sigmoid,
  Tanh,
  OneMinus,  // 1 - x
  Scale,
  SliceRows,
  ConcatRows,
  Sum,
  SoftmaxXentMean,  // mean over rows of -log softmax(row)[label]
};

// Handle into a Tape. Plain index wrapped for type safety.
struct Val {
  int32_t i = -1;
  bool ok() const { return i >= 0; }
};

struct TapeNode {
  Op op = Op::Leaf;
  bool needs_grad = false;
  int32_t a = -1, b = -1;
  int32_t i0 = 0, i1 = 0;      // SliceRows range
  double scalar = 0.0;         // Scale factor
  std::vector<int32_t> list;   // ConcatRows operands / SoftmaxXentMean labels
  Matrix val;
  Matrix grad;                 // allocated lazily during backward
  Matrix cache;                // SoftmaxXentMean keeps row softmax here
};

// Reverse-mode tape over Matrix values. One tape per execution stream;
// gradients of a node used twice accumulate by summation.
class Tape {
 public:
  Val leaf(Matrix v, bool needs_grad);

  const Matrix& value(Val v) const { return nodes_[v.i].val; }
  const Matrix& grad(Val v) const;
  bool needs_grad(Val v) const { return nodes_[v.i].needs_grad; }

  Val matmul(Val a, Val b);
  Val add(Val a, Val b);
  Val add_rowvec(Val a, Val row);
  Val sub(Val a, Val b);
  Val mul(Val a, Val b);
  Val sigmoid(Val a);
  Val tanh(Val a);
  Val one_minus(Val a);
  Val scale(Val a, double s);
  Val slice_rows(Val a, int r0, int r1);
  Val concat_rows(const std::vector<Val>& parts);
  Val sum(Val a);
  // logits: TxC, labels.size() == T, each in [0, C). Returns 1x1 mean loss.
  Val softmax_xent_mean(Val logits, const std::vector<int>& labels);

  // Accumulates d(root)/d(node) into every node's grad. Root must be 1x1.
  void backward(Val root);

  // Zeroes existing grad buffers (typically leaves) without freeing them.
  void zero_grad();

  int mark() const { return static_cast<int>(nodes_.size()); }
  // Drops all nodes at or after `m`; leaves recorded before it survive with
  // their accumulated gradients. Used to run many examples against the same
  // parameter leaves.
  void truncate(int m) { nodes_.resize(m); }

  size_t node_count() const { return nodes_.size(); }

 private:
  Val push(TapeNode n);
  // deque keeps value()/grad() references stable while new ops are recorded
  std::deque<TapeNode> nodes_;
};

// Numerically stable softmax of one logit row.
std::vector<double> softmax(const std::vector<double>& logits);
// loss = -log softmax(logits)[label]; grad = softmax(logits) - onehot(label).
std::pair<double, std::vector<double>> softmax_cross_entropy(
    const std::vector<double>& logits, int label);

}  // namespace mvn
