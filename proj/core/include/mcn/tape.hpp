#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "mcn/common.hpp"

namespace mcn {

// Handle into a Tape. Cheap to copy; only meaningful for the tape that
// produced it.
struct Var {
  int idx = -1;
  bool valid() const { return idx >= 0; }
};

// Reverse-mode differentiation record. Every operation evaluates eagerly and
// appends a node holding the result plus a closure that routes the incoming
// adjoint to the operands. backward(loss) seeds d(loss)/d(loss) = 1 and walks
// the nodes in reverse creation order, which is a valid topological order by
// construction.
//
// All values are dense double matrices; scalars are 1x1, column vectors Nx1,
// row vectors 1xN. A Tape is single-use per forward pass and not thread-safe;
// concurrency happens across tapes, never within one.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaves. Parameters pass requires_grad = true; constants false.
  Var leaf(Mat value, bool requires_grad = false);
  Var constant(Mat value) { return leaf(std::move(value), false); }

  Var matmul(Var a, Var b);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var cmul(Var a, Var b);  // elementwise product, same shape
  Var add_rowvec(Var a, Var row);    // broadcast a 1xC row over every row of a
  Var add_scalar(Var a, Var s);      // broadcast a 1x1 over every entry of a
  Var affine(Var a, double scale, double shift);  // scale*a + shift elementwise
  Var concat_cols(const std::vector<Var>& parts);
  Var concat_rows(const std::vector<Var>& parts);
  Var gather_rows(Var a, std::vector<int> rows);  // duplicates allowed
  Var block_rows(Var a, int start, int count);
  Var transpose(Var a);
  Var relu(Var a);
  Var sigmoid(Var a);
  Var softplus(Var a);  // log(1 + exp(x)), evaluated stably
  Var sum(Var a);       // 1x1
  Var row_sums(Var a);  // Nx1
  Var reciprocal(Var a);
  Var scale_rows(Var a, Var c);  // row i of a times c(i); c is Nx1

  // base + sum_p w(p) scattered to (i_p, j_p) and (j_p, i_p). The pairs are
  // off-diagonal and unique; w is Px1. Used for symmetric adjacencies whose
  // only trainable entries are the scattered ones.
  Var scatter_symmetric(Var w, std::vector<std::pair<int, int>> pairs, Mat base);

  const Mat& value(Var v) const { return node(v.idx).value; }
  double scalar(Var v) const;

  // Runs reverse-mode accumulation from a 1x1 loss.
  void backward(Var loss);

  // Gradient of the last backward() w.r.t. v. Zero matrix if v never
  // participated (an unused parameter has an all-zero gradient).
  const Mat& grad(Var v) const;

  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Mat value;
    mutable Mat grad;  // lazily sized by grad() for untouched nodes
    bool requires_grad = false;
    std::function<void(Tape&)> back;
  };

  std::vector<Node> nodes_;

  const Node& node(int idx) const;
  Node& node(int idx);
  Var push(Mat value, bool requires_grad, std::function<void(Tape&)> back);
  void accumulate(int idx, const Mat& g);
  bool rg(Var v) const { return node(v.idx).requires_grad; }
  static void check_same_shape(const Mat& a, const Mat& b, const char* op);
};

}  // namespace mcn
