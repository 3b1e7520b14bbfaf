#include "mcn/tape.hpp"

#include <cmath>
#include <string>

namespace mcn {

namespace {

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  double e = std::exp(x);
  return e / (1.0 + e);
}

double stable_softplus(double x) {
  // max(x, 0) + log1p(exp(-|x|))
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

}  // namespace

const Tape::Node& Tape::node(int idx) const {
  if (idx < 0 || idx >= static_cast<int>(nodes_.size())) {
    throw std::logic_error("Tape: invalid Var handle");
  }
  return nodes_[static_cast<std::size_t>(idx)];
}

Tape::Node& Tape::node(int idx) {
  return const_cast<Node&>(static_cast<const Tape*>(this)->node(idx));
}

void Tape::check_same_shape(const Mat& a, const Mat& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::logic_error(std::string("Tape::") + op + ": shape mismatch " +
                           std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                           std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
  }
}

Var Tape::push(Mat value, bool requires_grad, std::function<void(Tape&)> back) {
  Node n;
  n.value = std::move(value);
  n.requires_grad = requires_grad;
  n.back = requires_grad ? std::move(back) : nullptr;
  nodes_.push_back(std::move(n));
  return {static_cast<int>(nodes_.size()) - 1};
}

Var Tape::leaf(Mat value, bool requires_grad) {
  return push(std::move(value), requires_grad, nullptr);
}

void Tape::accumulate(int idx, const Mat& g) {
  Node& n = node(idx);
  if (!n.requires_grad) {
    return;
  }
  if (n.grad.size() == 0) {
    n.grad = g;
  } else {
    n.grad += g;
  }
}

const Mat& Tape::grad(Var v) const {
  const Node& n = node(v.idx);
  if (n.grad.size() == 0) {
    n.grad = Mat::Zero(n.value.rows(), n.value.cols());
  }
  return n.grad;
}

double Tape::scalar(Var v) const {
  const Mat& m = value(v);
  if (m.rows() != 1 || m.cols() != 1) {
    throw std::logic_error("Tape::scalar: value is not 1x1");
  }
  return m(0, 0);
}

void Tape::backward(Var loss) {
  const Node& ln = node(loss.idx);
  if (ln.value.rows() != 1 || ln.value.cols() != 1) {
    throw std::logic_error("Tape::backward: loss must be 1x1");
  }
  for (Node& n : nodes_) {
    n.grad.resize(0, 0);
  }
  if (!ln.requires_grad) {
    return;  // loss does not depend on any parameter
  }
  accumulate(loss.idx, Mat::Ones(1, 1));
  for (int i = loss.idx; i >= 0; --i) {
    Node& n = nodes_[static_cast<std::size_t>(i)];
    if (n.back && n.grad.size() != 0) {
      n.back(*this);
    }
  }
}

Var Tape::matmul(Var a, Var b) {
  const Mat& av = value(a);
  const Mat& bv = value(b);
  if (av.cols() != bv.rows()) {
    throw std::logic_error("Tape::matmul: inner dimensions disagree");
  }
  Mat out = av * bv;
  bool needs = rg(a) || rg(b);
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int ai = a.idx, bi = b.idx, oi = v.idx;
    node(oi).back = [ai, bi, oi](Tape& t) {
      const Mat& g = t.node(oi).grad;
      t.accumulate(ai, Mat(g * t.value({bi}).transpose()));
      t.accumulate(bi, Mat(t.value({ai}).transpose() * g));
    };
  }
  return v;
}

Var Tape::add(Var a, Var b) {
  check_same_shape(value(a), value(b), "add");
  Mat out = value(a) + value(b);
  bool needs = rg(a) || rg(b);
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int ai = a.idx, bi = b.idx, oi = v.idx;
    node(oi).back = [ai, bi, oi](Tape& t) {
      const Mat& g = t.node(oi).grad;
      t.accumulate(ai, g);
      t.accumulate(bi, g);
    };
  }
  return v;
}

Var Tape::sub(Var a, Var b) {
  check_same_shape(value(a), value(b), "sub");
  Mat out = value(a) - value(b);
  bool needs = rg(a) || rg(b);
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int ai = a.idx, bi = b.idx, oi = v.idx;
    node(oi).back = [ai, bi, oi](Tape& t) {
      const Mat& g = t.node(oi).grad;
      t.accumulate(ai, g);
      t.accumulate(bi, Mat(-g));
    };
  }
  return v;
}

Var Tape::cmul(Var a, Var b) {
  check_same_shape(value(a), value(b), "cmul");
  Mat out = value(a).cwiseProduct(value(b));
  bool needs = rg(a) || rg(b);
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int ai = a.idx, bi = b.idx, oi = v.idx;
    node(oi).back = [ai, bi, oi](Tape& t) {
      const Mat& g = t.node(oi).grad;
      t.accumulate(ai, g.cwiseProduct(t.value({bi})));
      t.accumulate(bi, g.cwiseProduct(t.value({ai})));
    };
  }
  return v;
}

Var Tape::add_rowvec(Var a, Var row) {
  const Mat& av = value(a);
  const Mat& rv = value(row);
  if (rv.rows() != 1 || rv.cols() != av.cols()) {
    throw std::logic_error("Tape::add_rowvec: row must be 1 x cols(a)");
  }
  Mat out = av.rowwise() + rv.row(0);
  bool needs = rg(a) || rg(row);
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int ai = a.idx, ri = row.idx, oi = v.idx;
    node(oi).back = [ai, ri, oi](Tape& t) {
      const Mat& g = t.node(oi).grad;
      t.accumulate(ai, g);
      t.accumulate(ri, Mat(g.colwise().sum()));
    };
  }
  return v;
}

Var Tape::add_scalar(Var a, Var s) {
  const Mat& sv = value(s);
  if (sv.rows() != 1 || sv.cols() != 1) {
    throw std::logic_error("Tape::add_scalar: s must be 1x1");
  }
  Mat out = value(a).array() + sv(0, 0);
  bool needs = rg(a) || rg(s);
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int ai = a.idx, si = s.idx, oi = v.idx;
    node(oi).back = [ai, si, oi](Tape& t) {
      const Mat& g = t.node(oi).grad;
      t.accumulate(ai, g);
      Mat gs(1, 1);
      gs(0, 0) = g.sum();
      t.accumulate(si, gs);
    };
  }
  return v;
}

Var Tape::affine(Var a, double scale, double shift) {
  Mat out = (value(a).array() * scale + shift).matrix();
  bool needs = rg(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int ai = a.idx, oi = v.idx;
    node(oi).back = [ai, oi, scale](Tape& t) {
      t.accumulate(ai, Mat(t.node(oi).grad * scale));
    };
  }
  return v;
}

Var Tape::concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) {
    throw std::logic_error("Tape::concat_cols: empty part list");
  }
  Eigen::Index rows = value(parts[0]).rows();
  Eigen::Index cols = 0;
  bool needs = false;
  for (Var p : parts) {
    if (value(p).rows() != rows) {
      throw std::logic_error("Tape::concat_cols: row count mismatch");
    }
    cols += value(p).cols();
    needs = needs || rg(p);
  }
  Mat out(rows, cols);
  Eigen::Index off = 0;
  std::vector<int> idxs;
  std::vector<Eigen::Index> widths;
  for (Var p : parts) {
    const Mat& pv = value(p);
    out.middleCols(off, pv.cols()) = pv;
    idxs.push_back(p.idx);
    widths.push_back(pv.cols());
    off += pv.cols();
  }
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int oi = v.idx;
    node(oi).back = [idxs, widths, oi](Tape& t) {
      const Mat& g = t.node(oi).grad;
      Eigen::Index o = 0;
      for (std::size_t k = 0; k < idxs.size(); ++k) {
        t.accumulate(idxs[k], g.middleCols(o, widths[k]));
        o += widths[k];
      }
    };
  }
  return v;
}

Var Tape::concat_rows(const std::vector<Var>& parts) {
  if (parts.empty()) {
    throw std::logic_error("Tape::concat_rows: empty part list");
  }
  Eigen::Index cols = value(parts[0]).cols();
  Eigen::Index rows = 0;
  bool needs = false;
  for (Var p : parts) {
    if (value(p).cols() != cols) {
      throw std::logic_error("Tape::concat_rows: column count mismatch");
    }
    rows += value(p).rows();
    needs = needs || rg(p);
  }
  Mat out(rows, cols);
  Eigen::Index off = 0;
  std::vector<int> idxs;
  std::vector<Eigen::Index> heights;
  for (Var p : parts) {
    const Mat& pv = value(p);
    out.middleRows(off, pv.rows()) = pv;
    idxs.push_back(p.idx);
    heights.push_back(pv.rows());
    off += pv.rows();
  }
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int oi = v.idx;
    node(oi).back = [idxs, heights, oi](Tape& t) {
      const Mat& g = t.node(oi).grad;
      Eigen::Index o = 0;
      for (std::size_t k = 0; k < idxs.size(); ++k) {
        t.accumulate(idxs[k], g.middleRows(o, heights[k]));
        o += heights[k];
      }
    };
  }
  return v;
}

Var Tape::gather_rows(Var a, std::vector<int> rows) {
  const Mat& av = value(a);
  Mat out(static_cast<Eigen::Index>(rows.size()), av.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (rows[k] < 0 || rows[k] >= av.rows()) {
      throw std::logic_error("Tape::gather_rows: row index out of range");
    }
    out.row(static_cast<Eigen::Index>(k)) = av.row(rows[k]);
  }
  bool needs = rg(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int ai = a.idx, oi = v.idx;
    node(oi).back = [ai, oi, rows = std::move(rows)](Tape& t) {
      const Mat& g = t.node(oi).grad;
      const Mat& av = t.value({ai});
      Mat ga = Mat::Zero(av.rows(), av.cols());
      for (std::size_t k = 0; k < rows.size(); ++k) {
        ga.row(rows[k]) += g.row(static_cast<Eigen::Index>(k));
      }
      t.accumulate(ai, ga);
    };
  }
  return v;
}

Var Tape::block_rows(Var a, int start, int count) {
  const Mat& av = value(a);
  if (start < 0 || count < 0 || start + count > av.rows()) {
    throw std::logic_error("Tape::block_rows: slice out of range");
  }
  Mat out = av.middleRows(start, count);
  bool needs = rg(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int ai = a.idx, oi = v.idx;
    node(oi).back = [ai, oi, start, count](Tape& t) {
      const Mat& g = t.node(oi).grad;
      const Mat& av = t.value({ai});
      Mat ga = Mat::Zero(av.rows(), av.cols());
      ga.middleRows(start, count) = g;
      t.accumulate(ai, ga);
    };
  }
  return v;
}

Var Tape::transpose(Var a) {
  Mat out = value(a).transpose();
  bool needs = rg(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int ai = a.idx, oi = v.idx;
    node(oi).back = [ai, oi](Tape& t) {
      t.accumulate(ai, Mat(t.node(oi).grad.transpose()));
    };
  }
  return v;
}

Var Tape::relu(Var a) {
  Mat out = value(a).cwiseMax(0.0);
  bool needs = rg(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int ai = a.idx, oi = v.idx;
    node(oi).back = [ai, oi](Tape& t) {
      const Mat& g = t.node(oi).grad;
      const Mat& in = t.value({ai});
      Mat mask = (in.array() > 0.0).cast<double>();
      t.accumulate(ai, g.cwiseProduct(mask));
    };
  }
  return v;
}

Var Tape::sigmoid(Var a) {
  Mat out = value(a).unaryExpr([](double x) { return stable_sigmoid(x); });
  bool needs = rg(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int ai = a.idx, oi = v.idx;
    node(oi).back = [ai, oi](Tape& t) {
      const Mat& g = t.node(oi).grad;
      const Mat& y = t.value({oi});
      Mat dy = y.cwiseProduct((1.0 - y.array()).matrix());
      t.accumulate(ai, g.cwiseProduct(dy));
    };
  }
  return v;
}

Var Tape::softplus(Var a) {
  Mat out = value(a).unaryExpr([](double x) { return stable_softplus(x); });
  bool needs = rg(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int ai = a.idx, oi = v.idx;
    node(oi).back = [ai, oi](Tape& t) {
      const Mat& g = t.node(oi).grad;
      Mat dy = t.value({ai}).unaryExpr([](double x) { return stable_sigmoid(x); });
      t.accumulate(ai, g.cwiseProduct(dy));
    };
  }
  return v;
}

Var Tape::sum(Var a) {
  Mat out(1, 1);
  out(0, 0) = value(a).sum();
  bool needs = rg(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int ai = a.idx, oi = v.idx;
    node(oi).back = [ai, oi](Tape& t) {
      const Mat& av = t.value({ai});
      double g = t.node(oi).grad(0, 0);
      t.accumulate(ai, Mat(Mat::Constant(av.rows(), av.cols(), g)));
    };
  }
  return v;
}

Var Tape::row_sums(Var a) {
  Mat out = value(a).rowwise().sum();
  bool needs = rg(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int ai = a.idx, oi = v.idx;
    node(oi).back = [ai, oi](Tape& t) {
      const Mat& g = t.node(oi).grad;  // Nx1
      const Mat& av = t.value({ai});
      t.accumulate(ai, Mat(g.col(0).replicate(1, av.cols())));
    };
  }
  return v;
}

Var Tape::reciprocal(Var a) {
  Mat out = value(a).cwiseInverse();
  bool needs = rg(a);
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int ai = a.idx, oi = v.idx;
    node(oi).back = [ai, oi](Tape& t) {
      const Mat& g = t.node(oi).grad;
      const Mat& y = t.value({oi});
      t.accumulate(ai, Mat(-g.cwiseProduct(y).cwiseProduct(y)));
    };
  }
  return v;
}

Var Tape::scale_rows(Var a, Var c) {
  const Mat& av = value(a);
  const Mat& cv = value(c);
  if (cv.cols() != 1 || cv.rows() != av.rows()) {
    throw std::logic_error("Tape::scale_rows: c must be rows(a) x 1");
  }
  Mat out = av.array().colwise() * cv.col(0).array();
  bool needs = rg(a) || rg(c);
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int ai = a.idx, ci = c.idx, oi = v.idx;
    node(oi).back = [ai, ci, oi](Tape& t) {
      const Mat& g = t.node(oi).grad;
      const Mat& av = t.value({ai});
      const Mat& cv = t.value({ci});
      t.accumulate(ai, Mat(g.array().colwise() * cv.col(0).array()));
      t.accumulate(ci, Mat(g.cwiseProduct(av).rowwise().sum()));
    };
  }
  return v;
}

Var Tape::scatter_symmetric(Var w, std::vector<std::pair<int, int>> pairs, Mat base) {
  const Mat& wv = value(w);
  if (wv.cols() != 1 || wv.rows() != static_cast<Eigen::Index>(pairs.size())) {
    throw std::logic_error("Tape::scatter_symmetric: w must be |pairs| x 1");
  }
  Mat out = std::move(base);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    auto [i, j] = pairs[p];
    if (i == j || i < 0 || j < 0 || i >= out.rows() || j >= out.cols()) {
      throw std::logic_error("Tape::scatter_symmetric: bad pair index");
    }
    double v = wv(static_cast<Eigen::Index>(p), 0);
    out(i, j) += v;
    out(j, i) += v;
  }
  bool needs = rg(w);
  Var v = push(std::move(out), needs, nullptr);
  if (needs) {
    int wi = w.idx, oi = v.idx;
    node(oi).back = [wi, oi, pairs = std::move(pairs)](Tape& t) {
      const Mat& g = t.node(oi).grad;
      Mat gw(static_cast<Eigen::Index>(pairs.size()), 1);
      for (std::size_t p = 0; p < pairs.size(); ++p) {
        auto [i, j] = pairs[p];
        gw(static_cast<Eigen::Index>(p), 0) = g(i, j) + g(j, i);
      }
      t.accumulate(wi, gw);
    };
  }
  return v;
}

}  // namespace mcn
