#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "mcn/tape.hpp"

using mcn::Mat;
using mcn::Tape;
using mcn::Var;

namespace {

Mat random_mat(std::mt19937_64& rng, int r, int c, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Mat m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = u(rng);
  return m;
}

// Central finite differences against the analytic gradient of a scalar
// function of several matrix inputs.
double max_rel_err(const std::vector<Mat>& inputs,
                   const std::function<double(Tape&, const std::vector<Var>&)>& f,
                   double step = 1e-6) {
  Tape tape;
  std::vector<Var> vars;
  vars.reserve(inputs.size());
  for (const Mat& m : inputs) vars.push_back(tape.leaf(m, true));
  Var loss;
  loss.idx = -1;
  double base = f(tape, vars);
  (void)base;
  // f returns the loss value but also leaves the loss as the last node.
  loss.idx = static_cast<int>(tape.size()) - 1;
  tape.backward(loss);

  double worst = 0.0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const Mat analytic = tape.grad(vars[k]);
    for (int i = 0; i < inputs[k].rows(); ++i) {
      for (int j = 0; j < inputs[k].cols(); ++j) {
        auto eval = [&](double delta) {
          std::vector<Mat> shifted = inputs;
          shifted[k](i, j) += delta;
          Tape t2;
          std::vector<Var> v2;
          for (const Mat& m : shifted) v2.push_back(t2.leaf(m, true));
          return f(t2, v2);
        };
        double num = (eval(step) - eval(-step)) / (2.0 * step);
        double ana = analytic(i, j);
        double denom = std::max(1e-8, std::abs(num) + std::abs(ana));
        worst = std::max(worst, std::abs(num - ana) / denom);
      }
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("tape evaluates a small expression correctly") {
  Tape t;
  Mat a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 5, 6, 7, 8;
  Var va = t.leaf(a, true);
  Var vb = t.leaf(b, true);
  Var prod = t.matmul(va, vb);
  Mat expect(2, 2);
  expect << 19, 22, 43, 50;
  CHECK(t.value(prod).isApprox(expect));

  Var s = t.sum(prod);
  CHECK(t.scalar(s) == doctest::Approx(134.0));
  t.backward(s);
  // d(sum(AB))/dA = ones * B^T
  Mat ga = Mat::Ones(2, 2) * b.transpose();
  CHECK(t.grad(va).isApprox(ga));
}

TEST_CASE("unused leaf gets a zero gradient") {
  Tape t;
  Var used = t.leaf(Mat::Ones(2, 2), true);
  Var unused = t.leaf(Mat::Ones(3, 3), true);
  Var loss = t.sum(used);
  t.backward(loss);
  CHECK(t.grad(unused).isZero());
  CHECK(t.grad(used).isApprox(Mat::Ones(2, 2)));
}

TEST_CASE("loss equal to sum of one parameter has all-ones gradient") {
  Tape t;
  Var p = t.leaf(Mat::Zero(3, 4), true);
  Var loss = t.sum(p);
  t.backward(loss);
  CHECK(t.grad(p).isApprox(Mat::Ones(3, 4)));
}

TEST_CASE("gradients match finite differences across the op set") {
  std::mt19937_64 rng(12345);

  SUBCASE("matmul chain with nonlinearities") {
    std::vector<Mat> in = {random_mat(rng, 3, 4), random_mat(rng, 4, 2), random_mat(rng, 1, 2)};
    double err = max_rel_err(in, [](Tape& t, const std::vector<Var>& v) {
      Var h = t.relu(t.add_rowvec(t.matmul(v[0], v[1]), v[2]));
      Var s = t.sum(t.sigmoid(h));
      return t.scalar(s);
    });
    CHECK(err < 1e-6);
  }

  SUBCASE("concat, gather, transpose, block") {
    std::vector<Mat> in = {random_mat(rng, 4, 3), random_mat(rng, 4, 2)};
    double err = max_rel_err(in, [](Tape& t, const std::vector<Var>& v) {
      Var cat = t.concat_cols({v[0], v[1]});
      Var g = t.gather_rows(cat, {0, 2, 2, 3});
      Var b = t.block_rows(g, 1, 2);
      Var s = t.sum(t.matmul(b, t.transpose(b)));
      return t.scalar(s);
    });
    CHECK(err < 1e-6);
  }

  SUBCASE("row normalization pipeline") {
    Mat a = random_mat(rng, 4, 4, 0.5, 2.0);  // positive so reciprocal is smooth
    std::vector<Mat> in = {a, random_mat(rng, 4, 3)};
    double err = max_rel_err(in, [](Tape& t, const std::vector<Var>& v) {
      Var c = t.reciprocal(t.row_sums(v[0]));
      Var msg = t.matmul(t.scale_rows(v[0], c), v[1]);
      Var s = t.sum(t.softplus(msg));
      return t.scalar(s);
    });
    CHECK(err < 1e-6);
  }

  SUBCASE("scatter_symmetric into an adjacency") {
    std::vector<Mat> in = {random_mat(rng, 3, 1), random_mat(rng, 4, 2)};
    double err = max_rel_err(in, [](Tape& t, const std::vector<Var>& v) {
      Var w = t.sigmoid(v[0]);
      Var a = t.scatter_symmetric(w, {{0, 1}, {1, 2}, {0, 3}}, Mat::Identity(4, 4));
      Var s = t.sum(t.matmul(a, v[1]));
      return t.scalar(s);
    });
    CHECK(err < 1e-6);
  }

  SUBCASE("elementwise ops") {
    std::vector<Mat> in = {random_mat(rng, 3, 3), random_mat(rng, 3, 3), random_mat(rng, 1, 1)};
    double err = max_rel_err(in, [](Tape& t, const std::vector<Var>& v) {
      Var x = t.cmul(v[0], v[1]);
      Var y = t.add_scalar(t.sub(x, v[1]), v[2]);
      Var s = t.sum(t.affine(y, 0.5, -1.0));
      return t.scalar(s);
    });
    CHECK(err < 1e-6);
  }

  SUBCASE("concat_rows and scalar broadcast") {
    std::vector<Mat> in = {random_mat(rng, 2, 3), random_mat(rng, 3, 3)};
    double err = max_rel_err(in, [](Tape& t, const std::vector<Var>& v) {
      Var cat = t.concat_rows({v[0], v[1]});
      Var s = t.sum(t.softplus(cat));
      return t.scalar(s);
    });
    CHECK(err < 1e-6);
  }
}

TEST_CASE("gather accumulates duplicated rows") {
  Tape t;
  Var p = t.leaf(Mat::Ones(3, 2), true);
  Var g = t.gather_rows(p, {1, 1, 1});
  Var loss = t.sum(g);
  t.backward(loss);
  Mat expect = Mat::Zero(3, 2);
  expect.row(1) = Eigen::RowVector2d(3, 3);
  CHECK(t.grad(p).isApprox(expect));
}

TEST_CASE("backward twice on separate tapes is independent") {
  for (int rep = 0; rep < 2; ++rep) {
    Tape t;
    Var p = t.leaf(Mat::Constant(2, 2, 2.0), true);
    Var loss = t.sum(t.cmul(p, p));
    t.backward(loss);
    CHECK(t.grad(p).isApprox(Mat::Constant(2, 2, 4.0)));
  }
}
