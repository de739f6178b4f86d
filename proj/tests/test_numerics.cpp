#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mvn/matrix.hpp"
#include "mvn/models.hpp"
#include "mvn/optim.hpp"
#include "mvn/tape.hpp"
#include "test_support.hpp"

using namespace mvn;
using namespace mvn_test;

namespace {

// reference product, deliberately naive
Matrix triple_loop_matmul(const Matrix& a, const Matrix& b) {
  Matrix c(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < b.cols; ++j) {
      double acc = 0.0;
      for (int k = 0; k < a.cols; ++k) acc += a.at(i, k) * b.at(k, j);
      c.at(i, j) = acc;
    }
  return c;
}

}  // namespace

TEST_CASE("matmul identity") {
  Rng rng(1);
  Matrix b = random_matrix(3, 5, rng);
  Matrix c = matmul(Matrix::identity(3), b);
  CHECK(c == b);
}

TEST_CASE("matmul hand case") {
  Matrix a(2, 2, {1, 2, 3, 4});
  Matrix b(2, 1, {1, 1});
  Matrix c = matmul(a, b);
  CHECK(c.at(0, 0) == 3.0);
  CHECK(c.at(1, 0) == 7.0);
}

TEST_CASE("matmul matches triple-loop oracle") {
  Rng rng(2);
  Matrix a = random_matrix(5, 7, rng);
  Matrix b = random_matrix(7, 3, rng);
  Matrix got = matmul(a, b);
  Matrix want = triple_loop_matmul(a, b);
  for (size_t i = 0; i < got.size(); ++i) CHECK(rel_err(got.d[i], want.d[i]) < 1e-12);
}

TEST_CASE("matmul oracle property over small shapes") {
  Rng rng(3);
  for (int it = 0; it < 25; ++it) {
    int m = 1 + static_cast<int>(rng.uniform_int(16));
    int k = 1 + static_cast<int>(rng.uniform_int(16));
    int n = 1 + static_cast<int>(rng.uniform_int(16));
    Matrix a = random_matrix(m, k, rng);
    Matrix b = random_matrix(k, n, rng);
    Matrix got = matmul(a, b);
    Matrix want = triple_loop_matmul(a, b);
    for (size_t i = 0; i < got.size(); ++i) CHECK(rel_err(got.d[i], want.d[i]) < 1e-12);
  }
}

TEST_CASE("matmul rejects dimension mismatch") {
  Matrix a(2, 3), b(4, 2);
  CHECK_THROWS_AS(matmul(a, b), ShapeError);
}

TEST_CASE("transpose kernels agree with explicit transpose") {
  Rng rng(4);
  Matrix a = random_matrix(4, 6, rng);
  Matrix b = random_matrix(5, 6, rng);
  Matrix nt;
  mm_nt(nt, a, b);
  Matrix want = triple_loop_matmul(a, transpose(b));
  for (size_t i = 0; i < nt.size(); ++i) CHECK(rel_err(nt.d[i], want.d[i]) < 1e-12);
  Matrix c = random_matrix(6, 4, rng);
  Matrix d = random_matrix(6, 5, rng);
  Matrix tn;
  mm_tn(tn, c, d);
  Matrix want2 = triple_loop_matmul(transpose(c), d);
  for (size_t i = 0; i < tn.size(); ++i) CHECK(rel_err(tn.d[i], want2.d[i]) < 1e-12);
}

TEST_CASE("backward on a pass-through leaf") {
  Tape tape;
  Val x = tape.leaf(Matrix(1, 1, {3.0}), true);
  tape.backward(x);
  CHECK(tape.grad(x).d[0] == 1.0);
}

TEST_CASE("backward rejects non-scalar roots") {
  Tape tape;
  Val x = tape.leaf(Matrix(2, 2), true);
  CHECK_THROWS_AS(tape.backward(x), ContractError);
}

TEST_CASE("matmul gradients match finite differences") {
  Rng rng(5);
  Matrix a = random_matrix(3, 3, rng);
  Matrix b = random_matrix(3, 3, rng);

  Tape tape;
  Val av = tape.leaf(a, true);
  Val bv = tape.leaf(b, true);
  tape.backward(tape.sum(tape.matmul(av, bv)));

  auto loss = [&]() {
    Tape t;
    Val l = t.sum(t.matmul(t.leaf(a, false), t.leaf(b, false)));
    return t.value(l).d[0];
  };
  double worst = max_grad_rel_err({&a, &b}, {&tape.grad(av), &tape.grad(bv)}, loss);
  CHECK(worst < 1e-6);
}

TEST_CASE("gradients accumulate when an operand is reused") {
  Tape tape;
  Val x = tape.leaf(Matrix(2, 2, {1, 2, 3, 4}), true);
  Val f = tape.add(tape.sum(x), tape.sum(x));
  tape.backward(f);
  for (double g : tape.grad(x).d) CHECK(g == 2.0);
}

TEST_CASE("elementwise and structural ops pass finite differences") {
  Rng rng(6);
  Matrix a = random_matrix(2, 4, rng, 0.8);
  Matrix b = random_matrix(2, 4, rng, 0.8);
  Matrix r = random_matrix(1, 4, rng, 0.8);

  auto build = [&](Tape& t, bool needs) {
    Val av = t.leaf(a, needs);
    Val bv = t.leaf(b, needs);
    Val rv = t.leaf(r, needs);
    Val u = t.mul(t.sigmoid(av), t.tanh(bv));
    Val v = t.sub(t.one_minus(u), t.scale(av, 0.3));
    Val w = t.add_rowvec(v, rv);
    Val top = t.slice_rows(w, 0, 1);
    Val bottom = t.slice_rows(w, 1, 2);
    Val joined = t.concat_rows({bottom, top});
    struct Out { Val loss, av, bv, rv; } out{t.sum(joined), av, bv, rv};
    return out;
  };

  Tape tape;
  auto g = build(tape, true);
  tape.backward(g.loss);
  auto loss = [&]() {
    Tape t;
    return t.value(build(t, false).loss).d[0];
  };
  double worst = max_grad_rel_err({&a, &b, &r},
                                  {&tape.grad(g.av), &tape.grad(g.bv), &tape.grad(g.rv)},
                                  loss);
  CHECK(worst < 1e-6);
}

TEST_CASE("softmax output is a distribution") {
  Rng rng(7);
  for (int it = 0; it < 50; ++it) {
    std::vector<double> logits(2 + rng.uniform_int(6));
    for (auto& x : logits) x = rng.uniform(-15.0, 15.0);
    auto p = softmax(logits);
    double sum = 0.0;
    for (double v : p) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
      sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-12);
  }
  // saturated logits still sum to 1
  auto p = softmax({40.0, -40.0});
  CHECK(std::abs(p[0] + p[1] - 1.0) < 1e-12);
}

TEST_CASE("cross-entropy uniform case") {
  auto [loss, grad] = softmax_cross_entropy({0.0, 0.0}, 0);
  CHECK(std::abs(loss - std::log(2.0)) < 1e-12);
  auto [loss1, grad1] = softmax_cross_entropy({0.0, 0.0}, 1);
  CHECK(std::abs(loss1 - std::log(2.0)) < 1e-12);
}

TEST_CASE("cross-entropy saturated case") {
  auto [loss, grad] = softmax_cross_entropy({30.0, -30.0}, 0);
  CHECK(loss >= 0.0);
  CHECK(loss < 1e-9);
}

TEST_CASE("cross-entropy gradient matches finite differences") {
  Rng rng(8);
  for (int it = 0; it < 20; ++it) {
    std::vector<double> logits{rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
    int label = static_cast<int>(rng.uniform_int(2));
    auto [loss, grad] = softmax_cross_entropy(logits, label);
    const double h = 1e-6;
    for (int j = 0; j < 2; ++j) {
      auto up = logits, down = logits;
      up[j] += h;
      down[j] -= h;
      double numeric = (softmax_cross_entropy(up, label).first -
                        softmax_cross_entropy(down, label).first) /
                       (2.0 * h);
      CHECK(rel_err(grad[j], numeric) < 1e-6);
    }
  }
}

TEST_CASE("cross-entropy rejects a bad label") {
  CHECK_THROWS_AS(softmax_cross_entropy({0.0, 0.0}, 2), IndexError);
  CHECK_THROWS_AS(softmax_cross_entropy({0.0, 0.0}, -1), IndexError);
}

TEST_CASE("tape cross-entropy equals the per-row mean") {
  Rng rng(9);
  Matrix logits = random_matrix(5, 2, rng, 3.0);
  std::vector<int> labels{0, 1, 1, 0, 1};
  Tape tape;
  Val lv = tape.leaf(logits, true);
  Val loss = tape.softmax_xent_mean(lv, labels);
  double want = 0.0;
  for (int t = 0; t < 5; ++t)
    want += softmax_cross_entropy({logits.at(t, 0), logits.at(t, 1)}, labels[t]).first;
  want /= 5.0;
  CHECK(std::abs(tape.value(loss).d[0] - want) < 1e-12);

  tape.backward(loss);
  auto loss_fn = [&]() {
    Tape t;
    return t.value(t.softmax_xent_mean(t.leaf(logits, false), labels)).d[0];
  };
  CHECK(max_grad_rel_err({&logits}, {&tape.grad(lv)}, loss_fn) < 1e-6);
}

namespace {
BackboneParams zero_gru(int in_dim, int hidden) {
  Rng rng(0);
  BackboneParams p = BackboneParams::init(CellKind::Gru, in_dim, hidden, rng);
  for (auto& m : p.p.values)
    for (auto& x : m.d) x = 0.0;
  return p;
}
}  // namespace

TEST_CASE("gru cell: zero parameters and zero state give zero output") {
  BackboneParams p = zero_gru(3, 4);
  auto h = cell_step_values({0.7, -0.3, 1.1}, {0, 0, 0, 0}, p);
  for (double v : h) CHECK(v == 0.0);
}

TEST_CASE("gru cell: saturated update gate forgets the state") {
  BackboneParams p = zero_gru(3, 4);
  for (auto& x : p.p.get("bz").d) x = 20.0;
  auto h = cell_step_values({0.5, 0.5, 0.5}, {0.9, -0.8, 0.7, -0.6}, p);
  for (double v : h) CHECK(std::abs(v) < 1e-8);
}

TEST_CASE("gru cell gradients match finite differences") {
  Rng rng(10);
  BackboneParams p = BackboneParams::init(CellKind::Gru, 3, 4, rng);
  Matrix x = random_matrix(1, 3, rng);
  Matrix h0 = random_matrix(1, 4, rng, 0.5);

  Tape tape;
  BackboneLeaves lv = BackboneLeaves::make(tape, p, true);
  Val loss = tape.sum(cell_forward(tape, tape.leaf(x, false), tape.leaf(h0, false), p, lv));
  tape.backward(loss);

  std::vector<Matrix*> mats;
  std::vector<const Matrix*> grads;
  for (size_t i = 0; i < p.p.count(); ++i) {
    if (p.p.names[i].rfind("head", 0) == 0) continue;  // head is not part of the cell
    mats.push_back(&p.p.values[i]);
    grads.push_back(&tape.grad(lv.vals[i]));
  }
  auto loss_fn = [&]() {
    Tape t;
    BackboneLeaves l = BackboneLeaves::make(t, p, false);
    return t.value(t.sum(cell_forward(t, t.leaf(x, false), t.leaf(h0, false), p, l))).d[0];
  };
  CHECK(max_grad_rel_err(mats, grads, loss_fn) < 1e-4);
}

TEST_CASE("adam first step moves by about -lr sign(grad)") {
  ParamSet params;
  params.add("w", Matrix(1, 1, {0.5}));
  AdamState st = AdamState::init(params);
  adam_step(params, {Matrix(1, 1, {0.3})}, st, 0.01);
  CHECK(std::abs(params.get("w").d[0] - (0.5 - 0.01)) < 1e-8);
  CHECK(st.step == 1);
}

TEST_CASE("adam with zero gradients is a fixed point") {
  Rng rng(11);
  ParamSet params;
  params.add("w", random_matrix(3, 2, rng));
  Matrix before = params.get("w");
  AdamState st = AdamState::init(params);
  for (int i = 0; i < 5; ++i) adam_step(params, {Matrix(3, 2)}, st, 0.1);
  CHECK(params.get("w") == before);
}

TEST_CASE("adam converges on a quadratic") {
  // scalar oracle run beforehand: w after 100 steps = 0.002936675681102549
  ParamSet params;
  params.add("w", Matrix(1, 1, {1.0}));
  AdamState st = AdamState::init(params);
  for (int i = 0; i < 100; ++i) {
    Matrix g(1, 1, {2.0 * params.get("w").d[0]});
    adam_step(params, {g}, st, 0.1);
  }
  double w = params.get("w").d[0];
  CHECK(std::abs(w) < 0.1);
  CHECK(std::abs(w - 0.002936675681102549) < 1e-6);
}

TEST_CASE("adam rejects mismatched gradient shapes") {
  ParamSet params;
  params.add("w", Matrix(2, 2));
  AdamState st = AdamState::init(params);
  CHECK_THROWS_AS(adam_step(params, {Matrix(2, 3)}, st, 0.1), ShapeError);
}

TEST_CASE("learning-rate schedule") {
  LrSchedule lr;  // 1e-3, 0.25 every 20
  CHECK(lr.at(0) == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(lr.at(19) == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(lr.at(20) == doctest::Approx(2.5e-4).epsilon(1e-12));
  CHECK(lr.at(40) == doctest::Approx(6.25e-5).epsilon(1e-12));
  double prev = lr.at(0);
  for (int e = 1; e <= 100; ++e) {
    CHECK(lr.at(e) <= prev);
    CHECK(lr.at(e) > 0.0);
    prev = lr.at(e);
  }
}
