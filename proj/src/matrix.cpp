#include "mvn/matrix.hpp"

#include <cmath>
#include <utility>

namespace mvn {

Matrix::Matrix(int r, int c, std::vector<double> data)
    : rows(r), cols(c), d(std::move(data)) {
  if (d.size() != static_cast<size_t>(r) * c)
    throw ShapeError("matrix data length " + std::to_string(d.size()) +
                     " does not match " + std::to_string(r) + "x" + std::to_string(c));
}

Matrix Matrix::filled(int r, int c, double v) {
  Matrix m(r, c);
  for (auto& x : m.d) x = v;
  return m;
}

Matrix Matrix::identity(int n) {
  Matrix m(n, n);
  for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

Matrix Matrix::row_vector(std::vector<double> v) {
  int n = static_cast<int>(v.size());
  return Matrix(1, n, std::move(v));
}

Matrix Matrix::init_uniform(int r, int c, int fan_in, Rng& rng) {
  Matrix m(r, c);
  double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  for (auto& x : m.d) x = rng.uniform(-bound, bound);
  return m;
}

bool Matrix::all_finite() const {
  for (double x : d)
    if (!std::isfinite(x)) return false;
  return true;
}

void Matrix::require_finite(const std::string& what) const {
  if (!all_finite()) throw InputError(what + ": non-finite entries");
}

namespace {
void check_inner(int ak, int bk, const char* kind) {
  if (ak != bk)
    throw ShapeError(std::string("matmul ") + kind + ": inner dimensions " +
                     std::to_string(ak) + " vs " + std::to_string(bk));
}
}  // namespace

void mm_nn(Matrix& c, const Matrix& a, const Matrix& b, bool accumulate) {
  check_inner(a.cols, b.rows, "nn");
  const int m = a.rows, k = a.cols, n = b.cols;
  if (c.rows != m || c.cols != n) c = Matrix(m, n);
  for (int i = 0; i < m; ++i) {
    double* ci = c.row(i);
    if (!accumulate)
      for (int j = 0; j < n; ++j) ci[j] = 0.0;
    const double* ai = a.row(i);
    for (int l = 0; l < k; ++l) {
      const double ail = ai[l];
      const double* bl = b.row(l);
      for (int j = 0; j < n; ++j) ci[j] += ail * bl[j];
    }
  }
}

void mm_nt(Matrix& c, const Matrix& a, const Matrix& b, bool accumulate) {
  check_inner(a.cols, b.cols, "nt");
  const int m = a.rows, k = a.cols, n = b.rows;
  if (c.rows != m || c.cols != n) c = Matrix(m, n);
  for (int i = 0; i < m; ++i) {
    const double* ai = a.row(i);
    double* ci = c.row(i);
    for (int j = 0; j < n; ++j) {
      const double* bj = b.row(j);
      double acc = 0.0;
      for (int l = 0; l < k; ++l) acc += ai[l] * bj[l];
      ci[j] = accumulate ? ci[j] + acc : acc;
    }
  }
}

void mm_tn(Matrix& c, const Matrix& a, const Matrix& b, bool accumulate) {
  check_inner(a.rows, b.rows, "tn");
  const int m = a.cols, k = a.rows, n = b.cols;
  if (c.rows != m || c.cols != n) c = Matrix(m, n);
  if (!accumulate)
    for (auto& x : c.d) x = 0.0;
  for (int l = 0; l < k; ++l) {
    const double* al = a.row(l);
    const double* bl = b.row(l);
    for (int i = 0; i < m; ++i) {
      const double ali = al[i];
      double* ci = c.row(i);
      for (int j = 0; j < n; ++j) ci[j] += ali * bl[j];
    }
  }
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  Matrix c;
  mm_nn(c, a, b);
  return c;
}

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols, a.rows);
  for (int i = 0; i < a.rows; ++i)
    for (int j = 0; j < a.cols; ++j) t.at(j, i) = a.at(i, j);
  return t;
}

}  // namespace mvn
