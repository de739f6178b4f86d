#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mvn/errors.hpp"
#include "mvn/rng.hpp"

namespace mvn {

// Dense row-major matrix of doubles. Row vectors are 1xN matrices.
// Immutable-by-convention once handed to a tape or parameter set.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> d;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), d(static_cast<size_t>(r) * c, 0.0) {}
  Matrix(int r, int c, std::vector<double> data);

  static Matrix zeros(int r, int c) { return Matrix(r, c); }
  static Matrix filled(int r, int c, double v);
  static Matrix identity(int n);
  static Matrix row_vector(std::vector<double> v);
  // Uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
  static Matrix init_uniform(int r, int c, int fan_in, Rng& rng);

  double& at(int i, int j) { return d[static_cast<size_t>(i) * cols + j]; }
  double at(int i, int j) const { return d[static_cast<size_t>(i) * cols + j]; }
  double* row(int i) { return d.data() + static_cast<size_t>(i) * cols; }
  const double* row(int i) const { return d.data() + static_cast<size_t>(i) * cols; }

  size_t size() const { return d.size(); }
  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
  bool all_finite() const;
  // Checked construction path: throws InputError on NaN/Inf.
  void require_finite(const std::string& what) const;

  bool operator==(const Matrix& o) const {
    return rows == o.rows && cols == o.cols && d == o.d;
  }
};

// C (+)= A * B. Row-independent loop order: the result for row i never
// depends on how many other rows are present, which keeps single-row and
// batched products bit-identical.
void mm_nn(Matrix& c, const Matrix& a, const Matrix& b, bool accumulate = false);
// C (+)= A * B^T
void mm_nt(Matrix& c, const Matrix& a, const Matrix& b, bool accumulate = false);
// C (+)= A^T * B
void mm_tn(Matrix& c, const Matrix& a, const Matrix& b, bool accumulate = false);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

}  // namespace mvn
