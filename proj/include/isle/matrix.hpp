#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace isle {

// Dense row-major double matrix.
struct Matrix {
  size_t rows = 0, cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(size_t r, size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(size_t r, size_t c) { return data[r * cols + c]; }
  double at(size_t r, size_t c) const { return data[r * cols + c]; }
  std::span<double> row(size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(size_t r) const { return {data.data() + r * cols, cols}; }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
};

// Seeded fills; engine-level draws only, so values are identical across
// platforms and standard libraries.
Matrix seeded_uniform(size_t rows, size_t cols, std::uint64_t seed, double lo = -1.0,
                      double hi = 1.0);
Matrix seeded_integers(size_t rows, size_t cols, std::uint64_t seed, int lo, int hi);

Matrix identity_matrix(size_t n);

// max over elements of |a-b| / max(1, |a|, |b|); shapes must match.
double max_relative_diff(const Matrix& a, const Matrix& b);

// CSV (comma or whitespace separated rows) or raw little-endian float64
// row-major for paths ending in ".bin" (expected dims required).
Matrix load_matrix(const std::string& path, size_t expect_rows, size_t expect_cols);
void save_matrix_csv(const Matrix& m, const std::string& path);

}  // namespace isle
