#include "isle/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "isle/errors.hpp"

namespace isle {

namespace {
double unit_draw(std::mt19937_64& gen) {
  return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}
}  // namespace

Matrix seeded_uniform(size_t rows, size_t cols, std::uint64_t seed, double lo, double hi) {
  Matrix m(rows, cols);
  std::mt19937_64 gen(seed);
  for (auto& x : m.data) x = lo + (hi - lo) * unit_draw(gen);
  return m;
}

Matrix seeded_integers(size_t rows, size_t cols, std::uint64_t seed, int lo, int hi) {
  Matrix m(rows, cols);
  std::mt19937_64 gen(seed);
  std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  for (auto& x : m.data) x = static_cast<double>(lo + static_cast<long long>(gen() % span));
  return m;
}

Matrix identity_matrix(size_t n) {
  Matrix m(n, n);
  for (size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

double max_relative_diff(const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) throw ShapeError("max_relative_diff: shape mismatch");
  double worst = 0.0;
  for (size_t i = 0; i < a.data.size(); ++i) {
    double denom = std::max({1.0, std::abs(a.data[i]), std::abs(b.data[i])});
    worst = std::max(worst, std::abs(a.data[i] - b.data[i]) / denom);
  }
  return worst;
}

Matrix load_matrix(const std::string& path, size_t expect_rows, size_t expect_cols) {
  Matrix m(expect_rows, expect_cols);
  if (path.size() > 4 && path.substr(path.size() - 4) == ".bin") {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open matrix: " + path);
    in.read(reinterpret_cast<char*>(m.data.data()),
            static_cast<std::streamsize>(m.data.size() * sizeof(double)));
    if (static_cast<size_t>(in.gcount()) != m.data.size() * sizeof(double))
      throw ParseError("matrix file too short: " + path);
    return m;
  }
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix: " + path);
  std::string line;
  size_t r = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (r >= expect_rows) throw ParseError("matrix has more rows than expected: " + path);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    for (size_t c = 0; c < expect_cols; ++c)
      if (!(ls >> m.at(r, c)))
        throw ParseError("matrix row " + std::to_string(r) + " too short: " + path);
    ++r;
  }
  if (r != expect_rows) throw ParseError("matrix has fewer rows than expected: " + path);
  return m;
}

void save_matrix_csv(const Matrix& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write matrix: " + path);
  out.precision(17);
  for (size_t r = 0; r < m.rows; ++r) {
    for (size_t c = 0; c < m.cols; ++c) out << (c ? "," : "") << m.at(r, c);
    out << '\n';
  }
}

}  // namespace isle
