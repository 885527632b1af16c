#pragma once

#include <cstddef>
#include <vector>

namespace occulstm {

using Vec = std::vector<double>;

// Dense row-major matrix. Everything in this project is small enough that a
// plain contiguous buffer beats pulling in a linear-algebra dependency.
struct Matrix {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  const double* row(std::size_t i) const { return a.data() + i * cols; }

  bool same_shape(const Matrix& o) const { return rows == o.rows && cols == o.cols; }
  bool operator==(const Matrix& o) const {
    return rows == o.rows && cols == o.cols && a == o.a;
  }
};

// y = M x
inline Vec matvec(const Matrix& m, const Vec& x) {
  Vec y(m.rows, 0.0);
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* r = m.row(i);
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

// y += M^T x
inline void tmatvec_add(const Matrix& m, const Vec& x, Vec& y) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* r = m.row(i);
    const double xi = x[i];
    for (std::size_t j = 0; j < m.cols; ++j) y[j] += r[j] * xi;
  }
}

// M += u v^T
inline void outer_add(Matrix& m, const Vec& u, const double* v) {
  for (std::size_t i = 0; i < m.rows; ++i) {
    double* r = m.a.data() + i * m.cols;
    const double ui = u[i];
    for (std::size_t j = 0; j < m.cols; ++j) r[j] += ui * v[j];
  }
}

}  // namespace occulstm
