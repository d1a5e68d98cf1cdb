#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace eof2q {

using cplx = std::complex<double>;

inline constexpr int kMaxDim = 4;       // square matrices
inline constexpr int kMaxMembers = 16;  // decomposition mixing rows

/// Dense complex square matrix of dimension 1..4. Fixed storage, value type.
class cmat {
 public:
  explicit cmat(int dim) : dim_(dim) {
    if (dim < 1 || dim > kMaxDim) throw std::invalid_argument("cmat: dim must be in 1..4");
  }

  static cmat identity(int dim) {
    cmat m(dim);
    for (int i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
  }

  int dim() const { return dim_; }

  cplx& operator()(int r, int c) { return a_[r * kMaxDim + c]; }
  const cplx& operator()(int r, int c) const { return a_[r * kMaxDim + c]; }

  friend bool operator==(const cmat& x, const cmat& y) {
    if (x.dim_ != y.dim_) return false;
    for (int r = 0; r < x.dim_; ++r)
      for (int c = 0; c < x.dim_; ++c)
        if (x(r, c) != y(r, c)) return false;
    return true;
  }

 private:
  int dim_;
  std::array<cplx, kMaxDim * kMaxDim> a_{};
};

inline cmat operator*(const cmat& x, const cmat& y) {
  const int n = x.dim();
  cmat r(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const cplx xik = x(i, k);
      if (xik == 0.0) continue;
      for (int j = 0; j < n; ++j) r(i, j) += xik * y(k, j);
    }
  return r;
}

inline cmat operator+(const cmat& x, const cmat& y) {
  cmat r(x.dim());
  for (int i = 0; i < x.dim(); ++i)
    for (int j = 0; j < x.dim(); ++j) r(i, j) = x(i, j) + y(i, j);
  return r;
}

inline cmat operator-(const cmat& x, const cmat& y) {
  cmat r(x.dim());
  for (int i = 0; i < x.dim(); ++i)
    for (int j = 0; j < x.dim(); ++j) r(i, j) = x(i, j) - y(i, j);
  return r;
}

inline cmat operator*(const cplx& f, const cmat& x) {
  cmat r(x.dim());
  for (int i = 0; i < x.dim(); ++i)
    for (int j = 0; j < x.dim(); ++j) r(i, j) = f * x(i, j);
  return r;
}

inline cmat transpose(const cmat& x) {
  cmat r(x.dim());
  for (int i = 0; i < x.dim(); ++i)
    for (int j = 0; j < x.dim(); ++j) r(i, j) = x(j, i);
  return r;
}

inline cmat adjoint(const cmat& x) {
  cmat r(x.dim());
  for (int i = 0; i < x.dim(); ++i)
    for (int j = 0; j < x.dim(); ++j) r(i, j) = std::conj(x(j, i));
  return r;
}

inline cmat conjugate(const cmat& x) {
  cmat r(x.dim());
  for (int i = 0; i < x.dim(); ++i)
    for (int j = 0; j < x.dim(); ++j) r(i, j) = std::conj(x(i, j));
  return r;
}

inline cplx trace(const cmat& x) {
  cplx t = 0.0;
  for (int i = 0; i < x.dim(); ++i) t += x(i, i);
  return t;
}

inline double frobenius_norm(const cmat& x) {
  double s = 0.0;
  for (int i = 0; i < x.dim(); ++i)
    for (int j = 0; j < x.dim(); ++j) s += std::norm(x(i, j));
  return std::sqrt(s);
}

inline double hermiticity_error(const cmat& x) {
  double s = 0.0;
  for (int i = 0; i < x.dim(); ++i)
    for (int j = 0; j < x.dim(); ++j) s += std::norm(x(i, j) - std::conj(x(j, i)));
  return std::sqrt(s);
}

inline double symmetry_error(const cmat& x) {
  double s = 0.0;
  for (int i = 0; i < x.dim(); ++i)
    for (int j = 0; j < x.dim(); ++j) s += std::norm(x(i, j) - x(j, i));
  return std::sqrt(s);
}

/// Rectangular complex matrix, rows 1..16 by cols 1..4, used for decomposition
/// mixing (columns orthonormal when it represents an isometry).
class rmat {
 public:
  rmat(int rows, int cols) : rows_(rows), cols_(cols) {
    if (rows < 1 || rows > kMaxMembers || cols < 1 || cols > kMaxDim)
      throw std::invalid_argument("rmat: shape out of range");
  }

  static rmat identity(int n) {
    rmat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  cplx& operator()(int r, int c) { return a_[r * kMaxDim + c]; }
  const cplx& operator()(int r, int c) const { return a_[r * kMaxDim + c]; }

 private:
  int rows_, cols_;
  std::array<cplx, kMaxMembers * kMaxDim> a_{};
};

/// Frobenius distance of U†U from the identity.
inline double isometry_error(const rmat& u) {
  double s = 0.0;
  for (int i = 0; i < u.cols(); ++i)
    for (int j = 0; j < u.cols(); ++j) {
      cplx g = 0.0;
      for (int k = 0; k < u.rows(); ++k) g += std::conj(u(k, i)) * u(k, j);
      if (i == j) g -= 1.0;
      s += std::norm(g);
    }
  return std::sqrt(s);
}

}  // namespace eof2q
