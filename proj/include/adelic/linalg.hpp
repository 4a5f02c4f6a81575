#pragma once

// Dense symmetric eigenvalues: Householder reduction to tridiagonal form
// followed by the implicit-shift QL iteration. Eigenvalues only.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "adelic/error.hpp"

namespace adelic::linalg {

/// Row-major dense square matrix of doubles.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  bool is_symmetric() const {
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if ((*this)(i, j) != (*this)(j, i)) return false;
    return true;
  }

  /// Largest |i - j| with a nonzero entry.
  std::size_t bandwidth() const {
    std::size_t bw = 0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        if ((*this)(i, j) != 0.0) bw = std::max(bw, j - i);
    return bw;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Symmetric tridiagonal matrix: diagonal d[0..n), off-diagonal e[0..n-1).
struct Tridiagonal {
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;
};

/// Householder reduction of a symmetric matrix to tridiagonal form (values
/// only, transformations discarded).
inline Tridiagonal householder_tridiagonalize(SquareMatrix a) {
  const std::size_t n = a.size();
  Tridiagonal t;
  t.diagonal.assign(n, 0.0);
  t.off_diagonal.assign(n > 0 ? n - 1 : 0, 0.0);
  if (n == 0) return t;
  std::vector<double> v(n), p(n);
  for (std::size_t k = 0; k + 2 < n; ++k) {
    double alpha2 = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) alpha2 += a(i, k) * a(i, k);
    const double alpha = std::sqrt(alpha2);
    if (alpha == 0.0) continue;
    const double x0 = a(k + 1, k);
    const double beta = x0 >= 0.0 ? -alpha : alpha;
    // v = x - beta e1, H = I - 2 v v^T / (v^T v)
    std::fill(v.begin(), v.end(), 0.0);
    v[k + 1] = x0 - beta;
    for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
    double vv = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) vv += v[i] * v[i];
    if (vv == 0.0) continue;
    const double tau = 2.0 / vv;
    // p = tau A v on the trailing block, w = p - (tau/2)(p.v) v
    double pv = 0.0;
    for (std::size_t i = k + 1; i < n; ++i) {
      double s = 0.0;
      for (std::size_t j = k + 1; j < n; ++j) s += a(i, j) * v[j];
      p[i] = tau * s;
      pv += p[i] * v[i];
    }
    const double c = 0.5 * tau * pv;
    for (std::size_t i = k + 1; i < n; ++i) p[i] -= c * v[i];
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= v[i] * p[j] + p[i] * v[j];
    a(k + 1, k) = beta;
    a(k, k + 1) = beta;
    for (std::size_t i = k + 2; i < n; ++i) a(i, k) = a(k, i) = 0.0;
  }
  for (std::size_t i = 0; i < n; ++i) t.diagonal[i] = a(i, i);
  for (std::size_t i = 0; i + 1 < n; ++i) t.off_diagonal[i] = a(i + 1, i);
  return t;
}

/// Eigenvalues of a symmetric tridiagonal matrix in ascending order via the
/// implicit-shift QL algorithm. Throws when an eigenvalue fails to converge
/// within 60 sweeps.
inline std::vector<double> tridiagonal_eigenvalues(Tridiagonal t) {
  std::vector<double>& d = t.diagonal;
  const std::size_t n = d.size();
  std::vector<double> e(n, 0.0);
  std::copy(t.off_diagonal.begin(), t.off_diagonal.end(), e.begin());
  constexpr int kMaxIterations = 60;

  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= std::numeric_limits<double>::epsilon() * dd) break;
      }
      if (m != l) {
        if (++iter > kMaxIterations)
          throw Error("linalg", "QL iteration did not converge for eigenvalue " +
                                    std::to_string(l));
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        std::size_t i = m;
        bool underflow = false;
        while (i-- > l) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (underflow) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  std::sort(d.begin(), d.end());
  return d;
}

/// Ascending eigenvalues of a dense symmetric matrix. Tridiagonal input skips
/// the Householder stage.
inline std::vector<double> symmetric_eigenvalues(const SquareMatrix& a) {
  if (!a.is_symmetric()) throw Error("linalg", "matrix is not symmetric");
  const std::size_t n = a.size();
  if (a.bandwidth() <= 1) {
    Tridiagonal t;
    t.diagonal.resize(n);
    t.off_diagonal.resize(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) t.diagonal[i] = a(i, i);
    for (std::size_t i = 0; i + 1 < n; ++i) t.off_diagonal[i] = a(i + 1, i);
    return tridiagonal_eigenvalues(std::move(t));
  }
  return tridiagonal_eigenvalues(householder_tridiagonalize(a));
}

}  // namespace adelic::linalg
