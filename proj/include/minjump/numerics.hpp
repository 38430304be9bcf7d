/*
 Copyright 2026 The minjump Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#ifndef MINJUMP_NUMERICS_HPP
#define MINJUMP_NUMERICS_HPP

/**
 * @file numerics.hpp
 * @brief Dense kernels shared by the whole library.
 *
 * Matrices here are small (at most a few dozen rows), so everything is dense
 * and allocation-happy. Eigen provides storage, products and LU; the matrix
 * exponential and the symmetric eigensolver are implemented here because
 * their accuracy contracts are part of the verification pipeline.
 */

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "minjump/errors.hpp"

namespace minjump {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline bool all_finite(const Matrix& m) { return m.allFinite(); }

/**
 * @brief Symmetric matrix with a single source of truth for each entry.
 *
 * The full square is stored for cheap products, but every mutation writes
 * both (i,j) and (j,i), so the stored matrix is always exactly symmetric.
 */
class SymMatrix {
 public:
  SymMatrix() = default;

  explicit SymMatrix(Index n) : m_(Matrix::Zero(n, n)) {}

  /// Mirrors the upper triangle of @p m; the strict lower triangle is ignored.
  static SymMatrix from_upper(const Matrix& m) {
    check_square(m);
    SymMatrix s(m.rows());
    for (Index j = 0; j < m.cols(); ++j) {
      for (Index i = 0; i <= j; ++i) {
        s.m_(i, j) = m(i, j);
        s.m_(j, i) = m(i, j);
      }
    }
    return s;
  }

  /// (M + Mᵀ)/2.
  static SymMatrix symmetric_part(const Matrix& m) {
    check_square(m);
    SymMatrix s(m.rows());
    for (Index j = 0; j < m.cols(); ++j) {
      for (Index i = 0; i <= j; ++i) {
        const double v = 0.5 * (m(i, j) + m(j, i));
        s.m_(i, j) = v;
        s.m_(j, i) = v;
      }
    }
    return s;
  }

  static SymMatrix identity(Index n) {
    SymMatrix s(n);
    s.m_.setIdentity();
    return s;
  }

  static SymMatrix zero(Index n) { return SymMatrix(n); }

  static SymMatrix diagonal(const Vector& d) {
    SymMatrix s(d.size());
    s.m_.diagonal() = d;
    return s;
  }

  Index dim() const { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }

  void set(Index i, Index j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  const Matrix& matrix() const { return m_; }

  /// Tᵀ S T.
  SymMatrix congruence(const Matrix& t) const {
    if (t.rows() != dim()) throw DimensionError("congruence: row count of T must match dim(S)");
    return symmetric_part(t.transpose() * m_ * t);
  }

  double quadratic(const Vector& v) const { return v.dot(m_ * v); }

  SymMatrix& operator+=(const SymMatrix& o) {
    check_same(o);
    m_ += o.m_;
    return *this;
  }
  SymMatrix& operator-=(const SymMatrix& o) {
    check_same(o);
    m_ -= o.m_;
    return *this;
  }
  SymMatrix& operator*=(double a) {
    m_ *= a;
    return *this;
  }

  friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
  friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
  friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
  friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }
  friend SymMatrix operator-(SymMatrix a) { return a *= -1.0; }

  /// S + a·I.
  SymMatrix shifted(double a) const {
    SymMatrix s = *this;
    s.m_.diagonal().array() += a;
    return s;
  }

 private:
  static void check_square(const Matrix& m) {
    if (m.rows() != m.cols()) throw DimensionError("symmetric matrix must be square");
  }
  void check_same(const SymMatrix& o) const {
    if (o.dim() != dim()) throw DimensionError("symmetric matrix dimension mismatch");
  }

  Matrix m_;
};

namespace detail {

// (13,13) Padé coefficients; see Higham, "The scaling and squaring method
// for the matrix exponential revisited" (2005).
inline constexpr double kPade13[] = {64764752532480000.0,
                                     32382376266240000.0,
                                     7771770303897600.0,
                                     1187353796428800.0,
                                     129060195264000.0,
                                     10559470521600.0,
                                     670442572800.0,
                                     33522128640.0,
                                     1323241920.0,
                                     40840800.0,
                                     960960.0,
                                     16380.0,
                                     182.0,
                                     1.0};

// Largest 1-norm for which the unscaled (13,13) approximant is accurate to
// double precision.
inline constexpr double kPade13Theta = 5.371920351148152;

}  // namespace detail

/**
 * @brief e^{M t} by scaling and squaring with the (13,13) Padé approximant.
 *
 * @throws DimensionError if @p m is not square.
 * @throws NumericError on non-finite input.
 */
inline Matrix expm(const Matrix& m, double t = 1.0) {
  if (m.rows() != m.cols()) throw DimensionError("expm: matrix must be square");
  if (!std::isfinite(t) || !all_finite(m)) throw NumericError("expm: non-finite input");
  const Index n = m.rows();
  if (n == 0) return Matrix(0, 0);

  Matrix a = m * t;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 == 0.0) return Matrix::Identity(n, n);
  int squarings = 0;
  if (norm1 > detail::kPade13Theta) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / detail::kPade13Theta)));
    a /= std::ldexp(1.0, squarings);
  }

  const auto& b = detail::kPade13;
  const Matrix id = Matrix::Identity(n, n);
  const Matrix a2 = a * a;
  const Matrix a4 = a2 * a2;
  const Matrix a6 = a4 * a2;
  const Matrix u_inner = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 + b[5] * a4 +
                         b[3] * a2 + b[1] * id;
  const Matrix u = a * u_inner;
  const Matrix v =
      a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;

  Matrix r = (v - u).partialPivLu().solve(v + u);
  for (int k = 0; k < squarings; ++k) r = r * r;
  if (!all_finite(r)) throw NumericError("expm: result overflowed");
  return r;
}

/// Eigenvalues (ascending) and matching orthonormal eigenvectors (columns).
struct SymEigen {
  Vector values;
  Matrix vectors;
};

/**
 * @brief Cyclic Jacobi eigen-decomposition.
 *
 * Sweeps until the off-diagonal Frobenius norm drops below 1e-12 of the
 * matrix norm (or it underflows). Quadratic convergence makes this take
 * a handful of sweeps for the ≤ 24×24 blocks used by the library.
 */
inline SymEigen sym_eig(const SymMatrix& s) {
  if (!all_finite(s.matrix())) throw NumericError("sym_eig: non-finite entries");
  const Index n = s.dim();
  Matrix a = s.matrix();
  Matrix v = Matrix::Identity(n, n);
  const double scale = a.norm();
  constexpr int kMaxSweeps = 100;

  auto off_norm = [&a, n]() {
    double acc = 0.0;
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < j; ++i) acc += 2.0 * a(i, j) * a(i, j);
    return std::sqrt(acc);
  };

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    const double off = off_norm();
    if (off <= 1e-12 * scale || off == 0.0) break;
    for (Index p = 0; p < n - 1; ++p) {
      for (Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        // Rotation annihilating a(p,q); t is the smaller root of t² + 2θt − 1 = 0.
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        for (Index k = 0; k < n; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (Index k = 0; k < n; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (Index k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&a](Index x, Index y) { return a(x, x) < a(y, y); });

  SymEigen out{Vector(n), Matrix(n, n)};
  for (Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

inline Vector sym_eigenvalues(const SymMatrix& s) { return sym_eig(s).values; }

/// λ_max(S). Empty matrices report −∞ so that they never dominate a max.
inline double sym_eig_max(const SymMatrix& s) {
  if (s.dim() == 0) return -std::numeric_limits<double>::infinity();
  return sym_eigenvalues(s).maxCoeff();
}

inline double sym_eig_min(const SymMatrix& s) {
  if (s.dim() == 0) return std::numeric_limits<double>::infinity();
  return sym_eigenvalues(s).minCoeff();
}

/// True iff the Cholesky factorization of S − tol·I succeeds.
inline bool is_pd(const SymMatrix& s, double tol = 0.0) {
  if (!all_finite(s.matrix()) || !std::isfinite(tol)) return false;
  if (s.dim() == 0) return true;
  Eigen::LLT<Matrix> llt(s.shifted(-tol).matrix());
  return llt.info() == Eigen::Success;
}

/// S⁻¹ for symmetric positive definite S.
inline SymMatrix inv_spd(const SymMatrix& s) {
  if (!all_finite(s.matrix())) throw NumericError("inv_spd: non-finite entries");
  Eigen::LLT<Matrix> llt(s.matrix());
  if (llt.info() != Eigen::Success) throw NumericError("inv_spd: matrix is not positive definite");
  return SymMatrix::symmetric_part(llt.solve(Matrix::Identity(s.dim(), s.dim())));
}

/// Spectral norm ‖M‖₂ via the eigenvalues of MᵀM.
inline double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  const SymMatrix gram = SymMatrix::symmetric_part(m.transpose() * m);
  return std::sqrt(std::max(0.0, sym_eig_max(gram)));
}

/// Block-diagonal assembly of square blocks.
inline Matrix block_diagonal(const std::vector<Matrix>& blocks) {
  Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  Matrix out = Matrix::Zero(n, n);
  Index at = 0;
  for (const auto& b : blocks) {
    out.block(at, at, b.rows(), b.cols()) = b;
    at += b.rows();
  }
  return out;
}

}  // namespace minjump

#endif  // MINJUMP_NUMERICS_HPP
