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
#ifndef MINJUMP_SDP_HPP
#define MINJUMP_SDP_HPP

/**
 * @file sdp.hpp
 * @brief Small dense semidefinite margin maximizer.
 *
 * Problems are stated as
 *
 *     maximize ε  subject to  F_k(x) ⪯ −εI  (strict blocks)
 *                             F_k(x) ⪯ 0    (non-strict blocks)
 *
 * with every F_k affine in the decision matrices. Internally this is the
 * dual-form SDP  max bᵀy  s.t.  Z_k = C_k − Σ_l y_l A_kl ⪰ 0,  where
 * y = (vec(x), ε), C_k = −F_k(0) and A_kl is the coefficient of scalar l.
 * Each unknown other than ε is boxed to |y_l| ≤ variable_bound, which keeps
 * the feasible set bounded and hence the primal side strictly feasible.
 *
 * The solver is an infeasible-start primal-dual path-following method with
 * the HKM search direction and Mehrotra predictor-corrector steps.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "minjump/errors.hpp"
#include "minjump/numerics.hpp"

namespace minjump::sdp {

using VarId = std::size_t;

/**
 * @brief Affine matrix expression  C + Σ_s y_s·M_s  over scalar unknowns y.
 */
class AffineExpr {
 public:
  AffineExpr() = default;
  AffineExpr(Index rows, Index cols) : constant_(Matrix::Zero(rows, cols)) {}

  static AffineExpr constant(const Matrix& c) {
    AffineExpr e;
    e.constant_ = c;
    return e;
  }

  /// y_s · coeff.
  static AffineExpr scalar_term(std::size_t s, const Matrix& coeff) {
    AffineExpr e(coeff.rows(), coeff.cols());
    e.terms_.emplace(s, coeff);
    return e;
  }

  Index rows() const { return constant_.rows(); }
  Index cols() const { return constant_.cols(); }
  const Matrix& constant_part() const { return constant_; }
  const std::map<std::size_t, Matrix>& terms() const { return terms_; }

  AffineExpr& operator+=(const AffineExpr& o) {
    check_shape(o);
    constant_ += o.constant_;
    for (const auto& [s, m] : o.terms_) {
      auto it = terms_.find(s);
      if (it == terms_.end())
        terms_.emplace(s, m);
      else
        it->second += m;
    }
    return *this;
  }
  AffineExpr& operator-=(const AffineExpr& o) { return *this += o * -1.0; }
  AffineExpr& operator*=(double a) {
    constant_ *= a;
    for (auto& [s, m] : terms_) m *= a;
    return *this;
  }

  friend AffineExpr operator+(AffineExpr a, const AffineExpr& b) { return a += b; }
  friend AffineExpr operator-(AffineExpr a, const AffineExpr& b) { return a -= b; }
  friend AffineExpr operator*(AffineExpr a, double s) { return a *= s; }
  friend AffineExpr operator*(double s, AffineExpr a) { return a *= s; }
  friend AffineExpr operator-(AffineExpr a) { return a *= -1.0; }

  friend AffineExpr operator+(AffineExpr a, const Matrix& c) {
    a.check_shape(c.rows(), c.cols());
    a.constant_ += c;
    return a;
  }
  friend AffineExpr operator-(AffineExpr a, const Matrix& c) { return a + Matrix(-c); }

  friend AffineExpr operator*(const Matrix& left, const AffineExpr& e) {
    if (left.cols() != e.rows()) throw DimensionError("affine product: inner dimensions differ");
    AffineExpr out;
    out.constant_ = left * e.constant_;
    for (const auto& [s, m] : e.terms_) out.terms_.emplace(s, left * m);
    return out;
  }
  friend AffineExpr operator*(const AffineExpr& e, const Matrix& right) {
    if (e.cols() != right.rows()) throw DimensionError("affine product: inner dimensions differ");
    AffineExpr out;
    out.constant_ = e.constant_ * right;
    for (const auto& [s, m] : e.terms_) out.terms_.emplace(s, m * right);
    return out;
  }

  AffineExpr transpose() const {
    AffineExpr out;
    out.constant_ = constant_.transpose();
    for (const auto& [s, m] : terms_) out.terms_.emplace(s, m.transpose());
    return out;
  }

  /// Block matrix from a rectangular grid of expressions.
  static AffineExpr blocks(const std::vector<std::vector<AffineExpr>>& grid) {
    if (grid.empty() || grid.front().empty()) throw DimensionError("empty block grid");
    std::vector<Index> heights;
    std::vector<Index> widths;
    for (const auto& row : grid) {
      if (row.size() != grid.front().size()) throw DimensionError("ragged block grid");
      heights.push_back(row.front().rows());
    }
    for (const auto& e : grid.front()) widths.push_back(e.cols());
    Index total_rows = 0;
    Index total_cols = 0;
    for (Index h : heights) total_rows += h;
    for (Index w : widths) total_cols += w;

    AffineExpr out(total_rows, total_cols);
    Index r0 = 0;
    for (std::size_t bi = 0; bi < grid.size(); ++bi) {
      Index c0 = 0;
      for (std::size_t bj = 0; bj < grid[bi].size(); ++bj) {
        const AffineExpr& e = grid[bi][bj];
        if (e.rows() != heights[bi] || e.cols() != widths[bj])
          throw DimensionError("block grid sizes are inconsistent");
        out.constant_.block(r0, c0, e.rows(), e.cols()) = e.constant_;
        for (const auto& [s, m] : e.terms_) {
          auto it = out.terms_.find(s);
          if (it == out.terms_.end())
            it = out.terms_.emplace(s, Matrix::Zero(total_rows, total_cols)).first;
          it->second.block(r0, c0, m.rows(), m.cols()) += m;
        }
        c0 += widths[bj];
      }
      r0 += heights[bi];
    }
    return out;
  }

  Matrix evaluate(const Vector& y) const {
    Matrix out = constant_;
    for (const auto& [s, m] : terms_) {
      if (static_cast<Index>(s) >= y.size()) throw DimensionError("expression references unknown scalar");
      out += y(static_cast<Index>(s)) * m;
    }
    return out;
  }

 private:
  void check_shape(const AffineExpr& o) const { check_shape(o.rows(), o.cols()); }
  void check_shape(Index r, Index c) const {
    if (r != rows() || c != cols()) throw DimensionError("affine expression shapes differ");
  }

  Matrix constant_;
  std::map<std::size_t, Matrix> terms_;
};

enum class VarKind { symmetric, rectangular };

struct VariableInfo {
  std::string name;
  VarKind kind = VarKind::symmetric;
  Index rows = 0;
  Index cols = 0;
  std::size_t offset = 0;  ///< first scalar index
  std::size_t count = 0;   ///< scalar unknowns
};

/// One constraint F(x) ⪯ −εI (strict) or F(x) ⪯ 0.
struct AffineBlock {
  std::string name;
  AffineExpr lhs;
  bool strict = false;
};

class SdpProblem {
 public:
  VarId add_symmetric(std::string name, Index dim) {
    if (dim <= 0) throw DimensionError("symmetric variable needs a positive dimension");
    VariableInfo v{std::move(name), VarKind::symmetric, dim, dim, scalars_,
                   static_cast<std::size_t>(dim * (dim + 1) / 2)};
    scalars_ += v.count;
    vars_.push_back(std::move(v));
    return vars_.size() - 1;
  }

  VarId add_matrix(std::string name, Index rows, Index cols) {
    if (rows <= 0 || cols <= 0) throw DimensionError("matrix variable needs positive dimensions");
    VariableInfo v{std::move(name), VarKind::rectangular, rows, cols, scalars_,
                   static_cast<std::size_t>(rows * cols)};
    scalars_ += v.count;
    vars_.push_back(std::move(v));
    return vars_.size() - 1;
  }

  /// The decision matrix as an affine expression.
  AffineExpr var(VarId id) const {
    const VariableInfo& v = vars_.at(id);
    AffineExpr e(v.rows, v.cols);
    std::size_t s = v.offset;
    if (v.kind == VarKind::symmetric) {
      for (Index b = 0; b < v.cols; ++b) {
        for (Index a = 0; a <= b; ++a) {
          Matrix m = Matrix::Zero(v.rows, v.cols);
          m(a, b) = 1.0;
          m(b, a) = 1.0;
          e += AffineExpr::scalar_term(s++, m);
        }
      }
    } else {
      for (Index b = 0; b < v.cols; ++b) {
        for (Index a = 0; a < v.rows; ++a) {
          Matrix m = Matrix::Zero(v.rows, v.cols);
          m(a, b) = 1.0;
          e += AffineExpr::scalar_term(s++, m);
        }
      }
    }
    return e;
  }

  void add_block(std::string name, AffineExpr lhs, bool strict) {
    if (lhs.rows() != lhs.cols()) throw DimensionError("constraint block must be square");
    const auto sym = [](const Matrix& m) { return Matrix(0.5 * (m + m.transpose())); };
    AffineExpr clean = AffineExpr::constant(sym(lhs.constant_part()));
    for (const auto& [s, m] : lhs.terms()) {
      if (s >= scalars_) throw ConfigError("constraint references an undeclared variable");
      if (m.cwiseAbs().maxCoeff() == 0.0) continue;
      clean += AffineExpr::scalar_term(s, sym(m));
    }
    blocks_.push_back({std::move(name), std::move(clean), strict});
  }

  /// lhs ⪰ floor·I, stored as floor·I − lhs ⪯ 0.
  void add_lower_bound(std::string name, const AffineExpr& lhs, double floor) {
    add_block(std::move(name), -lhs + Matrix(floor * Matrix::Identity(lhs.rows(), lhs.cols())),
              false);
  }

  /// lhs ⪯ ceiling·I.
  void add_upper_bound(std::string name, const AffineExpr& lhs, double ceiling) {
    add_block(std::move(name), lhs - Matrix(ceiling * Matrix::Identity(lhs.rows(), lhs.cols())),
              false);
  }

  std::size_t scalar_count() const { return scalars_; }
  const std::vector<VariableInfo>& variables() const { return vars_; }
  const std::vector<AffineBlock>& blocks() const { return blocks_; }

  /// Decision matrix value from a scalar vector (ε excluded).
  Matrix value(VarId id, const Vector& x) const { return var(id).evaluate(x); }

  /// Human-readable JSON dump for debugging.
  void dump(std::ostream& os) const {
    os << "{\n  \"scalars\": " << scalars_ << ",\n  \"variables\": [";
    for (std::size_t k = 0; k < vars_.size(); ++k) {
      const auto& v = vars_[k];
      os << (k ? ", " : "") << "{\"name\": \"" << v.name << "\", \"kind\": \""
         << (v.kind == VarKind::symmetric ? "symmetric" : "rectangular") << "\", \"rows\": " << v.rows
         << ", \"cols\": " << v.cols << ", \"offset\": " << v.offset << "}";
    }
    os << "],\n  \"blocks\": [";
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const auto& b = blocks_[k];
      os << (k ? ",\n    " : "\n    ") << "{\"name\": \"" << b.name << "\", \"dim\": " << b.lhs.rows()
         << ", \"strict\": " << (b.strict ? "true" : "false") << ", \"terms\": " << b.lhs.terms().size()
         << "}";
    }
    os << "\n  ]\n}\n";
  }

 private:
  std::size_t scalars_ = 0;
  std::vector<VariableInfo> vars_;
  std::vector<AffineBlock> blocks_;
};

enum class SolveStatus { optimal, infeasible, max_iterations, numerical_failure };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::max_iterations: return "max_iterations";
    case SolveStatus::numerical_failure: return "numerical_failure";
  }
  return "unknown";
}

struct SolverOptions {
  int max_iter = 200;
  double tol = 1e-9;               ///< relative gap and infeasibility target
  double variable_bound = 1e4;     ///< box |x_l| ≤ bound on every unknown except ε
  std::size_t max_unknowns = 2000;
  double step_fraction = 0.98;     ///< fraction-to-boundary
};

struct SdpSolution {
  SolveStatus status = SolveStatus::numerical_failure;
  Vector x;                          ///< scalar unknowns, ε excluded
  double eps = 0.0;                  ///< achieved margin, recomputed from x
  std::vector<double> residuals;     ///< λ_max(F_k(x)) per block
  int iterations = 0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  double relative_gap = 0.0;

  Matrix value(const SdpProblem& problem, VarId id) const { return problem.value(id, x); }
};

/// λ_max(F_k(x)) for every block, using only the numerics module.
inline std::vector<double> residuals(const SdpProblem& problem, const SdpSolution& solution) {
  std::vector<double> out;
  out.reserve(problem.blocks().size());
  for (const auto& b : problem.blocks())
    out.push_back(sym_eig_max(SymMatrix::symmetric_part(b.lhs.evaluate(solution.x))));
  return out;
}

namespace detail {

struct StdBlock {
  Index dim = 0;
  Matrix c;
  std::vector<std::size_t> idx;
  std::vector<Matrix> a;
};

inline double inner(const Matrix& a, const Matrix& b) { return a.cwiseProduct(b).sum(); }

/// Largest α with M + αD ⪰ 0 (∞ when D is PSD along the whole ray).
inline double max_step(const Eigen::LLT<Matrix>& chol, const Matrix& d) {
  const Index n = d.rows();
  if (n == 1) {
    const double m = chol.matrixL()(0, 0) * chol.matrixL()(0, 0);
    return d(0, 0) < 0.0 ? -m / d(0, 0) : std::numeric_limits<double>::infinity();
  }
  const Matrix linv_d = chol.matrixL().solve(d);
  const Matrix w = chol.matrixL().solve(linv_d.transpose());
  const double lmin = sym_eig_min(SymMatrix::symmetric_part(w));
  return lmin < 0.0 ? -1.0 / lmin : std::numeric_limits<double>::infinity();
}

}  // namespace detail

/**
 * @brief Maximize ε over the problem's constraints.
 *
 * Status is `optimal` when the iteration converged and the recomputed
 * non-strict residuals are within 1e-8; `infeasible` when it converged with
 * ε* < −tol; `max_iterations` or `numerical_failure` otherwise. No Farkas
 * certificate is produced: infeasibility means the best margin is negative.
 */
inline SdpSolution solve(const SdpProblem& problem, const SolverOptions& opts = {}) {
  const std::size_t nx = problem.scalar_count();
  if (nx + 1 > opts.max_unknowns)
    throw CapacityError("SDP has " + std::to_string(nx + 1) + " unknowns; cap is " +
                        std::to_string(opts.max_unknowns));
  if (problem.blocks().empty()) throw ConfigError("SDP has no constraint blocks");

  const std::size_t p = nx + 1;
  const std::size_t eps_index = nx;
  bool any_strict = false;

  std::vector<detail::StdBlock> blocks;
  for (const auto& b : problem.blocks()) {
    detail::StdBlock sb;
    sb.dim = b.lhs.rows();
    sb.c = -b.lhs.constant_part();
    for (const auto& [s, m] : b.lhs.terms()) {
      sb.idx.push_back(s);
      sb.a.push_back(m);
    }
    if (b.strict) {
      any_strict = true;
      sb.idx.push_back(eps_index);
      sb.a.push_back(Matrix::Identity(sb.dim, sb.dim));
    }
    blocks.push_back(std::move(sb));
  }
  const double bound = opts.variable_bound;
  for (std::size_t l = 0; l < nx; ++l) {
    for (double sign : {1.0, -1.0}) {
      detail::StdBlock sb;
      sb.dim = 1;
      sb.c = Matrix::Constant(1, 1, bound);
      sb.idx.push_back(l);
      sb.a.push_back(Matrix::Constant(1, 1, sign));
      blocks.push_back(std::move(sb));
    }
  }
  if (!any_strict) {
    detail::StdBlock sb;
    sb.dim = 1;
    sb.c = Matrix::Constant(1, 1, bound);
    sb.idx.push_back(eps_index);
    sb.a.push_back(Matrix::Constant(1, 1, 1.0));
    blocks.push_back(std::move(sb));
  }

  Vector b = Vector::Zero(static_cast<Index>(p));
  b(static_cast<Index>(eps_index)) = 1.0;

  double norm_c = 0.0;
  Index total_dim = 0;
  for (const auto& sb : blocks) {
    norm_c += sb.c.squaredNorm();
    total_dim += sb.dim;
  }
  norm_c = std::sqrt(norm_c);
  const double norm_b = b.norm();

  // Identity-scaled starting point.
  std::vector<Matrix> x_blk;
  std::vector<Matrix> z_blk;
  for (const auto& sb : blocks) {
    const double d = static_cast<double>(sb.dim);
    double max_a = 0.0;
    double xi = std::max(10.0, std::sqrt(d));
    for (std::size_t t = 0; t < sb.idx.size(); ++t) {
      const double na = sb.a[t].norm();
      max_a = std::max(max_a, na);
      xi = std::max(xi, d * (1.0 + std::abs(b(static_cast<Index>(sb.idx[t])))) / (1.0 + na));
    }
    const double eta = std::max({10.0, std::sqrt(d), sb.c.norm(), max_a});
    x_blk.push_back(xi * Matrix::Identity(sb.dim, sb.dim));
    z_blk.push_back(eta * Matrix::Identity(sb.dim, sb.dim));
  }
  Vector y = Vector::Zero(static_cast<Index>(p));

  SdpSolution sol;
  const std::size_t nb = blocks.size();

  auto apply_a = [&](const std::vector<Matrix>& mats) {
    Vector out = Vector::Zero(static_cast<Index>(p));
    for (std::size_t k = 0; k < nb; ++k)
      for (std::size_t t = 0; t < blocks[k].idx.size(); ++t)
        out(static_cast<Index>(blocks[k].idx[t])) += detail::inner(blocks[k].a[t], mats[k]);
    return out;
  };
  auto apply_at = [&](std::size_t k, const Vector& v) {
    Matrix out = Matrix::Zero(blocks[k].dim, blocks[k].dim);
    for (std::size_t t = 0; t < blocks[k].idx.size(); ++t)
      out += v(static_cast<Index>(blocks[k].idx[t])) * blocks[k].a[t];
    return out;
  };

  bool converged = false;
  bool failed = false;
  int iter = 0;
  double pinf = 0.0;
  double dinf = 0.0;
  double relgap = 0.0;

  for (; iter < opts.max_iter; ++iter) {
    const Vector rp = b - apply_a(x_blk);
    std::vector<Matrix> rd(nb);
    double rd_norm = 0.0;
    double gap = 0.0;
    double pobj = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      rd[k] = blocks[k].c - z_blk[k] - apply_at(k, y);
      rd_norm += rd[k].squaredNorm();
      gap += detail::inner(x_blk[k], z_blk[k]);
      pobj += detail::inner(blocks[k].c, x_blk[k]);
    }
    const double dobj = b.dot(y);
    pinf = rp.norm() / (1.0 + norm_b);
    dinf = std::sqrt(rd_norm) / (1.0 + norm_c);
    relgap = std::max(gap, std::abs(pobj - dobj)) / (1.0 + std::abs(pobj) + std::abs(dobj));
    if (pinf <= opts.tol && dinf <= opts.tol && relgap <= opts.tol) {
      converged = true;
      break;
    }
    const double mu = gap / static_cast<double>(total_dim);

    std::vector<Matrix> z_inv(nb);
    std::vector<Eigen::LLT<Matrix>> x_chol(nb);
    std::vector<Eigen::LLT<Matrix>> z_chol(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      z_chol[k].compute(z_blk[k]);
      x_chol[k].compute(x_blk[k]);
      if (z_chol[k].info() != Eigen::Success || x_chol[k].info() != Eigen::Success) {
        failed = true;
        break;
      }
      z_inv[k] = z_chol[k].solve(Matrix::Identity(blocks[k].dim, blocks[k].dim));
    }
    if (failed) break;

    // Schur complement M_lk = tr(A_l X A_k Z⁻¹).
    Matrix schur = Matrix::Zero(static_cast<Index>(p), static_cast<Index>(p));
    for (std::size_t k = 0; k < nb; ++k) {
      const auto& sb = blocks[k];
      if (sb.dim == 1) {
        const double w = x_blk[k](0, 0) * z_inv[k](0, 0);
        for (std::size_t s = 0; s < sb.idx.size(); ++s)
          for (std::size_t t = 0; t < sb.idx.size(); ++t)
            schur(static_cast<Index>(sb.idx[s]), static_cast<Index>(sb.idx[t])) +=
                w * sb.a[s](0, 0) * sb.a[t](0, 0);
        continue;
      }
      for (std::size_t t = 0; t < sb.idx.size(); ++t) {
        const Matrix g = x_blk[k] * sb.a[t] * z_inv[k];
        for (std::size_t s = 0; s <= t; ++s) {
          const double v = detail::inner(sb.a[s], g);
          schur(static_cast<Index>(sb.idx[s]), static_cast<Index>(sb.idx[t])) += v;
          if (s != t) schur(static_cast<Index>(sb.idx[t]), static_cast<Index>(sb.idx[s])) += v;
        }
      }
    }
    schur = 0.5 * (schur + schur.transpose());
    Eigen::LLT<Matrix> schur_chol(schur);
    Eigen::LDLT<Matrix> schur_ldlt;
    const bool use_llt = schur_chol.info() == Eigen::Success;
    if (!use_llt) {
      const double reg = 1e-14 * std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
      schur_ldlt.compute(schur + reg * Matrix::Identity(schur.rows(), schur.cols()));
      if (schur_ldlt.info() != Eigen::Success) {
        failed = true;
        break;
      }
    }
    auto schur_solve = [&](const Vector& r) -> Vector {
      return use_llt ? Vector(schur_chol.solve(r)) : Vector(schur_ldlt.solve(r));
    };

    // Direction for target σμ plus an optional second-order term.
    auto direction = [&](double target, const std::vector<Matrix>* corr, Vector& dy,
                         std::vector<Matrix>& dx, std::vector<Matrix>& dz) {
      std::vector<Matrix> tmp(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        Matrix t = x_blk[k] * rd[k] * z_inv[k] - target * z_inv[k] + x_blk[k];
        if (corr) t += (*corr)[k] * z_inv[k];
        tmp[k] = std::move(t);
      }
      dy = schur_solve(rp + apply_a(tmp));
      dx.resize(nb);
      dz.resize(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        dz[k] = rd[k] - apply_at(k, dy);
        Matrix t = target * z_inv[k] - x_blk[k] - x_blk[k] * dz[k] * z_inv[k];
        if (corr) t -= (*corr)[k] * z_inv[k];
        dx[k] = 0.5 * (t + t.transpose());
      }
    };
    auto step_lengths = [&](const std::vector<Matrix>& dx, const std::vector<Matrix>& dz) {
      double ap = std::numeric_limits<double>::infinity();
      double ad = std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < nb; ++k) {
        ap = std::min(ap, detail::max_step(x_chol[k], dx[k]));
        ad = std::min(ad, detail::max_step(z_chol[k], dz[k]));
      }
      return std::pair<double, double>(ap, ad);
    };

    Vector dy_a;
    std::vector<Matrix> dx_a;
    std::vector<Matrix> dz_a;
    direction(0.0, nullptr, dy_a, dx_a, dz_a);
    auto [ap_a, ad_a] = step_lengths(dx_a, dz_a);
    ap_a = std::min(1.0, ap_a);
    ad_a = std::min(1.0, ad_a);
    double mu_aff = 0.0;
    for (std::size_t k = 0; k < nb; ++k)
      mu_aff += detail::inner(x_blk[k] + ap_a * dx_a[k], z_blk[k] + ad_a * dz_a[k]);
    mu_aff /= static_cast<double>(total_dim);
    const double sigma = std::clamp(std::pow(std::max(mu_aff, 0.0) / mu, 3.0), 0.0, 1.0);

    std::vector<Matrix> corr(nb);
    for (std::size_t k = 0; k < nb; ++k) corr[k] = dx_a[k] * dz_a[k];
    Vector dy;
    std::vector<Matrix> dx;
    std::vector<Matrix> dz;
    direction(sigma * mu, &corr, dy, dx, dz);
    auto [ap, ad] = step_lengths(dx, dz);
    ap = std::min(1.0, opts.step_fraction * ap);
    ad = std::min(1.0, opts.step_fraction * ad);
    if (!std::isfinite(ap) || !std::isfinite(ad) || !dy.allFinite()) {
      failed = true;
      break;
    }
    if (ap < 1e-12 && ad < 1e-12) {
      failed = true;
      break;
    }
    for (std::size_t k = 0; k < nb; ++k) {
      x_blk[k] += ap * dx[k];
      z_blk[k] += ad * dz[k];
      x_blk[k] = 0.5 * (x_blk[k] + x_blk[k].transpose());
      z_blk[k] = 0.5 * (z_blk[k] + z_blk[k].transpose());
    }
    y += ad * dy;
  }

  sol.iterations = iter;
  sol.primal_infeasibility = pinf;
  sol.dual_infeasibility = dinf;
  sol.relative_gap = relgap;
  sol.x = y.head(static_cast<Index>(nx));
  sol.residuals = residuals(problem, sol);

  double eps = std::numeric_limits<double>::infinity();
  double worst_nonstrict = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < problem.blocks().size(); ++k) {
    if (problem.blocks()[k].strict)
      eps = std::min(eps, -sol.residuals[k]);
    else
      worst_nonstrict = std::max(worst_nonstrict, sol.residuals[k]);
  }
  if (!any_strict) eps = y(static_cast<Index>(eps_index));
  sol.eps = eps;

  // A stalled run that still reached a loose accuracy is usable.
  const bool loose_ok = pinf <= 1e-6 && dinf <= 1e-6 && relgap <= 1e-6;
  if (converged || loose_ok) {
    if (y(static_cast<Index>(eps_index)) < -opts.tol || sol.eps < -opts.tol)
      sol.status = SolveStatus::infeasible;
    else if (worst_nonstrict <= 1e-8)
      sol.status = SolveStatus::optimal;
    else
      sol.status = SolveStatus::numerical_failure;
  } else if (failed || !y.allFinite()) {
    sol.status = SolveStatus::numerical_failure;
  } else {
    sol.status = SolveStatus::max_iterations;
  }
  return sol;
}

}  // namespace minjump::sdp

#endif  // MINJUMP_SDP_HPP
