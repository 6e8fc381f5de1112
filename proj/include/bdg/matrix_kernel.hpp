#pragma once

// Dense symmetric linear algebra shared by every other module. All routines
// are pure; positive definiteness has exactly one definition here
// (is_positive_definite / cholesky) and the rest of the library defers to it.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "bdg/errors.hpp"

namespace bdg {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

// Relative pivot floor: a pivot must exceed this times the largest diagonal.
inline constexpr double kPivotFloor = 1e-12;

/// Square matrix whose symmetry is structural: set(i, j, v) writes both
/// triangles, and construction from an arbitrary matrix symmetrizes it.
template <typename Scalar>
class SymMatrix {
 public:
  using MatrixType = Matrix<Scalar>;

  SymMatrix() = default;
  explicit SymMatrix(Index p) : m_(MatrixType::Zero(p, p)) {}

  /// Takes (m + m^T) / 2. Throws InvalidDimension for non-square input and
  /// DomainError when an entry is not finite.
  template <typename Derived>
  explicit SymMatrix(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols()) throw InvalidDimension("SymMatrix: matrix is not square");
    if (!m.allFinite()) throw DomainError("SymMatrix: non-finite entry");
    m_ = (m + m.transpose()) / Scalar(2);
  }

  static SymMatrix identity(Index p) { return SymMatrix(MatrixType::Identity(p, p)); }
  static SymMatrix zero(Index p) { return SymMatrix(p); }
  static SymMatrix diagonal(const Vector<Scalar>& d) {
    return SymMatrix(MatrixType(d.asDiagonal()));
  }

  Index size() const noexcept { return m_.rows(); }
  Scalar operator()(Index i, Index j) const { return m_(i, j); }

  void set(Index i, Index j, Scalar v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  const MatrixType& matrix() const noexcept { return m_; }

  friend bool operator==(const SymMatrix& a, const SymMatrix& b) {
    return a.m_.rows() == b.m_.rows() && a.m_ == b.m_;
  }

 private:
  MatrixType m_;
};

using SymMatrixd = SymMatrix<double>;

/// Lower-triangular factor with strictly positive diagonal.
template <typename Scalar>
class CholeskyFactor {
 public:
  explicit CholeskyFactor(Matrix<Scalar> lower) : l_(std::move(lower)) {}

  const Matrix<Scalar>& lower() const noexcept { return l_; }
  Index size() const noexcept { return l_.rows(); }
  Matrix<Scalar> reconstruct() const { return l_ * l_.transpose(); }

  Scalar logdet() const { return Scalar(2) * l_.diagonal().array().log().sum(); }

  /// Solves (L L^T) x = rhs.
  template <typename Derived>
  Matrix<Scalar> solve(const Eigen::MatrixBase<Derived>& rhs) const {
    Matrix<Scalar> y = l_.template triangularView<Eigen::Lower>().solve(rhs);
    return l_.transpose().template triangularView<Eigen::Upper>().solve(y);
  }

 private:
  Matrix<Scalar> l_;
};

namespace detail {

template <typename Derived>
bool pivots_ok(const Eigen::MatrixBase<Derived>& m,
               const Matrix<typename Derived::Scalar>& lower) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() == 0) return true;
  const Scalar max_diag = m.diagonal().maxCoeff();
  if (!(max_diag > Scalar(0))) return false;
  const Scalar floor = Scalar(kPivotFloor) * max_diag;
  for (Index i = 0; i < lower.rows(); ++i) {
    const Scalar piv = lower(i, i) * lower(i, i);
    if (!(piv > floor)) return false;
  }
  return true;
}

}  // namespace detail

/// Cholesky factorization; throws NotPositiveDefinite when any pivot falls
/// at or below kPivotFloor times the largest diagonal entry.
template <typename Derived>
CholeskyFactor<typename Derived::Scalar> cholesky(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  if (m.rows() != m.cols()) throw InvalidDimension("cholesky: matrix is not square");
  if (!m.allFinite()) throw NotPositiveDefinite("cholesky: non-finite entry");
  Eigen::LLT<Matrix<Scalar>> llt(m.derived());
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite("cholesky: matrix is not positive definite");
  Matrix<Scalar> lower = llt.matrixL();
  if (!detail::pivots_ok(m, lower)) throw NotPositiveDefinite("cholesky: pivot below floor");
  return CholeskyFactor<Scalar>(std::move(lower));
}

template <typename Scalar>
CholeskyFactor<Scalar> cholesky(const SymMatrix<Scalar>& m) {
  return cholesky(m.matrix());
}

template <typename Derived>
bool is_positive_definite(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() != m.cols() || !m.allFinite()) return false;
  Eigen::LLT<Matrix<typename Derived::Scalar>> llt(m.derived());
  if (llt.info() != Eigen::Success) return false;
  return detail::pivots_ok(m, Matrix<typename Derived::Scalar>(llt.matrixL()));
}

template <typename Scalar>
bool is_positive_definite(const SymMatrix<Scalar>& m) {
  return is_positive_definite(m.matrix());
}

template <typename Derived>
Matrix<typename Derived::Scalar> inverse_pd(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  const auto chol = cholesky(m);
  Matrix<Scalar> inv = chol.solve(Matrix<Scalar>::Identity(m.rows(), m.cols()));
  return (inv + inv.transpose()) / Scalar(2);
}

template <typename Scalar>
SymMatrix<Scalar> inverse_pd(const SymMatrix<Scalar>& m) {
  return SymMatrix<Scalar>(inverse_pd(m.matrix()));
}

/// log|m| = 2 sum log L_ii.
template <typename Derived>
typename Derived::Scalar logdet(const Eigen::MatrixBase<Derived>& m) {
  return cholesky(m).logdet();
}

template <typename Scalar>
Scalar logdet(const SymMatrix<Scalar>& m) {
  return logdet(m.matrix());
}

/// Rows/cols of m selected by idx (in the order given).
template <typename Derived>
Matrix<typename Derived::Scalar> submatrix(const Eigen::MatrixBase<Derived>& m,
                                          std::span<const Index> rows,
                                          std::span<const Index> cols) {
  Matrix<typename Derived::Scalar> out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c) out(r, c) = m(rows[r], cols[c]);
  return out;
}

/// {0..p-1} minus `drop`, ascending.
inline std::vector<Index> complement(Index p, std::span<const Index> drop) {
  std::vector<Index> out;
  out.reserve(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i)
    if (std::find(drop.begin(), drop.end(), i) == drop.end()) out.push_back(i);
  return out;
}

/// M[target, given] * M[given, given]^-1 * M[given, target].
/// An empty `given` set yields the zero matrix.
template <typename Derived>
Matrix<typename Derived::Scalar> schur_update(const Eigen::MatrixBase<Derived>& m,
                                             std::span<const Index> target,
                                             std::span<const Index> given) {
  using Scalar = typename Derived::Scalar;
  const Index p = m.rows();
  for (Index t : target) {
    if (t < 0 || t >= p) throw InvalidArgument("schur_update: target index out of range");
    if (std::find(given.begin(), given.end(), t) != given.end())
      throw InvalidArgument("schur_update: target and given overlap");
  }
  for (Index g : given)
    if (g < 0 || g >= p) throw InvalidArgument("schur_update: given index out of range");

  const auto nt = static_cast<Index>(target.size());
  if (given.empty()) return Matrix<Scalar>::Zero(nt, nt);
  const Matrix<Scalar> cross = submatrix(m, given, target);
  const auto chol = cholesky(submatrix(m, given, given));
  Matrix<Scalar> out = cross.transpose() * chol.solve(cross);
  return (out + out.transpose()) / Scalar(2);
}

template <typename Scalar>
SymMatrix<Scalar> schur_update(const SymMatrix<Scalar>& m, std::span<const Index> target,
                               std::span<const Index> given) {
  return SymMatrix<Scalar>(schur_update(m.matrix(), target, given));
}

}  // namespace bdg
