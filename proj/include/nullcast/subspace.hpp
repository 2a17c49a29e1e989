#ifndef NULLCAST_SUBSPACE_HPP
#define NULLCAST_SUBSPACE_HPP

// Subspace geometry over C^N: orthonormal bases, orthogonal projectors, SVD
// null spaces, unitary rotations and the chordal distance. Everything here is
// templated on the real scalar; the rest of the library instantiates `double`.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "nullcast/error.hpp"
#include "nullcast/rng.hpp"

namespace nullcast {

using Index = Eigen::Index;

template <typename Real>
using CMatrixT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using CVectorT = Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, 1>;
template <typename Real>
using RVectorT = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

using Complex = std::complex<double>;
using CMatrix = CMatrixT<double>;
using CVector = CVectorT<double>;
using RVector = RVectorT<double>;
using RMatrix = Eigen::MatrixXd;

/// Validation tolerances. The double values are the contract; float gets a
/// proportionally looser set so the templates stay usable.
template <typename Real>
struct SubspaceTolerance {
  static constexpr Real orthonormal = Real(1e-10);
  static constexpr Real projector = Real(1e-10);
  static constexpr Real trace = Real(1e-8);
  static constexpr Real unitary = Real(1e-10);
  static constexpr Real rank = Real(1e-10);
};

template <>
struct SubspaceTolerance<float> {
  static constexpr float orthonormal = 1e-4f;
  static constexpr float projector = 1e-4f;
  static constexpr float trace = 1e-3f;
  static constexpr float unitary = 1e-4f;
  static constexpr float rank = 1e-5f;
};

/// N x k matrix with orthonormal columns (k may be 0).
template <typename Real>
class SubspaceBasis {
 public:
  using Matrix = CMatrixT<Real>;

  SubspaceBasis() = default;

  /// Throws NotOrthonormal unless ||B^H B - I||_F is within tolerance.
  explicit SubspaceBasis(Matrix columns) : columns_(std::move(columns)) {
    if (columns_.cols() > columns_.rows()) {
      throw Error(ErrorCode::BadDimensions, "basis has more columns than its ambient dimension");
    }
    if (columns_.cols() > 0) {
      const Real err =
          (columns_.adjoint() * columns_ - Matrix::Identity(columns_.cols(), columns_.cols())).norm();
      if (!(err < SubspaceTolerance<Real>::orthonormal)) {
        throw Error(ErrorCode::NotOrthonormal,
                    "||B^H B - I||_F = " + std::to_string(static_cast<double>(err)));
      }
    }
  }

  static SubspaceBasis empty(Index ambient_dim) { return SubspaceBasis(Matrix(ambient_dim, 0)); }

  Index ambient_dim() const { return columns_.rows(); }
  Index dim() const { return columns_.cols(); }
  bool is_empty() const { return columns_.cols() == 0; }
  const Matrix& columns() const { return columns_; }
  auto column(Index i) const { return columns_.col(i); }

 private:
  Matrix columns_;
};

/// Hermitian idempotent N x N matrix together with its rank.
template <typename Real>
class OrthoProjector {
 public:
  using Matrix = CMatrixT<Real>;

  OrthoProjector() = default;

  /// Validates Hermitian symmetry, idempotence and trace == rank.
  OrthoProjector(Matrix m, Index rank) : matrix_(std::move(m)), rank_(rank) {
    if (matrix_.rows() != matrix_.cols()) {
      throw Error(ErrorCode::BadDimensions, "projector must be square");
    }
    constexpr Real tol = SubspaceTolerance<Real>::projector;
    if (!((matrix_ - matrix_.adjoint()).norm() < tol)) {
      throw Error(ErrorCode::BadDimensions, "projector is not Hermitian");
    }
    if (!((matrix_ * matrix_ - matrix_).norm() < tol)) {
      throw Error(ErrorCode::BadDimensions, "projector is not idempotent");
    }
    if (!(std::abs(matrix_.trace().real() - static_cast<Real>(rank_)) < SubspaceTolerance<Real>::trace)) {
      throw Error(ErrorCode::BadDimensions, "projector trace does not match its rank");
    }
  }

  /// Skips validation; only for matrices that are projectors by construction (B B^H).
  static OrthoProjector trusted(Matrix m, Index rank) {
    OrthoProjector p;
    p.matrix_ = std::move(m);
    p.rank_ = rank;
    return p;
  }

  Index ambient_dim() const { return matrix_.rows(); }
  Index rank() const { return rank_; }
  const Matrix& matrix() const { return matrix_; }
  RVectorT<Real> diagonal() const { return matrix_.diagonal().real(); }

 private:
  Matrix matrix_;
  Index rank_ = 0;
};

using SubspaceBasisd = SubspaceBasis<double>;
using OrthoProjectord = OrthoProjector<double>;

/// Orthonormal basis for the column space of `m`; RankDeficient unless
/// sigma_min > 1e-10 sigma_max.
template <typename Real>
SubspaceBasis<Real> orthonormalize(const CMatrixT<Real>& m) {
  using Matrix = CMatrixT<Real>;
  const Index n = m.rows();
  const Index k = m.cols();
  if (k == 0) return SubspaceBasis<Real>::empty(n);
  if (k > n) throw Error(ErrorCode::RankDeficient, "more columns than rows");
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (!(s(s.size() - 1) > SubspaceTolerance<Real>::rank * s(0))) {
    throw Error(ErrorCode::RankDeficient, "matrix does not have full column rank");
  }
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  return SubspaceBasis<Real>(std::move(q));
}

/// P = B B^H.
template <typename Real>
OrthoProjector<Real> projector_from_basis(const SubspaceBasis<Real>& b) {
  const auto& B = b.columns();
  return OrthoProjector<Real>::trusted(B * B.adjoint(), b.dim());
}

/// Right singular vectors of `t` whose singular values are <= rank_tol * sigma_max,
/// including the directions beyond min(rows, cols) for wide matrices.
template <typename Real>
SubspaceBasis<Real> svd_null_space(const CMatrixT<Real>& t,
                                   Real rank_tol = SubspaceTolerance<Real>::rank) {
  using Matrix = CMatrixT<Real>;
  const Index cols = t.cols();
  if (cols == 0) throw Error(ErrorCode::BadDimensions, "svd_null_space of a matrix without columns");
  if (t.rows() == 0) return SubspaceBasis<Real>(Matrix::Identity(cols, cols));
  Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const Real threshold = rank_tol * s(0);
  Index rank = 0;
  while (rank < s.size() && s(rank) > threshold) ++rank;
  if (rank == cols) throw Error(ErrorCode::EmptyNullSpace, "matrix has full column rank");
  return SubspaceBasis<Real>(svd.matrixV().rightCols(cols - rank));
}

/// Orthonormal basis of span(b)^perp.
template <typename Real>
SubspaceBasis<Real> orthogonal_complement(const SubspaceBasis<Real>& b) {
  using Matrix = CMatrixT<Real>;
  const Index n = b.ambient_dim();
  if (b.dim() == n) return SubspaceBasis<Real>::empty(n);
  if (b.is_empty()) return SubspaceBasis<Real>(Matrix::Identity(n, n));
  return svd_null_space<Real>(b.columns().adjoint());
}

/// B U for a k x k unitary U; spans the same subspace.
template <typename Real>
SubspaceBasis<Real> rotate_basis(const SubspaceBasis<Real>& b, const CMatrixT<Real>& u) {
  using Matrix = CMatrixT<Real>;
  if (u.rows() != b.dim() || u.cols() != b.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "rotation size must equal the subspace dimension");
  }
  if (!((u.adjoint() * u - Matrix::Identity(u.cols(), u.cols())).norm() <
        SubspaceTolerance<Real>::unitary)) {
    throw Error(ErrorCode::NotUnitary, "rotation matrix is not unitary");
  }
  return SubspaceBasis<Real>(b.columns() * u);
}

/// Haar-distributed unitary: QR of a seeded complex Gaussian matrix with the
/// phases of diag(R) folded back into Q.
template <typename Real>
CMatrixT<Real> random_unitary(Index dim, std::uint64_t seed) {
  using Matrix = CMatrixT<Real>;
  if (dim < 1) throw Error(ErrorCode::BadDimensions, "random_unitary needs dim >= 1");
  Rng rng(seed);
  Matrix g(dim, dim);
  for (Index j = 0; j < dim; ++j) {
    for (Index i = 0; i < dim; ++i) {
      const auto z = rng.complex_normal();
      g(i, j) = std::complex<Real>(static_cast<Real>(z.real()), static_cast<Real>(z.imag()));
    }
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().template triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    const std::complex<Real> d = r(j, j);
    if (std::abs(d) > Real(0)) q.col(j) *= d / std::abs(d);
  }
  return q;
}

/// d^2 = 1/2 ||P1 - P2||_F^2.
template <typename Real>
Real chordal_distance(const OrthoProjector<Real>& p1, const OrthoProjector<Real>& p2) {
  if (p1.ambient_dim() != p2.ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "projectors live in different ambient spaces");
  }
  return Real(0.5) * (p1.matrix() - p2.matrix()).squaredNorm();
}

/// Unit-norm N-point DFT matrix, column k has entries exp(j 2 pi k n / N) / sqrt(N).
template <typename Real>
CMatrixT<Real> dft_matrix(Index n) {
  CMatrixT<Real> f(n, n);
  const Real scale = Real(1) / std::sqrt(static_cast<Real>(n));
  for (Index k = 0; k < n; ++k) {
    for (Index t = 0; t < n; ++t) {
      // Reduce k*t mod n first so the phase stays exact for large products.
      const auto m = static_cast<Real>((k * t) % n);
      const Real ang = Real(2) * std::numbers::pi_v<Real> * m / static_cast<Real>(n);
      f(t, k) = std::polar(scale, ang);
    }
  }
  return f;
}

/// Columns of `b` at `indices`, in that order.
template <typename Real>
SubspaceBasis<Real> select_columns(const SubspaceBasis<Real>& b, std::span<const std::size_t> indices) {
  CMatrixT<Real> m(b.ambient_dim(), static_cast<Index>(indices.size()));
  for (std::size_t j = 0; j < indices.size(); ++j) {
    m.col(static_cast<Index>(j)) = b.column(static_cast<Index>(indices[j]));
  }
  return SubspaceBasis<Real>(std::move(m));
}

/// [B1 B2]; the blocks must be mutually orthogonal.
template <typename Real>
SubspaceBasis<Real> concatenate(const SubspaceBasis<Real>& b1, const SubspaceBasis<Real>& b2) {
  if (b1.ambient_dim() != b2.ambient_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "cannot concatenate bases of different ambient dimension");
  }
  CMatrixT<Real> m(b1.ambient_dim(), b1.dim() + b2.dim());
  m.leftCols(b1.dim()) = b1.columns();
  m.rightCols(b2.dim()) = b2.columns();
  return SubspaceBasis<Real>(std::move(m));
}

}  // namespace nullcast

#endif  // NULLCAST_SUBSPACE_HPP
