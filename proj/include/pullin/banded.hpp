#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace pullin {

/// Symmetric matrix with `half_bandwidth` sub-diagonals, lower band stored
/// column by column.
class BandedSymmetricMatrix {
 public:
  BandedSymmetricMatrix() = default;
  BandedSymmetricMatrix(std::size_t size, std::size_t half_bandwidth);

  std::size_t size() const { return size_; }
  std::size_t half_bandwidth() const { return half_bandwidth_; }

  /// Entry (i, j); zero outside the band.
  double operator()(std::size_t i, std::size_t j) const;

  /// Adds `value` to (i, j) and, implicitly, (j, i). |i - j| must lie within
  /// the band.
  void add(std::size_t i, std::size_t j, double value);

  void set_zero();
  BandedSymmetricMatrix& operator+=(const BandedSymmetricMatrix& other);
  BandedSymmetricMatrix& operator-=(const BandedSymmetricMatrix& other);
  BandedSymmetricMatrix& operator*=(double factor);

  Eigen::VectorXd operator*(const Eigen::VectorXd& x) const;

  /// Principal submatrix on ascending `indices`, scaled to
  /// diag(scale) * A * diag(scale). Band is preserved because removal of rows
  /// and columns never widens it.
  BandedSymmetricMatrix restricted(const std::vector<std::size_t>& indices,
                                   const Eigen::VectorXd& scale) const;

  Eigen::MatrixXd to_dense() const;

 private:
  double& lower(std::size_t i, std::size_t j) { return data_[j * (half_bandwidth_ + 1) + (i - j)]; }
  double lower(std::size_t i, std::size_t j) const { return data_[j * (half_bandwidth_ + 1) + (i - j)]; }

  std::size_t size_ = 0;
  std::size_t half_bandwidth_ = 0;
  std::vector<double> data_;
};

BandedSymmetricMatrix operator+(BandedSymmetricMatrix a, const BandedSymmetricMatrix& b);
BandedSymmetricMatrix operator-(BandedSymmetricMatrix a, const BandedSymmetricMatrix& b);
BandedSymmetricMatrix operator*(double factor, BandedSymmetricMatrix a);

/// Root-free Cholesky (LDL^T) without pivoting. Works on indefinite matrices
/// with non-vanishing leading minors; the sign of the pivots gives the
/// inertia, so positive definiteness falls out of the factorization.
class BandedLdlt {
 public:
  /// Pivots with |d_k| <= breakdown_tolerance * |a_kk| (or non-finite) mark
  /// the factorization as broken down.
  explicit BandedLdlt(const BandedSymmetricMatrix& matrix, double breakdown_tolerance = 1e-13);

  bool ok() const { return breakdown_index_ < 0; }
  /// Index of the first vanishing pivot, or -1.
  long breakdown_index() const { return breakdown_index_; }
  std::size_t negative_pivots() const { return negative_pivots_; }
  bool positive_definite() const { return ok() && negative_pivots_ == 0; }

  /// Requires ok().
  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const;

 private:
  BandedSymmetricMatrix factor_;  // unit lower L below the diagonal, D on it
  long breakdown_index_ = -1;
  std::size_t negative_pivots_ = 0;
};

}  // namespace pullin
