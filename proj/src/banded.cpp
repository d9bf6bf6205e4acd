#include "pullin/banded.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <utility>

#include "pullin/errors.hpp"

namespace pullin {

BandedSymmetricMatrix::BandedSymmetricMatrix(std::size_t size, std::size_t half_bandwidth)
    : size_(size), half_bandwidth_(half_bandwidth), data_(size * (half_bandwidth + 1), 0.0) {}

double BandedSymmetricMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i < j) std::swap(i, j);
  if (i - j > half_bandwidth_) return 0.0;
  return lower(i, j);
}

void BandedSymmetricMatrix::add(std::size_t i, std::size_t j, double value) {
  if (i < j) std::swap(i, j);
  assert(i < size_ && i - j <= half_bandwidth_);
  lower(i, j) += value;
}

void BandedSymmetricMatrix::set_zero() { std::fill(data_.begin(), data_.end(), 0.0); }

BandedSymmetricMatrix& BandedSymmetricMatrix::operator+=(const BandedSymmetricMatrix& other) {
  assert(size_ == other.size_ && half_bandwidth_ == other.half_bandwidth_);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

BandedSymmetricMatrix& BandedSymmetricMatrix::operator-=(const BandedSymmetricMatrix& other) {
  assert(size_ == other.size_ && half_bandwidth_ == other.half_bandwidth_);
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

BandedSymmetricMatrix& BandedSymmetricMatrix::operator*=(double factor) {
  for (double& v : data_) v *= factor;
  return *this;
}

Eigen::VectorXd BandedSymmetricMatrix::operator*(const Eigen::VectorXd& x) const {
  assert(static_cast<std::size_t>(x.size()) == size_);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(x.size());
  for (std::size_t j = 0; j < size_; ++j) {
    y[j] += lower(j, j) * x[j];
    const std::size_t last = std::min(size_ - 1, j + half_bandwidth_);
    for (std::size_t i = j + 1; i <= last; ++i) {
      const double a = lower(i, j);
      y[i] += a * x[j];
      y[j] += a * x[i];
    }
  }
  return y;
}

BandedSymmetricMatrix BandedSymmetricMatrix::restricted(const std::vector<std::size_t>& indices,
                                                        const Eigen::VectorXd& scale) const {
  BandedSymmetricMatrix out(indices.size(), half_bandwidth_);
  for (std::size_t c = 0; c < indices.size(); ++c) {
    for (std::size_t r = c; r < indices.size() && indices[r] - indices[c] <= half_bandwidth_; ++r) {
      if (r - c > half_bandwidth_) break;
      out.lower(r, c) = (*this)(indices[r], indices[c]) * scale[r] * scale[c];
    }
  }
  return out;
}

Eigen::MatrixXd BandedSymmetricMatrix::to_dense() const {
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(size_, size_);
  for (std::size_t j = 0; j < size_; ++j) {
    const std::size_t last = std::min(size_ - 1, j + half_bandwidth_);
    for (std::size_t i = j; i <= last; ++i) {
      dense(i, j) = lower(i, j);
      dense(j, i) = lower(i, j);
    }
  }
  return dense;
}

BandedSymmetricMatrix operator+(BandedSymmetricMatrix a, const BandedSymmetricMatrix& b) { return a += b; }
BandedSymmetricMatrix operator-(BandedSymmetricMatrix a, const BandedSymmetricMatrix& b) { return a -= b; }
BandedSymmetricMatrix operator*(double factor, BandedSymmetricMatrix a) { return a *= factor; }

BandedLdlt::BandedLdlt(const BandedSymmetricMatrix& matrix, double breakdown_tolerance) : factor_(matrix) {
  const std::size_t n = factor_.size();
  const std::size_t bw = factor_.half_bandwidth();
  BandedSymmetricMatrix& a = factor_;
  // Column-oriented right-looking elimination restricted to the band.
  for (std::size_t k = 0; k < n; ++k) {
    const double d = a(k, k);
    const double scale = std::abs(matrix(k, k));
    if (!std::isfinite(d) || std::abs(d) <= breakdown_tolerance * scale || d == 0.0) {
      breakdown_index_ = static_cast<long>(k);
      return;
    }
    if (d < 0.0) ++negative_pivots_;
    const std::size_t last = std::min(n - 1, k + bw);
    for (std::size_t i = k + 1; i <= last; ++i) {
      const double lik = a(i, k) / d;
      // Schur update of the trailing band: a(i,j) -= l_ik * d * l_jk for j in (k, i]
      for (std::size_t j = k + 1; j <= i; ++j) {
        a.add(i, j, -lik * a(j, k));
      }
    }
    for (std::size_t i = k + 1; i <= last; ++i) {
      const double lik = a(i, k) / d;
      a.add(i, k, lik - a(i, k));
    }
  }
}

Eigen::VectorXd BandedLdlt::solve(const Eigen::VectorXd& rhs) const {
  if (!ok()) throw NumericalError("solve on a broken-down LDL^T factorization");
  const std::size_t n = factor_.size();
  const std::size_t bw = factor_.half_bandwidth();
  Eigen::VectorXd x = rhs;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t first = i > bw ? i - bw : 0;
    for (std::size_t j = first; j < i; ++j) x[i] -= factor_(i, j) * x[j];
  }
  for (std::size_t i = 0; i < n; ++i) x[i] /= factor_(i, i);
  for (std::size_t i = n; i-- > 0;) {
    const std::size_t last = std::min(n - 1, i + bw);
    for (std::size_t j = i + 1; j <= last; ++j) x[i] -= factor_(j, i) * x[j];
  }
  return x;
}

}  // namespace pullin
