#pragma once

#include <Eigen/Dense>
#include <string>

#include "ricf/errors.hpp"

namespace ricf {

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

namespace detail {

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw ShapeError(std::string(what) + " must be square, got " + std::to_string(m.rows()) +
                     "x" + std::to_string(m.cols()));
  }
}

template <typename Derived>
void require_size(const Eigen::MatrixBase<Derived>& m, Index p, const char* what) {
  if (m.rows() != p || m.cols() != p) {
    throw ShapeError(std::string(what) + " must be " + std::to_string(p) + "x" +
                     std::to_string(p) + ", got " + std::to_string(m.rows()) + "x" +
                     std::to_string(m.cols()));
  }
}

template <typename Scalar>
Eigen::LLT<MatrixX<Scalar>> checked_llt(const MatrixX<Scalar>& m, const std::string& what) {
  Eigen::LLT<MatrixX<Scalar>> llt(m);
  if (llt.info() != Eigen::Success || !llt.matrixLLT().diagonal().allFinite() ||
      (llt.matrixLLT().diagonal().array() <= Scalar(0)).any()) {
    throw NotPositiveDefiniteError(what + " is not positive definite");
  }
  return llt;
}

}  // namespace detail

/// Symmetric positive definite covariance Σ.
template <typename Scalar>
class CovarianceMatrix {
 public:
  explicit CovarianceMatrix(MatrixX<Scalar> values) : values_(std::move(values)) {
    detail::require_square(values_, "covariance matrix");
    values_ = (values_ + values_.transpose()).eval() / Scalar(2);
    detail::checked_llt<Scalar>(values_, "covariance matrix");
  }

  const MatrixX<Scalar>& values() const noexcept { return values_; }
  Index dim() const noexcept { return values_.rows(); }
  Scalar operator()(Index i, Index j) const { return values_(i, j); }

 private:
  MatrixX<Scalar> values_;
};

/// Observations as a V x N matrix, one column per subject.
template <typename Scalar>
class DataMatrix {
 public:
  explicit DataMatrix(MatrixX<Scalar> values) : values_(std::move(values)) {
    if (!values_.allFinite()) throw ShapeError("data matrix has non-finite entries");
  }

  const MatrixX<Scalar>& values() const noexcept { return values_; }
  Index num_variables() const noexcept { return values_.rows(); }
  Index num_observations() const noexcept { return values_.cols(); }

 private:
  MatrixX<Scalar> values_;
};

/// S = Y Yᵗ / N, optionally after removing row means. The divisor is N in
/// both cases.
template <typename Scalar>
class EmpiricalCovariance {
 public:
  EmpiricalCovariance(MatrixX<Scalar> values, Index n, bool centered = false)
      : values_(std::move(values)), n_(n), centered_(centered) {
    detail::require_square(values_, "empirical covariance");
    if (n_ < 1) throw EmptyDataError("sample size must be positive");
    values_ = (values_ + values_.transpose()).eval() / Scalar(2);
  }

  const MatrixX<Scalar>& values() const noexcept { return values_; }
  Index n() const noexcept { return n_; }
  bool centered() const noexcept { return centered_; }
  Index dim() const noexcept { return values_.rows(); }

 private:
  MatrixX<Scalar> values_;
  Index n_;
  bool centered_;
};

template <typename Scalar>
EmpiricalCovariance<Scalar> empirical_covariance(const DataMatrix<Scalar>& y, bool center = false) {
  const Index n = y.num_observations();
  if (n == 0 || y.num_variables() == 0) throw EmptyDataError("data matrix is empty");
  if (!center) {
    MatrixX<Scalar> s = y.values() * y.values().transpose() / Scalar(n);
    return {std::move(s), n, false};
  }
  MatrixX<Scalar> dev = y.values().colwise() - y.values().rowwise().mean();
  MatrixX<Scalar> s = dev * dev.transpose() / Scalar(n);
  return {std::move(s), n, true};
}

}  // namespace ricf
