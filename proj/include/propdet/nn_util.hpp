#pragma once

#include <cmath>
#include <random>

#include <Eigen/Core>

namespace propdet::nn {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return (Scalar(1) + (-x).exp()).inverse();
}

/// Column-wise softmax, shifted by the column max.
template <typename Scalar>
Matrix<Scalar> softmax_columns(const Matrix<Scalar>& logits) {
  Matrix<Scalar> out = logits;
  for (Eigen::Index j = 0; j < out.cols(); ++j) {
    auto col = out.col(j);
    col.array() -= col.maxCoeff();
    col = col.array().exp().matrix();
    col /= col.sum();
  }
  return out;
}

template <typename Scalar, typename Rng>
Matrix<Scalar> uniform(Eigen::Index rows, Eigen::Index cols, Scalar radius, Rng& rng) {
  std::uniform_real_distribution<Scalar> dist(-radius, radius);
  Matrix<Scalar> m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = dist(rng);
  }
  return m;
}

/// Inverted-dropout mask: entries are 0 or 1/(1-p).
template <typename Scalar, typename Rng>
Matrix<Scalar> dropout_mask(Eigen::Index rows, Eigen::Index cols, Scalar p, Rng& rng) {
  std::bernoulli_distribution keep(1.0 - static_cast<double>(p));
  const Scalar scale = Scalar(1) / (Scalar(1) - p);
  Matrix<Scalar> m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = keep(rng) ? scale : Scalar(0);
  }
  return m;
}

template <typename Params>
bool all_finite(const Params& params) {
  bool ok = true;
  params.visit([&](const char*, const auto& m) { ok = ok && m.allFinite(); });
  return ok;
}

}  // namespace propdet::nn
