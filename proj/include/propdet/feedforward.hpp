#pragma once

#include <cmath>
#include <random>
#include <span>

#include <Eigen/Core>

#include "propdet/error.hpp"
#include "propdet/nn_util.hpp"

namespace propdet {

/// Softmax classifier with an optional rectified hidden layer. Without the
/// hidden layer it is plain softmax regression.
template <typename Scalar>
struct FeedForward {
  using Matrix = nn::Matrix<Scalar>;

  Matrix hidden_weights;  // Hd x In, empty without hidden layer
  Matrix hidden_bias;     // Hd x 1
  Matrix output_weights;  // C x (Hd or In)
  Matrix output_bias;     // C x 1

  bool has_hidden() const { return hidden_weights.size() > 0; }
  Eigen::Index input_dim() const { return has_hidden() ? hidden_weights.cols() : output_weights.cols(); }
  Eigen::Index classes() const { return output_weights.rows(); }

  static FeedForward zeros(Eigen::Index input_dim, Eigen::Index hidden, Eigen::Index classes) {
    FeedForward m;
    if (hidden > 0) {
      m.hidden_weights = Matrix::Zero(hidden, input_dim);
      m.hidden_bias = Matrix::Zero(hidden, 1);
    }
    m.output_weights = Matrix::Zero(classes, hidden > 0 ? hidden : input_dim);
    m.output_bias = Matrix::Zero(classes, 1);
    return m;
  }

  /// Glorot-uniform weights, zero biases.
  template <typename Rng>
  static FeedForward random(Eigen::Index input_dim, Eigen::Index hidden, Eigen::Index classes, Rng& rng) {
    auto m = zeros(input_dim, hidden, classes);
    auto glorot = [&](Matrix& w) {
      const Scalar r = std::sqrt(Scalar(6) / static_cast<Scalar>(w.rows() + w.cols()));
      w = nn::uniform<Scalar>(w.rows(), w.cols(), r, rng);
    };
    if (hidden > 0) glorot(m.hidden_weights);
    glorot(m.output_weights);
    return m;
  }

  template <typename F>
  void visit(F&& f) { visit_impl(*this, f); }
  template <typename F>
  void visit(F&& f) const { visit_impl(*this, f); }

 private:
  template <typename Self, typename F>
  static void visit_impl(Self& self, F& f) {
    if (self.has_hidden()) {
      f("hidden.weights", self.hidden_weights);
      f("hidden.bias", self.hidden_bias);
    }
    f("output.weights", self.output_weights);
    f("output.bias", self.output_bias);
  }
};

template <typename Scalar>
struct FeedForwardTrace {
  using Matrix = nn::Matrix<Scalar>;
  Matrix hidden_pre;  // before rectifier
  Matrix hidden;      // after rectifier and dropout
  Matrix dropout;     // empty when off
  Matrix logits;
  Matrix probs;
};

/// Inputs are In x B, one column per instance.
template <typename Scalar, typename Rng = std::mt19937_64>
FeedForwardTrace<Scalar> forward(const FeedForward<Scalar>& model, const nn::Matrix<Scalar>& inputs,
                                 Scalar dropout = Scalar(0), Rng* rng = nullptr) {
  if (inputs.rows() != model.input_dim()) {
    throw ShapeError("input has " + std::to_string(inputs.rows()) + " rows, model expects " +
                     std::to_string(model.input_dim()));
  }
  FeedForwardTrace<Scalar> tr;
  if (model.has_hidden()) {
    tr.hidden_pre = model.hidden_weights * inputs;
    tr.hidden_pre.colwise() += model.hidden_bias.col(0);
    tr.hidden = tr.hidden_pre.cwiseMax(Scalar(0));
    if (rng != nullptr && dropout > Scalar(0)) {
      tr.dropout = nn::dropout_mask<Scalar>(tr.hidden.rows(), tr.hidden.cols(), dropout, *rng);
      tr.hidden.array() *= tr.dropout.array();
    }
    tr.logits = model.output_weights * tr.hidden;
  } else {
    tr.logits = model.output_weights * inputs;
  }
  tr.logits.colwise() += model.output_bias.col(0);
  tr.probs = nn::softmax_columns<Scalar>(tr.logits);
  return tr;
}

/// Mean cross-entropy over the batch.
template <typename Scalar>
Scalar cross_entropy(const FeedForwardTrace<Scalar>& tr, std::span<const int> labels) {
  Scalar total = 0;
  for (Eigen::Index j = 0; j < tr.probs.cols(); ++j) {
    total -= std::log(tr.probs(labels[static_cast<std::size_t>(j)], j));
  }
  return tr.probs.cols() > 0 ? total / static_cast<Scalar>(tr.probs.cols()) : Scalar(0);
}

template <typename Scalar>
FeedForward<Scalar> backward(const FeedForward<Scalar>& model, const nn::Matrix<Scalar>& inputs,
                             const FeedForwardTrace<Scalar>& tr, std::span<const int> labels) {
  using Matrix = nn::Matrix<Scalar>;
  const auto b = tr.probs.cols();
  Matrix dlogits = tr.probs;
  for (Eigen::Index j = 0; j < b; ++j) dlogits(labels[static_cast<std::size_t>(j)], j) -= Scalar(1);
  dlogits /= static_cast<Scalar>(b);
  auto grad = FeedForward<Scalar>::zeros(model.input_dim(), model.has_hidden() ? model.hidden_weights.rows() : 0,
                                         model.classes());
  grad.output_bias = dlogits.rowwise().sum();
  if (!model.has_hidden()) {
    grad.output_weights.noalias() = dlogits * inputs.transpose();
    return grad;
  }
  grad.output_weights.noalias() = dlogits * tr.hidden.transpose();
  Matrix dhidden = model.output_weights.transpose() * dlogits;
  if (tr.dropout.size() > 0) dhidden.array() *= tr.dropout.array();
  dhidden.array() *= (tr.hidden_pre.array() > Scalar(0)).template cast<Scalar>();
  grad.hidden_weights.noalias() = dhidden * inputs.transpose();
  grad.hidden_bias = dhidden.rowwise().sum();
  return grad;
}

}  // namespace propdet
