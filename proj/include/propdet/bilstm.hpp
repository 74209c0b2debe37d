#pragma once

#include <array>
#include <cmath>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "propdet/error.hpp"
#include "propdet/nn_util.hpp"

namespace propdet {

/// One LSTM direction. Gate rows are stacked [input; forget; cell; output].
template <typename Scalar>
struct LstmDirection {
  using Matrix = nn::Matrix<Scalar>;
  Matrix input_weights;      // 4H x D
  Matrix recurrent_weights;  // 4H x H
  Matrix bias;               // 4H x 1
};

/// Bidirectional LSTM token classifier: two directions, concatenated hidden
/// state, affine projection to (O, I) logits.
template <typename Scalar>
struct BiLstmTagger {
  using Matrix = nn::Matrix<Scalar>;

  LstmDirection<Scalar> forward;
  LstmDirection<Scalar> backward;
  Matrix output_weights;  // 2 x 2H
  Matrix output_bias;     // 2 x 1

  Eigen::Index input_dim() const { return forward.input_weights.cols(); }
  Eigen::Index hidden() const { return forward.recurrent_weights.cols(); }

  static BiLstmTagger zeros(Eigen::Index input_dim, Eigen::Index hidden) {
    BiLstmTagger t;
    for (auto* d : {&t.forward, &t.backward}) {
      d->input_weights = Matrix::Zero(4 * hidden, input_dim);
      d->recurrent_weights = Matrix::Zero(4 * hidden, hidden);
      d->bias = Matrix::Zero(4 * hidden, 1);
    }
    t.output_weights = Matrix::Zero(2, 2 * hidden);
    t.output_bias = Matrix::Zero(2, 1);
    return t;
  }

  /// Uniform(-r, r) with r = 1/sqrt(hidden); zero biases except forget gate = 1.
  template <typename Rng>
  static BiLstmTagger random(Eigen::Index input_dim, Eigen::Index hidden, Rng& rng) {
    const Scalar r = Scalar(1) / std::sqrt(static_cast<Scalar>(hidden));
    BiLstmTagger t;
    for (auto* d : {&t.forward, &t.backward}) {
      d->input_weights = nn::uniform<Scalar>(4 * hidden, input_dim, r, rng);
      d->recurrent_weights = nn::uniform<Scalar>(4 * hidden, hidden, r, rng);
      d->bias = Matrix::Zero(4 * hidden, 1);
      d->bias.middleRows(hidden, hidden).setOnes();
    }
    t.output_weights = nn::uniform<Scalar>(2, 2 * hidden, r, rng);
    t.output_bias = Matrix::Zero(2, 1);
    return t;
  }

  template <typename F>
  void visit(F&& f) { visit_impl(*this, f); }
  template <typename F>
  void visit(F&& f) const { visit_impl(*this, f); }

 private:
  template <typename Self, typename F>
  static void visit_impl(Self& self, F& f) {
    f("forward.input_weights", self.forward.input_weights);
    f("forward.recurrent_weights", self.forward.recurrent_weights);
    f("forward.bias", self.forward.bias);
    f("backward.input_weights", self.backward.input_weights);
    f("backward.recurrent_weights", self.backward.recurrent_weights);
    f("backward.bias", self.backward.bias);
    f("output.weights", self.output_weights);
    f("output.bias", self.output_bias);
  }
};

/// Sequences laid out time-major and right-padded with zeros. `mask(t, b)` is 1
/// for real tokens; padded steps leave the recurrent state untouched.
template <typename Scalar>
struct PaddedBatch {
  using Matrix = nn::Matrix<Scalar>;
  using Array = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  std::vector<Matrix> steps;  // T entries of D x B
  Array mask;                 // T x B
  std::vector<Eigen::Index> lengths;

  Eigen::Index max_len() const { return static_cast<Eigen::Index>(steps.size()); }
  Eigen::Index batch_size() const { return static_cast<Eigen::Index>(lengths.size()); }

  /// Each sequence is D x T_i (one column per token).
  static PaddedBatch pack(std::span<const Matrix* const> sequences, Eigen::Index input_dim) {
    PaddedBatch batch;
    const auto b = static_cast<Eigen::Index>(sequences.size());
    Eigen::Index t_max = 0;
    for (const auto* s : sequences) {
      if (s->rows() != input_dim) {
        throw ShapeError("token vector has " + std::to_string(s->rows()) + " entries, model expects " +
                         std::to_string(input_dim));
      }
      batch.lengths.push_back(s->cols());
      t_max = std::max(t_max, s->cols());
    }
    batch.steps.assign(static_cast<std::size_t>(t_max), Matrix::Zero(input_dim, b));
    batch.mask = Array::Zero(t_max, b);
    for (Eigen::Index j = 0; j < b; ++j) {
      const auto& s = *sequences[static_cast<std::size_t>(j)];
      for (Eigen::Index t = 0; t < s.cols(); ++t) {
        batch.steps[static_cast<std::size_t>(t)].col(j) = s.col(t);
        batch.mask(t, j) = Scalar(1);
      }
    }
    return batch;
  }
};

namespace detail {

template <typename Scalar>
struct DirectionTrace {
  using Matrix = nn::Matrix<Scalar>;
  // Indexed by processing step k; time index is order[k].
  std::vector<Eigen::Index> order;
  std::vector<Matrix> in_gate, forget_gate, cell_gate, out_gate, cell_tanh;  // unmasked new values
  std::vector<Matrix> h, c;  // masked states after step k
};

template <typename Scalar>
DirectionTrace<Scalar> run_direction(const LstmDirection<Scalar>& dir, const PaddedBatch<Scalar>& batch,
                                     bool reverse) {
  using Matrix = nn::Matrix<Scalar>;
  const Eigen::Index hidden = dir.recurrent_weights.cols();
  const Eigen::Index b = batch.batch_size();
  const Eigen::Index steps = batch.max_len();
  DirectionTrace<Scalar> tr;
  Matrix h = Matrix::Zero(hidden, b), c = Matrix::Zero(hidden, b);
  for (Eigen::Index k = 0; k < steps; ++k) {
    const Eigen::Index t = reverse ? steps - 1 - k : k;
    Matrix a = dir.input_weights * batch.steps[static_cast<std::size_t>(t)] + dir.recurrent_weights * h;
    a.colwise() += dir.bias.col(0);
    Matrix i = nn::sigmoid(a.topRows(hidden).array()).matrix();
    Matrix f = nn::sigmoid(a.middleRows(hidden, hidden).array()).matrix();
    Matrix g = a.middleRows(2 * hidden, hidden).array().tanh().matrix();
    Matrix o = nn::sigmoid(a.bottomRows(hidden).array()).matrix();
    Matrix c_new = (f.array() * c.array() + i.array() * g.array()).matrix();
    Matrix c_tanh = c_new.array().tanh().matrix();
    Matrix h_new = (o.array() * c_tanh.array()).matrix();
    const auto m = batch.mask.row(t);
    for (Eigen::Index j = 0; j < b; ++j) {
      if (m(j) != Scalar(0)) {
        h.col(j) = h_new.col(j);
        c.col(j) = c_new.col(j);
      }
    }
    tr.order.push_back(t);
    tr.in_gate.push_back(std::move(i));
    tr.forget_gate.push_back(std::move(f));
    tr.cell_gate.push_back(std::move(g));
    tr.out_gate.push_back(std::move(o));
    tr.cell_tanh.push_back(std::move(c_tanh));
    tr.h.push_back(h);
    tr.c.push_back(c);
  }
  return tr;
}

/// Accumulates parameter gradients for one direction given dLoss/dh_t for
/// every time step (indexed by time, not processing order).
template <typename Scalar>
void backprop_direction(const LstmDirection<Scalar>& dir, const PaddedBatch<Scalar>& batch,
                        const DirectionTrace<Scalar>& tr, const std::vector<nn::Matrix<Scalar>>& dh_out,
                        LstmDirection<Scalar>& grad) {
  using Matrix = nn::Matrix<Scalar>;
  const Eigen::Index hidden = dir.recurrent_weights.cols();
  const Eigen::Index b = batch.batch_size();
  const auto steps = static_cast<Eigen::Index>(tr.order.size());
  Matrix dh_carry = Matrix::Zero(hidden, b), dc_carry = Matrix::Zero(hidden, b);
  const Matrix zeros = Matrix::Zero(hidden, b);
  Matrix da(4 * hidden, b);
  for (Eigen::Index k = steps - 1; k >= 0; --k) {
    const auto ku = static_cast<std::size_t>(k);
    const Eigen::Index t = tr.order[ku];
    const Matrix& h_prev = k > 0 ? tr.h[ku - 1] : zeros;
    const Matrix& c_prev = k > 0 ? tr.c[ku - 1] : zeros;
    const auto& i = tr.in_gate[ku].array();
    const auto& f = tr.forget_gate[ku].array();
    const auto& g = tr.cell_gate[ku].array();
    const auto& o = tr.out_gate[ku].array();
    const auto& ct = tr.cell_tanh[ku].array();

    Matrix dh = dh_out[static_cast<std::size_t>(t)] + dh_carry;
    Matrix dh_new = dh, dc_in = dc_carry;
    Matrix dh_skip = Matrix::Zero(hidden, b), dc_skip = Matrix::Zero(hidden, b);
    const auto m = batch.mask.row(t);
    for (Eigen::Index j = 0; j < b; ++j) {
      if (m(j) == Scalar(0)) {
        dh_skip.col(j) = dh.col(j);
        dc_skip.col(j) = dc_carry.col(j);
        dh_new.col(j).setZero();
        dc_in.col(j).setZero();
      }
    }
    const Matrix dc_new = (dc_in.array() + dh_new.array() * o * (Scalar(1) - ct.square())).matrix();
    da.topRows(hidden) = (dc_new.array() * g * i * (Scalar(1) - i)).matrix();
    da.middleRows(hidden, hidden) = (dc_new.array() * c_prev.array() * f * (Scalar(1) - f)).matrix();
    da.middleRows(2 * hidden, hidden) = (dc_new.array() * i * (Scalar(1) - g.square())).matrix();
    da.bottomRows(hidden) = (dh_new.array() * ct * o * (Scalar(1) - o)).matrix();

    grad.input_weights.noalias() += da * batch.steps[static_cast<std::size_t>(t)].transpose();
    grad.recurrent_weights.noalias() += da * h_prev.transpose();
    grad.bias += da.rowwise().sum();
    dh_carry = dir.recurrent_weights.transpose() * da + dh_skip;
    dc_carry = (dc_new.array() * f).matrix() + dc_skip;
  }
}

}  // namespace detail

/// Forward pass record, reused by the backward pass.
template <typename Scalar>
struct BiLstmTrace {
  using Matrix = nn::Matrix<Scalar>;
  detail::DirectionTrace<Scalar> fwd, bwd;
  std::vector<Matrix> dropout;  // per time step, 2H x B; empty when dropout is off
  std::vector<Matrix> features;  // per time step, concatenated (dropped-out) hidden states
  std::vector<Matrix> probs;     // per time step, 2 x B with rows (P(O), P(I))
};

/// Runs both directions, then dropout (only when `rng` is non-null and p > 0),
/// projection and softmax.
template <typename Scalar, typename Rng = std::mt19937_64>
BiLstmTrace<Scalar> forward(const BiLstmTagger<Scalar>& model, const PaddedBatch<Scalar>& batch,
                            Scalar dropout = Scalar(0), Rng* rng = nullptr) {
  using Matrix = nn::Matrix<Scalar>;
  const Eigen::Index hidden = model.hidden();
  BiLstmTrace<Scalar> tr;
  tr.fwd = detail::run_direction(model.forward, batch, false);
  tr.bwd = detail::run_direction(model.backward, batch, true);
  const Eigen::Index steps = batch.max_len();
  const Eigen::Index b = batch.batch_size();
  const bool drop = rng != nullptr && dropout > Scalar(0);
  for (Eigen::Index t = 0; t < steps; ++t) {
    Matrix z(2 * hidden, b);
    z.topRows(hidden) = tr.fwd.h[static_cast<std::size_t>(t)];
    z.bottomRows(hidden) = tr.bwd.h[static_cast<std::size_t>(steps - 1 - t)];
    if (drop) {
      tr.dropout.push_back(nn::dropout_mask<Scalar>(2 * hidden, b, dropout, *rng));
      z.array() *= tr.dropout.back().array();
    }
    Matrix logits = model.output_weights * z;
    logits.colwise() += model.output_bias.col(0);
    tr.probs.push_back(nn::softmax_columns<Scalar>(logits));
    tr.features.push_back(std::move(z));
  }
  return tr;
}

/// Class-weighted token cross-entropy averaged over real (unpadded) tokens.
/// `labels[b][t]` is 0 for O and 1 for I.
template <typename Scalar>
Scalar weighted_loss(const BiLstmTrace<Scalar>& tr, const PaddedBatch<Scalar>& batch,
                     std::span<const std::vector<int>> labels, std::array<Scalar, 2> class_weights) {
  Scalar total = 0;
  Scalar count = batch.mask.sum();
  for (Eigen::Index t = 0; t < batch.max_len(); ++t) {
    for (Eigen::Index j = 0; j < batch.batch_size(); ++j) {
      if (batch.mask(t, j) == Scalar(0)) continue;
      const int y = labels[static_cast<std::size_t>(j)][static_cast<std::size_t>(t)];
      total -= class_weights[static_cast<std::size_t>(y)] * std::log(tr.probs[static_cast<std::size_t>(t)](y, j));
    }
  }
  return count > 0 ? total / count : Scalar(0);
}

/// Gradient of `weighted_loss` with respect to every parameter.
template <typename Scalar>
BiLstmTagger<Scalar> backward(const BiLstmTagger<Scalar>& model, const PaddedBatch<Scalar>& batch,
                              const BiLstmTrace<Scalar>& tr, std::span<const std::vector<int>> labels,
                              std::array<Scalar, 2> class_weights) {
  using Matrix = nn::Matrix<Scalar>;
  const Eigen::Index hidden = model.hidden();
  const Eigen::Index steps = batch.max_len();
  const Eigen::Index b = batch.batch_size();
  const Scalar count = batch.mask.sum();
  auto grad = BiLstmTagger<Scalar>::zeros(model.input_dim(), hidden);
  std::vector<Matrix> dh_fwd(static_cast<std::size_t>(steps)), dh_bwd(static_cast<std::size_t>(steps));
  for (Eigen::Index t = 0; t < steps; ++t) {
    const auto tu = static_cast<std::size_t>(t);
    Matrix dlogits = tr.probs[tu];
    for (Eigen::Index j = 0; j < b; ++j) {
      if (batch.mask(t, j) == Scalar(0)) {
        dlogits.col(j).setZero();
        continue;
      }
      const int y = labels[static_cast<std::size_t>(j)][tu];
      dlogits(y, j) -= Scalar(1);
      dlogits.col(j) *= class_weights[static_cast<std::size_t>(y)] / count;
    }
    grad.output_weights.noalias() += dlogits * tr.features[tu].transpose();
    grad.output_bias += dlogits.rowwise().sum();
    Matrix dz = model.output_weights.transpose() * dlogits;
    if (!tr.dropout.empty()) dz.array() *= tr.dropout[tu].array();
    dh_fwd[tu] = dz.topRows(hidden);
    dh_bwd[tu] = dz.bottomRows(hidden);
  }
  detail::backprop_direction(model.forward, batch, tr.fwd, dh_fwd, grad.forward);
  detail::backprop_direction(model.backward, batch, tr.bwd, dh_bwd, grad.backward);
  return grad;
}

}  // namespace propdet
