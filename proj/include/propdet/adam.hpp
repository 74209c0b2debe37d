#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace propdet {

/// Adam with bias-corrected moments. Works on any parameter struct exposing
/// `visit(f)` that calls `f(name, matrix)` for each tensor in a fixed order.
template <typename Scalar>
class Adam {
 public:
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  struct Options {
    Scalar learning_rate = Scalar(1e-3);
    Scalar beta1 = Scalar(0.9);
    Scalar beta2 = Scalar(0.999);
    Scalar epsilon = Scalar(1e-8);
  };

  explicit Adam(Options options) : options_(options) {}

  template <typename Params>
  void step(Params& params, const Params& grads) {
    std::vector<Matrix*> p;
    std::vector<const Matrix*> g;
    params.visit([&](const char*, Matrix& m) { p.push_back(&m); });
    grads.visit([&](const char*, const Matrix& m) { g.push_back(&m); });
    if (first_.empty()) {
      for (auto* m : p) {
        first_.push_back(Matrix::Zero(m->rows(), m->cols()));
        second_.push_back(Matrix::Zero(m->rows(), m->cols()));
      }
    }
    ++steps_;
    const Scalar b1 = options_.beta1, b2 = options_.beta2;
    const Scalar correction1 = Scalar(1) - std::pow(b1, static_cast<Scalar>(steps_));
    const Scalar correction2 = Scalar(1) - std::pow(b2, static_cast<Scalar>(steps_));
    const Scalar rate = options_.learning_rate;
    for (std::size_t i = 0; i < p.size(); ++i) {
      first_[i] = b1 * first_[i] + (Scalar(1) - b1) * *g[i];
      second_[i] = b2 * second_[i] + (Scalar(1) - b2) * g[i]->cwiseAbs2();
      p[i]->array() -= rate * (first_[i].array() / correction1) /
                       ((second_[i].array() / correction2).sqrt() + options_.epsilon);
    }
  }

  long steps() const { return steps_; }

 private:
  Options options_;
  std::vector<Matrix> first_;
  std::vector<Matrix> second_;
  long steps_ = 0;
};

}  // namespace propdet
