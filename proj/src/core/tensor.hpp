#pragma once

// Dense 2-D reverse-mode autodiff, multilayer perceptrons and Adam.
//
// A Tape records operations eagerly; values are computed on construction and
// backward() walks the record in reverse. Parameters live in Tensor objects
// owned by the caller (usually an Mlp) and enter a tape by reference, so
// gradients accumulate into Tensor::grad. Nothing here is global: every tape
// and every network is an independent value.

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "core/rng.hpp"

namespace tddr::nn {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Tensor {
  Matrix value;
  Matrix grad;

  Tensor() = default;
  Tensor(Eigen::Index rows, Eigen::Index cols)
      : value(Matrix::Zero(rows, cols)), grad(Matrix::Zero(rows, cols)) {}
  explicit Tensor(Matrix v) : value(std::move(v)), grad(Matrix::Zero(value.rows(), value.cols())) {}

  std::vector<std::size_t> shape() const {
    return {static_cast<std::size_t>(value.rows()), static_cast<std::size_t>(value.cols())};
  }
  std::size_t size() const { return static_cast<std::size_t>(value.size()); }
  void zero_grad() { grad.setZero(value.rows(), value.cols()); }
};

struct Var {
  std::size_t id = 0;
};

class Tape {
 public:
  Var constant(Matrix value);
  // Leaf bound to an external parameter; backward() adds into param.grad.
  Var parameter(Tensor& param);

  Var matmul(Var a, Var b);
  // x (n×m) plus a 1×m row broadcast over every row.
  Var add_row(Var x, Var row);
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var x, double k);
  Var relu(Var x);
  Var tanh(Var x);
  Var square(Var x);
  Var concat_cols(Var a, Var b);
  // Mean over all elements, producing a 1×1 scalar.
  Var mean(Var x);

  const Matrix& value(Var v) const { return nodes_.at(v.id).value; }
  // Gradient of the last backward() loss with respect to v (zero if unreached).
  const Matrix& grad(Var v) const { return nodes_.at(v.id).grad; }

  // loss must be 1×1. Throws UsageError otherwise.
  void backward(Var loss);

  std::size_t size() const { return nodes_.size(); }

 private:
  enum class Op { kLeaf, kParam, kMatmul, kAddRow, kAdd, kSub, kMul, kScale, kRelu, kTanh, kSquare, kConcat, kMean };

  struct Node {
    Op op = Op::kLeaf;
    Matrix value;
    Matrix grad;
    std::size_t lhs = 0;
    std::size_t rhs = 0;
    double k = 0.0;
    Tensor* param = nullptr;
    bool needs_grad = false;
  };

  Var push(Node node);
  bool needs(std::size_t id) const { return nodes_[id].needs_grad; }
  void accumulate(std::size_t id, const Matrix& g);

  std::vector<Node> nodes_;
};

enum class OutputActivation { kIdentity, kTanh };

// Fully connected network: ReLU between layers, identity or scaled tanh at the
// output. Parameters are stored as [W0, b0, W1, b1, ...] with Wk of shape
// widths[k]×widths[k+1] and bk of shape 1×widths[k+1].
class Mlp {
 public:
  Mlp() = default;
  // Zero-initialized network.
  Mlp(std::vector<int> widths, OutputActivation output, double output_scale = 1.0);
  // Uniform fan-in init U(-1/sqrt(fan_in), 1/sqrt(fan_in)); the final layer is
  // further multiplied by final_layer_scale.
  static Mlp random(std::vector<int> widths, OutputActivation output, double output_scale, Rng& rng,
                    double final_layer_scale = 1.0);

  // With track_params=false the weights enter the tape as constants: gradients
  // still flow to the input but no parameter gradient is produced.
  Var forward(Tape& tape, Var input, bool track_params = true);
  Matrix predict(const Matrix& input) const;

  std::span<Tensor> parameters() { return params_; }
  std::span<const Tensor> parameters() const { return params_; }
  std::size_t parameter_count() const;
  const std::vector<int>& widths() const { return widths_; }
  int input_width() const { return widths_.front(); }
  int output_width() const { return widths_.back(); }
  OutputActivation output_activation() const { return output_; }
  double output_scale() const { return output_scale_; }
  std::size_t layer_count() const { return widths_.size() - 1; }
  void zero_grad();

 private:
  void check_input(Eigen::Index cols) const;

  std::vector<int> widths_;
  std::vector<Tensor> params_;
  OutputActivation output_ = OutputActivation::kIdentity;
  double output_scale_ = 1.0;
};

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  std::vector<Matrix> first_moment;
  std::vector<Matrix> second_moment;
  std::int64_t step = 0;
};

AdamState make_adam_state(std::span<const Tensor> params, AdamConfig config);

// One bias-corrected Adam update using each param's grad.
void adam_step(std::span<Tensor> params, AdamState& state);

}  // namespace tddr::nn
