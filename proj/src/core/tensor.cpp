#include "core/tensor.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "core/error.hpp"

namespace tddr::nn {

namespace {

std::string shape_str(const Matrix& m) {
  std::ostringstream os;
  os << m.rows() << "x" << m.cols();
  return os.str();
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw UsageError(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
  }
}

}  // namespace

Var Tape::push(Node node) {
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

Var Tape::constant(Matrix value) {
  Node n;
  n.op = Op::kLeaf;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::parameter(Tensor& param) {
  Node n;
  n.op = Op::kParam;
  n.value = param.value;
  n.param = &param;
  n.needs_grad = true;
  return push(std::move(n));
}

Var Tape::matmul(Var a, Var b) {
  const Matrix& av = value(a);
  const Matrix& bv = value(b);
  if (av.cols() != bv.rows()) {
    throw UsageError("matmul: inner dimensions differ " + shape_str(av) + " * " + shape_str(bv));
  }
  Node n;
  n.op = Op::kMatmul;
  n.value.noalias() = av * bv;
  n.lhs = a.id;
  n.rhs = b.id;
  n.needs_grad = needs(a.id) || needs(b.id);
  return push(std::move(n));
}

Var Tape::add_row(Var x, Var row) {
  const Matrix& xv = value(x);
  const Matrix& rv = value(row);
  if (rv.rows() != 1 || rv.cols() != xv.cols()) {
    throw UsageError("add_row: row " + shape_str(rv) + " does not broadcast over " + shape_str(xv));
  }
  Node n;
  n.op = Op::kAddRow;
  n.value = xv.rowwise() + rv.row(0);
  n.lhs = x.id;
  n.rhs = row.id;
  n.needs_grad = needs(x.id) || needs(row.id);
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  require_same_shape(value(a), value(b), "add");
  Node n;
  n.op = Op::kAdd;
  n.value = value(a) + value(b);
  n.lhs = a.id;
  n.rhs = b.id;
  n.needs_grad = needs(a.id) || needs(b.id);
  return push(std::move(n));
}

Var Tape::sub(Var a, Var b) {
  require_same_shape(value(a), value(b), "sub");
  Node n;
  n.op = Op::kSub;
  n.value = value(a) - value(b);
  n.lhs = a.id;
  n.rhs = b.id;
  n.needs_grad = needs(a.id) || needs(b.id);
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  require_same_shape(value(a), value(b), "mul");
  Node n;
  n.op = Op::kMul;
  n.value = value(a).cwiseProduct(value(b));
  n.lhs = a.id;
  n.rhs = b.id;
  n.needs_grad = needs(a.id) || needs(b.id);
  return push(std::move(n));
}

Var Tape::scale(Var x, double k) {
  Node n;
  n.op = Op::kScale;
  n.value = value(x) * k;
  n.lhs = x.id;
  n.k = k;
  n.needs_grad = needs(x.id);
  return push(std::move(n));
}

Var Tape::relu(Var x) {
  Node n;
  n.op = Op::kRelu;
  n.value = value(x).cwiseMax(0.0);
  n.lhs = x.id;
  n.needs_grad = needs(x.id);
  return push(std::move(n));
}

Var Tape::tanh(Var x) {
  Node n;
  n.op = Op::kTanh;
  n.value = value(x).array().tanh().matrix();
  n.lhs = x.id;
  n.needs_grad = needs(x.id);
  return push(std::move(n));
}

Var Tape::square(Var x) {
  Node n;
  n.op = Op::kSquare;
  n.value = value(x).array().square().matrix();
  n.lhs = x.id;
  n.needs_grad = needs(x.id);
  return push(std::move(n));
}

Var Tape::concat_cols(Var a, Var b) {
  const Matrix& av = value(a);
  const Matrix& bv = value(b);
  if (av.rows() != bv.rows()) {
    throw UsageError("concat_cols: row counts differ " + shape_str(av) + " | " + shape_str(bv));
  }
  Node n;
  n.op = Op::kConcat;
  n.value.resize(av.rows(), av.cols() + bv.cols());
  n.value << av, bv;
  n.lhs = a.id;
  n.rhs = b.id;
  n.needs_grad = needs(a.id) || needs(b.id);
  return push(std::move(n));
}

Var Tape::mean(Var x) {
  const Matrix& xv = value(x);
  if (xv.size() == 0) throw UsageError("mean: empty tensor");
  Node n;
  n.op = Op::kMean;
  n.value = Matrix::Constant(1, 1, xv.mean());
  n.lhs = x.id;
  n.needs_grad = needs(x.id);
  return push(std::move(n));
}

void Tape::accumulate(std::size_t id, const Matrix& g) {
  Node& n = nodes_[id];
  if (!n.needs_grad) return;
  n.grad += g;
}

void Tape::backward(Var loss) {
  if (loss.id >= nodes_.size()) throw UsageError("backward: variable not on this tape");
  const Matrix& lv = value(loss);
  if (lv.rows() != 1 || lv.cols() != 1) {
    throw UsageError("backward: loss must be scalar, got " + shape_str(lv));
  }
  for (Node& n : nodes_) n.grad.setZero(n.value.rows(), n.value.cols());
  nodes_[loss.id].grad(0, 0) = 1.0;

  for (std::size_t idx = loss.id + 1; idx-- > 0;) {
    Node& n = nodes_[idx];
    if (!n.needs_grad) continue;
    const Matrix& g = n.grad;
    switch (n.op) {
      case Op::kLeaf:
        break;
      case Op::kParam:
        n.param->grad += g;
        break;
      case Op::kMatmul:
        if (needs(n.lhs)) accumulate(n.lhs, g * nodes_[n.rhs].value.transpose());
        if (needs(n.rhs)) accumulate(n.rhs, nodes_[n.lhs].value.transpose() * g);
        break;
      case Op::kAddRow:
        if (needs(n.lhs)) accumulate(n.lhs, g);
        if (needs(n.rhs)) accumulate(n.rhs, g.colwise().sum());
        break;
      case Op::kAdd:
        accumulate(n.lhs, g);
        accumulate(n.rhs, g);
        break;
      case Op::kSub:
        accumulate(n.lhs, g);
        if (needs(n.rhs)) accumulate(n.rhs, -g);
        break;
      case Op::kMul:
        if (needs(n.lhs)) accumulate(n.lhs, g.cwiseProduct(nodes_[n.rhs].value));
        if (needs(n.rhs)) accumulate(n.rhs, g.cwiseProduct(nodes_[n.lhs].value));
        break;
      case Op::kScale:
        accumulate(n.lhs, g * n.k);
        break;
      case Op::kRelu:
        accumulate(n.lhs, (nodes_[n.lhs].value.array() > 0.0).select(g, 0.0).matrix());
        break;
      case Op::kTanh:
        accumulate(n.lhs, g.cwiseProduct((1.0 - n.value.array().square()).matrix()));
        break;
      case Op::kSquare:
        accumulate(n.lhs, 2.0 * g.cwiseProduct(nodes_[n.lhs].value));
        break;
      case Op::kConcat: {
        const Eigen::Index left = nodes_[n.lhs].value.cols();
        if (needs(n.lhs)) accumulate(n.lhs, g.leftCols(left));
        if (needs(n.rhs)) accumulate(n.rhs, g.rightCols(g.cols() - left));
        break;
      }
      case Op::kMean: {
        const Matrix& x = nodes_[n.lhs].value;
        accumulate(n.lhs, Matrix::Constant(x.rows(), x.cols(), g(0, 0) / static_cast<double>(x.size())));
        break;
      }
    }
  }
}

Mlp::Mlp(std::vector<int> widths, OutputActivation output, double output_scale)
    : widths_(std::move(widths)), output_(output), output_scale_(output_scale) {
  if (widths_.size() < 2) throw ConfigError("Mlp: need at least input and output widths");
  for (int w : widths_) {
    if (w <= 0) throw ConfigError("Mlp: layer widths must be positive");
  }
  for (std::size_t k = 0; k + 1 < widths_.size(); ++k) {
    params_.emplace_back(widths_[k], widths_[k + 1]);
    params_.emplace_back(1, widths_[k + 1]);
  }
}

Mlp Mlp::random(std::vector<int> widths, OutputActivation output, double output_scale, Rng& rng,
                double final_layer_scale) {
  Mlp net(std::move(widths), output, output_scale);
  const std::size_t layers = net.layer_count();
  for (std::size_t k = 0; k < layers; ++k) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(net.widths_[k]));
    const double mult = (k + 1 == layers) ? final_layer_scale : 1.0;
    for (Tensor* t : {&net.params_[2 * k], &net.params_[2 * k + 1]}) {
      for (Eigen::Index i = 0; i < t->value.size(); ++i) {
        t->value.data()[i] = mult * rng.uniform(-bound, bound);
      }
    }
  }
  return net;
}

void Mlp::check_input(Eigen::Index cols) const {
  if (cols != widths_.front()) {
    throw ConfigError("Mlp: input width " + std::to_string(cols) + " does not match first layer width " +
                      std::to_string(widths_.front()));
  }
}

Var Mlp::forward(Tape& tape, Var input, bool track_params) {
  check_input(tape.value(input).cols());
  Var h = input;
  const std::size_t layers = layer_count();
  for (std::size_t k = 0; k < layers; ++k) {
    Var w = track_params ? tape.parameter(params_[2 * k]) : tape.constant(params_[2 * k].value);
    Var b = track_params ? tape.parameter(params_[2 * k + 1]) : tape.constant(params_[2 * k + 1].value);
    h = tape.add_row(tape.matmul(h, w), b);
    if (k + 1 < layers) {
      h = tape.relu(h);
    } else if (output_ == OutputActivation::kTanh) {
      h = tape.tanh(h);
      if (output_scale_ != 1.0) h = tape.scale(h, output_scale_);
    }
  }
  return h;
}

Matrix Mlp::predict(const Matrix& input) const {
  check_input(input.cols());
  Matrix h = input;
  const std::size_t layers = layer_count();
  for (std::size_t k = 0; k < layers; ++k) {
    Matrix next(h.rows(), params_[2 * k].value.cols());
    next.noalias() = h * params_[2 * k].value;
    next.rowwise() += params_[2 * k + 1].value.row(0);
    if (k + 1 < layers) {
      next = next.cwiseMax(0.0);
    } else if (output_ == OutputActivation::kTanh) {
      next = next.array().tanh().matrix();
      if (output_scale_ != 1.0) next *= output_scale_;
    }
    h = std::move(next);
  }
  return h;
}

std::size_t Mlp::parameter_count() const {
  std::size_t total = 0;
  for (const Tensor& t : params_) total += t.size();
  return total;
}

void Mlp::zero_grad() {
  for (Tensor& t : params_) t.zero_grad();
}

AdamState make_adam_state(std::span<const Tensor> params, AdamConfig config) {
  AdamState state;
  state.config = config;
  for (const Tensor& p : params) {
    state.first_moment.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    state.second_moment.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
  }
  return state;
}

void adam_step(std::span<Tensor> params, AdamState& state) {
  if (params.size() != state.first_moment.size()) {
    throw UsageError("adam_step: parameter count differs from optimizer state");
  }
  const AdamConfig& c = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(c.beta1, t);
  const double correction2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor& p = params[k];
    Matrix& m = state.first_moment[k];
    Matrix& v = state.second_moment[k];
    require_same_shape(p.value, m, "adam_step");
    require_same_shape(p.value, p.grad, "adam_step");
    m = c.beta1 * m + (1.0 - c.beta1) * p.grad;
    v = c.beta2 * v + (1.0 - c.beta2) * p.grad.cwiseProduct(p.grad);
    p.value.array() -= c.learning_rate * (m.array() / correction1) /
                       ((v.array() / correction2).sqrt() + c.epsilon);
  }
}

}  // namespace tddr::nn
