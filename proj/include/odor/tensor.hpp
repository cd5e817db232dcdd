#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace odor {

class TensorError : public std::runtime_error {
 public:
  explicit TensorError(const std::string& message) : std::runtime_error(message) {}
};

struct TensorNode {
  std::vector<int> shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until touched by backward
  bool is_parameter = false;
  std::string name;

  std::vector<std::shared_ptr<TensorNode>> parents;
  std::function<void(TensorNode&)> backward;  // reads grad, accumulates into parents

  void ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
  }
};

/// Dense 64-bit tensor handle (rank 0..2). Copies share the underlying node.
class Tensor {
 public:
  Tensor() = default;

  static Tensor from(std::vector<int> shape, std::vector<double> values);
  static Tensor zeros(std::vector<int> shape);
  static Tensor scalar(double v) { return from({}, {v}); }
  static Tensor parameter(std::string name, std::vector<int> shape, std::vector<double> values);

  bool defined() const { return node_ != nullptr; }
  const std::vector<int>& shape() const { return node_->shape; }
  int64_t size() const { return static_cast<int64_t>(node_->value.size()); }
  int rows() const { return node_->shape.empty() ? 1 : node_->shape[0]; }
  int cols() const { return node_->shape.size() < 2 ? 1 : node_->shape[1]; }

  std::vector<double>& values() { return node_->value; }
  const std::vector<double>& values() const { return node_->value; }
  double item() const {
    if (size() != 1) throw TensorError("item() requires a single-element tensor");
    return node_->value[0];
  }

  std::vector<double>& grad() {
    node_->ensure_grad();
    return node_->grad;
  }
  const std::vector<double>& grad() const { return node_->grad; }
  bool has_grad() const { return !node_->grad.empty(); }
  void zero_grad() { node_->grad.assign(node_->value.size(), 0.0); }

  bool is_parameter() const { return node_->is_parameter; }
  const std::string& name() const { return node_->name; }

  std::shared_ptr<TensorNode> node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<TensorNode> node) : node_(std::move(node)) {}
  std::shared_ptr<TensorNode> node_;
  friend class Tape;
};

/// Records forward primitives in creation order (a valid topological order)
/// and replays their backward functions in reverse. One tape per forward
/// pass; backward may run once.
class Tape {
 public:
  Tensor record(std::vector<int> shape, std::vector<double> value,
                std::vector<std::shared_ptr<TensorNode>> parents,
                std::function<void(TensorNode&)> backward);

  /// Reverse-mode accumulation from a scalar loss into every reachable
  /// tensor's grad. Throws on non-scalar loss or a second invocation.
  void backward(const Tensor& loss);

  size_t size() const { return order_.size(); }

 private:
  std::vector<std::shared_ptr<TensorNode>> order_;
  bool backward_done_ = false;
};

// ---- primitives ----
// Every primitive validates shapes and reports the primitive name plus both
// shapes on mismatch.

Tensor matmul(Tape& t, const Tensor& a, const Tensor& b);
Tensor add(Tape& t, const Tensor& a, const Tensor& b);
Tensor sub(Tape& t, const Tensor& a, const Tensor& b);
Tensor mul(Tape& t, const Tensor& a, const Tensor& b);           // elementwise
Tensor add_rowvec(Tape& t, const Tensor& a, const Tensor& row);  // broadcast-add, a: (m,n), row: (n)
Tensor scale_rows(Tape& t, const Tensor& a, const Tensor& s);    // a: (m,n) times s: (m) per row
Tensor affine(Tape& t, const Tensor& a, double k, double b);     // k*a + b
Tensor concat(Tape& t, const std::vector<Tensor>& parts, int axis);
Tensor slice(Tape& t, const Tensor& a, int axis, int start, int length);
Tensor reshape(Tape& t, const Tensor& a, std::vector<int> shape);
Tensor exp(Tape& t, const Tensor& a);
Tensor log(Tape& t, const Tensor& a);
Tensor sigmoid(Tape& t, const Tensor& a);
Tensor relu(Tape& t, const Tensor& a);
Tensor leaky_relu(Tape& t, const Tensor& a, double slope);
Tensor pow_const(Tape& t, const Tensor& a, double exponent);
Tensor gather_rows(Tape& t, const Tensor& a, const std::vector<int>& rows);
Tensor segment_sum(Tape& t, const Tensor& a, const std::vector<int>& ids, int segments);
Tensor segment_mean(Tape& t, const Tensor& a, const std::vector<int>& ids, int segments);
Tensor segment_max(Tape& t, const Tensor& a, const std::vector<int>& ids, int segments);
/// Softmax over each segment of a vector of scores; every segment sums to 1.
Tensor segment_softmax(Tape& t, const Tensor& scores, const std::vector<int>& ids, int segments);
Tensor sum(Tape& t, const Tensor& a);   // -> scalar
Tensor mean(Tape& t, const Tensor& a);  // -> scalar
/// Numerically stable binary cross-entropy from logits:
/// max(x,0) - x*y + log(1 + exp(-|x|)), elementwise; targets are constants.
Tensor bce_with_logits(Tape& t, const Tensor& logits, const Tensor& targets);
/// Training-mode dropout with inverted scaling; the mask is drawn by the
/// caller-provided uniform source so runs stay deterministic.
Tensor dropout(Tape& t, const Tensor& a, double rate, const std::function<double()>& uniform);

struct BatchNormState {
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double momentum = 0.1;
  double eps = 1e-5;

  void init(int features) {
    running_mean.assign(features, 0.0);
    running_var.assign(features, 1.0);
  }
};

/// Batch normalization over the row dimension. Training mode normalizes by
/// batch statistics (biased variance) and updates the running estimates;
/// inference mode is the affine map through the stored statistics.
Tensor batch_norm(Tape& t, const Tensor& a, const Tensor& gamma, const Tensor& beta,
                  BatchNormState& state, bool training);

}  // namespace odor
