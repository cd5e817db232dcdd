#include "odor/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace odor {

namespace {

int64_t shape_size(const std::vector<int>& shape) {
  int64_t n = 1;
  for (int d : shape) n *= d;
  return n;
}

std::string shape_str(const std::vector<int>& shape) {
  std::ostringstream os;
  os << "(";
  for (size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ")";
  return os.str();
}

[[noreturn]] void shape_fail(const char* op, const std::vector<int>& a, const std::vector<int>& b) {
  throw TensorError(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " + shape_str(b));
}

void require(bool ok, const char* op, const std::vector<int>& a, const std::vector<int>& b) {
  if (!ok) shape_fail(op, a, b);
}

using NodePtr = std::shared_ptr<TensorNode>;

}  // namespace

Tensor Tensor::from(std::vector<int> shape, std::vector<double> values) {
  auto node = std::make_shared<TensorNode>();
  if (shape_size(shape) != static_cast<int64_t>(values.size()))
    throw TensorError("tensor: value count " + std::to_string(values.size()) +
                      " does not match shape " + shape_str(shape));
  node->shape = std::move(shape);
  node->value = std::move(values);
  return Tensor(std::move(node));
}

Tensor Tensor::zeros(std::vector<int> shape) {
  auto n = shape_size(shape);
  return from(std::move(shape), std::vector<double>(n, 0.0));
}

Tensor Tensor::parameter(std::string name, std::vector<int> shape, std::vector<double> values) {
  Tensor t = from(std::move(shape), std::move(values));
  t.node_->is_parameter = true;
  t.node_->name = std::move(name);
  return t;
}

Tensor Tape::record(std::vector<int> shape, std::vector<double> value,
                    std::vector<NodePtr> parents, std::function<void(TensorNode&)> backward) {
  Tensor t = Tensor::from(std::move(shape), std::move(value));
  t.node_->parents = std::move(parents);
  t.node_->backward = std::move(backward);
  order_.push_back(t.node_);
  return t;
}

void Tape::backward(const Tensor& loss) {
  if (backward_done_) throw TensorError("backward: tape already used; record a fresh forward pass");
  if (loss.size() != 1) throw TensorError("backward: loss must be a scalar tensor");
  backward_done_ = true;
  loss.node()->ensure_grad();
  loss.node()->grad[0] = 1.0;
  for (auto it = order_.rbegin(); it != order_.rend(); ++it) {
    TensorNode& node = **it;
    if (node.grad.empty() || !node.backward) continue;
    node.backward(node);
  }
}

// ---- primitives ----

Tensor matmul(Tape& t, const Tensor& a, const Tensor& b) {
  require(a.shape().size() == 2 && b.shape().size() == 2 && a.cols() == b.rows(), "matmul",
          a.shape(), b.shape());
  int m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(static_cast<size_t>(m) * n, 0.0);
  const auto& av = a.values();
  const auto& bv = b.values();
  for (int i = 0; i < m; ++i)
    for (int p = 0; p < k; ++p) {
      double aip = av[i * k + p];
      if (aip == 0.0) continue;
      const double* brow = &bv[p * n];
      double* orow = &out[i * n];
      for (int j = 0; j < n; ++j) orow[j] += aip * brow[j];
    }
  auto an = a.node(), bn = b.node();
  return t.record({m, n}, std::move(out), {an, bn}, [an, bn, m, k, n](TensorNode& self) {
    an->ensure_grad();
    bn->ensure_grad();
    const auto& g = self.grad;
    // dA += dC * B^T
    for (int i = 0; i < m; ++i)
      for (int p = 0; p < k; ++p) {
        double acc = 0.0;
        const double* grow = &g[i * n];
        const double* brow = &bn->value[p * n];
        for (int j = 0; j < n; ++j) acc += grow[j] * brow[j];
        an->grad[i * k + p] += acc;
      }
    // dB += A^T * dC
    for (int p = 0; p < k; ++p)
      for (int i = 0; i < m; ++i) {
        double aip = an->value[i * k + p];
        if (aip == 0.0) continue;
        const double* grow = &g[i * n];
        double* brow = &bn->grad[p * n];
        for (int j = 0; j < n; ++j) brow[j] += aip * grow[j];
      }
  });
}

Tensor add(Tape& t, const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "add", a.shape(), b.shape());
  std::vector<double> out(a.values());
  for (int64_t i = 0; i < a.size(); ++i) out[i] += b.values()[i];
  auto an = a.node(), bn = b.node();
  return t.record(a.shape(), std::move(out), {an, bn}, [an, bn](TensorNode& self) {
    an->ensure_grad();
    bn->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i) {
      an->grad[i] += self.grad[i];
      bn->grad[i] += self.grad[i];
    }
  });
}

Tensor sub(Tape& t, const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "sub", a.shape(), b.shape());
  std::vector<double> out(a.values());
  for (int64_t i = 0; i < a.size(); ++i) out[i] -= b.values()[i];
  auto an = a.node(), bn = b.node();
  return t.record(a.shape(), std::move(out), {an, bn}, [an, bn](TensorNode& self) {
    an->ensure_grad();
    bn->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i) {
      an->grad[i] += self.grad[i];
      bn->grad[i] -= self.grad[i];
    }
  });
}

Tensor mul(Tape& t, const Tensor& a, const Tensor& b) {
  require(a.shape() == b.shape(), "mul", a.shape(), b.shape());
  std::vector<double> out(a.values());
  for (int64_t i = 0; i < a.size(); ++i) out[i] *= b.values()[i];
  auto an = a.node(), bn = b.node();
  return t.record(a.shape(), std::move(out), {an, bn}, [an, bn](TensorNode& self) {
    an->ensure_grad();
    bn->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i) {
      an->grad[i] += self.grad[i] * bn->value[i];
      bn->grad[i] += self.grad[i] * an->value[i];
    }
  });
}

Tensor add_rowvec(Tape& t, const Tensor& a, const Tensor& row) {
  require(a.shape().size() == 2 && row.shape().size() == 1 && a.cols() == row.rows(), "add_rowvec",
          a.shape(), row.shape());
  int m = a.rows(), n = a.cols();
  std::vector<double> out(a.values());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out[i * n + j] += row.values()[j];
  auto an = a.node(), rn = row.node();
  return t.record(a.shape(), std::move(out), {an, rn}, [an, rn, m, n](TensorNode& self) {
    an->ensure_grad();
    rn->ensure_grad();
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) {
        an->grad[i * n + j] += self.grad[i * n + j];
        rn->grad[j] += self.grad[i * n + j];
      }
  });
}

Tensor scale_rows(Tape& t, const Tensor& a, const Tensor& s) {
  require(a.shape().size() == 2 && s.shape().size() == 1 && a.rows() == s.rows(), "scale_rows",
          a.shape(), s.shape());
  int m = a.rows(), n = a.cols();
  std::vector<double> out(a.values());
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) out[i * n + j] *= s.values()[i];
  auto an = a.node(), sn = s.node();
  return t.record(a.shape(), std::move(out), {an, sn}, [an, sn, m, n](TensorNode& self) {
    an->ensure_grad();
    sn->ensure_grad();
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      for (int j = 0; j < n; ++j) {
        an->grad[i * n + j] += self.grad[i * n + j] * sn->value[i];
        acc += self.grad[i * n + j] * an->value[i * n + j];
      }
      sn->grad[i] += acc;
    }
  });
}

Tensor affine(Tape& t, const Tensor& a, double k, double b) {
  std::vector<double> out(a.values());
  for (double& v : out) v = k * v + b;
  auto an = a.node();
  return t.record(a.shape(), std::move(out), {an}, [an, k](TensorNode& self) {
    an->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += k * self.grad[i];
  });
}

Tensor concat(Tape& t, const std::vector<Tensor>& parts, int axis) {
  if (parts.empty()) throw TensorError("concat: no inputs");
  if (axis != 0 && axis != 1) throw TensorError("concat: axis must be 0 or 1");
  int m = parts[0].rows(), n = parts[0].cols();
  int total = 0;
  for (const Tensor& p : parts) {
    require(p.shape().size() == parts[0].shape().size(), "concat", parts[0].shape(), p.shape());
    if (axis == 0) {
      require(p.cols() == n, "concat", parts[0].shape(), p.shape());
      total += p.rows();
    } else {
      require(p.rows() == m, "concat", parts[0].shape(), p.shape());
      total += p.cols();
    }
  }
  std::vector<int> shape = axis == 0 ? std::vector<int>{total, n} : std::vector<int>{m, total};
  if (parts[0].shape().size() == 1) shape = {total};
  std::vector<double> out;
  out.reserve(shape_size(shape));
  std::vector<NodePtr> nodes;
  for (const Tensor& p : parts) nodes.push_back(p.node());
  if (axis == 0 || parts[0].shape().size() == 1) {
    for (const Tensor& p : parts) out.insert(out.end(), p.values().begin(), p.values().end());
  } else {
    int out_cols = total;
    out.assign(static_cast<size_t>(m) * total, 0.0);
    int col0 = 0;
    for (const Tensor& p : parts) {
      int pc = p.cols();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < pc; ++j) out[i * out_cols + col0 + j] = p.values()[i * pc + j];
      col0 += pc;
    }
  }
  bool rowwise = axis == 0 || parts[0].shape().size() == 1;
  return t.record(shape, std::move(out), nodes, [nodes, rowwise, m, total](TensorNode& self) {
    if (rowwise) {
      size_t off = 0;
      for (auto& p : nodes) {
        p->ensure_grad();
        for (size_t i = 0; i < p->value.size(); ++i) p->grad[i] += self.grad[off + i];
        off += p->value.size();
      }
    } else {
      int col0 = 0;
      for (auto& p : nodes) {
        p->ensure_grad();
        int pc = p->shape.size() < 2 ? 1 : p->shape[1];
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < pc; ++j) p->grad[i * pc + j] += self.grad[i * total + col0 + j];
        col0 += pc;
      }
    }
  });
}

Tensor slice(Tape& t, const Tensor& a, int axis, int start, int length) {
  if (axis != 0 && axis != 1) throw TensorError("slice: axis must be 0 or 1");
  int m = a.rows(), n = a.cols();
  int extent = axis == 0 ? m : n;
  if (start < 0 || length < 0 || start + length > extent)
    throw TensorError("slice: range [" + std::to_string(start) + "," +
                      std::to_string(start + length) + ") out of extent " + std::to_string(extent));
  std::vector<int> shape = a.shape();
  shape[axis] = length;
  std::vector<double> out;
  out.reserve(shape_size(shape));
  if (axis == 0) {
    out.insert(out.end(), a.values().begin() + static_cast<size_t>(start) * n,
               a.values().begin() + static_cast<size_t>(start + length) * n);
  } else {
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < length; ++j) out.push_back(a.values()[i * n + start + j]);
  }
  auto an = a.node();
  return t.record(shape, std::move(out), {an}, [an, axis, start, length, m, n](TensorNode& self) {
    an->ensure_grad();
    if (axis == 0) {
      for (int i = 0; i < length * n; ++i) an->grad[start * n + i] += self.grad[i];
    } else {
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < length; ++j) an->grad[i * n + start + j] += self.grad[i * length + j];
    }
  });
}

Tensor reshape(Tape& t, const Tensor& a, std::vector<int> shape) {
  require(shape_size(shape) == a.size(), "reshape", a.shape(), shape);
  auto an = a.node();
  return t.record(std::move(shape), a.values(), {an}, [an](TensorNode& self) {
    an->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += self.grad[i];
  });
}

namespace {

template <typename Fwd, typename Bwd>
Tensor unary_op(Tape& t, const Tensor& a, Fwd fwd, Bwd bwd_from_in_out) {
  std::vector<double> out(a.values());
  for (double& v : out) v = fwd(v);
  auto an = a.node();
  return t.record(a.shape(), std::move(out), {an}, [an, bwd_from_in_out](TensorNode& self) {
    an->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i)
      an->grad[i] += self.grad[i] * bwd_from_in_out(an->value[i], self.value[i]);
  });
}

}  // namespace

Tensor exp(Tape& t, const Tensor& a) {
  return unary_op(t, a, [](double v) { return std::exp(v); },
                  [](double, double out) { return out; });
}

Tensor log(Tape& t, const Tensor& a) {
  return unary_op(t, a, [](double v) { return std::log(v); },
                  [](double in, double) { return 1.0 / in; });
}

Tensor sigmoid(Tape& t, const Tensor& a) {
  auto sig = [](double v) { return v >= 0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v)); };
  return unary_op(t, a, sig, [](double, double out) { return out * (1.0 - out); });
}

Tensor relu(Tape& t, const Tensor& a) {
  return unary_op(t, a, [](double v) { return v > 0 ? v : 0.0; },
                  [](double in, double) { return in > 0 ? 1.0 : 0.0; });
}

Tensor leaky_relu(Tape& t, const Tensor& a, double slope) {
  return unary_op(t, a, [slope](double v) { return v > 0 ? v : slope * v; },
                  [slope](double in, double) { return in > 0 ? 1.0 : slope; });
}

Tensor pow_const(Tape& t, const Tensor& a, double exponent) {
  return unary_op(t, a, [exponent](double v) { return std::pow(v, exponent); },
                  [exponent](double in, double) {
                    return exponent == 0.0 ? 0.0 : exponent * std::pow(in, exponent - 1.0);
                  });
}

Tensor gather_rows(Tape& t, const Tensor& a, const std::vector<int>& rows) {
  if (a.shape().size() != 2) throw TensorError("gather_rows: input must be rank 2");
  int n = a.cols();
  std::vector<double> out;
  out.reserve(rows.size() * n);
  for (int r : rows) {
    if (r < 0 || r >= a.rows()) throw TensorError("gather_rows: row index out of range");
    out.insert(out.end(), a.values().begin() + static_cast<size_t>(r) * n,
               a.values().begin() + static_cast<size_t>(r + 1) * n);
  }
  auto an = a.node();
  auto idx = rows;
  return t.record({static_cast<int>(rows.size()), n}, std::move(out), {an},
                  [an, idx, n](TensorNode& self) {
                    an->ensure_grad();
                    for (size_t i = 0; i < idx.size(); ++i)
                      for (int j = 0; j < n; ++j) an->grad[idx[i] * n + j] += self.grad[i * n + j];
                  });
}

namespace {

void check_segment_args(const char* op, const Tensor& a, const std::vector<int>& ids, int segments) {
  if (static_cast<int>(ids.size()) != a.rows())
    throw TensorError(std::string(op) + ": ids length " + std::to_string(ids.size()) +
                      " != rows " + std::to_string(a.rows()));
  for (int id : ids)
    if (id < 0 || id >= segments)
      throw TensorError(std::string(op) + ": segment id " + std::to_string(id) +
                        " out of range 0.." + std::to_string(segments - 1));
}

}  // namespace

Tensor segment_sum(Tape& t, const Tensor& a, const std::vector<int>& ids, int segments) {
  check_segment_args("segment_sum", a, ids, segments);
  int n = a.cols();
  std::vector<double> out(static_cast<size_t>(segments) * n, 0.0);
  for (size_t i = 0; i < ids.size(); ++i)
    for (int j = 0; j < n; ++j) out[ids[i] * n + j] += a.values()[i * n + j];
  auto an = a.node();
  auto idx = ids;
  std::vector<int> shape = a.shape().size() == 1 ? std::vector<int>{segments}
                                                 : std::vector<int>{segments, n};
  return t.record(shape, std::move(out), {an}, [an, idx, n](TensorNode& self) {
    an->ensure_grad();
    for (size_t i = 0; i < idx.size(); ++i)
      for (int j = 0; j < n; ++j) an->grad[i * n + j] += self.grad[idx[i] * n + j];
  });
}

Tensor segment_mean(Tape& t, const Tensor& a, const std::vector<int>& ids, int segments) {
  check_segment_args("segment_mean", a, ids, segments);
  int n = a.cols();
  std::vector<double> counts(segments, 0.0);
  for (int id : ids) counts[id] += 1.0;
  std::vector<double> out(static_cast<size_t>(segments) * n, 0.0);
  for (size_t i = 0; i < ids.size(); ++i)
    for (int j = 0; j < n; ++j) out[ids[i] * n + j] += a.values()[i * n + j];
  for (int s = 0; s < segments; ++s)
    if (counts[s] > 0)
      for (int j = 0; j < n; ++j) out[s * n + j] /= counts[s];
  auto an = a.node();
  auto idx = ids;
  std::vector<int> shape = a.shape().size() == 1 ? std::vector<int>{segments}
                                                 : std::vector<int>{segments, n};
  return t.record(shape, std::move(out), {an}, [an, idx, n, counts](TensorNode& self) {
    an->ensure_grad();
    for (size_t i = 0; i < idx.size(); ++i)
      for (int j = 0; j < n; ++j)
        an->grad[i * n + j] += self.grad[idx[i] * n + j] / counts[idx[i]];
  });
}

Tensor segment_max(Tape& t, const Tensor& a, const std::vector<int>& ids, int segments) {
  check_segment_args("segment_max", a, ids, segments);
  int n = a.cols();
  std::vector<double> out(static_cast<size_t>(segments) * n, 0.0);
  std::vector<int> argmax(static_cast<size_t>(segments) * n, -1);
  for (size_t i = 0; i < ids.size(); ++i)
    for (int j = 0; j < n; ++j) {
      size_t o = ids[i] * n + j;
      double v = a.values()[i * n + j];
      if (argmax[o] < 0 || v > out[o]) {
        out[o] = v;
        argmax[o] = static_cast<int>(i);
      }
    }
  // Empty segments stay at zero.
  for (size_t o = 0; o < out.size(); ++o)
    if (argmax[o] < 0) out[o] = 0.0;
  auto an = a.node();
  std::vector<int> shape = a.shape().size() == 1 ? std::vector<int>{segments}
                                                 : std::vector<int>{segments, n};
  return t.record(shape, std::move(out), {an}, [an, argmax, n](TensorNode& self) {
    an->ensure_grad();
    for (size_t o = 0; o < self.grad.size(); ++o)
      if (argmax[o] >= 0) an->grad[argmax[o] * n + (o % n)] += self.grad[o];
  });
}

Tensor segment_softmax(Tape& t, const Tensor& scores, const std::vector<int>& ids, int segments) {
  if (scores.shape().size() != 1)
    throw TensorError("segment_softmax: scores must be a vector, got " + shape_str(scores.shape()));
  check_segment_args("segment_softmax", scores, ids, segments);
  std::vector<double> seg_max(segments, -std::numeric_limits<double>::infinity());
  for (size_t i = 0; i < ids.size(); ++i)
    seg_max[ids[i]] = std::max(seg_max[ids[i]], scores.values()[i]);
  std::vector<double> out(scores.values().size());
  std::vector<double> seg_sum(segments, 0.0);
  for (size_t i = 0; i < ids.size(); ++i) {
    out[i] = std::exp(scores.values()[i] - seg_max[ids[i]]);
    seg_sum[ids[i]] += out[i];
  }
  for (size_t i = 0; i < ids.size(); ++i) out[i] /= seg_sum[ids[i]];
  auto sn = scores.node();
  auto idx = ids;
  return t.record(scores.shape(), std::move(out), {sn}, [sn, idx, segments](TensorNode& self) {
    sn->ensure_grad();
    std::vector<double> seg_dot(segments, 0.0);
    for (size_t i = 0; i < idx.size(); ++i) seg_dot[idx[i]] += self.grad[i] * self.value[i];
    for (size_t i = 0; i < idx.size(); ++i)
      sn->grad[i] += self.value[i] * (self.grad[i] - seg_dot[idx[i]]);
  });
}

Tensor sum(Tape& t, const Tensor& a) {
  double total = std::accumulate(a.values().begin(), a.values().end(), 0.0);
  auto an = a.node();
  return t.record({}, {total}, {an}, [an](TensorNode& self) {
    an->ensure_grad();
    for (double& g : an->grad) g += self.grad[0];
  });
}

Tensor mean(Tape& t, const Tensor& a) {
  if (a.size() == 0) throw TensorError("mean: empty tensor");
  double total = std::accumulate(a.values().begin(), a.values().end(), 0.0);
  double inv = 1.0 / static_cast<double>(a.size());
  auto an = a.node();
  return t.record({}, {total * inv}, {an}, [an, inv](TensorNode& self) {
    an->ensure_grad();
    for (double& g : an->grad) g += self.grad[0] * inv;
  });
}

Tensor bce_with_logits(Tape& t, const Tensor& logits, const Tensor& targets) {
  require(logits.shape() == targets.shape(), "bce_with_logits", logits.shape(), targets.shape());
  std::vector<double> out(logits.values().size());
  for (size_t i = 0; i < out.size(); ++i) {
    double x = logits.values()[i], y = targets.values()[i];
    out[i] = std::max(x, 0.0) - x * y + std::log1p(std::exp(-std::abs(x)));
  }
  auto ln = logits.node(), tn = targets.node();
  return t.record(logits.shape(), std::move(out), {ln, tn}, [ln, tn](TensorNode& self) {
    ln->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i) {
      double x = ln->value[i];
      double s = x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
      ln->grad[i] += self.grad[i] * (s - tn->value[i]);
    }
  });
}

Tensor dropout(Tape& t, const Tensor& a, double rate, const std::function<double()>& uniform) {
  if (rate <= 0.0) return affine(t, a, 1.0, 0.0);
  if (rate >= 1.0) throw TensorError("dropout: rate must be < 1");
  double keep = 1.0 - rate;
  std::vector<double> mask(a.values().size());
  for (double& m : mask) m = uniform() < rate ? 0.0 : 1.0 / keep;
  std::vector<double> out(a.values());
  for (size_t i = 0; i < out.size(); ++i) out[i] *= mask[i];
  auto an = a.node();
  return t.record(a.shape(), std::move(out), {an}, [an, mask](TensorNode& self) {
    an->ensure_grad();
    for (size_t i = 0; i < self.grad.size(); ++i) an->grad[i] += self.grad[i] * mask[i];
  });
}

Tensor batch_norm(Tape& t, const Tensor& a, const Tensor& gamma, const Tensor& beta,
                  BatchNormState& state, bool training) {
  require(a.shape().size() == 2, "batch_norm", a.shape(), a.shape());
  int m = a.rows(), n = a.cols();
  require(gamma.shape().size() == 1 && gamma.rows() == n, "batch_norm", a.shape(), gamma.shape());
  require(beta.shape().size() == 1 && beta.rows() == n, "batch_norm", a.shape(), beta.shape());
  if (static_cast<int>(state.running_mean.size()) != n) state.init(n);

  auto an = a.node(), gn = gamma.node(), bn = beta.node();
  if (!training) {
    std::vector<double> scale(n), shift(n);
    for (int j = 0; j < n; ++j) {
      scale[j] = gamma.values()[j] / std::sqrt(state.running_var[j] + state.eps);
      shift[j] = beta.values()[j] - scale[j] * state.running_mean[j];
    }
    std::vector<double> out(a.values());
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < n; ++j) out[i * n + j] = out[i * n + j] * scale[j] + shift[j];
    std::vector<double> rm = state.running_mean, rv = state.running_var;
    double eps = state.eps;
    return t.record(a.shape(), std::move(out), {an, gn, bn},
                    [an, gn, bn, rm, rv, eps, m, n](TensorNode& self) {
                      an->ensure_grad();
                      gn->ensure_grad();
                      bn->ensure_grad();
                      for (int j = 0; j < n; ++j) {
                        double inv = 1.0 / std::sqrt(rv[j] + eps);
                        double scale = gn->value[j] * inv;
                        for (int i = 0; i < m; ++i) {
                          double g = self.grad[i * n + j];
                          an->grad[i * n + j] += g * scale;
                          gn->grad[j] += g * (an->value[i * n + j] - rm[j]) * inv;
                          bn->grad[j] += g;
                        }
                      }
                    });
  }

  std::vector<double> mu(n, 0.0), var(n, 0.0), invstd(n, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) mu[j] += a.values()[i * n + j];
  for (int j = 0; j < n; ++j) mu[j] /= m;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      double d = a.values()[i * n + j] - mu[j];
      var[j] += d * d;
    }
  for (int j = 0; j < n; ++j) {
    var[j] /= m;  // biased, matching the running estimate
    invstd[j] = 1.0 / std::sqrt(var[j] + state.eps);
  }
  for (int j = 0; j < n; ++j) {
    state.running_mean[j] = (1 - state.momentum) * state.running_mean[j] + state.momentum * mu[j];
    state.running_var[j] = (1 - state.momentum) * state.running_var[j] + state.momentum * var[j];
  }
  std::vector<double> xhat(static_cast<size_t>(m) * n);
  std::vector<double> out(static_cast<size_t>(m) * n);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      xhat[i * n + j] = (a.values()[i * n + j] - mu[j]) * invstd[j];
      out[i * n + j] = gamma.values()[j] * xhat[i * n + j] + beta.values()[j];
    }
  return t.record(a.shape(), std::move(out), {an, gn, bn},
                  [an, gn, bn, xhat, invstd, m, n](TensorNode& self) {
                    an->ensure_grad();
                    gn->ensure_grad();
                    bn->ensure_grad();
                    for (int j = 0; j < n; ++j) {
                      double sum_dy = 0.0, sum_dy_xhat = 0.0;
                      for (int i = 0; i < m; ++i) {
                        double g = self.grad[i * n + j];
                        sum_dy += g;
                        sum_dy_xhat += g * xhat[i * n + j];
                      }
                      gn->grad[j] += sum_dy_xhat;
                      bn->grad[j] += sum_dy;
                      double scale = gn->value[j] * invstd[j] / m;
                      for (int i = 0; i < m; ++i) {
                        double g = self.grad[i * n + j];
                        an->grad[i * n + j] +=
                            scale * (m * g - sum_dy - xhat[i * n + j] * sum_dy_xhat);
                      }
                    }
                  });
}

}  // namespace odor
