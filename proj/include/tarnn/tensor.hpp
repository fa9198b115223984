#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace tarnn {

namespace detail {

using GradBuffers = std::vector<std::vector<double>*>;

// One vertex of the computation graph. Nodes are created by the tensor ops
// below and kept alive by shared ownership from their consumers, so a loss
// tensor pins the whole graph it was computed from.
struct TensorNode {
    std::vector<std::size_t> shape;
    std::vector<double> values;
    // Persistent gradient, accumulated across backward() calls until
    // zero_grad(). Empty until the node receives its first gradient.
    std::vector<double> grad;
    bool requires_grad = false;
    std::vector<std::shared_ptr<TensorNode>> parents;
    // Scatters `upstream` (d loss / d this) into the parent buffers.
    // A null buffer marks a parent that does not need gradients.
    std::function<void(const std::vector<double>& upstream, const GradBuffers& parent_bufs)> backprop;

    std::size_t numel() const { return values.size(); }
};

} // namespace detail

enum class Activation { Sigmoid, Tanh, Relu };

/// Dense double-precision tensor participating in reverse-mode
/// differentiation. Copies are shallow: two Tensor objects may share the
/// same graph node, which is what parameter registries rely on.
class Tensor {
  public:
    Tensor() = default;

    static Tensor scalar(double v, bool requires_grad = false);
    static Tensor vector(std::vector<double> v, bool requires_grad = false);
    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> v,
                         bool requires_grad = false);
    static Tensor zeros(std::vector<std::size_t> shape, bool requires_grad = false);
    static Tensor full(std::vector<std::size_t> shape, double v, bool requires_grad = false);

    bool defined() const { return node_ != nullptr; }
    const std::vector<std::size_t>& shape() const;
    std::size_t rank() const;
    std::size_t numel() const;
    std::size_t rows() const; // rank-2 only
    std::size_t cols() const; // rank-2 only

    bool requires_grad() const;

    double value() const; // single-element tensors only
    double operator[](std::size_t flat_index) const;
    double at(std::size_t r, std::size_t c) const;
    std::span<const double> values() const;
    // Direct write access to the stored values (initializers, finite
    // differences). Does not touch any recorded graph structure.
    std::vector<double>& mutable_values();

    bool has_grad() const;
    std::span<const double> grad() const;
    // 0.0 when no gradient has been accumulated yet.
    double grad_at(std::size_t flat_index) const;
    void zero_grad();

    explicit Tensor(std::shared_ptr<detail::TensorNode> node) : node_(std::move(node)) {}
    const std::shared_ptr<detail::TensorNode>& node() const { return node_; }

  private:
    std::shared_ptr<detail::TensorNode> node_;
};

std::string shape_str(std::span<const std::size_t> shape);

// --- differentiable operations ---------------------------------------------

// [m x k] * [k x n] -> [m x n]
Tensor matmul(const Tensor& a, const Tensor& b);
// [m x k] * [k] -> [m]
Tensor matvec(const Tensor& m, const Tensor& x);
// [n] . [n] -> scalar
Tensor dot(const Tensor& a, const Tensor& b);

// Elementwise ops accept equal shapes, or a single-element operand on either
// side which broadcasts as a scalar.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);

Tensor scale(const Tensor& t, double c);
Tensor activation(Activation kind, const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor tanh_act(const Tensor& x);
Tensor relu(const Tensor& x);

// Numerically stabilized softmax over a rank-1 tensor; full Jacobian on the
// backward pass.
Tensor softmax(const Tensor& x);

// rank-1 + rank-1 -> rank-1; rank-2 + rank-2 with equal row counts -> rank-2
// (rows concatenated side by side).
Tensor concat(const Tensor& a, const Tensor& b);

Tensor row(const Tensor& m, std::size_t r);            // [t x c] -> [c]
Tensor element(const Tensor& v, std::size_t i);        // [n] -> scalar
Tensor stack_rows(const std::vector<Tensor>& rows);    // t x [c] -> [t x c]
Tensor stack_scalars(const std::vector<Tensor>& xs);   // n scalars -> [n]

Tensor sum(const Tensor& x);                           // -> scalar
Tensor log_(const Tensor& x);
// Pass-through gradient inside [lo, hi], zero outside.
Tensor clamp(const Tensor& x, double lo, double hi);

// Reverse accumulation from a scalar loss. Repeating backward on the same
// graph accumulates again: every reachable requires-grad tensor ends up with
// exactly twice the gradient after two calls.
void backward(const Tensor& loss);

/// Central finite differences against the analytic gradients of `f`.
/// `f` must rebuild its graph from the given parameter leaves on every call
/// and be deterministic. Returns the maximum over parameter entries of
/// |analytic - numeric| / max(1e-8, |analytic| + |numeric|), or +inf when a
/// NaN shows up anywhere.
double grad_check(const std::function<Tensor()>& f, const std::vector<Tensor>& params,
                  double eps = 1e-5);

} // namespace tarnn
