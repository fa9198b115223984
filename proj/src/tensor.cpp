#include "tarnn/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "tarnn/errors.hpp"

namespace tarnn {

namespace {

using detail::GradBuffers;
using detail::TensorNode;

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape)
        n *= d;
    return n;
}

std::shared_ptr<TensorNode> make_leaf(std::vector<std::size_t> shape, std::vector<double> values,
                                      bool requires_grad) {
    if (shape_numel(shape) != values.size())
        throw DimensionError("tensor values length " + std::to_string(values.size()) +
                             " does not match shape " + shape_str(shape));
    auto n = std::make_shared<TensorNode>();
    n->shape = std::move(shape);
    n->values = std::move(values);
    n->requires_grad = requires_grad;
    return n;
}

using BackpropFn = std::function<void(const std::vector<double>&, const GradBuffers&)>;

// Result node of an op. Parents and the backprop closure are only recorded
// when some parent actually needs gradients.
Tensor make_op(std::vector<std::size_t> shape, std::vector<double> values,
               std::vector<std::shared_ptr<TensorNode>> parents, BackpropFn fn) {
    auto n = std::make_shared<TensorNode>();
    n->shape = std::move(shape);
    n->values = std::move(values);
    bool needs_grad = false;
    for (const auto& p : parents)
        needs_grad = needs_grad || p->requires_grad;
    n->requires_grad = needs_grad;
    if (needs_grad) {
        n->parents = std::move(parents);
        n->backprop = std::move(fn);
    }
    return Tensor(n);
}

const std::shared_ptr<TensorNode>& checked(const Tensor& t, const char* what) {
    if (!t.defined())
        throw ContractError(std::string(what) + ": undefined tensor");
    return t.node();
}

bool same_shape(const TensorNode& a, const TensorNode& b) { return a.shape == b.shape; }

} // namespace

std::string shape_str(std::span<const std::size_t> shape) {
    std::ostringstream os;
    os << "[";
    for (std::size_t i = 0; i < shape.size(); ++i)
        os << (i ? "x" : "") << shape[i];
    os << "]";
    return os.str();
}

// --- Tensor -----------------------------------------------------------------

Tensor Tensor::scalar(double v, bool requires_grad) {
    return Tensor(make_leaf({}, {v}, requires_grad));
}

Tensor Tensor::vector(std::vector<double> v, bool requires_grad) {
    std::size_t n = v.size();
    return Tensor(make_leaf({n}, std::move(v), requires_grad));
}

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> v,
                      bool requires_grad) {
    return Tensor(make_leaf({rows, cols}, std::move(v), requires_grad));
}

Tensor Tensor::zeros(std::vector<std::size_t> shape, bool requires_grad) {
    std::vector<double> v(shape_numel(shape), 0.0);
    return Tensor(make_leaf(std::move(shape), std::move(v), requires_grad));
}

Tensor Tensor::full(std::vector<std::size_t> shape, double value, bool requires_grad) {
    std::vector<double> v(shape_numel(shape), value);
    return Tensor(make_leaf(std::move(shape), std::move(v), requires_grad));
}

const std::vector<std::size_t>& Tensor::shape() const { return checked(*this, "shape")->shape; }
std::size_t Tensor::rank() const { return shape().size(); }
std::size_t Tensor::numel() const { return checked(*this, "numel")->numel(); }

std::size_t Tensor::rows() const {
    const auto& n = checked(*this, "rows");
    if (n->shape.size() != 2)
        throw DimensionError("rows(): expected rank-2 tensor, got " + shape_str(n->shape));
    return n->shape[0];
}

std::size_t Tensor::cols() const {
    const auto& n = checked(*this, "cols");
    if (n->shape.size() != 2)
        throw DimensionError("cols(): expected rank-2 tensor, got " + shape_str(n->shape));
    return n->shape[1];
}

bool Tensor::requires_grad() const { return checked(*this, "requires_grad")->requires_grad; }

double Tensor::value() const {
    const auto& n = checked(*this, "value");
    if (n->numel() != 1)
        throw ContractError("value(): tensor has " + std::to_string(n->numel()) + " elements");
    return n->values[0];
}

double Tensor::operator[](std::size_t i) const { return checked(*this, "index")->values.at(i); }

double Tensor::at(std::size_t r, std::size_t c) const {
    const auto& n = checked(*this, "at");
    if (n->shape.size() != 2)
        throw DimensionError("at(): expected rank-2 tensor, got " + shape_str(n->shape));
    return n->values.at(r * n->shape[1] + c);
}

std::span<const double> Tensor::values() const { return checked(*this, "values")->values; }
std::vector<double>& Tensor::mutable_values() { return checked(*this, "mutable_values")->values; }

bool Tensor::has_grad() const { return defined() && !node_->grad.empty(); }

std::span<const double> Tensor::grad() const { return checked(*this, "grad")->grad; }

double Tensor::grad_at(std::size_t i) const {
    const auto& n = checked(*this, "grad_at");
    if (n->grad.empty())
        return 0.0;
    return n->grad.at(i);
}

void Tensor::zero_grad() { checked(*this, "zero_grad")->grad.clear(); }

// --- ops --------------------------------------------------------------------

Tensor matmul(const Tensor& ta, const Tensor& tb) {
    auto a = checked(ta, "matmul");
    auto b = checked(tb, "matmul");
    if (a->shape.size() != 2 || b->shape.size() != 2 || a->shape[1] != b->shape[0])
        throw DimensionError("matmul: incompatible shapes " + shape_str(a->shape) + " and " +
                             shape_str(b->shape));
    const std::size_t m = a->shape[0], k = a->shape[1], n = b->shape[1];
    std::vector<double> out(m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a->values[i * k + p];
            if (av == 0.0)
                continue;
            for (std::size_t j = 0; j < n; ++j)
                out[i * n + j] += av * b->values[p * n + j];
        }
    return make_op({m, n}, std::move(out), {a, b},
                   [a, b, m, k, n](const std::vector<double>& up, const GradBuffers& g) {
                       if (g[0]) // dA = up * B^T
                           for (std::size_t i = 0; i < m; ++i)
                               for (std::size_t p = 0; p < k; ++p) {
                                   double s = 0.0;
                                   for (std::size_t j = 0; j < n; ++j)
                                       s += up[i * n + j] * b->values[p * n + j];
                                   (*g[0])[i * k + p] += s;
                               }
                       if (g[1]) // dB = A^T * up
                           for (std::size_t p = 0; p < k; ++p)
                               for (std::size_t j = 0; j < n; ++j) {
                                   double s = 0.0;
                                   for (std::size_t i = 0; i < m; ++i)
                                       s += a->values[i * k + p] * up[i * n + j];
                                   (*g[1])[p * n + j] += s;
                               }
                   });
}

Tensor matvec(const Tensor& tm, const Tensor& tx) {
    auto m = checked(tm, "matvec");
    auto x = checked(tx, "matvec");
    if (m->shape.size() != 2 || x->shape.size() != 1 || m->shape[1] != x->shape[0])
        throw DimensionError("matvec: incompatible shapes " + shape_str(m->shape) + " and " +
                             shape_str(x->shape));
    const std::size_t r = m->shape[0], c = m->shape[1];
    std::vector<double> out(r, 0.0);
    for (std::size_t i = 0; i < r; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < c; ++j)
            s += m->values[i * c + j] * x->values[j];
        out[i] = s;
    }
    return make_op({r}, std::move(out), {m, x},
                   [m, x, r, c](const std::vector<double>& up, const GradBuffers& g) {
                       if (g[0])
                           for (std::size_t i = 0; i < r; ++i)
                               for (std::size_t j = 0; j < c; ++j)
                                   (*g[0])[i * c + j] += up[i] * x->values[j];
                       if (g[1])
                           for (std::size_t j = 0; j < c; ++j) {
                               double s = 0.0;
                               for (std::size_t i = 0; i < r; ++i)
                                   s += m->values[i * c + j] * up[i];
                               (*g[1])[j] += s;
                           }
                   });
}

Tensor dot(const Tensor& ta, const Tensor& tb) {
    auto a = checked(ta, "dot");
    auto b = checked(tb, "dot");
    if (a->shape.size() != 1 || b->shape.size() != 1 || a->shape[0] != b->shape[0])
        throw DimensionError("dot: incompatible shapes " + shape_str(a->shape) + " and " +
                             shape_str(b->shape));
    double s = 0.0;
    for (std::size_t i = 0; i < a->values.size(); ++i)
        s += a->values[i] * b->values[i];
    return make_op({}, {s}, {a, b},
                   [a, b](const std::vector<double>& up, const GradBuffers& g) {
                       const double u = up[0];
                       if (g[0])
                           for (std::size_t i = 0; i < a->values.size(); ++i)
                               (*g[0])[i] += u * b->values[i];
                       if (g[1])
                           for (std::size_t i = 0; i < b->values.size(); ++i)
                               (*g[1])[i] += u * a->values[i];
                   });
}

namespace {

enum class EwKind { Add, Sub, Mul };

Tensor elementwise(EwKind kind, const Tensor& ta, const Tensor& tb, const char* name) {
    auto a = checked(ta, name);
    auto b = checked(tb, name);
    const bool a_scalar = a->numel() == 1 && !same_shape(*a, *b);
    const bool b_scalar = b->numel() == 1 && !same_shape(*a, *b);
    if (!same_shape(*a, *b) && !a_scalar && !b_scalar)
        throw DimensionError(std::string(name) + ": incompatible shapes " + shape_str(a->shape) +
                             " and " + shape_str(b->shape));
    const auto& big = b_scalar || same_shape(*a, *b) ? a : b;
    const std::size_t n = big->numel();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double av = a_scalar ? a->values[0] : a->values[i];
        const double bv = b_scalar ? b->values[0] : b->values[i];
        switch (kind) {
        case EwKind::Add: out[i] = av + bv; break;
        case EwKind::Sub: out[i] = av - bv; break;
        case EwKind::Mul: out[i] = av * bv; break;
        }
    }
    return make_op(big->shape, std::move(out), {a, b},
                   [kind, a, b, a_scalar, b_scalar, n](const std::vector<double>& up,
                                                       const GradBuffers& g) {
                       for (std::size_t i = 0; i < n; ++i) {
                           const double u = up[i];
                           const double av = a_scalar ? a->values[0] : a->values[i];
                           const double bv = b_scalar ? b->values[0] : b->values[i];
                           double da = 0.0, db = 0.0;
                           switch (kind) {
                           case EwKind::Add: da = u; db = u; break;
                           case EwKind::Sub: da = u; db = -u; break;
                           case EwKind::Mul: da = u * bv; db = u * av; break;
                           }
                           if (g[0])
                               (*g[0])[a_scalar ? 0 : i] += da;
                           if (g[1])
                               (*g[1])[b_scalar ? 0 : i] += db;
                       }
                   });
}

} // namespace

Tensor add(const Tensor& a, const Tensor& b) { return elementwise(EwKind::Add, a, b, "add"); }
Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(EwKind::Sub, a, b, "sub"); }
Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(EwKind::Mul, a, b, "mul"); }

Tensor scale(const Tensor& tx, double c) {
    auto x = checked(tx, "scale");
    std::vector<double> out(x->values);
    for (double& v : out)
        v *= c;
    return make_op(x->shape, std::move(out), {x},
                   [c](const std::vector<double>& up, const GradBuffers& g) {
                       if (g[0])
                           for (std::size_t i = 0; i < up.size(); ++i)
                               (*g[0])[i] += c * up[i];
                   });
}

Tensor activation(Activation kind, const Tensor& tx) {
    auto x = checked(tx, "activation");
    const std::size_t n = x->numel();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double v = x->values[i];
        switch (kind) {
        case Activation::Sigmoid: out[i] = 1.0 / (1.0 + std::exp(-v)); break;
        case Activation::Tanh: out[i] = std::tanh(v); break;
        case Activation::Relu: out[i] = v > 0.0 ? v : 0.0; break;
        }
    }
    auto out_copy = out; // derivative of sigmoid/tanh is cheapest via the output
    return make_op(x->shape, std::move(out), {x},
                   [kind, x, y = std::move(out_copy), n](const std::vector<double>& up,
                                                         const GradBuffers& g) {
                       if (!g[0])
                           return;
                       for (std::size_t i = 0; i < n; ++i) {
                           double d = 0.0;
                           switch (kind) {
                           case Activation::Sigmoid: d = y[i] * (1.0 - y[i]); break;
                           case Activation::Tanh: d = 1.0 - y[i] * y[i]; break;
                           case Activation::Relu: d = x->values[i] > 0.0 ? 1.0 : 0.0; break;
                           }
                           (*g[0])[i] += d * up[i];
                       }
                   });
}

Tensor sigmoid(const Tensor& x) { return activation(Activation::Sigmoid, x); }
Tensor tanh_act(const Tensor& x) { return activation(Activation::Tanh, x); }
Tensor relu(const Tensor& x) { return activation(Activation::Relu, x); }

Tensor softmax(const Tensor& tx) {
    auto x = checked(tx, "softmax");
    if (x->shape.size() != 1 || x->numel() == 0)
        throw ContractError("softmax: expected non-empty rank-1 tensor, got " +
                            shape_str(x->shape));
    const std::size_t n = x->numel();
    const double mx = *std::max_element(x->values.begin(), x->values.end());
    std::vector<double> out(n);
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = std::exp(x->values[i] - mx);
        denom += out[i];
    }
    for (double& v : out)
        v /= denom;
    auto y = out;
    return make_op({n}, std::move(out), {x},
                   [y = std::move(y), n](const std::vector<double>& up, const GradBuffers& g) {
                       if (!g[0])
                           return;
                       double dot_uy = 0.0;
                       for (std::size_t j = 0; j < n; ++j)
                           dot_uy += up[j] * y[j];
                       for (std::size_t i = 0; i < n; ++i)
                           (*g[0])[i] += y[i] * (up[i] - dot_uy);
                   });
}

Tensor concat(const Tensor& ta, const Tensor& tb) {
    auto a = checked(ta, "concat");
    auto b = checked(tb, "concat");
    if (a->shape.size() == 1 && b->shape.size() == 1) {
        const std::size_t na = a->numel(), nb = b->numel();
        std::vector<double> out;
        out.reserve(na + nb);
        out.insert(out.end(), a->values.begin(), a->values.end());
        out.insert(out.end(), b->values.begin(), b->values.end());
        return make_op({na + nb}, std::move(out), {a, b},
                       [na, nb](const std::vector<double>& up, const GradBuffers& g) {
                           if (g[0])
                               for (std::size_t i = 0; i < na; ++i)
                                   (*g[0])[i] += up[i];
                           if (g[1])
                               for (std::size_t i = 0; i < nb; ++i)
                                   (*g[1])[i] += up[na + i];
                       });
    }
    if (a->shape.size() == 2 && b->shape.size() == 2) {
        if (a->shape[0] != b->shape[0])
            throw DimensionError("concat: row count mismatch " + shape_str(a->shape) + " vs " +
                                 shape_str(b->shape));
        const std::size_t r = a->shape[0], ca = a->shape[1], cb = b->shape[1];
        std::vector<double> out(r * (ca + cb));
        for (std::size_t i = 0; i < r; ++i) {
            std::copy_n(a->values.begin() + i * ca, ca, out.begin() + i * (ca + cb));
            std::copy_n(b->values.begin() + i * cb, cb, out.begin() + i * (ca + cb) + ca);
        }
        return make_op({r, ca + cb}, std::move(out), {a, b},
                       [r, ca, cb](const std::vector<double>& up, const GradBuffers& g) {
                           for (std::size_t i = 0; i < r; ++i) {
                               if (g[0])
                                   for (std::size_t j = 0; j < ca; ++j)
                                       (*g[0])[i * ca + j] += up[i * (ca + cb) + j];
                               if (g[1])
                                   for (std::size_t j = 0; j < cb; ++j)
                                       (*g[1])[i * cb + j] += up[i * (ca + cb) + ca + j];
                           }
                       });
    }
    throw DimensionError("concat: expected two rank-1 or two rank-2 tensors, got " +
                         shape_str(a->shape) + " and " + shape_str(b->shape));
}

Tensor row(const Tensor& tm, std::size_t r) {
    auto m = checked(tm, "row");
    if (m->shape.size() != 2)
        throw DimensionError("row: expected rank-2 tensor, got " + shape_str(m->shape));
    if (r >= m->shape[0])
        throw ContractError("row: index " + std::to_string(r) + " out of range for " +
                            shape_str(m->shape));
    const std::size_t c = m->shape[1];
    std::vector<double> out(m->values.begin() + r * c, m->values.begin() + (r + 1) * c);
    return make_op({c}, std::move(out), {m},
                   [r, c](const std::vector<double>& up, const GradBuffers& g) {
                       if (g[0])
                           for (std::size_t j = 0; j < c; ++j)
                               (*g[0])[r * c + j] += up[j];
                   });
}

Tensor element(const Tensor& tv, std::size_t i) {
    auto v = checked(tv, "element");
    if (v->shape.size() != 1 || i >= v->numel())
        throw ContractError("element: index " + std::to_string(i) + " invalid for " +
                            shape_str(v->shape));
    return make_op({}, {v->values[i]}, {v},
                   [i](const std::vector<double>& up, const GradBuffers& g) {
                       if (g[0])
                           (*g[0])[i] += up[0];
                   });
}

Tensor stack_rows(const std::vector<Tensor>& rows) {
    if (rows.empty())
        throw ContractError("stack_rows: no rows given");
    std::vector<std::shared_ptr<detail::TensorNode>> parents;
    parents.reserve(rows.size());
    const std::size_t c = checked(rows[0], "stack_rows")->numel();
    std::vector<double> out;
    out.reserve(rows.size() * c);
    for (const auto& rt : rows) {
        auto rn = checked(rt, "stack_rows");
        if (rn->shape.size() != 1 || rn->numel() != c)
            throw DimensionError("stack_rows: row shape " + shape_str(rn->shape) +
                                 " does not match width " + std::to_string(c));
        out.insert(out.end(), rn->values.begin(), rn->values.end());
        parents.push_back(rn);
    }
    const std::size_t t = rows.size();
    return make_op({t, c}, std::move(out), std::move(parents),
                   [t, c](const std::vector<double>& up, const GradBuffers& g) {
                       for (std::size_t i = 0; i < t; ++i)
                           if (g[i])
                               for (std::size_t j = 0; j < c; ++j)
                                   (*g[i])[j] += up[i * c + j];
                   });
}

Tensor stack_scalars(const std::vector<Tensor>& xs) {
    if (xs.empty())
        throw ContractError("stack_scalars: no elements given");
    std::vector<std::shared_ptr<detail::TensorNode>> parents;
    parents.reserve(xs.size());
    std::vector<double> out;
    out.reserve(xs.size());
    for (const auto& xt : xs) {
        auto xn = checked(xt, "stack_scalars");
        if (xn->numel() != 1)
            throw DimensionError("stack_scalars: element has shape " + shape_str(xn->shape));
        out.push_back(xn->values[0]);
        parents.push_back(xn);
    }
    const std::size_t n = xs.size();
    return make_op({n}, std::move(out), std::move(parents),
                   [n](const std::vector<double>& up, const GradBuffers& g) {
                       for (std::size_t i = 0; i < n; ++i)
                           if (g[i])
                               (*g[i])[0] += up[i];
                   });
}

Tensor sum(const Tensor& tx) {
    auto x = checked(tx, "sum");
    double s = 0.0;
    for (double v : x->values)
        s += v;
    return make_op({}, {s}, {x},
                   [](const std::vector<double>& up, const GradBuffers& g) {
                       if (g[0])
                           for (double& v : *g[0])
                               v += up[0];
                   });
}

Tensor log_(const Tensor& tx) {
    auto x = checked(tx, "log");
    std::vector<double> out(x->numel());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::log(x->values[i]);
    return make_op(x->shape, std::move(out), {x},
                   [x](const std::vector<double>& up, const GradBuffers& g) {
                       if (g[0])
                           for (std::size_t i = 0; i < up.size(); ++i)
                               (*g[0])[i] += up[i] / x->values[i];
                   });
}

Tensor clamp(const Tensor& tx, double lo, double hi) {
    auto x = checked(tx, "clamp");
    if (!(lo <= hi))
        throw ContractError("clamp: lo > hi");
    std::vector<double> out(x->numel());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = std::min(hi, std::max(lo, x->values[i]));
    return make_op(x->shape, std::move(out), {x},
                   [x, lo, hi](const std::vector<double>& up, const GradBuffers& g) {
                       if (g[0])
                           for (std::size_t i = 0; i < up.size(); ++i)
                               if (x->values[i] >= lo && x->values[i] <= hi)
                                   (*g[0])[i] += up[i];
                   });
}

// --- backward ---------------------------------------------------------------

void backward(const Tensor& loss) {
    auto root = checked(loss, "backward");
    if (root->numel() != 1)
        throw ContractError("backward: loss must be scalar, got " + shape_str(root->shape));
    if (!root->requires_grad)
        return; // constant loss: nothing reachable wants gradients

    // Topological order over the requires-grad subgraph.
    std::vector<TensorNode*> order;
    std::unordered_set<TensorNode*> visited;
    struct Frame {
        TensorNode* node;
        std::size_t next_parent;
    };
    std::vector<Frame> stack{{root.get(), 0}};
    visited.insert(root.get());
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next_parent < f.node->parents.size()) {
            TensorNode* p = f.node->parents[f.next_parent++].get();
            if (p->requires_grad && visited.insert(p).second)
                stack.push_back({p, 0});
        } else {
            order.push_back(f.node);
            stack.pop_back();
        }
    }

    std::unordered_map<TensorNode*, std::vector<double>> buf;
    buf.reserve(order.size());
    for (TensorNode* n : order)
        buf.emplace(n, std::vector<double>(n->numel(), 0.0));
    buf[root.get()][0] = 1.0;

    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        TensorNode* n = *it;
        if (!n->backprop)
            continue;
        GradBuffers parent_bufs;
        parent_bufs.reserve(n->parents.size());
        for (const auto& p : n->parents) {
            auto found = buf.find(p.get());
            parent_bufs.push_back(found == buf.end() ? nullptr : &found->second);
        }
        n->backprop(buf[n], parent_bufs);
    }

    for (TensorNode* n : order) {
        const auto& b = buf[n];
        if (n->grad.empty())
            n->grad.assign(n->numel(), 0.0);
        for (std::size_t i = 0; i < b.size(); ++i)
            n->grad[i] += b[i];
    }
}

double grad_check(const std::function<Tensor()>& f, const std::vector<Tensor>& params,
                  double eps) {
    if (eps <= 0.0)
        throw ContractError("grad_check: eps must be positive");

    for (const auto& p : params)
        const_cast<Tensor&>(p).zero_grad();
    Tensor loss = f();
    backward(loss);

    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (const auto& p : params) {
        std::vector<double> g(p.numel());
        for (std::size_t i = 0; i < g.size(); ++i)
            g[i] = p.grad_at(i);
        analytic.push_back(std::move(g));
    }

    double max_err = 0.0;
    bool saw_nan = !std::isfinite(loss.value());
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        auto& vals = const_cast<Tensor&>(params[pi]).mutable_values();
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const double orig = vals[i];
            vals[i] = orig + eps;
            const double fp = f().value();
            vals[i] = orig - eps;
            const double fm = f().value();
            vals[i] = orig;
            const double numeric = (fp - fm) / (2.0 * eps);
            const double a = analytic[pi][i];
            if (!std::isfinite(numeric) || !std::isfinite(a)) {
                saw_nan = true;
                continue;
            }
            const double err = std::abs(a - numeric) /
                               std::max(1e-8, std::abs(a) + std::abs(numeric));
            max_err = std::max(max_err, err);
        }
    }
    if (saw_nan)
        return std::numeric_limits<double>::infinity();
    return max_err;
}

} // namespace tarnn
