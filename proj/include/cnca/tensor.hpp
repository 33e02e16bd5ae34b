#pragma once

// Define-by-run reverse-mode differentiation over dense row-major matrices.
//
// Every op allocates a node holding its value, shared pointers to its inputs
// and a closure that pushes the node's gradient into the inputs. The graph
// lives as long as some Tensor refers to its output; it is rebuilt for every
// training step. Leaf tensors created with `parameter` accumulate gradients
// across backward() calls until zero_grad().
//
// Everything is two-dimensional; scalars are 1x1.

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "cnca/error.hpp"

namespace cnca::ad {

template <class T>
struct Node {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<T> value;
    std::vector<T> grad;
    bool requires_grad = false;
    bool leaf = true;
    std::vector<std::shared_ptr<Node>> parents;
    std::function<void(Node&)> backward;
};

template <class T>
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::shared_ptr<Node<T>> node) : node_(std::move(node)) {}

    static Tensor constant(std::size_t rows, std::size_t cols, std::vector<T> data) {
        if (data.size() != rows * cols)
            throw ParameterError("tensor data length " + std::to_string(data.size()) + " != " +
                                 std::to_string(rows) + "x" + std::to_string(cols));
        auto n = std::make_shared<Node<T>>();
        n->rows = rows;
        n->cols = cols;
        n->value = std::move(data);
        return Tensor(std::move(n));
    }

    static Tensor zeros(std::size_t rows, std::size_t cols) {
        return constant(rows, cols, std::vector<T>(rows * cols, T(0)));
    }

    static Tensor scalar(T v) { return constant(1, 1, {v}); }

    /// Trainable leaf: gradient buffer allocated and zeroed.
    static Tensor parameter(std::size_t rows, std::size_t cols, std::vector<T> data) {
        Tensor t = constant(rows, cols, std::move(data));
        t.node_->requires_grad = true;
        t.node_->grad.assign(rows * cols, T(0));
        return t;
    }

    bool defined() const noexcept { return static_cast<bool>(node_); }
    std::size_t rows() const noexcept { return node_->rows; }
    std::size_t cols() const noexcept { return node_->cols; }
    std::size_t size() const noexcept { return node_->value.size(); }
    bool requires_grad() const noexcept { return node_->requires_grad; }

    std::span<T> values() noexcept { return node_->value; }
    std::span<const T> values() const noexcept { return node_->value; }
    std::span<T> grad() noexcept { return node_->grad; }
    std::span<const T> grad() const noexcept { return node_->grad; }

    T at(std::size_t r, std::size_t c) const { return node_->value[r * node_->cols + c]; }
    T item() const {
        if (size() != 1) throw ParameterError("item() on a " + shape_string() + " tensor");
        return node_->value[0];
    }

    std::string shape_string() const {
        return "(" + std::to_string(rows()) + "x" + std::to_string(cols()) + ")";
    }

    void zero_grad() { std::fill(node_->grad.begin(), node_->grad.end(), T(0)); }

    /// Accumulates d(this)/d(leaf) into every reachable leaf that requires a
    /// gradient. Repeated calls without zero_grad() add up.
    void backward() const;

    Node<T>* node() const noexcept { return node_.get(); }
    const std::shared_ptr<Node<T>>& shared() const noexcept { return node_; }

private:
    std::shared_ptr<Node<T>> node_;
};

namespace detail {

template <class T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <class T>
using MapMut = Eigen::Map<RowMatrix<T>>;
template <class T>
using MapConst = Eigen::Map<const RowMatrix<T>>;

template <class T>
MapConst<T> view(const Node<T>& n) {
    return MapConst<T>(n.value.data(), static_cast<Eigen::Index>(n.rows), static_cast<Eigen::Index>(n.cols));
}
template <class T>
MapMut<T> grad_view(Node<T>& n) {
    return MapMut<T>(n.grad.data(), static_cast<Eigen::Index>(n.rows), static_cast<Eigen::Index>(n.cols));
}
template <class T>
MapConst<T> grad_view(const Node<T>& n) {
    return MapConst<T>(n.grad.data(), static_cast<Eigen::Index>(n.rows), static_cast<Eigen::Index>(n.cols));
}

/// Output node of an op over the given inputs. It requires a gradient when
/// any input does; otherwise no backward closure is attached.
template <class T>
std::shared_ptr<Node<T>> make_node(std::size_t rows, std::size_t cols,
                                   std::initializer_list<std::shared_ptr<Node<T>>> inputs) {
    auto n = std::make_shared<Node<T>>();
    n->rows = rows;
    n->cols = cols;
    n->value.assign(rows * cols, T(0));
    n->leaf = false;
    for (const auto& in : inputs) {
        n->requires_grad = n->requires_grad || in->requires_grad;
        n->parents.push_back(in);
    }
    return n;
}

inline void check(bool ok, const char* op, const std::string& a, const std::string& b) {
    if (!ok) throw ParameterError(std::string(op) + ": incompatible shapes " + a + " and " + b);
}

}  // namespace detail

template <class T>
void Tensor<T>::backward() const {
    if (size() != 1) throw ParameterError("backward() requires a scalar loss, got " + shape_string());
    if (!node_->requires_grad) return;

    // Iterative post-order DFS gives a topological order (inputs first).
    std::vector<Node<T>*> order;
    std::unordered_set<Node<T>*> visited;
    std::vector<std::pair<Node<T>*, std::size_t>> stack{{node_.get(), 0}};
    visited.insert(node_.get());
    while (!stack.empty()) {
        auto& [n, next] = stack.back();
        if (next < n->parents.size()) {
            Node<T>* p = n->parents[next++].get();
            if (p->requires_grad && visited.insert(p).second) stack.emplace_back(p, 0);
        } else {
            order.push_back(n);
            stack.pop_back();
        }
    }
    for (Node<T>* n : order)
        if (!n->leaf) n->grad.assign(n->value.size(), T(0));
    node_->grad[0] += T(1);
    for (auto it = order.rbegin(); it != order.rend(); ++it)
        if ((*it)->backward) (*it)->backward(**it);
}

// ---------------------------------------------------------------------------
// Linear algebra

template <class T>
Tensor<T> matmul(const Tensor<T>& a, const Tensor<T>& b) {
    detail::check(a.cols() == b.rows(), "matmul", a.shape_string(), b.shape_string());
    auto out = detail::make_node<T>(a.rows(), b.cols(), {a.shared(), b.shared()});
    detail::MapMut<T>(out->value.data(), a.rows(), b.cols()).noalias() =
        detail::view(*a.node()) * detail::view(*b.node());
    if (out->requires_grad)
        out->backward = [](Node<T>& o) {
            auto& A = *o.parents[0];
            auto& B = *o.parents[1];
            const auto dC = detail::grad_view(std::as_const(o));
            if (A.requires_grad) detail::grad_view(A).noalias() += dC * detail::view(B).transpose();
            if (B.requires_grad) detail::grad_view(B).noalias() += detail::view(A).transpose() * dC;
        };
    return Tensor<T>(out);
}

template <class T>
Tensor<T> transpose(const Tensor<T>& a) {
    auto out = detail::make_node<T>(a.cols(), a.rows(), {a.shared()});
    detail::MapMut<T>(out->value.data(), a.cols(), a.rows()) = detail::view(*a.node()).transpose();
    if (out->requires_grad)
        out->backward = [](Node<T>& o) {
            detail::grad_view(*o.parents[0]) += detail::grad_view(std::as_const(o)).transpose();
        };
    return Tensor<T>(out);
}

/// Rows a[index[0]], a[index[1]], ...: the product of a one-hot selection
/// matrix with a. Repeated indices are allowed.
template <class T>
Tensor<T> row_gather(const Tensor<T>& a, std::span<const std::size_t> index) {
    const std::size_t cols = a.cols();
    for (std::size_t r : index)
        if (r >= a.rows())
            throw ParameterError("row_gather: index " + std::to_string(r) + " out of range for " + a.shape_string());
    auto out = detail::make_node<T>(index.size(), cols, {a.shared()});
    for (std::size_t i = 0; i < index.size(); ++i)
        std::copy_n(a.values().begin() + static_cast<std::ptrdiff_t>(index[i] * cols), cols,
                    out->value.begin() + static_cast<std::ptrdiff_t>(i * cols));
    if (out->requires_grad)
        out->backward = [idx = std::vector<std::size_t>(index.begin(), index.end()), cols](Node<T>& o) {
            auto& g = o.parents[0]->grad;
            for (std::size_t i = 0; i < idx.size(); ++i)
                for (std::size_t c = 0; c < cols; ++c) g[idx[i] * cols + c] += o.grad[i * cols + c];
        };
    return Tensor<T>(out);
}

/// [a | b] column-wise.
template <class T>
Tensor<T> concat_cols(const Tensor<T>& a, const Tensor<T>& b) {
    detail::check(a.rows() == b.rows(), "concat_cols", a.shape_string(), b.shape_string());
    const std::size_t ca = a.cols(), cb = b.cols(), rows = a.rows();
    auto out = detail::make_node<T>(rows, ca + cb, {a.shared(), b.shared()});
    for (std::size_t r = 0; r < rows; ++r) {
        std::copy_n(a.values().begin() + static_cast<std::ptrdiff_t>(r * ca), ca,
                    out->value.begin() + static_cast<std::ptrdiff_t>(r * (ca + cb)));
        std::copy_n(b.values().begin() + static_cast<std::ptrdiff_t>(r * cb), cb,
                    out->value.begin() + static_cast<std::ptrdiff_t>(r * (ca + cb) + ca));
    }
    if (out->requires_grad)
        out->backward = [rows, ca, cb](Node<T>& o) {
            auto& A = *o.parents[0];
            auto& B = *o.parents[1];
            for (std::size_t r = 0; r < rows; ++r) {
                if (A.requires_grad)
                    for (std::size_t c = 0; c < ca; ++c) A.grad[r * ca + c] += o.grad[r * (ca + cb) + c];
                if (B.requires_grad)
                    for (std::size_t c = 0; c < cb; ++c) B.grad[r * cb + c] += o.grad[r * (ca + cb) + ca + c];
            }
        };
    return Tensor<T>(out);
}

// ---------------------------------------------------------------------------
// Elementwise

template <class T>
Tensor<T> add(const Tensor<T>& a, const Tensor<T>& b) {
    detail::check(a.rows() == b.rows() && a.cols() == b.cols(), "add", a.shape_string(), b.shape_string());
    auto out = detail::make_node<T>(a.rows(), a.cols(), {a.shared(), b.shared()});
    for (std::size_t i = 0; i < out->value.size(); ++i) out->value[i] = a.values()[i] + b.values()[i];
    if (out->requires_grad)
        out->backward = [](Node<T>& o) {
            for (int k = 0; k < 2; ++k)
                if (o.parents[k]->requires_grad)
                    for (std::size_t i = 0; i < o.grad.size(); ++i) o.parents[k]->grad[i] += o.grad[i];
        };
    return Tensor<T>(out);
}

template <class T>
Tensor<T> sub(const Tensor<T>& a, const Tensor<T>& b) {
    detail::check(a.rows() == b.rows() && a.cols() == b.cols(), "sub", a.shape_string(), b.shape_string());
    auto out = detail::make_node<T>(a.rows(), a.cols(), {a.shared(), b.shared()});
    for (std::size_t i = 0; i < out->value.size(); ++i) out->value[i] = a.values()[i] - b.values()[i];
    if (out->requires_grad)
        out->backward = [](Node<T>& o) {
            if (o.parents[0]->requires_grad)
                for (std::size_t i = 0; i < o.grad.size(); ++i) o.parents[0]->grad[i] += o.grad[i];
            if (o.parents[1]->requires_grad)
                for (std::size_t i = 0; i < o.grad.size(); ++i) o.parents[1]->grad[i] -= o.grad[i];
        };
    return Tensor<T>(out);
}

/// Elementwise product.
template <class T>
Tensor<T> mul(const Tensor<T>& a, const Tensor<T>& b) {
    detail::check(a.rows() == b.rows() && a.cols() == b.cols(), "mul", a.shape_string(), b.shape_string());
    auto out = detail::make_node<T>(a.rows(), a.cols(), {a.shared(), b.shared()});
    for (std::size_t i = 0; i < out->value.size(); ++i) out->value[i] = a.values()[i] * b.values()[i];
    if (out->requires_grad)
        out->backward = [](Node<T>& o) {
            auto& A = *o.parents[0];
            auto& B = *o.parents[1];
            if (A.requires_grad)
                for (std::size_t i = 0; i < o.grad.size(); ++i) A.grad[i] += o.grad[i] * B.value[i];
            if (B.requires_grad)
                for (std::size_t i = 0; i < o.grad.size(); ++i) B.grad[i] += o.grad[i] * A.value[i];
        };
    return Tensor<T>(out);
}

template <class T>
Tensor<T> scale(const Tensor<T>& a, T s) {
    auto out = detail::make_node<T>(a.rows(), a.cols(), {a.shared()});
    for (std::size_t i = 0; i < out->value.size(); ++i) out->value[i] = a.values()[i] * s;
    if (out->requires_grad)
        out->backward = [s](Node<T>& o) {
            for (std::size_t i = 0; i < o.grad.size(); ++i) o.parents[0]->grad[i] += o.grad[i] * s;
        };
    return Tensor<T>(out);
}

/// a + bias with a 1 x cols bias broadcast over rows.
template <class T>
Tensor<T> add_row(const Tensor<T>& a, const Tensor<T>& bias) {
    detail::check(bias.rows() == 1 && bias.cols() == a.cols(), "add_row", a.shape_string(), bias.shape_string());
    const std::size_t cols = a.cols();
    auto out = detail::make_node<T>(a.rows(), cols, {a.shared(), bias.shared()});
    for (std::size_t i = 0; i < out->value.size(); ++i) out->value[i] = a.values()[i] + bias.values()[i % cols];
    if (out->requires_grad)
        out->backward = [cols](Node<T>& o) {
            auto& A = *o.parents[0];
            auto& B = *o.parents[1];
            if (A.requires_grad)
                for (std::size_t i = 0; i < o.grad.size(); ++i) A.grad[i] += o.grad[i];
            if (B.requires_grad)
                for (std::size_t i = 0; i < o.grad.size(); ++i) B.grad[i % cols] += o.grad[i];
        };
    return Tensor<T>(out);
}

namespace detail {

template <class T, class F, class DF>
Tensor<T> unary(const Tensor<T>& a, F f, DF df) {
    auto out = make_node<T>(a.rows(), a.cols(), {a.shared()});
    for (std::size_t i = 0; i < out->value.size(); ++i) out->value[i] = f(a.values()[i]);
    if (out->requires_grad)
        out->backward = [df](Node<T>& o) {
            auto& A = *o.parents[0];
            for (std::size_t i = 0; i < o.grad.size(); ++i) A.grad[i] += o.grad[i] * df(A.value[i], o.value[i]);
        };
    return Tensor<T>(out);
}

}  // namespace detail

template <class T>
Tensor<T> relu(const Tensor<T>& a) {
    return detail::unary(a, [](T x) { return x > T(0) ? x : T(0); },
                         [](T x, T) { return x > T(0) ? T(1) : T(0); });
}

/// Exact GELU: x * Phi(x) = 0.5 x (1 + erf(x / sqrt 2)),
/// derivative Phi(x) + x * phi(x).
template <class T>
Tensor<T> gelu(const Tensor<T>& a) {
    constexpr T inv_sqrt2 = T(1) / std::numbers::sqrt2_v<T>;
    constexpr T inv_sqrt2pi = std::numbers::inv_sqrtpi_v<T> * inv_sqrt2;
    return detail::unary(
        a, [](T x) { return T(0.5) * x * (T(1) + std::erf(x * inv_sqrt2)); },
        [](T x, T) {
            return T(0.5) * (T(1) + std::erf(x * inv_sqrt2)) + x * inv_sqrt2pi * std::exp(T(-0.5) * x * x);
        });
}

template <class T>
T sigmoid_value(T x) {
    return x >= T(0) ? T(1) / (T(1) + std::exp(-x)) : std::exp(x) / (T(1) + std::exp(x));
}

template <class T>
Tensor<T> sigmoid(const Tensor<T>& a) {
    return detail::unary(a, [](T x) { return sigmoid_value(x); }, [](T, T y) { return y * (T(1) - y); });
}

template <class T>
Tensor<T> exp(const Tensor<T>& a) {
    return detail::unary(a, [](T x) { return std::exp(x); }, [](T, T y) { return y; });
}

// ---------------------------------------------------------------------------
// Row-wise transforms

/// Normalises each row to zero mean and unit variance (biased variance, eps
/// inside the square root), then applies per-column gain and shift (1 x cols).
template <class T>
Tensor<T> layer_norm(const Tensor<T>& a, const Tensor<T>& gain, const Tensor<T>& shift, T eps = T(1e-5)) {
    const std::size_t rows = a.rows(), cols = a.cols();
    detail::check(gain.rows() == 1 && gain.cols() == cols, "layer_norm", a.shape_string(), gain.shape_string());
    detail::check(shift.rows() == 1 && shift.cols() == cols, "layer_norm", a.shape_string(), shift.shape_string());
    auto out = detail::make_node<T>(rows, cols, {a.shared(), gain.shared(), shift.shared()});
    std::vector<T> xhat(rows * cols), inv_std(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        const T* x = a.values().data() + r * cols;
        T mean = 0;
        for (std::size_t c = 0; c < cols; ++c) mean += x[c];
        mean /= T(cols);
        T var = 0;
        for (std::size_t c = 0; c < cols; ++c) var += (x[c] - mean) * (x[c] - mean);
        var /= T(cols);
        inv_std[r] = T(1) / std::sqrt(var + eps);
        for (std::size_t c = 0; c < cols; ++c) {
            xhat[r * cols + c] = (x[c] - mean) * inv_std[r];
            out->value[r * cols + c] = xhat[r * cols + c] * gain.values()[c] + shift.values()[c];
        }
    }
    if (out->requires_grad)
        out->backward = [rows, cols, xhat = std::move(xhat), inv_std = std::move(inv_std)](Node<T>& o) {
            auto& A = *o.parents[0];
            auto& G = *o.parents[1];
            auto& S = *o.parents[2];
            for (std::size_t r = 0; r < rows; ++r) {
                const T* dy = o.grad.data() + r * cols;
                const T* xh = xhat.data() + r * cols;
                if (G.requires_grad)
                    for (std::size_t c = 0; c < cols; ++c) G.grad[c] += dy[c] * xh[c];
                if (S.requires_grad)
                    for (std::size_t c = 0; c < cols; ++c) S.grad[c] += dy[c];
                if (A.requires_grad) {
                    T sum_g = 0, sum_gx = 0;
                    for (std::size_t c = 0; c < cols; ++c) {
                        const T g = dy[c] * G.value[c];
                        sum_g += g;
                        sum_gx += g * xh[c];
                    }
                    for (std::size_t c = 0; c < cols; ++c) {
                        const T g = dy[c] * G.value[c];
                        A.grad[r * cols + c] += inv_std[r] * (g - sum_g / T(cols) - xh[c] * sum_gx / T(cols));
                    }
                }
            }
        };
    return Tensor<T>(out);
}

/// Each row divided by sqrt(|row|^2 + eps); an all-zero row stays zero.
template <class T>
Tensor<T> row_l2_normalize(const Tensor<T>& a, T eps = T(1e-12)) {
    const std::size_t rows = a.rows(), cols = a.cols();
    auto out = detail::make_node<T>(rows, cols, {a.shared()});
    std::vector<T> inv_norm(rows);
    for (std::size_t r = 0; r < rows; ++r) {
        T ss = 0;
        for (std::size_t c = 0; c < cols; ++c) ss += a.values()[r * cols + c] * a.values()[r * cols + c];
        inv_norm[r] = T(1) / std::sqrt(ss + eps);
        for (std::size_t c = 0; c < cols; ++c) out->value[r * cols + c] = a.values()[r * cols + c] * inv_norm[r];
    }
    if (out->requires_grad)
        out->backward = [rows, cols, inv_norm = std::move(inv_norm)](Node<T>& o) {
            auto& A = *o.parents[0];
            for (std::size_t r = 0; r < rows; ++r) {
                T dot = 0;
                for (std::size_t c = 0; c < cols; ++c) dot += o.grad[r * cols + c] * o.value[r * cols + c];
                for (std::size_t c = 0; c < cols; ++c)
                    A.grad[r * cols + c] += inv_norm[r] * (o.grad[r * cols + c] - o.value[r * cols + c] * dot);
            }
        };
    return Tensor<T>(out);
}

// ---------------------------------------------------------------------------
// Graph-structured ops

/// Constant sparse matrix in CSR form.
template <class T>
struct SparseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> indices;
    std::vector<T> values;
};

/// Sparse (constant) times dense.
template <class T>
Tensor<T> spmm(const std::shared_ptr<const SparseMatrix<T>>& s, const Tensor<T>& x) {
    detail::check(s->cols == x.rows(), "spmm",
                  "(" + std::to_string(s->rows) + "x" + std::to_string(s->cols) + ")", x.shape_string());
    const std::size_t cols = x.cols();
    auto out = detail::make_node<T>(s->rows, cols, {x.shared()});
    for (std::size_t r = 0; r < s->rows; ++r)
        for (std::size_t e = s->offsets[r]; e < s->offsets[r + 1]; ++e) {
            const T w = s->values[e];
            const T* src = x.values().data() + s->indices[e] * cols;
            T* dst = out->value.data() + r * cols;
            for (std::size_t c = 0; c < cols; ++c) dst[c] += w * src[c];
        }
    if (out->requires_grad)
        out->backward = [s, cols](Node<T>& o) {
            auto& X = *o.parents[0];
            for (std::size_t r = 0; r < s->rows; ++r)
                for (std::size_t e = s->offsets[r]; e < s->offsets[r + 1]; ++e) {
                    const T w = s->values[e];
                    const T* g = o.grad.data() + r * cols;
                    T* dst = X.grad.data() + s->indices[e] * cols;
                    for (std::size_t c = 0; c < cols; ++c) dst[c] += w * g[c];
                }
        };
    return Tensor<T>(out);
}

/// Row v of the result is the elementwise maximum of x over the rows listed in
/// index[offsets[v] .. offsets[v+1]); an empty list gives a zero row. The
/// gradient flows to the first row attaining each maximum.
template <class T>
Tensor<T> segment_max(const Tensor<T>& x, std::span<const std::size_t> offsets, std::span<const std::size_t> index) {
    const std::size_t segments = offsets.size() - 1, cols = x.cols();
    auto out = detail::make_node<T>(segments, cols, {x.shared()});
    std::vector<std::size_t> argmax(segments * cols, SIZE_MAX);
    for (std::size_t v = 0; v < segments; ++v) {
        for (std::size_t e = offsets[v]; e < offsets[v + 1]; ++e) {
            const std::size_t u = index[e];
            if (u >= x.rows())
                throw ParameterError("segment_max: row " + std::to_string(u) + " out of range for " + x.shape_string());
            for (std::size_t c = 0; c < cols; ++c) {
                const T val = x.values()[u * cols + c];
                std::size_t& best = argmax[v * cols + c];
                if (best == SIZE_MAX || val > out->value[v * cols + c]) {
                    best = u;
                    out->value[v * cols + c] = val;
                }
            }
        }
    }
    if (out->requires_grad)
        out->backward = [cols, argmax = std::move(argmax)](Node<T>& o) {
            auto& X = *o.parents[0];
            for (std::size_t i = 0; i < argmax.size(); ++i)
                if (argmax[i] != SIZE_MAX) X.grad[argmax[i] * cols + i % cols] += o.grad[i];
        };
    return Tensor<T>(out);
}

// ---------------------------------------------------------------------------
// Reductions and losses

template <class T>
Tensor<T> sum(const Tensor<T>& a) {
    auto out = detail::make_node<T>(1, 1, {a.shared()});
    T s = 0;
    for (T v : a.values()) s += v;
    out->value[0] = s;
    if (out->requires_grad)
        out->backward = [](Node<T>& o) {
            for (auto& g : o.parents[0]->grad) g += o.grad[0];
        };
    return Tensor<T>(out);
}

template <class T>
Tensor<T> mean(const Tensor<T>& a) {
    return scale(sum(a), T(1) / static_cast<T>(a.size()));
}

/// Sum of squared entries.
template <class T>
Tensor<T> sum_squares(const Tensor<T>& a) {
    auto out = detail::make_node<T>(1, 1, {a.shared()});
    T s = 0;
    for (T v : a.values()) s += v * v;
    out->value[0] = s;
    if (out->requires_grad)
        out->backward = [](Node<T>& o) {
            auto& A = *o.parents[0];
            for (std::size_t i = 0; i < A.grad.size(); ++i) A.grad[i] += T(2) * A.value[i] * o.grad[0];
        };
    return Tensor<T>(out);
}

/// Mean of (pred - target)^2 over rows whose mask entry is true. pred is k x 1.
template <class T>
Tensor<T> masked_mse(const Tensor<T>& pred, std::span<const T> target, std::span<const std::uint8_t> mask) {
    if (pred.cols() != 1 || target.size() != pred.rows() || mask.size() != pred.rows())
        throw ParameterError("masked_mse: prediction " + pred.shape_string() + " vs " +
                             std::to_string(target.size()) + " targets / " + std::to_string(mask.size()) + " mask");
    std::size_t count = 0;
    for (auto m : mask) count += m ? 1 : 0;
    if (count == 0) throw ParameterError("masked_mse: mask selects no rows");
    auto out = detail::make_node<T>(1, 1, {pred.shared()});
    std::vector<T> diff(pred.rows(), T(0));
    T s = 0;
    for (std::size_t i = 0; i < pred.rows(); ++i)
        if (mask[i]) {
            diff[i] = pred.values()[i] - target[i];
            s += diff[i] * diff[i];
        }
    out->value[0] = s / T(count);
    if (out->requires_grad)
        out->backward = [diff = std::move(diff), count](Node<T>& o) {
            auto& P = *o.parents[0];
            for (std::size_t i = 0; i < diff.size(); ++i) P.grad[i] += T(2) * diff[i] / T(count) * o.grad[0];
        };
    return Tensor<T>(out);
}

struct LabeledPair {
    std::size_t i;
    std::size_t j;
    bool label;
    double weight;
};

/// sum_k weight_k * BCE(sigmoid(z_i . z_j), label_k) over the listed node pairs,
/// evaluated from logits in the overflow-safe form.
template <class T>
Tensor<T> pair_bce(const Tensor<T>& z, std::span<const LabeledPair> pairs) {
    const std::size_t cols = z.cols();
    auto out = detail::make_node<T>(1, 1, {z.shared()});
    std::vector<T> dlogit(pairs.size());
    T total = 0;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const auto& p = pairs[k];
        if (p.i >= z.rows() || p.j >= z.rows()) throw ParameterError("pair_bce: node index out of range");
        const T* zi = z.values().data() + p.i * cols;
        const T* zj = z.values().data() + p.j * cols;
        T x = 0;
        for (std::size_t c = 0; c < cols; ++c) x += zi[c] * zj[c];
        const T y = p.label ? T(1) : T(0);
        const T w = static_cast<T>(p.weight);
        total += w * (std::max(x, T(0)) - x * y + std::log1p(std::exp(-std::abs(x))));
        dlogit[k] = w * (sigmoid_value(x) - y);
    }
    out->value[0] = total;
    if (out->requires_grad)
        out->backward = [cols, dlogit = std::move(dlogit), pv = std::vector<LabeledPair>(pairs.begin(), pairs.end())](Node<T>& o) {
            auto& Z = *o.parents[0];
            for (std::size_t k = 0; k < pv.size(); ++k) {
                const T g = dlogit[k] * o.grad[0];
                for (std::size_t c = 0; c < cols; ++c) {
                    const T zi = Z.value[pv[k].i * cols + c];
                    const T zj = Z.value[pv[k].j * cols + c];
                    Z.grad[pv[k].i * cols + c] += g * zj;
                    Z.grad[pv[k].j * cols + c] += g * zi;
                }
            }
        };
    return Tensor<T>(out);
}

/// KL(N(mu, sigma^2) || N(0, 1)) summed over all entries, with log sigma given:
///   0.5 * (mu^2 + sigma^2 - 1 - 2 log sigma).
template <class T>
Tensor<T> gaussian_kl(const Tensor<T>& mu, const Tensor<T>& log_sigma) {
    detail::check(mu.rows() == log_sigma.rows() && mu.cols() == log_sigma.cols(), "gaussian_kl",
                  mu.shape_string(), log_sigma.shape_string());
    auto out = detail::make_node<T>(1, 1, {mu.shared(), log_sigma.shared()});
    T total = 0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const T m = mu.values()[i], ls = log_sigma.values()[i];
        total += T(0.5) * (m * m + std::exp(T(2) * ls) - T(1) - T(2) * ls);
    }
    out->value[0] = total;
    if (out->requires_grad)
        out->backward = [](Node<T>& o) {
            auto& M = *o.parents[0];
            auto& L = *o.parents[1];
            const T g = o.grad[0];
            if (M.requires_grad)
                for (std::size_t i = 0; i < M.value.size(); ++i) M.grad[i] += g * M.value[i];
            if (L.requires_grad)
                for (std::size_t i = 0; i < L.value.size(); ++i) L.grad[i] += g * (std::exp(T(2) * L.value[i]) - T(1));
        };
    return Tensor<T>(out);
}

}  // namespace cnca::ad
