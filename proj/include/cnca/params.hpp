#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cnca/error.hpp"
#include "cnca/rng.hpp"
#include "cnca/tensor.hpp"

namespace cnca {

/// Named trainable tensors in registration order. Weight matrices are the
/// entries with is_weight set; biases and normalisation gains are not, and
/// are excluded from the L2 penalty. Tensors are shared handles, so the copies
/// returned by add() stay valid as the store grows.
template <class T>
class ParamStore {
public:
    struct Entry {
        std::string name;
        ad::Tensor<T> tensor;
        bool is_weight;
    };

    ad::Tensor<T> add(const std::string& name, std::size_t rows, std::size_t cols, std::vector<T> init,
                       bool is_weight) {
        if (index_.contains(name)) throw ParameterError("duplicate parameter name '" + name + "'");
        index_[name] = entries_.size();
        entries_.push_back({name, ad::Tensor<T>::parameter(rows, cols, std::move(init)), is_weight});
        return entries_.back().tensor;
    }

    /// Glorot-uniform weight matrix.
    ad::Tensor<T> add_weight(const std::string& name, std::size_t rows, std::size_t cols, Rng& rng) {
        const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
        std::vector<T> init(rows * cols);
        for (auto& w : init) w = static_cast<T>((2.0 * rng.uniform01() - 1.0) * limit);
        return add(name, rows, cols, std::move(init), true);
    }

    ad::Tensor<T> add_constant(const std::string& name, std::size_t cols, T value) {
        return add(name, 1, cols, std::vector<T>(cols, value), false);
    }

    const ad::Tensor<T>& get(const std::string& name) const {
        auto it = index_.find(name);
        if (it == index_.end()) throw ParameterError("unknown parameter '" + name + "'");
        return entries_[it->second].tensor;
    }
    ad::Tensor<T>& get(const std::string& name) {
        return const_cast<ad::Tensor<T>&>(std::as_const(*this).get(name));
    }
    bool contains(const std::string& name) const { return index_.contains(name); }

    std::vector<Entry>& entries() noexcept { return entries_; }
    const std::vector<Entry>& entries() const noexcept { return entries_; }
    std::size_t size() const noexcept { return entries_.size(); }

    void zero_grad() {
        for (auto& e : entries_) e.tensor.zero_grad();
    }

    /// Sum of squared entries over weight matrices.
    double weight_sq_norm() const {
        double s = 0.0;
        for (const auto& e : entries_)
            if (e.is_weight)
                for (T v : e.tensor.values()) s += static_cast<double>(v) * static_cast<double>(v);
        return s;
    }

    std::size_t parameter_count() const {
        std::size_t n = 0;
        for (const auto& e : entries_) n += e.tensor.size();
        return n;
    }

private:
    std::vector<Entry> entries_;
    std::map<std::string, std::size_t> index_;
};

}  // namespace cnca
