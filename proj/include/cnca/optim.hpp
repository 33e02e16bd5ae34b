#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "cnca/error.hpp"
#include "cnca/params.hpp"

namespace cnca {

struct AdamOptions {
    double lr = 1e-3;
    /// Per-step multiplicative decay of the learning rate.
    double decay = 0.995;
    double min_lr = 1e-6;
    /// Elementwise gradient clip bound; <= 0 disables clipping.
    double clip = 1.0;
    /// L2 weight; adds 2 * l2 * w to the gradient of every weight matrix.
    double l2 = 0.0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Learning rate used by step k (0-based): max(lr0 * decay^k, min_lr).
inline double scheduled_lr(const AdamOptions& o, std::uint64_t k) {
    return std::max(o.lr * std::pow(o.decay, static_cast<double>(k)), o.min_lr);
}

/**
 * Adam with elementwise gradient clipping, an L2 term on weight matrices and
 * an exponentially decaying learning rate.
 *
 * One step: g <- clip(grad, -c, c); g += 2*l2*w for weights; bias-corrected
 * moment update; w -= lr * m_hat / (sqrt(v_hat) + eps); lr <- max(lr * decay, min_lr).
 */
template <class T>
class Adam {
public:
    Adam(AdamOptions options, ParamStore<T>& params) : options_(options), params_(&params) {
        if (!(options.decay > 0.0 && options.decay <= 1.0)) throw ParameterError("lr decay must lie in (0, 1]");
        if (!(options.min_lr >= 0.0) || options.lr < options.min_lr)
            throw ParameterError("learning rate must be >= its minimum");
        for (const auto& e : params.entries()) {
            first_.emplace_back(e.tensor.size(), 0.0);
            second_.emplace_back(e.tensor.size(), 0.0);
        }
    }

    const AdamOptions& options() const noexcept { return options_; }
    std::uint64_t steps() const noexcept { return steps_; }
    /// Rate the next step will use.
    double learning_rate() const noexcept { return scheduled_lr(options_, steps_); }

    /// Updates every parameter from its accumulated gradient. Throws
    /// NumericError, leaving all state untouched, if any gradient is non-finite.
    void step() {
        auto& entries = params_->entries();
        for (const auto& e : entries)
            for (T g : e.tensor.grad())
                if (!std::isfinite(static_cast<double>(g)))
                    throw NumericError("non-finite gradient in parameter '" + e.name + "' at step " +
                                       std::to_string(steps_));

        const double lr = learning_rate();
        const double t = static_cast<double>(steps_ + 1);
        const double c1 = 1.0 - std::pow(options_.beta1, t);
        const double c2 = 1.0 - std::pow(options_.beta2, t);
        for (std::size_t p = 0; p < entries.size(); ++p) {
            auto& e = entries[p];
            auto w = e.tensor.values();
            auto grad = e.tensor.grad();
            for (std::size_t i = 0; i < w.size(); ++i) {
                double g = static_cast<double>(grad[i]);
                if (options_.clip > 0.0) g = std::clamp(g, -options_.clip, options_.clip);
                if (e.is_weight && options_.l2 != 0.0) g += 2.0 * options_.l2 * static_cast<double>(w[i]);
                double& m = first_[p][i];
                double& v = second_[p][i];
                m = options_.beta1 * m + (1.0 - options_.beta1) * g;
                v = options_.beta2 * v + (1.0 - options_.beta2) * g * g;
                const double update = lr * (m / c1) / (std::sqrt(v / c2) + options_.eps);
                w[i] = static_cast<T>(static_cast<double>(w[i]) - update);
            }
        }
        ++steps_;
    }

    std::vector<std::vector<double>>& first_moments() noexcept { return first_; }
    std::vector<std::vector<double>>& second_moments() noexcept { return second_; }
    const std::vector<std::vector<double>>& first_moments() const noexcept { return first_; }
    const std::vector<std::vector<double>>& second_moments() const noexcept { return second_; }
    /// Restores the step counter, e.g. from a checkpoint.
    void restore(std::uint64_t steps) noexcept { steps_ = steps; }

private:
    AdamOptions options_;
    ParamStore<T>* params_;
    std::vector<std::vector<double>> first_;
    std::vector<std::vector<double>> second_;
    std::uint64_t steps_ = 0;
};

}  // namespace cnca
