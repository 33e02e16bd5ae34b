#pragma once

// Decoders from a batch of node embeddings H_D (B x F) to one score per row.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "cnca/error.hpp"
#include "cnca/params.hpp"
#include "cnca/rng.hpp"
#include "cnca/tensor.hpp"

namespace cnca {

struct MlpConfig {
    std::vector<std::size_t> hidden{128, 64, 32};
};

/// relu(relu(relu(H W1 + b1) W2 + b2) W3 + b3) W4 + b4, no activation on the output.
template <class T>
class MlpDecoder {
public:
    MlpDecoder(const MlpConfig& cfg, std::size_t in_dim, ParamStore<T>& store, Rng& init,
               const std::string& prefix = "dec.mlp.")
        : in_dim_(in_dim) {
        if (cfg.hidden.empty()) throw ParameterError("MLP decoder needs at least one hidden layer");
        std::size_t d = in_dim;
        std::vector<std::size_t> widths = cfg.hidden;
        widths.push_back(1);
        for (std::size_t i = 0; i < widths.size(); ++i) {
            if (widths[i] < 1 || d < 1) throw ParameterError("MLP decoder widths must be >= 1");
            const std::string p = prefix + std::to_string(i) + ".";
            layers_.push_back({store.add_weight(p + "w", d, widths[i], init), store.add_constant(p + "b", widths[i], T(0))});
            d = widths[i];
        }
    }

    ad::Tensor<T> forward(const ad::Tensor<T>& h) const {
        if (h.cols() != in_dim_)
            throw ParameterError("MLP decoder expects " + std::to_string(in_dim_) + " columns, got " + h.shape_string());
        ad::Tensor<T> x = h;
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            x = ad::add_row(ad::matmul(x, layers_[i].first), layers_[i].second);
            if (i + 1 < layers_.size()) x = ad::relu(x);
        }
        return x;
    }

private:
    std::size_t in_dim_;
    std::vector<std::pair<ad::Tensor<T>, ad::Tensor<T>>> layers_;
};

enum class MixKind { token, channel };

/// One of "ctc", "tct", "ctct", "tctc" (case-insensitive).
inline std::vector<MixKind> parse_mixer_order(const std::string& order) {
    std::string lower = order;
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower != "ctc" && lower != "tct" && lower != "ctct" && lower != "tctc")
        throw ParameterError("mixer order '" + order + "' is not one of ctc, tct, ctct, tctc");
    std::vector<MixKind> kinds;
    for (char c : lower) kinds.push_back(c == 't' ? MixKind::token : MixKind::channel);
    return kinds;
}

struct MixerConfig {
    std::string order = "tct";
    /// Token axis length; every forward pass sees exactly this many rows.
    std::size_t batch = 1024;
    std::size_t token_hidden = 64;
    std::size_t channel_hidden = 128;
    std::size_t head_hidden = 64;
    /// Zero the second layer of every block so that each starts as the
    /// identity and the head first sees the embeddings unmixed.
    bool zero_init = false;
};

/**
 * MLP-Mixer decoder.
 *
 * Token mixing works on the columns of H (length B), channel mixing on its
 * rows (length F); each is
 *
 *   X + W2 gelu(W1 LayerNorm(X) + b1) + b2
 *
 * with layer norm taken along the mixed axis and one weight set shared by
 * all columns (token) or rows (channel). Modules run in the configured order;
 * a head relu(Y Wh + bh) Wo + bo then gives one score per row.
 *
 * Token mixing lets a row's score depend on the other rows of the batch.
 */
template <class T>
class MixerDecoder {
public:
    MixerDecoder(const MixerConfig& cfg, std::size_t in_dim, ParamStore<T>& store, Rng& init,
                 const std::string& prefix = "dec.mixer.")
        : cfg_(cfg), in_dim_(in_dim), kinds_(parse_mixer_order(cfg.order)) {
        if (cfg.batch < 2 || in_dim < 2) throw ParameterError("mixer decoder needs batch size and embedding dim >= 2");
        if (cfg.token_hidden < 1 || cfg.channel_hidden < 1 || cfg.head_hidden < 1)
            throw ParameterError("mixer hidden widths must be >= 1");
        for (std::size_t i = 0; i < kinds_.size(); ++i) {
            const bool token = kinds_[i] == MixKind::token;
            const std::size_t axis = token ? cfg.batch : in_dim;
            const std::size_t hidden = token ? cfg.token_hidden : cfg.channel_hidden;
            const std::string p = prefix + std::to_string(i) + (token ? ".token." : ".channel.");
            blocks_.push_back({kinds_[i], store.add_constant(p + "ln_gain", axis, T(1)),
                               store.add_constant(p + "ln_shift", axis, T(0)), store.add_weight(p + "w1", axis, hidden, init),
                               store.add_constant(p + "b1", hidden, T(0)), store.add_weight(p + "w2", hidden, axis, init),
                               store.add_constant(p + "b2", axis, T(0))});
            if (cfg.zero_init)
                for (auto& w : blocks_.back().w2.values()) w = T(0);
        }
        head_w_ = store.add_weight(prefix + "head.w", in_dim, cfg.head_hidden, init);
        head_b_ = store.add_constant(prefix + "head.b", cfg.head_hidden, T(0));
        out_w_ = store.add_weight(prefix + "out.w", cfg.head_hidden, 1, init);
        out_b_ = store.add_constant(prefix + "out.b", 1, T(0));
    }

    std::size_t batch() const noexcept { return cfg_.batch; }

    ad::Tensor<T> forward(const ad::Tensor<T>& h) const { return head(mix(h)); }

    /// The mixing stack alone (B x F in, B x F out).
    ad::Tensor<T> mix(const ad::Tensor<T>& h) const {
        if (h.rows() != cfg_.batch || h.cols() != in_dim_)
            throw ParameterError("mixer decoder expects (" + std::to_string(cfg_.batch) + "x" + std::to_string(in_dim_) +
                                 ") input, got " + h.shape_string() + "; pad the batch first");
        ad::Tensor<T> x = h;
        for (const auto& b : blocks_) {
            if (b.kind == MixKind::token) {
                auto xt = ad::transpose(x);
                x = ad::add(x, ad::transpose(block_mlp(b, xt)));
            } else {
                x = ad::add(x, block_mlp(b, x));
            }
        }
        return x;
    }

    ad::Tensor<T> head(const ad::Tensor<T>& y) const {
        return ad::add_row(ad::matmul(ad::relu(ad::add_row(ad::matmul(y, head_w_), head_b_)), out_w_), out_b_);
    }

private:
    struct Block {
        MixKind kind;
        ad::Tensor<T> ln_gain, ln_shift, w1, b1, w2, b2;
    };

    static ad::Tensor<T> block_mlp(const Block& b, const ad::Tensor<T>& x) {
        auto normed = ad::layer_norm(x, b.ln_gain, b.ln_shift);
        return ad::add_row(ad::matmul(ad::gelu(ad::add_row(ad::matmul(normed, b.w1), b.b1)), b.w2), b.b2);
    }

    MixerConfig cfg_;
    std::size_t in_dim_;
    std::vector<MixKind> kinds_;
    std::vector<Block> blocks_;
    ad::Tensor<T> head_w_, head_b_, out_w_, out_b_;
};

/// Row selection for one padded batch: the k real rows first, then row 0
/// repeated up to B. mask[i] marks real rows.
struct PaddedIndex {
    std::vector<std::size_t> rows;
    std::vector<std::uint8_t> mask;
};

inline PaddedIndex pad_indices(std::span<const std::size_t> nodes, std::size_t batch) {
    if (nodes.empty() || nodes.size() > batch)
        throw ParameterError("cannot pad " + std::to_string(nodes.size()) + " rows to a batch of " + std::to_string(batch));
    PaddedIndex p;
    p.rows.assign(nodes.begin(), nodes.end());
    p.mask.assign(nodes.size(), 1);
    p.rows.resize(batch, nodes.front());
    p.mask.resize(batch, 0);
    return p;
}

/// Pads a k x F block to B x F by repeating its first row.
template <class T>
std::pair<ad::Tensor<T>, std::vector<std::uint8_t>> pad_batch(const ad::Tensor<T>& rows, std::size_t batch) {
    if (rows.rows() < 1 || rows.rows() > batch)
        throw ParameterError("cannot pad " + rows.shape_string() + " to a batch of " + std::to_string(batch));
    std::vector<std::size_t> idx(rows.rows());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    auto p = pad_indices(idx, batch);
    return {ad::row_gather(rows, std::span<const std::size_t>(p.rows)), p.mask};
}

}  // namespace cnca
