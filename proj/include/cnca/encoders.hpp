#pragma once

// Inductive node encoders. Both map (graph, node features) to an N x F
// embedding with parameters whose shapes do not depend on N, so a trained
// encoder applies to graphs of any size.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cnca/error.hpp"
#include "cnca/graph.hpp"
#include "cnca/params.hpp"
#include "cnca/rng.hpp"
#include "cnca/tensor.hpp"

namespace cnca {

struct GraphSageConfig {
    /// Neighbour sample size per layer; its length is the depth K.
    std::vector<std::size_t> samples{10, 10};
    /// Width of every layer but the last (pool width equals the layer's output width).
    std::size_t hidden_dim = 64;
    std::size_t out_dim = 128;
};

struct VgaeConfig {
    std::size_t hidden_dim = 64;
    std::size_t latent_dim = 32;
    double kl_weight = 1.0;
};

/// CSR list of sampled neighbours: up to `max_per_node` distinct neighbours of
/// each node, drawn without replacement (all of them when the degree is small
/// enough), in the order drawn.
struct NeighborSample {
    std::vector<std::size_t> offsets;
    std::vector<std::size_t> index;
};

inline NeighborSample sample_neighbors(const Graph& g, std::size_t max_per_node, Rng& rng) {
    NeighborSample s;
    s.offsets.reserve(g.num_nodes() + 1);
    s.offsets.push_back(0);
    std::vector<NodeId> pool;
    for (NodeId v = 0; v < g.num_nodes(); ++v) {
        auto nb = g.neighbors(v);
        if (nb.size() <= max_per_node) {
            s.index.insert(s.index.end(), nb.begin(), nb.end());
        } else {
            pool.assign(nb.begin(), nb.end());
            for (std::size_t i = 0; i < max_per_node; ++i) {
                const auto j = i + static_cast<std::size_t>(rng.uniform_below(pool.size() - i));
                std::swap(pool[i], pool[j]);
                s.index.push_back(pool[i]);
            }
        }
        s.offsets.push_back(s.index.size());
    }
    return s;
}

/// D~^{-1/2} (A + I) D~^{-1/2} with D~ the degree matrix of A + I.
template <class T>
std::shared_ptr<const ad::SparseMatrix<T>> normalized_adjacency(const Graph& g) {
    auto m = std::make_shared<ad::SparseMatrix<T>>();
    const std::size_t n = g.num_nodes();
    m->rows = m->cols = n;
    m->offsets.reserve(n + 1);
    m->offsets.push_back(0);
    std::vector<double> inv_sqrt(n);
    for (NodeId v = 0; v < n; ++v) inv_sqrt[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v) + 1));
    for (NodeId v = 0; v < n; ++v) {
        bool self_done = false;
        auto emit = [&](std::size_t u) {
            m->indices.push_back(u);
            m->values.push_back(static_cast<T>(inv_sqrt[v] * inv_sqrt[u]));
        };
        for (NodeId u : g.neighbors(v)) {
            if (!self_done && u > v) {
                emit(v);
                self_done = true;
            }
            emit(u);
        }
        if (!self_done) emit(v);
        m->offsets.push_back(m->indices.size());
    }
    return m;
}

/**
 * GraphSAGE with the max-pooling aggregator. Layer k computes
 *
 *   pooled_v = max_{u in S_k(v)} relu(h_u W_pool + b_pool)    (zeros if S_k(v) is empty)
 *   h'_v     = relu([h_v | pooled_v] W + b)
 *
 * over a fresh neighbour sample S_k. The last layer's output is L2-normalised
 * per row.
 */
template <class T>
class GraphSageEncoder {
public:
    GraphSageEncoder(const GraphSageConfig& cfg, std::size_t in_dim, ParamStore<T>& store, Rng& init,
                     const std::string& prefix = "enc.sage.")
        : cfg_(cfg), in_dim_(in_dim) {
        if (cfg.samples.empty()) throw ParameterError("GraphSAGE needs at least one layer");
        for (auto s : cfg.samples)
            if (s < 1) throw ParameterError("GraphSAGE sample sizes must be >= 1");
        if (cfg.hidden_dim < 1 || cfg.out_dim < 1 || in_dim < 1) throw ParameterError("GraphSAGE dims must be >= 1");
        std::size_t d = in_dim;
        for (std::size_t k = 0; k < cfg.samples.size(); ++k) {
            const std::size_t out = k + 1 == cfg.samples.size() ? cfg.out_dim : cfg.hidden_dim;
            const std::string p = prefix + std::to_string(k) + ".";
            Layer layer{store.add_weight(p + "w_pool", d, out, init), store.add_constant(p + "b_pool", out, T(0)),
                        store.add_weight(p + "w", d + out, out, init), store.add_constant(p + "b", out, T(0))};
            layers_.push_back(layer);
            d = out;
        }
    }

    std::size_t out_dim() const noexcept { return cfg_.out_dim; }

    /// Embeds every node; neighbour samples are drawn from `sample_seed`.
    ad::Tensor<T> forward(const Graph& g, const ad::Tensor<T>& x, std::uint64_t sample_seed) const {
        if (x.rows() != g.num_nodes() || x.cols() != in_dim_)
            throw ParameterError("GraphSAGE input " + x.shape_string() + " does not match graph with " +
                                 std::to_string(g.num_nodes()) + " nodes and feature dim " + std::to_string(in_dim_));
        Rng rng(sample_seed);
        ad::Tensor<T> h = x;
        for (std::size_t k = 0; k < layers_.size(); ++k) {
            const auto s = sample_neighbors(g, cfg_.samples[k], rng);
            h = layer_forward(k, h, s);
        }
        return ad::row_l2_normalize(h);
    }

    /// One layer over an explicit neighbour sample.
    ad::Tensor<T> layer_forward(std::size_t k, const ad::Tensor<T>& h, const NeighborSample& s) const {
        const Layer& l = layers_.at(k);
        auto transformed = ad::relu(ad::add_row(ad::matmul(h, l.w_pool), l.b_pool));
        auto pooled = ad::segment_max(transformed, s.offsets, s.index);
        return ad::relu(ad::add_row(ad::matmul(ad::concat_cols(h, pooled), l.w), l.b));
    }

    /// The pooled aggregate alone for layer k (the max over transformed neighbours).
    ad::Tensor<T> aggregate(std::size_t k, const ad::Tensor<T>& h, const NeighborSample& s) const {
        const Layer& l = layers_.at(k);
        return ad::segment_max(ad::relu(ad::add_row(ad::matmul(h, l.w_pool), l.b_pool)), s.offsets, s.index);
    }

private:
    struct Layer {
        ad::Tensor<T> w_pool;
        ad::Tensor<T> b_pool;
        ad::Tensor<T> w;
        ad::Tensor<T> b;
    };
    GraphSageConfig cfg_;
    std::size_t in_dim_;
    std::vector<Layer> layers_;
};

template <class T>
struct VgaeOutput {
    ad::Tensor<T> z;
    ad::Tensor<T> mu;
    ad::Tensor<T> log_sigma;
};

/**
 * VGAE encoder: two GCN layers over the normalised adjacency A^, with a
 * shared first layer and separate second layers for mean and log std.
 *
 *   h         = relu(A^ X W0 + b0)
 *   mu        = A^ h W_mu + b_mu
 *   log_sigma = A^ h W_sigma + b_sigma
 *   z         = mu + exp(log_sigma) * noise
 */
template <class T>
class VgaeEncoder {
public:
    VgaeEncoder(const VgaeConfig& cfg, std::size_t in_dim, ParamStore<T>& store, Rng& init,
                const std::string& prefix = "enc.vgae.")
        : cfg_(cfg), in_dim_(in_dim) {
        if (cfg.hidden_dim < 1 || cfg.latent_dim < 1 || in_dim < 1) throw ParameterError("VGAE dims must be >= 1");
        if (!(cfg.kl_weight >= 0.0)) throw ParameterError("VGAE KL weight must be >= 0");
        w0_ = store.add_weight(prefix + "w0", in_dim, cfg.hidden_dim, init);
        b0_ = store.add_constant(prefix + "b0", cfg.hidden_dim, T(0));
        w_mu_ = store.add_weight(prefix + "w_mu", cfg.hidden_dim, cfg.latent_dim, init);
        b_mu_ = store.add_constant(prefix + "b_mu", cfg.latent_dim, T(0));
        w_sigma_ = store.add_weight(prefix + "w_sigma", cfg.hidden_dim, cfg.latent_dim, init);
        b_sigma_ = store.add_constant(prefix + "b_sigma", cfg.latent_dim, T(0));
    }

    std::size_t out_dim() const noexcept { return cfg_.latent_dim; }
    const VgaeConfig& config() const noexcept { return cfg_; }

    /// `noise` is N x latent_dim standard-normal draws, or nullopt for z = mu.
    VgaeOutput<T> forward(const std::shared_ptr<const ad::SparseMatrix<T>>& adj, const ad::Tensor<T>& x,
                          const std::optional<ad::Tensor<T>>& noise = std::nullopt) const {
        if (x.rows() != adj->rows || x.cols() != in_dim_)
            throw ParameterError("VGAE input " + x.shape_string() + " does not match adjacency of " +
                                 std::to_string(adj->rows) + " nodes and feature dim " + std::to_string(in_dim_));
        auto h = ad::relu(ad::add_row(ad::matmul(ad::spmm(adj, x), w0_), b0_));
        auto ah = ad::spmm(adj, h);
        auto mu = ad::add_row(ad::matmul(ah, w_mu_), b_mu_);
        auto log_sigma = ad::add_row(ad::matmul(ah, w_sigma_), b_sigma_);
        if (!noise) return {mu, mu, log_sigma};
        if (noise->rows() != mu.rows() || noise->cols() != mu.cols())
            throw ParameterError("VGAE noise " + noise->shape_string() + " does not match latent " + mu.shape_string());
        return {ad::add(mu, ad::mul(ad::exp(log_sigma), *noise)), mu, log_sigma};
    }

private:
    VgaeConfig cfg_;
    std::size_t in_dim_;
    ad::Tensor<T> w0_;
    ad::Tensor<T> b0_;
    ad::Tensor<T> w_mu_;
    ad::Tensor<T> b_mu_;
    ad::Tensor<T> w_sigma_;
    ad::Tensor<T> b_sigma_;
};

/// Standard-normal noise matrix from a portable stream.
template <class T>
ad::Tensor<T> gaussian_noise(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<T> v(rows * cols);
    for (auto& x : v) x = static_cast<T>(rng.normal());
    return ad::Tensor<T>::constant(rows, cols, std::move(v));
}

/**
 * Node pairs and weights for the edge-reconstruction term.
 *
 * Over the P = N(N-1)/2 unordered pairs with E edges and NE = P - E
 * non-edges, the dense objective is
 *
 *   (1/P) * [ pw * sum_{edges} BCE(., 1) + sum_{non-edges} BCE(., 0) ],  pw = NE / E
 *
 * (pw = 1 when NE = 0). Dense mode lists every pair. Sampled mode lists every
 * edge plus S = min(E, NE) non-edges drawn uniformly with replacement, each
 * weighted NE/S so that the sum is an unbiased estimate of the dense one;
 * when NE <= E all non-edges are listed and the two modes coincide.
 */
inline std::vector<ad::LabeledPair> reconstruction_pairs(const Graph& g, bool dense, Rng* rng) {
    const std::size_t n = g.num_nodes();
    std::vector<ad::LabeledPair> pairs;
    if (n < 2) return pairs;
    const double total = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    const double e = static_cast<double>(g.num_edges());
    const double ne = total - e;
    const double pos_weight = (ne > 0.0 && e > 0.0) ? ne / e : 1.0;

    if (dense || ne <= e) {
        for (NodeId i = 0; i < n; ++i)
            for (NodeId j = i + 1; j < n; ++j) {
                const bool edge = g.has_edge(i, j);
                if (!dense && edge) continue;  // edges are appended below
                pairs.push_back({i, j, edge, (edge ? pos_weight : 1.0) / total});
            }
        if (dense) return pairs;
    } else {
        if (!rng) throw ParameterError("sampled reconstruction pairs need a random stream");
        const auto samples = static_cast<std::size_t>(e);
        const double w = ne / static_cast<double>(samples) / total;
        for (std::size_t s = 0; s < samples; ++s) {
            NodeId i, j;
            do {
                i = static_cast<NodeId>(rng->uniform_below(n));
                j = static_cast<NodeId>(rng->uniform_below(n));
            } while (i == j || g.has_edge(i, j));
            pairs.push_back({std::min(i, j), std::max(i, j), false, w});
        }
    }
    for (auto [u, v] : g.edges()) pairs.push_back({u, v, true, pos_weight / total});
    return pairs;
}

/// Reconstruction BCE over `pairs` plus kl_weight * KL / N^2 (the KL term
/// summed over nodes and latent dims, scaled like the reconstruction mean).
template <class T>
ad::Tensor<T> vgae_loss(const VgaeOutput<T>& out, std::span<const ad::LabeledPair> pairs, double kl_weight) {
    const auto n = static_cast<T>(out.z.rows());
    auto recon = ad::pair_bce(out.z, pairs);
    if (kl_weight == 0.0) return recon;
    return ad::add(recon, ad::scale(ad::gaussian_kl(out.mu, out.log_sigma), static_cast<T>(kl_weight) / (n * n)));
}

}  // namespace cnca
