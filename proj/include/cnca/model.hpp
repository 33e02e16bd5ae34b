#pragma once

// Encoder-decoder centrality ranking model.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cnca/decoders.hpp"
#include "cnca/encoders.hpp"
#include "cnca/error.hpp"
#include "cnca/graph.hpp"
#include "cnca/params.hpp"
#include "cnca/rng.hpp"
#include "cnca/tensor.hpp"

namespace cnca {

enum class EncoderKind { graphsage, vgae };
enum class DecoderKind { mlp, mixer };

/// Per-graph encoding of the degree column d fed to the encoder.
///   raw:          d
///   standard:     (d - mean) / sd
///   log_standard: the same on log(1 + d)
///   basis:        five columns: log_standard, standard, standard on 1/(1+d),
///                 and sqrt(1+d), (1+d)^1.5 each divided by its mean
/// A zero sd leaves the centred column at zero.
enum class FeatureTransform { raw, standard, log_standard, basis };

/// Which VGAE output the decoder reads during training. Inference always uses mu.
enum class VgaeDecode { mean, sample };

std::string to_string(EncoderKind kind);
std::string to_string(DecoderKind kind);
std::string to_string(FeatureTransform t);
EncoderKind parse_encoder_kind(const std::string& name);
DecoderKind parse_decoder_kind(const std::string& name);
FeatureTransform parse_feature_transform(const std::string& name);
std::string to_string(VgaeDecode d);
VgaeDecode parse_vgae_decode(const std::string& name);

/// Column count produced by `t` from one degree column.
std::size_t feature_width(FeatureTransform t);
/// Encoder input for a graph: its degree column under `t`.
FeatureMatrix encoder_features(const Graph& g, FeatureTransform t);

struct ModelConfig {
    EncoderKind encoder = EncoderKind::vgae;
    DecoderKind decoder = DecoderKind::mlp;
    FeatureTransform features = FeatureTransform::raw;
    VgaeDecode vgae_decode = VgaeDecode::mean;
    /// Embedding width F; overrides sage.out_dim / vgae.latent_dim.
    std::size_t embed_dim = 32;
    /// Decoder batch B; the Mixer's token axis and the inference chunk size.
    std::size_t batch = 256;
    GraphSageConfig sage;
    VgaeConfig vgae;
    MlpConfig mlp;
    MixerConfig mixer;
    /// Seeds parameter initialisation.
    std::uint64_t seed = 1;
};

/// Per-graph inputs that stay fixed during training.
template <class T>
struct GraphInput {
    const Graph* graph = nullptr;
    ad::Tensor<T> features;
    /// Normalised adjacency, built only for the VGAE encoder.
    std::shared_ptr<const ad::SparseMatrix<T>> adjacency;
};

template <class T>
struct Encoded {
    ad::Tensor<T> h;
    /// Set for the VGAE encoder.
    std::optional<VgaeOutput<T>> vgae;
};

template <class T>
class CentralityModel {
public:
    explicit CentralityModel(ModelConfig cfg) : cfg_(std::move(cfg)) {
        if (cfg_.embed_dim < 1) throw ParameterError("embedding dim must be >= 1");
        if (cfg_.batch < 1) throw ParameterError("batch size must be >= 1");
        if (cfg_.decoder == DecoderKind::mixer && cfg_.batch < 2)
            throw ParameterError("the mixer decoder needs batch size >= 2");
        cfg_.sage.out_dim = cfg_.embed_dim;
        cfg_.vgae.latent_dim = cfg_.embed_dim;
        cfg_.mixer.batch = cfg_.batch;
        const std::size_t in_dim = feature_width(cfg_.features);
        Rng init(derive_seed(cfg_.seed, 0));
        if (cfg_.encoder == EncoderKind::graphsage)
            sage_.emplace(cfg_.sage, in_dim, store_, init);
        else
            vgae_.emplace(cfg_.vgae, in_dim, store_, init);
        if (cfg_.decoder == DecoderKind::mlp)
            mlp_.emplace(cfg_.mlp, cfg_.embed_dim, store_, init);
        else
            mixer_.emplace(cfg_.mixer, cfg_.embed_dim, store_, init);
    }

    CentralityModel(const CentralityModel&) = delete;
    CentralityModel& operator=(const CentralityModel&) = delete;

    const ModelConfig& config() const noexcept { return cfg_; }
    ParamStore<T>& params() noexcept { return store_; }
    const ParamStore<T>& params() const noexcept { return store_; }

    GraphInput<T> prepare(const Graph& g) const {
        GraphInput<T> in;
        in.graph = &g;
        const auto f = encoder_features(g, cfg_.features);
        in.features = ad::Tensor<T>::constant(f.rows, f.cols, std::vector<T>(f.data.begin(), f.data.end()));
        if (vgae_) in.adjacency = normalized_adjacency<T>(g);
        return in;
    }

    /**
     * Node embeddings. In training mode the VGAE samples z with noise from
     * `seed` and h is mu or z per vgae_decode; otherwise h = z = mu.
     * GraphSAGE draws its neighbour samples from `seed` in both modes.
     */
    Encoded<T> encode(const GraphInput<T>& in, bool training, std::uint64_t seed) const {
        if (sage_) return {sage_->forward(*in.graph, in.features, seed), std::nullopt};
        std::optional<ad::Tensor<T>> noise;
        if (training) noise = gaussian_noise<T>(in.graph->num_nodes(), cfg_.embed_dim, seed);
        auto out = vgae_->forward(in.adjacency, in.features, noise);
        auto h = training && cfg_.vgae_decode == VgaeDecode::mean ? out.mu : out.z;
        return {h, out};
    }

    /// Scores for embedding rows `nodes` (at most B of them), padded to B for
    /// the mixer. Returns the k x 1 scores for the real rows first and the mask.
    std::pair<ad::Tensor<T>, std::vector<std::uint8_t>> decode_rows(const ad::Tensor<T>& h,
                                                                    std::span<const std::size_t> nodes) const {
        if (nodes.empty() || nodes.size() > cfg_.batch)
            throw ParameterError("decoder batch of " + std::to_string(nodes.size()) + " rows, limit " +
                                 std::to_string(cfg_.batch));
        if (mlp_) {
            return {mlp_->forward(ad::row_gather(h, nodes)), std::vector<std::uint8_t>(nodes.size(), 1)};
        }
        auto p = pad_indices(nodes, cfg_.batch);
        return {mixer_->forward(ad::row_gather(h, std::span<const std::size_t>(p.rows))), std::move(p.mask)};
    }

    /// Inference: nodes in index order, chunked into batches of B.
    std::vector<double> predict_scores(const GraphInput<T>& in, std::uint64_t seed) const {
        const auto enc = encode(in, false, seed);
        const std::size_t n = in.graph->num_nodes();
        std::vector<double> scores(n);
        std::vector<std::size_t> chunk;
        for (std::size_t start = 0; start < n; start += cfg_.batch) {
            const std::size_t end = std::min(n, start + cfg_.batch);
            chunk.resize(end - start);
            for (std::size_t i = start; i < end; ++i) chunk[i - start] = i;
            auto [y, mask] = decode_rows(enc.h, chunk);
            for (std::size_t i = start; i < end; ++i) scores[i] = static_cast<double>(y.values()[i - start]);
        }
        return scores;
    }

private:
    ModelConfig cfg_;
    ParamStore<T> store_;
    std::optional<GraphSageEncoder<T>> sage_;
    std::optional<VgaeEncoder<T>> vgae_;
    std::optional<MlpDecoder<T>> mlp_;
    std::optional<MixerDecoder<T>> mixer_;
};

}  // namespace cnca
