#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cnca/centrality.hpp"
#include "cnca/generators.hpp"
#include "cnca/model.hpp"
#include "cnca/optim.hpp"

namespace cnca {

/**
 * Everything that determines a training run. Every field has a flat key
 * (see keys()) used by config files, CLI flags and checkpoints.
 */
struct TrainingConfig {
    CentralityKind metric = CentralityKind::closeness;
    EncoderKind encoder = EncoderKind::vgae;
    DecoderKind decoder = DecoderKind::mlp;
    std::string mixer_order = "tct";
    double lr = 1e-3;
    double lr_decay = 0.995;
    double lr_min = 1e-6;
    std::size_t batch_size = 256;
    std::size_t embed_dim = 32;
    double l2 = 0.1;
    std::size_t epochs = 100;
    /// Epochs without improvement before stopping; 0 disables early stopping.
    std::size_t patience = 10;
    std::uint64_t seed = 1;
    /// Fraction of graphs used for training; the rest are held out. 1 holds out nothing.
    double split = 0.8;
    std::size_t corpus_count = 600;
    std::size_t corpus_n_min = 100;
    std::size_t corpus_n_max = 1000;
    /// Fraction of WS graphs in the generated corpus.
    double corpus_mix = 0.5;
    /// Edge-list files to train on instead of a generated corpus.
    std::vector<std::string> data;
    FeatureTransform features = FeatureTransform::raw;
    std::size_t hidden_dim = 64;
    std::vector<std::size_t> sage_samples{10, 10};
    /// Add the VGAE reconstruction + KL loss to the ranking loss.
    bool vgae_joint = true;
    /// Decoder input while training: mu, or the sampled z.
    VgaeDecode vgae_decode = VgaeDecode::mean;
    double vgae_weight = 1.0;
    double kl_weight = 1.0;
    std::vector<std::size_t> mlp_widths{128, 64, 32};
    std::size_t token_hidden = 64;
    std::size_t channel_hidden = 128;
    std::size_t head_hidden = 64;
    /// Start every mixer block as the identity (zero second-layer weights).
    bool mixer_zero_init = true;
    double clip = 1.0;

    /// CC: VGAE + MLP, lr 1e-3, F 32, B 256. BC: GraphSAGE + Mixer, lr 1e-4, F 128, B 1024.
    static TrainingConfig defaults_for(CentralityKind metric);

    /// All keys in a fixed order.
    static const std::vector<std::string>& keys();
    /// (key, value) for every key, values in the form set() accepts.
    std::vector<std::pair<std::string, std::string>> to_kv() const;
    std::string get(const std::string& key) const;
    /// Throws ParameterError for an unknown key or a malformed value.
    void set(const std::string& key, const std::string& value);

    /// Throws ParameterError when fields are out of range or inconsistent.
    void validate() const;

    ModelConfig model_config() const;
    AdamOptions adam_options() const;
    CorpusSpec corpus_spec() const;
};

bool operator==(const TrainingConfig& a, const TrainingConfig& b);

/// Applies "key = value" lines ('#' comments, blank lines ignored) on top of `cfg`.
void apply_config_text(std::istream& in, TrainingConfig& cfg);
void write_config_text(std::ostream& out, const TrainingConfig& cfg);

/// FNV-1a over the key=value rendering, as 16 hex digits.
std::string config_hash(const TrainingConfig& cfg);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double v);

}  // namespace cnca
