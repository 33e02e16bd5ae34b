#include "cnca/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace cnca {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

std::string to_string(EncoderKind kind) { return kind == EncoderKind::graphsage ? "graphsage" : "vgae"; }
std::string to_string(DecoderKind kind) { return kind == DecoderKind::mlp ? "mlp" : "mixer"; }

EncoderKind parse_encoder_kind(const std::string& name) {
    const auto s = lower(name);
    if (s == "graphsage" || s == "sage") return EncoderKind::graphsage;
    if (s == "vgae") return EncoderKind::vgae;
    throw ParameterError("unknown encoder '" + name + "' (expected graphsage or vgae)");
}

DecoderKind parse_decoder_kind(const std::string& name) {
    const auto s = lower(name);
    if (s == "mlp") return DecoderKind::mlp;
    if (s == "mixer" || s == "mlp-mixer") return DecoderKind::mixer;
    throw ParameterError("unknown decoder '" + name + "' (expected mlp or mixer)");
}

std::string to_string(FeatureTransform t) {
    switch (t) {
        case FeatureTransform::raw:
            return "raw";
        case FeatureTransform::standard:
            return "standard";
        case FeatureTransform::log_standard:
            return "log_standard";
        case FeatureTransform::basis:
            return "basis";
    }
    return "raw";
}

FeatureTransform parse_feature_transform(const std::string& name) {
    const auto s = lower(name);
    if (s == "raw") return FeatureTransform::raw;
    if (s == "standard") return FeatureTransform::standard;
    if (s == "log_standard") return FeatureTransform::log_standard;
    if (s == "basis") return FeatureTransform::basis;
    throw ParameterError("unknown feature transform '" + name + "' (expected raw, standard, log_standard or basis)");
}

std::string to_string(VgaeDecode d) { return d == VgaeDecode::mean ? "mean" : "sample"; }

VgaeDecode parse_vgae_decode(const std::string& name) {
    const auto s = lower(name);
    if (s == "mean") return VgaeDecode::mean;
    if (s == "sample") return VgaeDecode::sample;
    throw ParameterError("unknown vgae_decode '" + name + "' (expected mean or sample)");
}

std::size_t feature_width(FeatureTransform t) { return t == FeatureTransform::basis ? 5 : 1; }

namespace {

void standardize(std::vector<double>& v) {
    if (v.empty()) return;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / static_cast<double>(v.size()));
    for (double& x : v) x = sd > 0.0 ? (x - mean) / sd : 0.0;
}

void scale_to_unit_mean(std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    if (v.empty() || mean <= 0.0) return;
    mean /= static_cast<double>(v.size());
    for (double& x : v) x /= mean;
}

}  // namespace

FeatureMatrix encoder_features(const Graph& g, FeatureTransform t) {
    const auto deg = degree_features(g);
    const std::size_t n = deg.rows;
    std::vector<double> d(deg.data.begin(), deg.data.end());
    if (t == FeatureTransform::raw) return deg;
    if (t == FeatureTransform::standard) {
        standardize(d);
        return FeatureMatrix{n, 1, std::move(d)};
    }
    std::vector<double> logd(n);
    for (std::size_t i = 0; i < n; ++i) logd[i] = std::log1p(d[i]);
    standardize(logd);
    if (t == FeatureTransform::log_standard) return FeatureMatrix{n, 1, std::move(logd)};

    // Powers of d+1 let one propagation step by the normalised adjacency
    // recover plain degree sums: (A_hat sqrt(d+1))_i = sqrt(d_i + 1).
    std::vector<double> lin(d), inv(n), root(n), pow15(n);
    for (std::size_t i = 0; i < n; ++i) {
        inv[i] = 1.0 / (1.0 + d[i]);
        root[i] = std::sqrt(1.0 + d[i]);
        pow15[i] = root[i] * (1.0 + d[i]);
    }
    standardize(lin);
    standardize(inv);
    scale_to_unit_mean(root);
    scale_to_unit_mean(pow15);
    constexpr std::size_t w = 5;
    FeatureMatrix f{n, w, std::vector<double>(n * w)};
    for (std::size_t i = 0; i < n; ++i) {
        f.data[i * w] = logd[i];
        f.data[i * w + 1] = lin[i];
        f.data[i * w + 2] = inv[i];
        f.data[i * w + 3] = root[i];
        f.data[i * w + 4] = pow15[i];
    }
    return f;
}

}  // namespace cnca
