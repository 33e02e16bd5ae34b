#include "cnca/config.hpp"

#include <charconv>
#include <cstdio>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>

#include "cnca/error.hpp"

namespace cnca {

std::string format_double(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <class N>
N parse_number(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    N v{};
    auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || r.ec != std::errc{} || r.ptr != t.data() + t.size())
        throw ParameterError("config key '" + key + "': cannot parse '" + text + "'");
    if constexpr (std::is_floating_point_v<N>) {
        if (!std::isfinite(v)) throw ParameterError("config key '" + key + "' must be finite");
    }
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    throw ParameterError("config key '" + key + "': expected a boolean, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::vector<std::size_t> parse_size_list(const std::string& key, const std::string& text) {
    std::vector<std::size_t> out;
    for (const auto& s : split_list(text)) out.push_back(parse_number<std::size_t>(key, s));
    return out;
}

template <class V>
std::string join(const std::vector<V>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        if constexpr (std::is_same_v<V, std::string>)
            s += v[i];
        else
            s += std::to_string(v[i]);
    }
    return s;
}

struct Field {
    std::string key;
    std::function<std::string(const TrainingConfig&)> get;
    std::function<void(TrainingConfig&, const std::string&, const std::string&)> set;
};

#define CNCA_SIZE_FIELD(name)                                                                   \
    Field {                                                                                     \
        #name, [](const TrainingConfig& c) { return std::to_string(c.name); },                  \
            [](TrainingConfig& c, const std::string& k, const std::string& v) {                 \
                c.name = parse_number<std::size_t>(k, v);                                       \
            }                                                                                   \
    }
#define CNCA_DOUBLE_FIELD(name)                                                                             \
    Field {                                                                                                 \
        #name, [](const TrainingConfig& c) { return format_double(c.name); },                               \
            [](TrainingConfig& c, const std::string& k, const std::string& v) { c.name = parse_number<double>(k, v); } \
    }

const std::vector<Field>& fields() {
    static const std::vector<Field> f = {
        {"metric", [](const TrainingConfig& c) { return to_string(c.metric); },
         [](TrainingConfig& c, const std::string&, const std::string& v) { c.metric = parse_centrality_kind(trim(v)); }},
        {"encoder", [](const TrainingConfig& c) { return to_string(c.encoder); },
         [](TrainingConfig& c, const std::string&, const std::string& v) { c.encoder = parse_encoder_kind(trim(v)); }},
        {"decoder", [](const TrainingConfig& c) { return to_string(c.decoder); },
         [](TrainingConfig& c, const std::string&, const std::string& v) { c.decoder = parse_decoder_kind(trim(v)); }},
        {"mixer_order", [](const TrainingConfig& c) { return c.mixer_order; },
         [](TrainingConfig& c, const std::string&, const std::string& v) {
             parse_mixer_order(trim(v));
             c.mixer_order = trim(v);
             for (auto& ch : c.mixer_order) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
         }},
        CNCA_DOUBLE_FIELD(lr),
        CNCA_DOUBLE_FIELD(lr_decay),
        CNCA_DOUBLE_FIELD(lr_min),
        CNCA_SIZE_FIELD(batch_size),
        CNCA_SIZE_FIELD(embed_dim),
        CNCA_DOUBLE_FIELD(l2),
        CNCA_SIZE_FIELD(epochs),
        CNCA_SIZE_FIELD(patience),
        {"seed", [](const TrainingConfig& c) { return std::to_string(c.seed); },
         [](TrainingConfig& c, const std::string& k, const std::string& v) { c.seed = parse_number<std::uint64_t>(k, v); }},
        CNCA_DOUBLE_FIELD(split),
        CNCA_SIZE_FIELD(corpus_count),
        CNCA_SIZE_FIELD(corpus_n_min),
        CNCA_SIZE_FIELD(corpus_n_max),
        CNCA_DOUBLE_FIELD(corpus_mix),
        {"data", [](const TrainingConfig& c) { return join(c.data); },
         [](TrainingConfig& c, const std::string&, const std::string& v) { c.data = split_list(v); }},
        {"features", [](const TrainingConfig& c) { return to_string(c.features); },
         [](TrainingConfig& c, const std::string&, const std::string& v) { c.features = parse_feature_transform(trim(v)); }},
        CNCA_SIZE_FIELD(hidden_dim),
        {"sage_samples", [](const TrainingConfig& c) { return join(c.sage_samples); },
         [](TrainingConfig& c, const std::string& k, const std::string& v) { c.sage_samples = parse_size_list(k, v); }},
        {"vgae_joint", [](const TrainingConfig& c) { return std::string(c.vgae_joint ? "true" : "false"); },
         [](TrainingConfig& c, const std::string& k, const std::string& v) { c.vgae_joint = parse_bool(k, v); }},
        {"vgae_decode", [](const TrainingConfig& c) { return to_string(c.vgae_decode); },
         [](TrainingConfig& c, const std::string&, const std::string& v) { c.vgae_decode = parse_vgae_decode(trim(v)); }},
        CNCA_DOUBLE_FIELD(vgae_weight),
        CNCA_DOUBLE_FIELD(kl_weight),
        {"mlp_widths", [](const TrainingConfig& c) { return join(c.mlp_widths); },
         [](TrainingConfig& c, const std::string& k, const std::string& v) { c.mlp_widths = parse_size_list(k, v); }},
        CNCA_SIZE_FIELD(token_hidden),
        CNCA_SIZE_FIELD(channel_hidden),
        CNCA_SIZE_FIELD(head_hidden),
        {"mixer_zero_init", [](const TrainingConfig& c) { return std::string(c.mixer_zero_init ? "true" : "false"); },
         [](TrainingConfig& c, const std::string& k, const std::string& v) { c.mixer_zero_init = parse_bool(k, v); }},
        CNCA_DOUBLE_FIELD(clip),
    };
    return f;
}

#undef CNCA_SIZE_FIELD
#undef CNCA_DOUBLE_FIELD

const Field& field(const std::string& key) {
    for (const auto& f : fields())
        if (f.key == key) return f;
    throw ParameterError("unknown config key '" + key + "'");
}

}  // namespace

TrainingConfig TrainingConfig::defaults_for(CentralityKind metric) {
    TrainingConfig c;
    c.metric = metric;
    if (metric == CentralityKind::betweenness) {
        c.encoder = EncoderKind::graphsage;
        c.decoder = DecoderKind::mixer;
        c.lr = 1e-4;
        c.embed_dim = 128;
        c.batch_size = 1024;
    }
    return c;
}

const std::vector<std::string>& TrainingConfig::keys() {
    static const std::vector<std::string> k = [] {
        std::vector<std::string> out;
        for (const auto& f : fields()) out.push_back(f.key);
        return out;
    }();
    return k;
}

std::vector<std::pair<std::string, std::string>> TrainingConfig::to_kv() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& f : fields()) out.emplace_back(f.key, f.get(*this));
    return out;
}

std::string TrainingConfig::get(const std::string& key) const { return field(key).get(*this); }

void TrainingConfig::set(const std::string& key, const std::string& value) { field(key).set(*this, key, value); }

void TrainingConfig::validate() const {
    auto require = [](bool ok, const std::string& msg) {
        if (!ok) throw ParameterError(msg);
    };
    require(metric != CentralityKind::degree, "metric must be cc or bc");
    require(lr > 0.0, "lr must be positive");
    require(lr_min >= 0.0 && lr >= lr_min, "lr must be >= lr_min >= 0");
    require(lr_decay > 0.0 && lr_decay <= 1.0, "lr_decay must lie in (0, 1]");
    require(batch_size >= 2, "batch_size must be >= 2");
    require(embed_dim >= 1 && hidden_dim >= 1, "embed_dim and hidden_dim must be >= 1");
    require(decoder != DecoderKind::mixer || embed_dim >= 2, "the mixer decoder needs embed_dim >= 2");
    require(l2 >= 0.0, "l2 must be >= 0");
    require(epochs >= 1, "epochs must be >= 1");
    require(split > 0.0 && split <= 1.0, "split must lie in (0, 1]");
    require(corpus_mix >= 0.0 && corpus_mix <= 1.0, "corpus_mix must lie in [0, 1]");
    require(!sage_samples.empty(), "sage_samples must list at least one layer");
    for (auto s : sage_samples) require(s >= 1, "sage_samples entries must be >= 1");
    require(!mlp_widths.empty(), "mlp_widths must list at least one layer");
    for (auto w : mlp_widths) require(w >= 1, "mlp_widths entries must be >= 1");
    require(token_hidden >= 1 && channel_hidden >= 1 && head_hidden >= 1, "mixer widths must be >= 1");
    require(vgae_weight >= 0.0 && kl_weight >= 0.0, "vgae_weight and kl_weight must be >= 0");
    parse_mixer_order(mixer_order);
    if (data.empty()) {
        require(corpus_count >= 1, "corpus_count must be >= 1");
        require(corpus_n_min >= 10 && corpus_n_min <= corpus_n_max, "corpus size range must satisfy 10 <= n_min <= n_max");
    }
}

ModelConfig TrainingConfig::model_config() const {
    ModelConfig m;
    m.encoder = encoder;
    m.decoder = decoder;
    m.features = features;
    m.vgae_decode = vgae_decode;
    m.embed_dim = embed_dim;
    m.batch = batch_size;
    m.sage.samples = sage_samples;
    m.sage.hidden_dim = hidden_dim;
    m.vgae.hidden_dim = hidden_dim;
    m.vgae.kl_weight = kl_weight;
    m.mlp.hidden = mlp_widths;
    m.mixer.order = mixer_order;
    m.mixer.token_hidden = token_hidden;
    m.mixer.channel_hidden = channel_hidden;
    m.mixer.head_hidden = head_hidden;
    m.mixer.zero_init = mixer_zero_init;
    m.seed = derive_seed(seed, 0x6d6f64656cULL);
    return m;
}

AdamOptions TrainingConfig::adam_options() const {
    AdamOptions o;
    o.lr = lr;
    o.decay = lr_decay;
    o.min_lr = lr_min;
    o.clip = clip;
    o.l2 = l2;
    return o;
}

CorpusSpec TrainingConfig::corpus_spec() const {
    return {corpus_count, corpus_n_min, corpus_n_max, corpus_mix, seed};
}

bool operator==(const TrainingConfig& a, const TrainingConfig& b) { return a.to_kv() == b.to_kv(); }

void apply_config_text(std::istream& in, TrainingConfig& cfg) {
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ParseError("expected key=value, got '" + t + "'", number);
        const std::string key = trim(t.substr(0, eq));
        try {
            cfg.set(key, trim(t.substr(eq + 1)));
        } catch (const ParameterError& e) {
            throw ParameterError("config line " + std::to_string(number) + ": " + e.what());
        }
    }
}

void write_config_text(std::ostream& out, const TrainingConfig& cfg) {
    for (const auto& [k, v] : cfg.to_kv()) out << k << '=' << v << '\n';
}

std::string config_hash(const TrainingConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& [k, v] : cfg.to_kv())
        for (char c : k + '=' + v + '\n') {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001b3ULL;
        }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace cnca
