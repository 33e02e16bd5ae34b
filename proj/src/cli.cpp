#include "cnca/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>
#include <thread>

#include "cnca/centrality.hpp"
#include "cnca/checkpoint.hpp"
#include "cnca/error.hpp"
#include "cnca/eval.hpp"
#include "cnca/generators.hpp"
#include "cnca/graph.hpp"
#include "cnca/io.hpp"
#include "cnca/metrics.hpp"
#include "cnca/training.hpp"

#ifndef CNCA_VERSION
#define CNCA_VERSION "0.0.0"
#endif

extern char** environ;

namespace cnca {

namespace fs = std::filesystem;
using json = nlohmann::json;

const char* version() { return CNCA_VERSION; }

namespace {

/// A failed replay comparison; mapped to its own exit code.
class ReplayMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
    return s;
}

std::string dashed(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::uint64_t fnv1a(std::uint64_t h, std::string_view s) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex16(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

unsigned default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Rank column: 1 for the highest value, ties by node index.
std::vector<std::size_t> ranks_1based(const std::vector<double>& values) {
    const auto order = rank_of(values);
    std::vector<std::size_t> r(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) r[i] = order[i] + 1;
    return r;
}

void write_node_table(const fs::path& path, const Graph& g, const std::string& value_name,
                      const std::vector<double>& values) {
    const auto rank = ranks_1based(values);
    write_file_atomic(path, [&](std::ostream& out) {
        out << "# node_id " << value_name << " rank\n";
        for (NodeId v = 0; v < g.num_nodes(); ++v)
            out << g.label(v) << ' ' << format_double(values[v]) << ' ' << rank[v] << '\n';
    });
}

/// Reads the value column of a node table written by compute-exact, in the
/// graph's node order.
std::vector<double> read_node_values(const fs::path& path, const Graph& g) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::map<std::string, NodeId> index;
    for (NodeId v = 0; v < g.num_nodes(); ++v) index[g.label(v)] = v;
    std::vector<double> values(g.num_nodes());
    std::vector<std::uint8_t> seen(g.num_nodes(), 0);
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream row(line);
        std::string id;
        double value = 0.0;
        if (!(row >> id >> value)) throw ParseError("expected 'node_id value'", number);
        auto it = index.find(id);
        if (it == index.end()) throw ParseError("node '" + id + "' is not in the graph", number);
        values[it->second] = value;
        seen[it->second] = 1;
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end())
        throw ParseError("'" + path.string() + "' does not cover every node of the graph");
    return values;
}

// ---------------------------------------------------------------------------
// Manifests

struct Manifest {
    fs::path path;
    json doc;

    void write() const {
        write_file_atomic(path, [&](std::ostream& out) { out << doc.dump(2) << '\n'; });
    }
};

fs::path manifest_path_for(const std::string& out) {
    std::string s = out;
    while (s.size() > 1 && (s.back() == '/' || s.back() == '\\')) s.pop_back();
    return fs::path(s + ".run");
}

// ---------------------------------------------------------------------------

struct Context {
    std::ostream& out;
    std::ostream& err;
    std::vector<std::string> args;
};

struct ConfigFlags {
    std::string config_path;
    std::map<std::string, std::string> values;
};

void add_config_flags(CLI::App* app, ConfigFlags& flags) {
    app->add_option("--config", flags.config_path, "key = value config file")->check(CLI::ExistingFile);
    for (const auto& key : TrainingConfig::keys()) {
        app->add_option_function<std::string>(
            "--" + dashed(key), [&flags, key](const std::string& v) { flags.values[key] = v; },
            "config key " + key);
    }
}

Graph load_graph(const std::string& path, ParseStats* stats = nullptr) { return read_edge_list(path, {}, stats); }

/// Runs `body` under a manifest written before and after; records output digests.
void with_manifest(Context& ctx, const std::string& subcommand, const fs::path& manifest_path,
                   const std::optional<TrainingConfig>& cfg, std::uint64_t seed, const std::vector<std::string>& inputs,
                   const std::function<std::vector<fs::path>()>& body) {
    Manifest m{manifest_path, json::object()};
    m.doc["tool"] = "cnca";
    m.doc["version"] = version();
    m.doc["subcommand"] = subcommand;
    m.doc["args"] = ctx.args;
    m.doc["cwd"] = fs::current_path().string();
    m.doc["seed"] = seed;
    if (cfg) {
        json c = json::object();
        for (const auto& [k, v] : cfg->to_kv()) c[k] = v;
        m.doc["config"] = c;
        m.doc["config_hash"] = config_hash(*cfg);
    } else {
        m.doc["config"] = nullptr;
    }
    m.doc["inputs"] = inputs;
    m.doc["outputs"] = json::object();
    m.doc["started"] = utc_now();
    m.doc["finished"] = nullptr;
    m.doc["status"] = "running";
    m.write();
    try {
        const auto outputs = body();
        json o = json::object();
        for (const auto& p : outputs) o[p.string()] = stable_digest(p);
        m.doc["outputs"] = o;
        m.doc["status"] = "ok";
        m.doc["finished"] = utc_now();
        m.write();
    } catch (const std::exception& e) {
        m.doc["status"] = "error";
        m.doc["error"] = e.what();
        m.doc["finished"] = utc_now();
        try {
            m.write();
        } catch (...) {
        }
        throw;
    }
}

// ---------------------------------------------------------------------------
// Subcommands

struct GenerateArgs {
    std::string model;
    std::size_t n = 0, m = 0, k = 0;
    double p = 0.0;
    std::uint64_t seed = 1;
    std::string out;
    std::size_t corpus = 0;
    std::size_t n_min = 100, n_max = 1000;
    double mix = 0.5;
    unsigned threads = default_threads();
    std::string manifest;
};

void cmd_generate(Context& ctx, const GenerateArgs& a) {
    if (a.corpus == 0 && a.model.empty()) throw ParameterError("generate needs --model or --corpus");
    if (a.corpus > 0 && !a.model.empty()) throw ParameterError("--model and --corpus are exclusive");
    const fs::path mpath = a.manifest.empty() ? manifest_path_for(a.out) : fs::path(a.manifest);
    with_manifest(ctx, "generate", mpath, std::nullopt, a.seed, {}, [&] {
        std::vector<fs::path> outputs;
        if (a.corpus == 0) {
            GeneratorSpec spec{parse_generator_model(a.model), a.n, a.m, a.k, a.p, a.seed};
            const auto g = generate(spec);
            write_file_atomic(a.out, [&](std::ostream& o) { write_edge_list(o, g); });
            outputs.push_back(a.out);
            ctx.out << "wrote " << a.out << ": " << g.num_nodes() << " nodes, " << g.num_edges() << " edges\n";
            return outputs;
        }
        CorpusSpec spec{a.corpus, a.n_min, a.n_max, a.mix, a.seed};
        const auto corpus = generate_corpus(spec, a.threads);
        const fs::path dir(a.out);
        fs::create_directories(dir);
        std::ostringstream index;
        index << "file\tmodel\tn\tm\tk\tp\tseed\tedges\n";
        std::size_t counter[3] = {0, 0, 0};
        for (const auto& cg : corpus) {
            const auto& s = cg.spec;
            char name[64];
            std::snprintf(name, sizeof name, "%s_%04zu.txt", to_string(s.model).c_str(),
                          counter[static_cast<int>(s.model)]++);
            const fs::path file = dir / name;
            write_file_atomic(file, [&](std::ostream& o) { write_edge_list(o, cg.graph); });
            outputs.push_back(file);
            index << name << '\t' << to_string(s.model) << '\t' << s.n << '\t' << s.m << '\t' << s.k << '\t'
                  << format_double(s.p) << '\t' << s.seed << '\t' << cg.graph.num_edges() << '\n';
        }
        const fs::path index_path = dir / "corpus.tsv";
        write_file_atomic(index_path, [&](std::ostream& o) { o << index.str(); });
        outputs.push_back(index_path);
        ctx.out << "wrote " << corpus.size() << " graphs to " << dir.string() << '\n';
        return outputs;
    });
}

struct ExactArgs {
    std::string graph, metric = "cc", out, manifest;
    unsigned threads = default_threads();
};

void cmd_compute_exact(Context& ctx, const ExactArgs& a) {
    const auto kind = parse_centrality_kind(a.metric);
    const fs::path mpath = a.manifest.empty() ? manifest_path_for(a.out) : fs::path(a.manifest);
    with_manifest(ctx, "compute-exact", mpath, std::nullopt, 0, {a.graph}, [&] {
        const auto g = load_graph(a.graph);
        const auto c = exact_centrality(g, kind, a.threads);
        write_node_table(a.out, g, to_string(kind), c.values);
        ctx.out << "wrote " << a.out << ": " << to_string(kind) << " for " << g.num_nodes() << " nodes\n";
        return std::vector<fs::path>{a.out};
    });
}

struct TrainArgs {
    ConfigFlags cfg;
    std::string out, log, manifest;
    unsigned threads = default_threads();
    bool quiet = false;
};

std::string epoch_row(const EpochLog& l) {
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.3f", l.seconds);
    return std::to_string(l.epoch) + '\t' + format_double(l.train_loss) + '\t' + format_double(l.train_tau) + '\t' +
           format_double(l.test_tau) + '\t' + format_double(l.lr) + '\t' + secs + '\n';
}

void cmd_train(Context& ctx, const TrainArgs& a) {
    const auto cfg = resolve_config(a.cfg.config_path, cnca_environment(), a.cfg.values);
    cfg.validate();
    const fs::path out(a.out);
    const fs::path log_path = a.log.empty() ? fs::path(a.out + ".log.tsv") : fs::path(a.log);
    const fs::path mpath = a.manifest.empty() ? manifest_path_for(a.out) : fs::path(a.manifest);
    std::vector<std::string> inputs = cfg.data;
    if (!a.cfg.config_path.empty()) inputs.push_back(a.cfg.config_path);
    with_manifest(ctx, "train", mpath, cfg, cfg.seed, inputs, [&] {
        std::string log_text = "epoch\ttrain_loss\ttrain_tau\ttest_tau\tlr\tseconds\n";
        TrainHooks hooks;
        hooks.on_epoch = [&](const EpochLog& l) {
            log_text += epoch_row(l);
            write_file_atomic(log_path, [&](std::ostream& o) { o << log_text; });
            if (!a.quiet)
                ctx.out << "epoch " << l.epoch << " loss " << format_double(l.train_loss) << " train_tau "
                        << format_double(l.train_tau) << " test_tau " << format_double(l.test_tau) << '\n'
                        << std::flush;
        };
        hooks.on_checkpoint = [&](const Checkpoint& c) { save_checkpoint(out, c); };
        const auto result = train(cfg, hooks, a.threads);
        save_checkpoint(out, result.checkpoint);
        ctx.out << "best epoch " << result.best_epoch << " tau " << format_double(result.best_tau) << " ("
                << result.train_graphs.size() << " train, " << result.test_graphs.size() << " held out)\n";
        return std::vector<fs::path>{out, log_path};
    });
}

struct PredictArgs {
    std::string checkpoint, graph, out, truth, manifest;
    bool exact = false;
    std::uint64_t run = 0;
    unsigned threads = default_threads();
};

void cmd_predict(Context& ctx, const PredictArgs& a) {
    const fs::path mpath = a.manifest.empty() ? manifest_path_for(a.out) : fs::path(a.manifest);
    std::vector<std::string> inputs{a.checkpoint, a.graph};
    if (!a.truth.empty()) inputs.push_back(a.truth);
    const auto ckpt = load_checkpoint(a.checkpoint);
    with_manifest(ctx, "predict", mpath, ckpt.config, a.run, inputs, [&] {
        const auto g = load_graph(a.graph);
        const Predictor predictor(ckpt);
        std::optional<std::vector<double>> truth;
        if (!a.truth.empty()) truth = read_node_values(a.truth, g);
        else if (a.exact) truth = exact_centrality(g, ckpt.config.metric, a.threads).values;
        const auto r = predictor.predict(g, truth ? &*truth : nullptr, a.run);
        write_node_table(a.out, g, "score", r.scores);
        ctx.out << "wrote " << a.out << ": " << r.n << " scores";
        if (r.tau) ctx.out << ", tau_b " << format_double(*r.tau);
        ctx.out << '\n';
        return std::vector<fs::path>{a.out};
    });
}

struct EvaluateArgs {
    std::string checkpoint, out, manifest;
    std::vector<std::string> graphs;
    std::size_t runs = 10;
    std::uint64_t seed = 1;
    unsigned threads = default_threads();
};

void cmd_evaluate(Context& ctx, const EvaluateArgs& a) {
    const fs::path mpath = a.manifest.empty() ? manifest_path_for(a.out) : fs::path(a.manifest);
    std::vector<std::string> inputs{a.checkpoint};
    inputs.insert(inputs.end(), a.graphs.begin(), a.graphs.end());
    const auto ckpt = load_checkpoint(a.checkpoint);
    with_manifest(ctx, "evaluate", mpath, ckpt.config, a.seed, inputs, [&] {
        std::vector<EvalDataset> datasets;
        for (const auto& path : a.graphs) {
            EvalDataset d{fs::path(path).filename().string(), load_graph(path), std::nullopt};
            d.truth = exact_centrality(d.graph, ckpt.config.metric, a.threads).values;
            datasets.push_back(std::move(d));
        }
        const auto report = evaluate(ckpt, datasets, a.runs, a.seed, a.threads);
        write_file_atomic(a.out, [&](std::ostream& o) { write_eval_report(o, report); });
        for (const auto& s : report.summary)
            ctx.out << s.dataset << " mean tau_b " << format_double(s.mean_tau) << " over " << report.runs
                    << " runs\n";
        return std::vector<fs::path>{a.out};
    });
}

struct AblateArgs {
    ConfigFlags cfg;
    std::string out, manifest;
    std::string orders = "ctc,tct,ctct,tctc";
    std::string dims = "32,128,512";
    bool mlp = false;
    unsigned threads = default_threads();
};

void cmd_ablate(Context& ctx, const AblateArgs& a) {
    const auto cfg = resolve_config(a.cfg.config_path, cnca_environment(), a.cfg.values);
    cfg.validate();
    const auto orders = split_on(a.orders, ',');
    std::vector<std::size_t> dims;
    for (const auto& d : split_on(a.dims, ',')) {
        std::size_t v = 0;
        const auto [p, ec] = std::from_chars(d.data(), d.data() + d.size(), v);
        if (ec != std::errc() || p != d.data() + d.size() || v == 0) throw ParameterError("bad --dims entry '" + d + "'");
        dims.push_back(v);
    }
    const fs::path mpath = a.manifest.empty() ? manifest_path_for(a.out) : fs::path(a.manifest);
    with_manifest(ctx, "ablate", mpath, cfg, cfg.seed, cfg.data, [&] {
        auto graphs = prepare_graphs(load_training_graphs(cfg, a.threads), cfg.metric, a.threads);
        auto [train_idx, test_idx] = split_indices(graphs.size(), cfg.split, cfg.seed);
        std::vector<PreparedGraph> train_set, test_set;
        for (auto i : train_idx) train_set.push_back(std::move(graphs[i]));
        for (auto i : test_idx) test_set.push_back(std::move(graphs[i]));
        const auto cells = ablation_mixer_orders(cfg, train_set, test_set, orders, dims, a.mlp);
        write_file_atomic(a.out, [&](std::ostream& o) { write_ablation_table(o, cells); });
        write_ablation_table(ctx.out, cells);
        return std::vector<fs::path>{a.out};
    });
}

struct EmbedArgs {
    std::string checkpoint, graph, out, manifest;
    std::uint64_t run = 0;
};

void cmd_embed(Context& ctx, const EmbedArgs& a) {
    const fs::path mpath = a.manifest.empty() ? manifest_path_for(a.out) : fs::path(a.manifest);
    const auto ckpt = load_checkpoint(a.checkpoint);
    with_manifest(ctx, "embed", mpath, ckpt.config, a.run, {a.checkpoint, a.graph}, [&] {
        const auto g = load_graph(a.graph);
        const Predictor predictor(ckpt);
        const auto xy = pca_project_2d(embed_nodes(predictor, g, a.run));
        write_file_atomic(a.out, [&](std::ostream& o) {
            o << "# node_id x y\n";
            for (NodeId v = 0; v < g.num_nodes(); ++v)
                o << g.label(v) << ' ' << format_double(xy.data[v * 2]) << ' ' << format_double(xy.data[v * 2 + 1])
                  << '\n';
        });
        ctx.out << "wrote " << a.out << ": " << g.num_nodes() << " points\n";
        return std::vector<fs::path>{a.out};
    });
}

void cmd_info(Context& ctx, const std::string& path) {
    ParseStats stats;
    const auto g = load_graph(path, &stats);
    ctx.out << "nodes\t" << g.num_nodes() << "\nedges\t" << g.num_edges() << "\ndata_lines\t" << stats.data_lines
            << "\nself_loops\t" << stats.self_loops << "\nduplicates\t" << stats.duplicates << '\n';
}

void cmd_config(Context& ctx, const ConfigFlags& flags) {
    const auto cfg = resolve_config(flags.config_path, cnca_environment(), flags.values);
    cfg.validate();
    write_config_text(ctx.out, cfg);
}

int dispatch(Context& ctx);

void cmd_replay(Context& ctx, const std::string& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw ParseError("cannot open manifest '" + manifest_path + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ParseError("manifest '" + manifest_path + "' is not valid JSON: " + e.what());
    }
    if (!doc.contains("args") || !doc.contains("outputs") || !doc.contains("cwd"))
        throw ParseError("manifest '" + manifest_path + "' lacks args, outputs or cwd");
    if (doc.value("status", "") != "ok") throw ParameterError("manifest records an unfinished or failed run");
    const auto args = doc["args"].get<std::vector<std::string>>();
    if (!args.empty() && args.front() == "replay") throw ParameterError("cannot replay a replay");
    const auto recorded = doc["outputs"].get<std::map<std::string, std::string>>();

    const fs::path here = fs::current_path();
    fs::current_path(doc["cwd"].get<std::string>());
    int code = kExitOk;
    std::vector<std::string> differing;
    try {
        std::ostringstream sink;
        Context inner{sink, ctx.err, args};
        code = dispatch(inner);
        if (code == kExitOk)
            for (const auto& [path, digest] : recorded)
                if (!fs::exists(path) || stable_digest(path) != digest) differing.push_back(path);
    } catch (...) {
        fs::current_path(here);
        throw;
    }
    fs::current_path(here);
    if (code != kExitOk) throw std::runtime_error("replayed command exited with code " + std::to_string(code));
    if (!differing.empty()) {
        std::string list;
        for (const auto& p : differing) list += "\n  " + p;
        throw ReplayMismatch("replay outputs differ from the manifest:" + list);
    }
    ctx.out << "replay identical: " << recorded.size() << " outputs\n";
}

int dispatch(Context& ctx) {
    CLI::App app{"Centrality ranking with inductive graph embeddings", "cnca"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version()));

    GenerateArgs gen;
    auto* g = app.add_subcommand("generate", "Generate a synthetic graph or a corpus");
    g->add_option("--model", gen.model, "ba, ws or plc");
    g->add_option("--n", gen.n, "node count");
    g->add_option("--m", gen.m, "edges per new node (ba, plc)");
    g->add_option("--k", gen.k, "ring degree (ws)");
    g->add_option("--p", gen.p, "rewiring (ws) or triad (plc) probability");
    g->add_option("--seed", gen.seed, "master seed");
    g->add_option("--corpus", gen.corpus, "generate this many graphs into the --out directory");
    g->add_option("--n-min", gen.n_min, "corpus: smallest n");
    g->add_option("--n-max", gen.n_max, "corpus: largest n");
    g->add_option("--mix", gen.mix, "corpus: fraction of WS graphs");
    g->add_option("--threads", gen.threads, "worker threads");
    g->add_option("--out", gen.out, "edge-list file, or directory for --corpus")->required();
    g->add_option("--manifest", gen.manifest, "manifest path (default <out>.run)");

    ExactArgs ex;
    auto* e = app.add_subcommand("compute-exact", "Exact centrality as 'node_id value rank'");
    e->add_option("--graph", ex.graph, "edge list")->required();
    e->add_option("--metric", ex.metric, "cc, bc or dc");
    e->add_option("--threads", ex.threads, "worker threads");
    e->add_option("--out", ex.out, "output file")->required();
    e->add_option("--manifest", ex.manifest, "manifest path (default <out>.run)");

    TrainArgs tr;
    auto* t = app.add_subcommand("train", "Train a model; checkpoint after every epoch");
    add_config_flags(t, tr.cfg);
    t->add_option("--out", tr.out, "checkpoint path")->required();
    t->add_option("--log", tr.log, "per-epoch log (default <out>.log.tsv)");
    t->add_option("--threads", tr.threads, "worker threads for data preparation");
    t->add_option("--manifest", tr.manifest, "manifest path (default <out>.run)");
    t->add_flag("--quiet", tr.quiet, "no per-epoch progress lines");

    PredictArgs pr;
    auto* p = app.add_subcommand("predict", "Scores and ranking as 'node_id score rank'");
    p->add_option("--checkpoint", pr.checkpoint, "trained checkpoint")->required();
    p->add_option("--graph", pr.graph, "edge list")->required();
    p->add_option("--out", pr.out, "output file")->required();
    p->add_option("--truth", pr.truth, "compute-exact output to score against");
    p->add_flag("--exact", pr.exact, "compute the exact centrality and report tau-b");
    p->add_option("--run", pr.run, "sampling run index (GraphSAGE)");
    p->add_option("--threads", pr.threads, "worker threads for --exact");
    p->add_option("--manifest", pr.manifest, "manifest path (default <out>.run)");

    EvaluateArgs ev;
    auto* v = app.add_subcommand("evaluate", "Kendall tau-b over datasets and runs");
    v->add_option("--checkpoint", ev.checkpoint, "trained checkpoint")->required();
    v->add_option("--graph", ev.graphs, "edge list (repeatable)")->required();
    v->add_option("--runs", ev.runs, "runs per dataset");
    v->add_option("--seed", ev.seed, "seed of the run sampling");
    v->add_option("--threads", ev.threads, "worker threads");
    v->add_option("--out", ev.out, "report file")->required();
    v->add_option("--manifest", ev.manifest, "manifest path (default <out>.run)");

    AblateArgs ab;
    auto* a = app.add_subcommand("ablate", "Mixer order x embedding dim sweep");
    add_config_flags(a, ab.cfg);
    a->add_option("--orders", ab.orders, "comma-separated mixer orders");
    a->add_option("--dims", ab.dims, "comma-separated embedding dims");
    a->add_flag("--mlp", ab.mlp, "also train the MLP decoder at every dim");
    a->add_option("--threads", ab.threads, "worker threads for data preparation");
    a->add_option("--out", ab.out, "table file")->required();
    a->add_option("--manifest", ab.manifest, "manifest path (default <out>.run)");

    EmbedArgs em;
    auto* m = app.add_subcommand("embed", "2-D PCA of node embeddings as 'node_id x y'");
    m->add_option("--checkpoint", em.checkpoint, "trained checkpoint")->required();
    m->add_option("--graph", em.graph, "edge list")->required();
    m->add_option("--run", em.run, "sampling run index (GraphSAGE)");
    m->add_option("--out", em.out, "output file")->required();
    m->add_option("--manifest", em.manifest, "manifest path (default <out>.run)");

    std::string info_graph;
    auto* i = app.add_subcommand("info", "Node, edge and line counts of an edge list");
    i->add_option("--graph", info_graph, "edge list")->required();

    ConfigFlags show;
    auto* c = app.add_subcommand("config", "Print the resolved training config");
    add_config_flags(c, show);

    std::string replay_manifest;
    auto* r = app.add_subcommand("replay", "Re-run a manifest and compare its outputs");
    r->add_option("--manifest", replay_manifest, "manifest written by an earlier run")->required();

    std::vector<std::string> argv_store{"cnca"};
    argv_store.insert(argv_store.end(), ctx.args.begin(), ctx.args.end());
    std::vector<char*> argv;
    for (auto& s : argv_store) argv.push_back(s.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err, ctx.out, ctx.err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (g->parsed()) cmd_generate(ctx, gen);
    else if (e->parsed()) cmd_compute_exact(ctx, ex);
    else if (t->parsed()) cmd_train(ctx, tr);
    else if (p->parsed()) cmd_predict(ctx, pr);
    else if (v->parsed()) cmd_evaluate(ctx, ev);
    else if (a->parsed()) cmd_ablate(ctx, ab);
    else if (m->parsed()) cmd_embed(ctx, em);
    else if (i->parsed()) cmd_info(ctx, info_graph);
    else if (c->parsed()) cmd_config(ctx, show);
    else if (r->parsed()) cmd_replay(ctx, replay_manifest);
    return kExitOk;
}

}  // namespace

TrainingConfig resolve_config(const std::string& config_path, const std::map<std::string, std::string>& env,
                              const std::map<std::string, std::string>& flags) {
    std::string file_text;
    if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw ParseError("cannot open config '" + config_path + "'");
        std::ostringstream s;
        s << in.rdbuf();
        file_text = s.str();
    }
    auto env_value = [&](const std::string& key) -> std::optional<std::string> {
        auto it = env.find("CNCA_" + upper(key));
        if (it == env.end()) return std::nullopt;
        return it->second;
    };

    CentralityKind metric = CentralityKind::closeness;
    if (auto it = flags.find("metric"); it != flags.end()) {
        metric = parse_centrality_kind(it->second);
    } else if (auto v = env_value("metric")) {
        metric = parse_centrality_kind(*v);
    } else if (!file_text.empty()) {
        TrainingConfig probe;
        std::istringstream in(file_text);
        apply_config_text(in, probe);
        metric = probe.metric;
    }

    TrainingConfig cfg = TrainingConfig::defaults_for(metric);
    if (!file_text.empty()) {
        std::istringstream in(file_text);
        apply_config_text(in, cfg);
    }
    for (const auto& key : TrainingConfig::keys())
        if (auto v = env_value(key)) cfg.set(key, *v);
    for (const auto& [key, value] : flags) cfg.set(key, value);
    return cfg;
}

std::map<std::string, std::string> cnca_environment() {
    std::map<std::string, std::string> env;
    for (char** e = environ; e && *e; ++e) {
        const std::string entry(*e);
        if (entry.rfind("CNCA_", 0) != 0) continue;
        const auto eq = entry.find('=');
        if (eq == std::string::npos) continue;
        env[entry.substr(0, eq)] = entry.substr(eq + 1);
    }
    return env;
}

std::string stable_digest(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path.string() + "'");
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const auto ext = path.extension().string();
    if (ext != ".tsv") {
        std::ostringstream s;
        s << in.rdbuf();
        return hex16(fnv1a(h, s.str()));
    }
    std::string line;
    std::vector<std::uint8_t> drop;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.rfind("# seconds", 0) == 0) continue;
        if (!line.empty() && line[0] == '#') {
            h = fnv1a(h, line + "\n");
            continue;
        }
        auto cols = split_on(line, '\t');
        if (header) {
            drop.assign(cols.size(), 0);
            for (std::size_t c = 0; c < cols.size(); ++c) drop[c] = cols[c] == "seconds";
            header = false;
        }
        for (std::size_t c = 0; c < cols.size(); ++c)
            if (c >= drop.size() || !drop[c]) h = fnv1a(h, cols[c] + "\t");
        h = fnv1a(h, "\n");
    }
    return hex16(h);
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Context ctx{out, err, args};
    try {
        return dispatch(ctx);
    } catch (const ReplayMismatch& e) {
        err << "error: " << e.what() << '\n';
        return kExitReplayMismatch;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const ParseError& e) {
        err << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const CheckpointError& e) {
        err << "checkpoint error: " << e.what() << '\n';
        return kExitData;
    } catch (const fs::filesystem_error& e) {
        err << "file error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace cnca
