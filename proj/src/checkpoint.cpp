#include "cnca/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "cnca/error.hpp"
#include "cnca/io.hpp"

namespace cnca {

static_assert(std::endian::native == std::endian::little, "checkpoint payloads assume a little-endian host");

const NamedTensor* Checkpoint::find(const std::string& name) const {
    for (const auto& t : tensors)
        if (t.name == name) return &t;
    return nullptr;
}

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt) {
    out << "cnca-checkpoint " << kCheckpointVersion << '\n';
    for (const auto& [k, v] : ckpt.config.to_kv()) out << "config." << k << '=' << v << '\n';
    out << "state.epoch=" << ckpt.epoch << '\n';
    out << "state.step=" << ckpt.step << '\n';
    out << "state.lr=" << format_double(ckpt.lr) << '\n';
    std::size_t offset = 0;
    for (const auto& t : ckpt.tensors) {
        const bool f64 = t.is_f64();
        const std::size_t count = f64 ? t.f64.size() : t.f32.size();
        if (count != t.rows * t.cols) throw CheckpointError("tensor '" + t.name + "' has inconsistent shape");
        if (t.name.empty() || t.name.find_first_of(" \t\n") != std::string::npos)
            throw CheckpointError("tensor name '" + t.name + "' is empty or contains whitespace");
        const std::size_t bytes = count * (f64 ? 8 : 4);
        out << "tensor " << t.name << ' ' << (f64 ? "f64" : "f32") << ' ' << t.rows << ' ' << t.cols << ' ' << offset
            << ' ' << bytes << '\n';
        offset += bytes;
    }
    out << "end\n";
    for (const auto& t : ckpt.tensors) {
        if (t.is_f64())
            out.write(reinterpret_cast<const char*>(t.f64.data()), static_cast<std::streamsize>(t.f64.size() * 8));
        else
            out.write(reinterpret_cast<const char*>(t.f32.data()), static_cast<std::streamsize>(t.f32.size() * 4));
    }
}

Checkpoint read_checkpoint(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw CheckpointError("empty checkpoint");
    {
        std::istringstream hs(line);
        std::string magic;
        int version = -1;
        hs >> magic >> version;
        if (magic != "cnca-checkpoint") throw CheckpointError("not a checkpoint (bad header)");
        if (version != kCheckpointVersion)
            throw CheckpointError("checkpoint version " + std::to_string(version) + " is not supported (expected " +
                                  std::to_string(kCheckpointVersion) + ")");
    }
    Checkpoint ckpt;
    struct Entry {
        std::size_t index, offset, bytes;
        bool f64;
    };
    std::vector<Entry> entries;
    bool ended = false;
    try {
        while (std::getline(in, line)) {
            if (line == "end") {
                ended = true;
                break;
            }
            if (line.rfind("config.", 0) == 0) {
                const auto eq = line.find('=');
                if (eq == std::string::npos) throw CheckpointError("malformed line '" + line + "'");
                ckpt.config.set(line.substr(7, eq - 7), line.substr(eq + 1));
            } else if (line.rfind("state.", 0) == 0) {
                const auto eq = line.find('=');
                if (eq == std::string::npos) throw CheckpointError("malformed line '" + line + "'");
                const std::string key = line.substr(6, eq - 6), value = line.substr(eq + 1);
                if (key == "epoch")
                    ckpt.epoch = std::stoull(value);
                else if (key == "step")
                    ckpt.step = std::stoull(value);
                else if (key == "lr")
                    ckpt.lr = std::stod(value);
                else
                    throw CheckpointError("unknown state key '" + key + "'");
            } else if (line.rfind("tensor ", 0) == 0) {
                std::istringstream ts(line.substr(7));
                NamedTensor t;
                std::string dtype;
                Entry e{};
                if (!(ts >> t.name >> dtype >> t.rows >> t.cols >> e.offset >> e.bytes))
                    throw CheckpointError("malformed tensor line '" + line + "'");
                if (dtype != "f32" && dtype != "f64") throw CheckpointError("unknown dtype '" + dtype + "'");
                e.f64 = dtype == "f64";
                t.double_precision = e.f64;
                if (e.bytes != t.rows * t.cols * (e.f64 ? 8 : 4))
                    throw CheckpointError("tensor '" + t.name + "' byte count does not match its shape");
                e.index = ckpt.tensors.size();
                ckpt.tensors.push_back(std::move(t));
                entries.push_back(e);
            } else {
                throw CheckpointError("unexpected line '" + line + "'");
            }
        }
    } catch (const ParameterError& e) {
        throw CheckpointError(std::string("bad config in checkpoint: ") + e.what());
    } catch (const std::logic_error& e) {
        throw CheckpointError(std::string("bad number in checkpoint: ") + e.what());
    }
    if (!ended) throw CheckpointError("checkpoint manifest is not terminated by 'end'");

    std::size_t expected = 0;
    for (const auto& e : entries) {
        if (e.offset != expected) throw CheckpointError("tensor payload offsets are not contiguous");
        auto& t = ckpt.tensors[e.index];
        const std::size_t count = t.rows * t.cols;
        if (e.f64) {
            t.f64.resize(count);
            in.read(reinterpret_cast<char*>(t.f64.data()), static_cast<std::streamsize>(e.bytes));
        } else {
            t.f32.resize(count);
            in.read(reinterpret_cast<char*>(t.f32.data()), static_cast<std::streamsize>(e.bytes));
        }
        if (static_cast<std::size_t>(in.gcount()) != e.bytes)
            throw CheckpointError("checkpoint payload truncated in tensor '" + t.name + "'");
        expected += e.bytes;
    }
    return ckpt;
}

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
    write_file_atomic(path, [&](std::ostream& out) { write_checkpoint(out, ckpt); }, true);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CheckpointError("cannot open checkpoint " + path.string());
    return read_checkpoint(in);
}

Checkpoint make_checkpoint(const TrainingConfig& cfg, const CentralityModel<float>& model, const Adam<float>* adam,
                           std::uint64_t epoch) {
    Checkpoint c;
    c.config = cfg;
    c.epoch = epoch;
    c.step = adam ? adam->steps() : 0;
    c.lr = adam ? adam->learning_rate() : cfg.lr;
    const auto& entries = model.params().entries();
    for (const auto& e : entries) {
        NamedTensor t;
        t.name = e.name;
        t.rows = e.tensor.rows();
        t.cols = e.tensor.cols();
        t.f32.assign(e.tensor.values().begin(), e.tensor.values().end());
        c.tensors.push_back(std::move(t));
    }
    if (adam) {
        for (std::size_t i = 0; i < entries.size(); ++i) {
            for (int which = 0; which < 2; ++which) {
                NamedTensor t;
                t.name = std::string(which == 0 ? "adam.m." : "adam.v.") + entries[i].name;
                t.rows = entries[i].tensor.rows();
                t.cols = entries[i].tensor.cols();
                t.double_precision = true;
                t.f64 = which == 0 ? adam->first_moments()[i] : adam->second_moments()[i];
                c.tensors.push_back(std::move(t));
            }
        }
    }
    return c;
}

void load_parameters(const Checkpoint& ckpt, CentralityModel<float>& model) {
    for (auto& e : model.params().entries()) {
        const NamedTensor* t = ckpt.find(e.name);
        if (!t) throw CheckpointError("checkpoint lacks parameter '" + e.name + "'");
        if (t->rows != e.tensor.rows() || t->cols != e.tensor.cols() || t->is_f64())
            throw CheckpointError("parameter '" + e.name + "' has shape " + std::to_string(t->rows) + "x" +
                                  std::to_string(t->cols) + " in the checkpoint, model expects " +
                                  e.tensor.shape_string());
        std::copy(t->f32.begin(), t->f32.end(), e.tensor.values().begin());
    }
}

}  // namespace cnca
