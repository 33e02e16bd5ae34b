#pragma once

// Checkpoint container.
//
// A text manifest followed by raw tensor bytes:
//
//   cnca-checkpoint 1
//   config.<key>=<value>          one line per TrainingConfig key
//   state.epoch=<n>
//   state.step=<n>
//   state.lr=<shortest round-trip decimal>
//   tensor <name> <f32|f64> <rows> <cols> <offset> <nbytes>
//   ...
//   end
//   <payload>
//
// Offsets are relative to the first payload byte; values are little-endian
// IEEE-754. Optimiser moments, when present, are f64 tensors named
// adam.m.<param> and adam.v.<param>.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "cnca/config.hpp"
#include "cnca/model.hpp"
#include "cnca/optim.hpp"

namespace cnca {

inline constexpr int kCheckpointVersion = 1;

struct NamedTensor {
    std::string name;
    std::size_t rows = 0;
    std::size_t cols = 0;
    bool double_precision = false;
    /// f64 holds the values when double_precision is set, f32 otherwise.
    std::vector<float> f32;
    std::vector<double> f64;

    bool is_f64() const noexcept { return double_precision; }
};

struct Checkpoint {
    TrainingConfig config;
    std::uint64_t epoch = 0;
    std::uint64_t step = 0;
    double lr = 0.0;
    std::vector<NamedTensor> tensors;

    const NamedTensor* find(const std::string& name) const;
};

void write_checkpoint(std::ostream& out, const Checkpoint& ckpt);
/// Throws CheckpointError on a bad header, version mismatch or truncated payload.
Checkpoint read_checkpoint(std::istream& in);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Snapshot of a model's parameters and, optionally, its optimiser state.
Checkpoint make_checkpoint(const TrainingConfig& cfg, const CentralityModel<float>& model,
                           const Adam<float>* adam, std::uint64_t epoch);

/// Copies checkpoint parameters into a model built from the same config.
/// Throws CheckpointError on a missing tensor or shape mismatch.
void load_parameters(const Checkpoint& ckpt, CentralityModel<float>& model);

}  // namespace cnca
