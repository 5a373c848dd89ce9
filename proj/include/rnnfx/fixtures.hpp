#pragma once

#include <cstdint>
#include <string>

#include "rnnfx/dataset.hpp"
#include "rnnfx/model.hpp"

namespace rnnfx::fixtures {

// SplitMix64: 64-bit counter-based generator (Steele, Lea & Flood 2014).
// Integer state and integer mixing only, so streams are identical on every
// platform.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // Uniform in [0, 1) with 53 random bits; exact halving keeps it portable.
  double uniform() { return double(next() >> 11) * 0x1p-53; }
  double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }
};

enum class Benchmark { top_tagging, flavor_tagging, quickdraw };
enum class Task { binary_seq, multiclass_seq };

Benchmark benchmark_from_name(const std::string& name);
std::string benchmark_name(Benchmark b);
Task task_from_name(const std::string& name);
std::string task_name(Task t);

inline constexpr std::uint64_t default_weight_seed = 0x52464e4e00000001ull;

// The three benchmark architectures with seeded random weights:
//   top_tagging    : 20 steps x 6 inputs, hidden 20, dense 64, sigmoid output
//   flavor_tagging : 15 steps x 6 inputs, hidden 120, dense 50/10, 3 classes
//   quickdraw      : 100 steps x 3 inputs, hidden 128, dense 256/128, 5 classes
model::NetworkModel make_benchmark_shape(Benchmark b, model::LayerKind cell,
                                         std::uint64_t seed = default_weight_seed);

// Labeled sequences from per-class AR(1) processes: class c drifts with its
// own sign pattern and persistence, so the classes are separable by
// construction.  Uses only +,-,*,/ on top of SplitMix64, hence bit-identical
// across platforms for a fixed seed.
data::Dataset make_synthetic_dataset(Task task, int n, std::uint64_t seed);
data::Dataset make_synthetic_dataset(Task task, int n, std::uint64_t seed, int seq_len,
                                     int input_dim, int n_classes);

}  // namespace rnnfx::fixtures
