#include "rnnfx/fixtures.hpp"

#include <cmath>
#include <stdexcept>

namespace rnnfx::fixtures {

using model::Layer;
using model::LayerKind;
using model::LayerSpec;
using model::Matrix;
using model::NetworkModel;

Benchmark benchmark_from_name(const std::string& name) {
  if (name == "top-tagging" || name == "top_tagging") return Benchmark::top_tagging;
  if (name == "flavor-tagging" || name == "flavor_tagging")
    return Benchmark::flavor_tagging;
  if (name == "quickdraw") return Benchmark::quickdraw;
  throw std::invalid_argument("unknown benchmark '" + name +
                              "' (top-tagging | flavor-tagging | quickdraw)");
}

std::string benchmark_name(Benchmark b) {
  switch (b) {
    case Benchmark::top_tagging: return "top-tagging";
    case Benchmark::flavor_tagging: return "flavor-tagging";
    case Benchmark::quickdraw: return "quickdraw";
  }
  return "?";
}

Task task_from_name(const std::string& name) {
  if (name == "binary-seq" || name == "binary_seq") return Task::binary_seq;
  if (name == "multiclass-seq" || name == "multiclass_seq") return Task::multiclass_seq;
  throw std::invalid_argument("unknown task '" + name +
                              "' (binary-seq | multiclass-seq)");
}

std::string task_name(Task t) {
  return t == Task::binary_seq ? "binary-seq" : "multiclass-seq";
}

namespace {

Matrix random_matrix(SplitMix64& rng, int rows, int cols, double scale) {
  Matrix m{rows, cols, std::vector<double>(std::size_t(rows) * cols)};
  for (auto& v : m.data) v = rng.range(-scale, scale);
  return m;
}

std::vector<double> random_vector(SplitMix64& rng, int n, double scale) {
  std::vector<double> v(n);
  for (auto& x : v) x = rng.range(-scale, scale);
  return v;
}

Layer random_rnn(SplitMix64& rng, LayerKind kind, int in, int units, int seq) {
  Layer l;
  l.spec = LayerSpec{kind, in, units, seq, false, true};
  const int g = model::gate_count(kind);
  const double ks = 1.0 / std::sqrt(double(in));
  const double rs = 1.0 / std::sqrt(double(units));
  const int bias_len = kind == LayerKind::gru ? 2 * g * units : g * units;
  l.rnn = model::RecurrentWeights{random_matrix(rng, in, g * units, ks),
                                  random_matrix(rng, units, g * units, rs),
                                  random_vector(rng, bias_len, 0.1)};
  return l;
}

Layer random_dense(SplitMix64& rng, int in, int units) {
  Layer l;
  l.spec = LayerSpec{LayerKind::dense, in, units, 0, false, true};
  const double s = 1.0 / std::sqrt(double(in));
  l.dense = model::DenseWeights{random_matrix(rng, in, units, s),
                                random_vector(rng, units, 0.1)};
  return l;
}

Layer act(LayerKind kind, int dim) {
  Layer l;
  l.spec = LayerSpec{kind, dim, dim, 0, false, true};
  return l;
}

}  // namespace

NetworkModel make_benchmark_shape(Benchmark b, LayerKind cell, std::uint64_t seed) {
  if (cell != LayerKind::lstm && cell != LayerKind::gru)
    throw std::invalid_argument("benchmark cell must be lstm or gru");
  SplitMix64 rng(seed);
  NetworkModel m;
  m.name = benchmark_name(b) + std::string("-") + model::kind_name(cell);
  m.metadata["seed"] = std::to_string(seed);
  switch (b) {
    case Benchmark::top_tagging:
      m.layers.push_back(random_rnn(rng, cell, 6, 20, 20));
      m.layers.push_back(random_dense(rng, 20, 64));
      m.layers.push_back(act(LayerKind::relu, 64));
      m.layers.push_back(random_dense(rng, 64, 1));
      m.layers.push_back(act(LayerKind::sigmoid, 1));
      break;
    case Benchmark::flavor_tagging:
      m.layers.push_back(random_rnn(rng, cell, 6, 120, 15));
      m.layers.push_back(random_dense(rng, 120, 50));
      m.layers.push_back(act(LayerKind::relu, 50));
      m.layers.push_back(random_dense(rng, 50, 10));
      m.layers.push_back(act(LayerKind::relu, 10));
      m.layers.push_back(random_dense(rng, 10, 3));
      m.layers.push_back(act(LayerKind::softmax, 3));
      break;
    case Benchmark::quickdraw:
      m.layers.push_back(random_rnn(rng, cell, 3, 128, 100));
      m.layers.push_back(random_dense(rng, 128, 256));
      m.layers.push_back(act(LayerKind::relu, 256));
      m.layers.push_back(random_dense(rng, 256, 128));
      m.layers.push_back(act(LayerKind::relu, 128));
      m.layers.push_back(random_dense(rng, 128, 5));
      m.layers.push_back(act(LayerKind::softmax, 5));
      break;
  }
  m.validate();
  return m;
}

data::Dataset make_synthetic_dataset(Task task, int n, std::uint64_t seed) {
  if (task == Task::binary_seq) return make_synthetic_dataset(task, n, seed, 20, 6, 2);
  return make_synthetic_dataset(task, n, seed, 15, 6, 3);
}

data::Dataset make_synthetic_dataset(Task task, int n, std::uint64_t seed, int seq_len,
                                     int input_dim, int n_classes) {
  if (n < 1) throw std::invalid_argument("dataset size must be at least 1");
  if (seq_len < 1 || input_dim < 1)
    throw std::invalid_argument("dataset shape must be positive");
  if (task == Task::binary_seq && n_classes != 2)
    throw std::invalid_argument("binary-seq generates exactly 2 classes");
  if (n_classes < 2) throw std::invalid_argument("at least 2 classes required");

  SplitMix64 rng(seed);
  data::Dataset ds;
  ds.seq_len = seq_len;
  ds.input_dim = input_dim;
  ds.n_classes = n_classes;
  ds.labels.reserve(n);
  ds.values.reserve(std::size_t(n) * seq_len * input_dim);

  std::vector<double> state(input_dim);
  for (int row = 0; row < n; ++row) {
    // Cycle the first rows through every class so small draws stay usable.
    const int label =
        row < n_classes ? row : int(rng.next() % std::uint64_t(n_classes));
    ds.labels.push_back(label);

    // Per-class process: persistence and drift direction depend on the label,
    // the drift profile on the feature index.
    const double phi = 0.55 + 0.08 * double(label);
    const double dir = 2.0 * double(label) - double(n_classes - 1);
    for (auto& s : state) s = 0.0;
    for (int t = 0; t < seq_len; ++t) {
      const double ramp = double(t + 1) / double(seq_len);
      for (int f = 0; f < input_dim; ++f) {
        state[f] = phi * state[f] + (rng.uniform() - 0.5);
        const double profile = double(f + 1) / double(input_dim);
        ds.values.push_back(0.35 * state[f] + 0.3 * dir * profile * ramp);
      }
    }
  }
  ds.validate();
  return ds;
}

}  // namespace rnnfx::fixtures
