#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace rnnfx::model {

enum class LayerKind { lstm, gru, dense, relu, sigmoid, tanh_act, softmax };

bool is_recurrent(LayerKind k);
bool is_activation(LayerKind k);
std::string kind_name(LayerKind k);
LayerKind kind_from_name(const std::string& name);

// Gates per step: 4 for LSTM (input, forget, candidate, output in that
// order), 3 for GRU (update, reset, candidate).
int gate_count(LayerKind k);

// Thrown for structural problems: bad dimensions, unknown kinds, weight
// shapes that do not match the declared layer.
struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Row-major; row index is the input neuron, column index the output.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  double at(int r, int c) const { return data[std::size_t(r) * cols + c]; }
  double& at(int r, int c) { return data[std::size_t(r) * cols + c]; }

  friend bool operator==(const Matrix&, const Matrix&) = default;
};

// kernel: [input_dim x G*units], recurrent_kernel: [units x G*units].
// bias: [G*units], except a GRU with reset_after semantics, which keeps
// separate input and recurrent biases concatenated as [2*G*units].
struct RecurrentWeights {
  Matrix kernel;
  Matrix recurrent_kernel;
  std::vector<double> bias;

  friend bool operator==(const RecurrentWeights&, const RecurrentWeights&) = default;
};

struct DenseWeights {
  Matrix kernel;  // [input_dim x units]
  std::vector<double> bias;

  friend bool operator==(const DenseWeights&, const DenseWeights&) = default;
};

struct LayerSpec {
  LayerKind kind = LayerKind::dense;
  int input_dim = 0;
  int units = 0;
  int seq_len = 0;               // recurrent layers only
  bool return_sequences = false; // only false is supported
  bool reset_after = true;       // GRU only

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct Layer {
  LayerSpec spec;
  std::optional<RecurrentWeights> rnn;
  std::optional<DenseWeights> dense;

  friend bool operator==(const Layer&, const Layer&) = default;
};

struct NetworkModel {
  std::string name;
  std::vector<Layer> layers;
  std::map<std::string, std::string> metadata;

  // Throws ModelError unless every layer's weights match its spec, the
  // dimension chain is consistent, and at most one recurrent layer exists
  // (and then as the first layer).
  void validate() const;

  const Layer* recurrent_layer() const;
  int input_dim() const;
  int output_dim() const;
  int seq_len() const;  // 1 when there is no recurrent layer

  friend bool operator==(const NetworkModel&, const NetworkModel&) = default;
};

NetworkModel model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const NetworkModel& m);

NetworkModel load_model(const std::filesystem::path& path);
void save_model(const NetworkModel& m, const std::filesystem::path& path);

struct LayerParams {
  std::string kind;
  long long params = 0;
};

struct ParameterCounts {
  std::vector<LayerParams> per_layer;
  long long recurrent = 0;      // parameters inside recurrent layers
  long long non_recurrent = 0;  // everything else
  long long total = 0;
};

ParameterCounts count_parameters(const NetworkModel& m);

struct LayerMultiplies {
  std::string kind;
  long long kernel_per_step = 0;     // recurrent layers: G * input_dim * units
  long long recurrent_per_step = 0;  // recurrent layers: G * units^2
  long long dense_total = 0;         // dense layers: input_dim * units
};

struct MultiplyCounts {
  std::vector<LayerMultiplies> per_layer;
  long long recurrent_per_step = 0;  // both recurrent terms, one time step
  long long dense_total = 0;
  long long total_per_inference = 0;  // steps * per-step + dense
};

MultiplyCounts count_multiplies(const NetworkModel& m);

}  // namespace rnnfx::model
