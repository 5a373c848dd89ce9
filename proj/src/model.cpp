#include "rnnfx/model.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

namespace rnnfx::model {

using nlohmann::json;

bool is_recurrent(LayerKind k) { return k == LayerKind::lstm || k == LayerKind::gru; }

bool is_activation(LayerKind k) {
  return k == LayerKind::relu || k == LayerKind::sigmoid || k == LayerKind::tanh_act ||
         k == LayerKind::softmax;
}

std::string kind_name(LayerKind k) {
  switch (k) {
    case LayerKind::lstm: return "lstm";
    case LayerKind::gru: return "gru";
    case LayerKind::dense: return "dense";
    case LayerKind::relu: return "relu";
    case LayerKind::sigmoid: return "sigmoid";
    case LayerKind::tanh_act: return "tanh";
    case LayerKind::softmax: return "softmax";
  }
  throw ModelError("unknown layer kind");
}

LayerKind kind_from_name(const std::string& name) {
  if (name == "lstm") return LayerKind::lstm;
  if (name == "gru") return LayerKind::gru;
  if (name == "dense") return LayerKind::dense;
  if (name == "relu") return LayerKind::relu;
  if (name == "sigmoid") return LayerKind::sigmoid;
  if (name == "tanh") return LayerKind::tanh_act;
  if (name == "softmax") return LayerKind::softmax;
  throw ModelError("unknown layer kind '" + name + "'");
}

int gate_count(LayerKind k) {
  if (k == LayerKind::lstm) return 4;
  if (k == LayerKind::gru) return 3;
  return 0;
}

namespace {

std::string layer_tag(std::size_t idx, const LayerSpec& spec) {
  return "layer " + std::to_string(idx) + " (" + kind_name(spec.kind) + ")";
}

void check_dims(const std::string& tag, const std::string& what, int got_rows, int got_cols,
                int want_rows, int want_cols) {
  if (got_rows != want_rows || got_cols != want_cols)
    throw ModelError(tag + ": " + what + " is " + std::to_string(got_rows) + "x" +
                     std::to_string(got_cols) + ", expected " + std::to_string(want_rows) +
                     "x" + std::to_string(want_cols));
}

void validate_layer(std::size_t idx, const Layer& layer) {
  const LayerSpec& s = layer.spec;
  const std::string tag = layer_tag(idx, s);
  if (s.input_dim <= 0 || s.units <= 0)
    throw ModelError(tag + ": dimensions must be positive");

  if (is_recurrent(s.kind)) {
    if (s.seq_len <= 0) throw ModelError(tag + ": seq_len must be positive");
    if (s.return_sequences)
      throw ModelError(tag + ": return_sequences is not supported");
    if (!layer.rnn) throw ModelError(tag + ": missing recurrent weights");
    const int g = gate_count(s.kind);
    check_dims(tag, "kernel", layer.rnn->kernel.rows, layer.rnn->kernel.cols, s.input_dim,
               g * s.units);
    check_dims(tag, "recurrent_kernel", layer.rnn->recurrent_kernel.rows,
               layer.rnn->recurrent_kernel.cols, s.units, g * s.units);
    const std::size_t want_bias = (s.kind == LayerKind::gru && s.reset_after ? 2u : 1u) *
                                  std::size_t(g) * s.units;
    if (layer.rnn->bias.size() != want_bias)
      throw ModelError(tag + ": bias has " + std::to_string(layer.rnn->bias.size()) +
                       " entries, expected " + std::to_string(want_bias));
    if (layer.dense) throw ModelError(tag + ": unexpected dense weights");
  } else if (s.kind == LayerKind::dense) {
    if (!layer.dense) throw ModelError(tag + ": missing dense weights");
    check_dims(tag, "kernel", layer.dense->kernel.rows, layer.dense->kernel.cols,
               s.input_dim, s.units);
    if (layer.dense->bias.size() != std::size_t(s.units))
      throw ModelError(tag + ": bias has " + std::to_string(layer.dense->bias.size()) +
                       " entries, expected " + std::to_string(s.units));
    if (layer.rnn) throw ModelError(tag + ": unexpected recurrent weights");
  } else {
    if (s.units != s.input_dim)
      throw ModelError(tag + ": activation layers must preserve the dimension");
    if (layer.rnn || layer.dense) throw ModelError(tag + ": activation layers carry no weights");
  }
}

void check_finite(std::size_t idx, const Layer& layer) {
  const std::string tag = layer_tag(idx, layer.spec);
  auto scan = [&](const std::vector<double>& values, const char* what) {
    for (const double w : values)
      if (!std::isfinite(w)) throw ModelError(tag + ": non-finite value in " + what);
  };
  if (layer.rnn) {
    scan(layer.rnn->kernel.data, "kernel");
    scan(layer.rnn->recurrent_kernel.data, "recurrent_kernel");
    scan(layer.rnn->bias, "bias");
  }
  if (layer.dense) {
    scan(layer.dense->kernel.data, "kernel");
    scan(layer.dense->bias, "bias");
  }
}

}  // namespace

void NetworkModel::validate() const {
  if (layers.empty()) throw ModelError("model has no layers");
  int recurrent_seen = 0;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    validate_layer(i, layers[i]);
    check_finite(i, layers[i]);
    if (is_recurrent(layers[i].spec.kind)) {
      ++recurrent_seen;
      if (recurrent_seen > 1)
        throw ModelError(layer_tag(i, layers[i].spec) + ": at most one recurrent layer");
      if (i != 0)
        throw ModelError(layer_tag(i, layers[i].spec) +
                         ": a recurrent layer must come first");
    }
    if (i > 0 && layers[i].spec.input_dim != layers[i - 1].spec.units)
      throw ModelError(layer_tag(i, layers[i].spec) + ": input_dim " +
                       std::to_string(layers[i].spec.input_dim) +
                       " does not match previous units " +
                       std::to_string(layers[i - 1].spec.units));
  }
}

const Layer* NetworkModel::recurrent_layer() const {
  for (const auto& l : layers)
    if (is_recurrent(l.spec.kind)) return &l;
  return nullptr;
}

int NetworkModel::input_dim() const {
  return layers.empty() ? 0 : layers.front().spec.input_dim;
}

int NetworkModel::output_dim() const {
  return layers.empty() ? 0 : layers.back().spec.units;
}

int NetworkModel::seq_len() const {
  const Layer* r = recurrent_layer();
  return r ? r->spec.seq_len : 1;
}

namespace {

Matrix matrix_from_json(const json& j, const std::string& tag, const std::string& what) {
  if (!j.is_array() || j.empty() || !j.front().is_array())
    throw ModelError(tag + ": " + what + " must be a non-empty 2-d array");
  Matrix m;
  m.rows = int(j.size());
  m.cols = int(j.front().size());
  m.data.reserve(std::size_t(m.rows) * m.cols);
  for (const auto& row : j) {
    if (!row.is_array() || int(row.size()) != m.cols)
      throw ModelError(tag + ": " + what + " has ragged rows");
    for (const auto& v : row) {
      if (!v.is_number()) throw ModelError(tag + ": " + what + " has a non-numeric entry");
      m.data.push_back(v.get<double>());
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows; ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols; ++c) row.push_back(m.at(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<double> vector_from_json(const json& j, const std::string& tag,
                                     const std::string& what) {
  if (!j.is_array()) throw ModelError(tag + ": " + what + " must be an array");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) throw ModelError(tag + ": " + what + " has a non-numeric entry");
    v.push_back(e.get<double>());
  }
  return v;
}

}  // namespace

NetworkModel model_from_json(const json& j) {
  if (!j.is_object()) throw ModelError("model document must be a JSON object");
  NetworkModel m;
  m.name = j.value("name", "");
  if (j.contains("metadata")) {
    for (const auto& [k, v] : j.at("metadata").items())
      m.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();
  }
  if (!j.contains("layers") || !j.at("layers").is_array())
    throw ModelError("model document needs a 'layers' array");

  std::size_t idx = 0;
  for (const auto& lj : j.at("layers")) {
    Layer layer;
    LayerSpec& s = layer.spec;
    if (!lj.is_object() || !lj.contains("kind"))
      throw ModelError("layer " + std::to_string(idx) + ": needs a 'kind'");
    s.kind = kind_from_name(lj.at("kind").get<std::string>());
    s.input_dim = lj.value("input_dim", 0);
    s.units = lj.value("units", 0);
    s.seq_len = lj.value("seq_len", 0);
    s.return_sequences = lj.value("return_sequences", false);
    s.reset_after = lj.value("reset_after", true);
    const std::string tag = layer_tag(idx, s);

    if (lj.contains("weights")) {
      const json& wj = lj.at("weights");
      if (is_recurrent(s.kind)) {
        RecurrentWeights w;
        if (!wj.contains("kernel") || !wj.contains("recurrent_kernel") ||
            !wj.contains("bias"))
          throw ModelError(tag + ": recurrent weights need kernel, recurrent_kernel, bias");
        w.kernel = matrix_from_json(wj.at("kernel"), tag, "kernel");
        w.recurrent_kernel = matrix_from_json(wj.at("recurrent_kernel"), tag, "recurrent_kernel");
        w.bias = vector_from_json(wj.at("bias"), tag, "bias");
        layer.rnn = std::move(w);
      } else if (s.kind == LayerKind::dense) {
        DenseWeights w;
        if (!wj.contains("kernel") || !wj.contains("bias"))
          throw ModelError(tag + ": dense weights need kernel and bias");
        w.kernel = matrix_from_json(wj.at("kernel"), tag, "kernel");
        w.bias = vector_from_json(wj.at("bias"), tag, "bias");
        layer.dense = std::move(w);
      } else if (!wj.empty()) {
        throw ModelError(tag + ": activation layers carry no weights");
      }
    }
    m.layers.push_back(std::move(layer));
    ++idx;
  }
  m.validate();
  return m;
}

json model_to_json(const NetworkModel& m) {
  json j;
  j["name"] = m.name;
  j["layers"] = json::array();
  for (const auto& layer : m.layers) {
    const LayerSpec& s = layer.spec;
    json lj;
    lj["kind"] = kind_name(s.kind);
    lj["input_dim"] = s.input_dim;
    lj["units"] = s.units;
    if (is_recurrent(s.kind)) {
      lj["seq_len"] = s.seq_len;
      lj["return_sequences"] = s.return_sequences;
      if (s.kind == LayerKind::gru) lj["reset_after"] = s.reset_after;
    }
    if (layer.rnn) {
      lj["weights"] = {{"kernel", matrix_to_json(layer.rnn->kernel)},
                       {"recurrent_kernel", matrix_to_json(layer.rnn->recurrent_kernel)},
                       {"bias", layer.rnn->bias}};
    } else if (layer.dense) {
      lj["weights"] = {{"kernel", matrix_to_json(layer.dense->kernel)},
                       {"bias", layer.dense->bias}};
    }
    j["layers"].push_back(std::move(lj));
  }
  if (!m.metadata.empty()) j["metadata"] = m.metadata;
  return j;
}

NetworkModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open model file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ModelError("model file " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

void save_model(const NetworkModel& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write model file " + path.string());
  out << model_to_json(m).dump(1) << '\n';
}

ParameterCounts count_parameters(const NetworkModel& m) {
  ParameterCounts counts;
  for (const auto& layer : m.layers) {
    const LayerSpec& s = layer.spec;
    long long p = 0;
    if (is_recurrent(s.kind)) {
      const long long g = gate_count(s.kind);
      const long long bias_terms = (s.kind == LayerKind::gru && s.reset_after) ? 2 : 1;
      p = g * (1ll * s.input_dim * s.units + 1ll * s.units * s.units +
               bias_terms * s.units);
      counts.recurrent += p;
    } else if (s.kind == LayerKind::dense) {
      p = 1ll * s.input_dim * s.units + s.units;
      counts.non_recurrent += p;
    }
    counts.per_layer.push_back({kind_name(s.kind), p});
  }
  counts.total = counts.recurrent + counts.non_recurrent;
  return counts;
}

MultiplyCounts count_multiplies(const NetworkModel& m) {
  MultiplyCounts counts;
  long long steps = 1;
  for (const auto& layer : m.layers) {
    const LayerSpec& s = layer.spec;
    LayerMultiplies lm;
    lm.kind = kind_name(s.kind);
    if (is_recurrent(s.kind)) {
      const long long g = gate_count(s.kind);
      lm.kernel_per_step = g * s.input_dim * s.units;
      lm.recurrent_per_step = g * 1ll * s.units * s.units;
      counts.recurrent_per_step += lm.kernel_per_step + lm.recurrent_per_step;
      steps = s.seq_len;
    } else if (s.kind == LayerKind::dense) {
      lm.dense_total = 1ll * s.input_dim * s.units;
      counts.dense_total += lm.dense_total;
    }
    counts.per_layer.push_back(std::move(lm));
  }
  counts.total_per_inference = steps * counts.recurrent_per_step + counts.dense_total;
  return counts;
}

}  // namespace rnnfx::model
