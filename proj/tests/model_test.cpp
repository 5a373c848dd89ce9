#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "rnnfx/model.hpp"

using namespace rnnfx::model;

namespace {

Matrix zeros(int rows, int cols) {
  return Matrix{rows, cols, std::vector<double>(std::size_t(rows) * cols, 0.0)};
}

Layer rnn_layer(LayerKind kind, int input_dim, int units, int seq_len,
                bool reset_after = true) {
  Layer l;
  l.spec = {kind, input_dim, units, seq_len, false, reset_after};
  const int g = gate_count(kind);
  RecurrentWeights w;
  w.kernel = zeros(input_dim, g * units);
  w.recurrent_kernel = zeros(units, g * units);
  const int bias_terms = (kind == LayerKind::gru && reset_after) ? 2 : 1;
  w.bias.assign(std::size_t(bias_terms) * g * units, 0.0);
  l.rnn = std::move(w);
  return l;
}

Layer dense_layer(int input_dim, int units) {
  Layer l;
  l.spec = {LayerKind::dense, input_dim, units};
  l.dense = DenseWeights{zeros(input_dim, units), std::vector<double>(units, 0.0)};
  return l;
}

Layer act_layer(LayerKind kind, int dim) {
  Layer l;
  l.spec = {kind, dim, dim};
  return l;
}

// The three benchmark shapes exercised throughout: a small binary tagger, a
// mid-size three-class tagger, and a large five-class sketch classifier.
NetworkModel top_shape(LayerKind cell) {
  NetworkModel m;
  m.name = "top";
  m.layers.push_back(rnn_layer(cell, 6, 20, 20));
  m.layers.push_back(dense_layer(20, 64));
  m.layers.push_back(act_layer(LayerKind::relu, 64));
  m.layers.push_back(dense_layer(64, 1));
  m.layers.push_back(act_layer(LayerKind::sigmoid, 1));
  return m;
}

NetworkModel flavor_shape(LayerKind cell) {
  NetworkModel m;
  m.name = "flavor";
  m.layers.push_back(rnn_layer(cell, 6, 120, 15));
  m.layers.push_back(dense_layer(120, 50));
  m.layers.push_back(act_layer(LayerKind::relu, 50));
  m.layers.push_back(dense_layer(50, 10));
  m.layers.push_back(act_layer(LayerKind::relu, 10));
  m.layers.push_back(dense_layer(10, 3));
  m.layers.push_back(act_layer(LayerKind::softmax, 3));
  return m;
}

NetworkModel quickdraw_shape(LayerKind cell) {
  NetworkModel m;
  m.name = "quickdraw";
  m.layers.push_back(rnn_layer(cell, 3, 128, 100));
  m.layers.push_back(dense_layer(128, 256));
  m.layers.push_back(act_layer(LayerKind::relu, 256));
  m.layers.push_back(dense_layer(256, 128));
  m.layers.push_back(act_layer(LayerKind::relu, 128));
  m.layers.push_back(dense_layer(128, 5));
  m.layers.push_back(act_layer(LayerKind::softmax, 5));
  return m;
}

}  // namespace

TEST_CASE("benchmark shapes validate") {
  for (auto cell : {LayerKind::lstm, LayerKind::gru}) {
    CHECK_NOTHROW(top_shape(cell).validate());
    CHECK_NOTHROW(flavor_shape(cell).validate());
    CHECK_NOTHROW(quickdraw_shape(cell).validate());
  }
}

TEST_CASE("parameter counts for the benchmark shapes") {
  // Small binary tagger.
  CHECK(count_parameters(top_shape(LayerKind::lstm)).recurrent == 2160);
  CHECK(count_parameters(top_shape(LayerKind::gru)).recurrent == 1680);
  CHECK(count_parameters(top_shape(LayerKind::lstm)).non_recurrent == 1409);

  // Mid-size three-class tagger.
  CHECK(count_parameters(flavor_shape(LayerKind::lstm)).recurrent == 60960);
  CHECK(count_parameters(flavor_shape(LayerKind::gru)).recurrent == 46080);
  CHECK(count_parameters(flavor_shape(LayerKind::gru)).non_recurrent == 6593);

  // Large five-class classifier.
  CHECK(count_parameters(quickdraw_shape(LayerKind::lstm)).recurrent == 67584);
  CHECK(count_parameters(quickdraw_shape(LayerKind::gru)).recurrent == 51072);
  CHECK(count_parameters(quickdraw_shape(LayerKind::lstm)).non_recurrent == 66565);

  const auto counts = count_parameters(top_shape(LayerKind::lstm));
  CHECK(counts.total == counts.recurrent + counts.non_recurrent);
  CHECK(counts.per_layer.size() == 5);
  CHECK(counts.per_layer[0].params == 2160);
  CHECK(counts.per_layer[2].params == 0);
}

TEST_CASE("gru without separate recurrent bias") {
  NetworkModel m;
  m.layers.push_back(rnn_layer(LayerKind::gru, 6, 20, 20, false));
  m.validate();
  CHECK(count_parameters(m).recurrent == 3 * (6 * 20 + 20 * 20 + 20));
}

TEST_CASE("multiply counts and the three-to-four ratio") {
  const auto lstm = count_multiplies(top_shape(LayerKind::lstm));
  const auto gru = count_multiplies(top_shape(LayerKind::gru));
  CHECK(lstm.per_layer[0].kernel_per_step == 480);
  CHECK(lstm.per_layer[0].recurrent_per_step == 1600);
  CHECK(gru.per_layer[0].kernel_per_step == 360);
  CHECK(gru.per_layer[0].recurrent_per_step == 1200);
  CHECK(gru.recurrent_per_step * 4 == lstm.recurrent_per_step * 3);

  CHECK(lstm.dense_total == 20 * 64 + 64 * 1);
  CHECK(lstm.total_per_inference == 20 * 2080 + lstm.dense_total);
}

TEST_CASE("json round-trip preserves the model") {
  NetworkModel m = top_shape(LayerKind::gru);
  // Distinguishable weights so a transposed or reordered read would differ.
  for (int r = 0; r < m.layers[0].rnn->kernel.rows; ++r)
    for (int c = 0; c < m.layers[0].rnn->kernel.cols; ++c)
      m.layers[0].rnn->kernel.at(r, c) = 0.001 * r - 0.002 * c + 0.1234567891234;
  m.layers[0].rnn->bias[3] = -0.75;
  m.layers[1].dense->kernel.at(2, 3) = 3.14159265358979;
  m.metadata["origin"] = "unit-test";

  const auto path = std::filesystem::temp_directory_path() / "rnnfx_model_roundtrip.json";
  save_model(m, path);
  const NetworkModel back = load_model(path);
  CHECK(back == m);
  std::filesystem::remove(path);
}

TEST_CASE("row index is the input neuron") {
  // A 2->3 dense kernel [[1,2,3],[4,5,6]]: row 0 holds the weights from
  // input 0 to each of the three outputs.
  const char* doc = R"({
    "name": "tiny",
    "layers": [
      {"kind": "dense", "input_dim": 2, "units": 3,
       "weights": {"kernel": [[1,2,3],[4,5,6]], "bias": [0,0,0]}}
    ]
  })";
  const auto j = nlohmann::json::parse(doc);
  const NetworkModel m = model_from_json(j);
  CHECK(m.layers[0].dense->kernel.at(0, 1) == 2);
  CHECK(m.layers[0].dense->kernel.at(1, 0) == 4);
}

TEST_CASE("structural validation failures name the layer") {
  NetworkModel m = top_shape(LayerKind::lstm);
  m.layers[0].rnn->kernel = zeros(6, 79);  // should be 6x80
  CHECK_THROWS_WITH_AS(m.validate(),
                       "layer 0 (lstm): kernel is 6x79, expected 6x80", ModelError);

  NetworkModel bias = top_shape(LayerKind::gru);
  bias.layers[0].rnn->bias.pop_back();
  CHECK_THROWS_AS(bias.validate(), ModelError);

  NetworkModel chain = top_shape(LayerKind::lstm);
  chain.layers[1] = dense_layer(21, 64);
  CHECK_THROWS_AS(chain.validate(), ModelError);

  NetworkModel twice = top_shape(LayerKind::lstm);
  twice.layers.push_back(rnn_layer(LayerKind::gru, 1, 4, 5));
  CHECK_THROWS_AS(twice.validate(), ModelError);

  NetworkModel late;
  late.layers.push_back(dense_layer(6, 6));
  late.layers.push_back(rnn_layer(LayerKind::lstm, 6, 8, 4));
  CHECK_THROWS_AS(late.validate(), ModelError);

  NetworkModel act = top_shape(LayerKind::lstm);
  act.layers[2].spec.units = 63;
  CHECK_THROWS_AS(act.validate(), ModelError);

  NetworkModel nan_weight = top_shape(LayerKind::lstm);
  nan_weight.layers[0].rnn->kernel.at(0, 0) = std::nan("");
  CHECK_THROWS_AS(nan_weight.validate(), ModelError);
}

TEST_CASE("malformed documents are rejected") {
  using nlohmann::json;
  CHECK_THROWS_AS(model_from_json(json::parse("[1,2]")), ModelError);
  CHECK_THROWS_AS(model_from_json(json::parse(R"({"name":"x"})")), ModelError);
  CHECK_THROWS_AS(
      model_from_json(json::parse(
          R"({"layers": [{"kind": "conv", "input_dim": 2, "units": 2}]})")),
      ModelError);
  // Ragged kernel rows.
  CHECK_THROWS_AS(model_from_json(json::parse(R"({
        "layers": [{"kind": "dense", "input_dim": 2, "units": 2,
                    "weights": {"kernel": [[1,2],[3]], "bias": [0,0]}}]})")),
      ModelError);
  CHECK_THROWS_AS(load_model("/nonexistent/path/model.json"), std::runtime_error);
}

TEST_CASE("model accessors") {
  const NetworkModel m = flavor_shape(LayerKind::gru);
  CHECK(m.input_dim() == 6);
  CHECK(m.output_dim() == 3);
  CHECK(m.seq_len() == 15);
  REQUIRE(m.recurrent_layer() != nullptr);
  CHECK(m.recurrent_layer()->spec.units == 120);

  NetworkModel dense_only;
  dense_only.layers.push_back(dense_layer(4, 2));
  CHECK(dense_only.seq_len() == 1);
  CHECK(dense_only.recurrent_layer() == nullptr);
}
