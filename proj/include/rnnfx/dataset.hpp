#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "rnnfx/engine.hpp"

namespace rnnfx::data {

// Labeled sequences, one row per sample, each row seq_len * input_dim values
// flattened time-major.
struct Dataset {
  int seq_len = 0;
  int input_dim = 0;
  int n_classes = 0;
  std::vector<int> labels;
  std::vector<double> values;

  int size() const { return int(labels.size()); }
  std::span<const double> row(int i) const;
  void validate() const;  // throws std::invalid_argument
};

// CSV layout: header `label,t0_f0,t0_f1,...` with the shape recovered from
// the trailing column name; one sample per row.
Dataset dataset_from_csv(std::istream& in);
void dataset_to_csv(const Dataset& ds, std::ostream& out);

Dataset dataset_from_json(const nlohmann::json& j);
nlohmann::json dataset_to_json(const Dataset& ds);

// Dispatches on the .csv / .json extension.
Dataset load_dataset(const std::filesystem::path& path);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);

// Row-wise scores, order preserving; a failing row is reported by index.
std::vector<std::vector<fxp::FxpValue>> run_batch(const model::NetworkModel& m,
                                                  const Dataset& ds,
                                                  const engine::EngineConfig& cfg);
std::vector<std::vector<double>> run_batch_reference(const model::NetworkModel& m,
                                                     const Dataset& ds);

}  // namespace rnnfx::data
