#include "rnnfx/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace rnnfx::data {

namespace {

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument(what); }

void write_double(std::ostream& out, double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  out.write(buf, r.ptr - buf);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, int line_no) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && (*b == ' ' || *b == '\t')) ++b;
  const auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc{} || r.ptr != e)
    bad("line " + std::to_string(line_no) + ": '" + s + "' is not a number");
  return v;
}

}  // namespace

std::span<const double> Dataset::row(int i) const {
  const std::size_t len = std::size_t(seq_len) * input_dim;
  return std::span(values).subspan(std::size_t(i) * len, len);
}

void Dataset::validate() const {
  if (seq_len <= 0 || input_dim <= 0) bad("dataset shape must be positive");
  if (n_classes < 2) bad("dataset needs at least two classes");
  if (values.size() != labels.size() * std::size_t(seq_len) * input_dim)
    bad("dataset holds " + std::to_string(values.size()) + " values for " +
        std::to_string(labels.size()) + " rows of " +
        std::to_string(std::size_t(seq_len) * input_dim));
  for (const int l : labels)
    if (l < 0 || l >= n_classes)
      bad("label " + std::to_string(l) + " outside [0, " + std::to_string(n_classes) + ")");
  for (const double v : values)
    if (!std::isfinite(v)) bad("dataset values must be finite");
}

Dataset dataset_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) bad("empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_line(line);
  if (header.empty() || header[0] != "label")
    bad("CSV header must start with 'label'");
  if (header.size() < 2) bad("CSV header has no value columns");

  // Shape comes from the last column name, t{S-1}_f{D-1}.
  int seq_len = 0, input_dim = 0;
  {
    const std::string& last = header.back();
    int t = -1, f = -1;
    if (last.size() > 1 && last[0] == 't') {
      const auto under = last.find("_f");
      if (under != std::string::npos) {
        const auto r1 = std::from_chars(last.data() + 1, last.data() + under, t);
        const auto r2 =
            std::from_chars(last.data() + under + 2, last.data() + last.size(), f);
        if (r1.ec != std::errc{} || r2.ec != std::errc{} ||
            r1.ptr != last.data() + under || r2.ptr != last.data() + last.size())
          t = f = -1;
      }
    }
    if (t < 0 || f < 0) bad("last CSV column '" + last + "' is not of the form tS_fD");
    seq_len = t + 1;
    input_dim = f + 1;
  }
  if (header.size() != 1 + std::size_t(seq_len) * input_dim)
    bad("CSV header has " + std::to_string(header.size() - 1) + " value columns, '" +
        header.back() + "' implies " + std::to_string(std::size_t(seq_len) * input_dim));

  Dataset ds;
  ds.seq_len = seq_len;
  ds.input_dim = input_dim;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      bad("line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
          " cells, expected " + std::to_string(header.size()));
    int label = 0;
    const auto r = std::from_chars(cells[0].data(), cells[0].data() + cells[0].size(), label);
    if (r.ec != std::errc{} || r.ptr != cells[0].data() + cells[0].size() || label < 0)
      bad("line " + std::to_string(line_no) + ": bad label '" + cells[0] + "'");
    ds.labels.push_back(label);
    for (std::size_t k = 1; k < cells.size(); ++k)
      ds.values.push_back(parse_double(cells[k], line_no));
  }
  ds.n_classes = 2;
  for (const int l : ds.labels) ds.n_classes = std::max(ds.n_classes, l + 1);
  ds.validate();
  return ds;
}

void dataset_to_csv(const Dataset& ds, std::ostream& out) {
  ds.validate();
  out << "label";
  for (int t = 0; t < ds.seq_len; ++t)
    for (int f = 0; f < ds.input_dim; ++f) out << ",t" << t << "_f" << f;
  out << "\n";
  for (int i = 0; i < ds.size(); ++i) {
    out << ds.labels[i];
    for (const double v : ds.row(i)) {
      out << ',';
      write_double(out, v);
    }
    out << "\n";
  }
}

Dataset dataset_from_json(const nlohmann::json& j) {
  Dataset ds;
  try {
    ds.seq_len = j.at("seq_len").get<int>();
    ds.input_dim = j.at("input_dim").get<int>();
    ds.n_classes = j.at("n_classes").get<int>();
    ds.labels = j.at("labels").get<std::vector<int>>();
    for (const auto& row : j.at("values")) {
      if (row.size() != std::size_t(ds.seq_len) * ds.input_dim)
        bad("a row holds " + std::to_string(row.size()) + " values, expected " +
            std::to_string(std::size_t(ds.seq_len) * ds.input_dim));
      for (const auto& v : row) ds.values.push_back(v.get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    bad(std::string("dataset JSON: ") + e.what());
  }
  ds.validate();
  return ds;
}

nlohmann::json dataset_to_json(const Dataset& ds) {
  ds.validate();
  nlohmann::json j;
  j["seq_len"] = ds.seq_len;
  j["input_dim"] = ds.input_dim;
  j["n_classes"] = ds.n_classes;
  j["labels"] = ds.labels;
  auto rows = nlohmann::json::array();
  for (int i = 0; i < ds.size(); ++i) {
    const auto r = ds.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  j["values"] = std::move(rows);
  return j;
}

Dataset load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  const auto ext = path.extension().string();
  if (ext == ".csv") return dataset_from_csv(in);
  if (ext == ".json") {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      bad(path.string() + ": " + e.what());
    }
    return dataset_from_json(j);
  }
  bad("unsupported dataset extension '" + ext + "' (use .csv or .json)");
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) bad("cannot open " + path.string() + " for writing");
  const auto ext = path.extension().string();
  if (ext == ".csv") {
    dataset_to_csv(ds, out);
  } else if (ext == ".json") {
    out << dataset_to_json(ds).dump(1) << "\n";
  } else {
    bad("unsupported dataset extension '" + ext + "' (use .csv or .json)");
  }
  if (!out) bad("failed writing " + path.string());
}

std::vector<std::vector<fxp::FxpValue>> run_batch(const model::NetworkModel& m,
                                                  const Dataset& ds,
                                                  const engine::EngineConfig& cfg) {
  ds.validate();
  return engine::run_batch(m, ds.values, ds.size(), cfg);
}

std::vector<std::vector<double>> run_batch_reference(const model::NetworkModel& m,
                                                     const Dataset& ds) {
  ds.validate();
  std::vector<std::vector<double>> out;
  out.reserve(ds.size());
  for (int i = 0; i < ds.size(); ++i) {
    try {
      out.push_back(engine::reference_sequence(m, ds.row(i)));
    } catch (const std::exception& e) {
      throw std::runtime_error("row " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace rnnfx::data
