// rnnfx: fixed-point RNN inference and FPGA cost estimation from the command
// line.  Subcommands: infer, sweep-quant, sweep-reuse, compare-modes,
// estimate, gen-fixtures.  Exit codes: 0 success, 2 usage or I/O, 3 validation.

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rnnfx/dataset.hpp"
#include "rnnfx/engine.hpp"
#include "rnnfx/fixtures.hpp"
#include "rnnfx/fxp.hpp"
#include "rnnfx/metrics.hpp"
#include "rnnfx/model.hpp"
#include "rnnfx/perf.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace rnnfx;

namespace {

// Missing or unwritable files are usage-level failures (exit 2); everything
// the library rejects about the *content* of an input is validation (exit 3).
struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path require_file(const std::string& path) {
  fs::path p(path);
  if (!fs::exists(p) || fs::is_directory(p)) throw io_error("cannot open '" + path + "'");
  return p;
}

void write_text(const std::string& path, const std::string& body) {
  if (path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot write '" + path + "'");
  f << body;
  if (!f) throw io_error("write failed for '" + path + "'");
}

// Shortest round-trip representation keeps every emitted file byte-stable.
std::string fmt_double(double v) {
  std::array<char, 32> buf;
  auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), p);
}

int parse_int(std::string_view text, const std::string& whole) {
  while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
  while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
  int v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size())
    throw std::invalid_argument("'" + whole + "' is not an integer list/range");
  return v;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto comma = text.find(',', pos);
    const auto piece = text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    out.push_back(parse_int(piece, text));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// "A" -> {A}; "A:B" -> A..B inclusive; "A:B:step" strides.  A > B is an
// empty range, not an error, so sweeps can be switched off from a config.
std::vector<int> parse_int_range(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (true) {
    const auto colon = text.find(':', pos);
    parts.push_back(text.substr(pos, colon == std::string::npos ? std::string::npos : colon - pos));
    if (colon == std::string::npos) break;
    pos = colon + 1;
  }
  if (parts.size() > 3) throw std::invalid_argument("range '" + text + "' wants A, A:B, or A:B:step");
  const int a = parse_int(parts[0], text);
  if (parts.size() == 1) return {a};
  const int b = parse_int(parts[1], text);
  const int step = parts.size() == 3 ? parse_int(parts[2], text) : 1;
  if (step <= 0) throw std::invalid_argument("range '" + text + "' needs a positive step");
  std::vector<int> out;
  for (int v = a; v <= b; v += step) out.push_back(v);
  return out;
}

fxp::QuantPolicy parse_policy(const std::string& rounding, const std::string& overflow) {
  fxp::QuantPolicy p;
  if (rounding == "truncate")
    p.rounding = fxp::Rounding::truncate;
  else if (rounding == "nearest-even" || rounding == "nearest_even")
    p.rounding = fxp::Rounding::nearest_even;
  else
    throw std::invalid_argument("unknown rounding '" + rounding + "' (truncate | nearest-even)");
  if (overflow == "saturate")
    p.overflow = fxp::Overflow::saturate;
  else if (overflow == "wrap")
    p.overflow = fxp::Overflow::wrap;
  else
    throw std::invalid_argument("unknown overflow '" + overflow + "' (saturate | wrap)");
  return p;
}

std::string rounding_name(fxp::Rounding r) {
  return r == fxp::Rounding::truncate ? "truncate" : "nearest-even";
}

std::string overflow_name(fxp::Overflow o) {
  return o == fxp::Overflow::saturate ? "saturate" : "wrap";
}

// Shared numeric-behavior flags.
struct NumericOpts {
  std::string precision = "fixed<16,6>";
  std::string rounding = "truncate";
  std::string overflow = "saturate";
  std::string mode = "static";
  std::string activation = "lut";
};

void add_numeric_flags(CLI::App* sub, NumericOpts& n, bool with_mode = true) {
  sub->add_option("--precision", n.precision, "working fixed-point format, fixed<W,I> or ufixed<W,I>")
      ->capture_default_str();
  sub->add_option("--round", n.rounding, "rounding: truncate | nearest-even")->capture_default_str();
  sub->add_option("--overflow", n.overflow, "overflow: saturate | wrap")->capture_default_str();
  if (with_mode)
    sub->add_option("--mode", n.mode, "recurrent execution mode: static | non-static")
        ->capture_default_str();
  sub->add_option("--activation", n.activation, "activation evaluation: lut | reference")
      ->capture_default_str();
}

engine::EngineConfig make_engine_cfg(const NumericOpts& n) {
  engine::EngineConfig cfg;
  cfg.precision = fxp::parse_format(n.precision);
  cfg.policy = parse_policy(n.rounding, n.overflow);
  cfg.mode = engine::mode_from_name(n.mode);
  if (n.activation == "lut")
    cfg.activation = engine::ActivationMode::lut;
  else if (n.activation == "reference")
    cfg.activation = engine::ActivationMode::reference;
  else
    throw std::invalid_argument("unknown activation '" + n.activation + "' (lut | reference)");
  cfg.validate();
  return cfg;
}

// Shared hardware-estimation flags.
struct HardwareOpts {
  std::string strategy = "resource";
  double clock_mhz = 200.0;
  std::string device;
  std::string device_db;
  std::string calibration;
};

void add_hardware_flags(CLI::App* sub, HardwareOpts& h) {
  sub->add_option("--strategy", h.strategy, "implementation strategy: resource | latency")
      ->capture_default_str();
  sub->add_option("--clock-mhz", h.clock_mhz, "target clock in MHz")->capture_default_str();
  sub->add_option("--device", h.device, "device name for the budget check (see the device DB)");
  sub->add_option("--device-db", h.device_db,
                  "JSON device-budget database; overrides $RNNFX_DEVICE_DB and the built-in table");
  sub->add_option("--calibration", h.calibration, "JSON file overriding cost-model constants");
}

std::vector<perf::DeviceBudget> resolve_device_db(const HardwareOpts& h) {
  if (!h.device_db.empty()) return perf::load_device_db(require_file(h.device_db));
  if (const char* env = std::getenv("RNNFX_DEVICE_DB"); env != nullptr && *env != '\0')
    return perf::load_device_db(require_file(env));
  return perf::builtin_device_db();
}

std::optional<perf::DeviceBudget> resolve_device(const HardwareOpts& h) {
  if (h.device.empty()) return std::nullopt;
  const auto db = resolve_device_db(h);
  const auto* d = perf::find_device(db, h.device);
  if (d == nullptr) throw std::invalid_argument("unknown device '" + h.device + "'");
  return *d;
}

perf::CalibConstants resolve_calibration(const HardwareOpts& h) {
  if (h.calibration.empty()) return perf::default_calibration();
  return perf::load_calibration(require_file(h.calibration));
}

perf::HardwareConfig make_hw(const perf::ReuseFactor& reuse, const HardwareOpts& h,
                             engine::Mode mode) {
  perf::HardwareConfig hw;
  hw.reuse = reuse;
  hw.strategy = perf::strategy_from_name(h.strategy);
  hw.mode = mode;
  hw.clock_mhz = h.clock_mhz;
  hw.budget = resolve_device(h);
  hw.validate();
  return hw;
}

model::NetworkModel load_checked_model(const std::string& path) {
  auto m = model::load_model(require_file(path));
  m.validate();
  return m;
}

metrics::ScoredDataset to_scored(const std::vector<std::vector<fxp::FxpValue>>& rows,
                                 const std::vector<int>& labels) {
  metrics::ScoredDataset s;
  s.labels = labels;
  s.scores.reserve(rows.size());
  for (const auto& r : rows) {
    std::vector<double> v;
    v.reserve(r.size());
    for (const auto& x : r) v.push_back(x.to_double());
    s.scores.push_back(std::move(v));
  }
  return s;
}

data::Dataset head_rows(const data::Dataset& ds, int n) {
  if (n <= 0 || n >= ds.size()) return ds;
  data::Dataset out = ds;
  out.labels.assign(ds.labels.begin(), ds.labels.begin() + n);
  out.values.assign(ds.values.begin(),
                    ds.values.begin() + std::size_t(n) * ds.seq_len * ds.input_dim);
  return out;
}

// Scores with one column are a probability of the positive class.
int class_id(int columns, int c) { return columns <= 1 ? 1 : c; }

json resources_json(const perf::ResourceCount& r) {
  return json{{"dsp", r.dsp}, {"ff", r.ff}, {"lut", r.lut}, {"bram", r.bram}};
}

json budget_json(const perf::BudgetCheck& b) {
  return json{{"device", b.device},
              {"fits", b.fits},
              {"fits_dsp", b.fits_dsp},
              {"fits_ff", b.fits_ff},
              {"fits_lut", b.fits_lut},
              {"fits_bram", b.fits_bram},
              {"util_dsp", b.util_dsp},
              {"util_ff", b.util_ff},
              {"util_lut", b.util_lut},
              {"util_bram", b.util_bram}};
}

json latency_json(const perf::PerfEstimate& e) {
  return json{{"cycles_min", e.latency_cycles_min}, {"cycles_max", e.latency_cycles_max},
              {"cycles", e.latency_cycles},         {"us_min", e.latency_us_min},
              {"us_max", e.latency_us_max},         {"us", e.latency_us}};
}

json estimate_block(const perf::PerfEstimate& e) {
  json j = resources_json(e.total);
  j["latency"] = latency_json(e);
  j["ii_cycles"] = e.ii_cycles;
  j["throughput_hz"] = e.throughput_hz;
  if (!e.warnings.empty()) j["warnings"] = e.warnings;
  if (e.budget.has_value()) j["budget"] = budget_json(*e.budget);
  return j;
}

// ---------------------------------------------------------------- infer ----

struct InferOpts {
  std::string model, data;
  NumericOpts num;
  std::string scores_out = "-";
  std::string summary_out = "-";
};

int run_infer(const InferOpts& o) {
  const auto m = load_checked_model(o.model);
  const auto ds = data::load_dataset(require_file(o.data));
  const auto cfg = make_engine_cfg(o.num);
  const auto q = data::run_batch(m, ds, cfg);

  std::ostringstream csv;
  csv << "# schema: rnnfx.scores.v1\n";
  const int k = m.output_dim();
  csv << "row,label";
  for (int c = 0; c < k; ++c) csv << ",score_" << c;
  csv << "\n";
  for (int i = 0; i < ds.size(); ++i) {
    csv << i << ',' << ds.labels[std::size_t(i)];
    for (const auto& x : q[std::size_t(i)]) csv << ',' << fmt_double(x.to_double());
    csv << "\n";
  }

  json summary;
  summary["schema"] = "rnnfx.infer-summary.v1";
  summary["model"] = o.model;
  summary["model_name"] = m.name;
  summary["data"] = o.data;
  summary["rows"] = ds.size();
  summary["classes"] = ds.n_classes;
  summary["precision"] = cfg.precision.to_string();
  summary["width"] = cfg.precision.total_bits;
  summary["integer_bits"] = cfg.precision.integer_bits;
  summary["rounding"] = rounding_name(cfg.policy.rounding);
  summary["overflow"] = overflow_name(cfg.policy.overflow);
  summary["mode"] = engine::mode_name(cfg.mode);
  summary["activation"] = cfg.activation == engine::ActivationMode::lut ? "lut" : "reference";
  if (ds.size() > 0) {
    const auto s = to_scored(q, ds.labels);
    summary["accuracy"] = metrics::accuracy(s);
    try {
      summary["auc"] = metrics::one_vs_rest_auc(s);
    } catch (const std::exception& e) {
      summary["auc"] = nullptr;
      summary["auc_error"] = e.what();
    }
  } else {
    summary["accuracy"] = nullptr;
    summary["auc"] = nullptr;
  }

  write_text(o.scores_out, csv.str());
  write_text(o.summary_out, summary.dump(2) + "\n");
  return 0;
}

// ---------------------------------------------------------- sweep-quant ----

struct SweepQuantOpts {
  std::string model, data;
  std::string int_bits = "6,8,10,12";
  std::string frac_bits = "2:16";
  NumericOpts num;  // precision ignored; swept instead
  int max_rows = 0;
  std::string out = "-";
};

int run_sweep_quant(const SweepQuantOpts& o) {
  const auto m = load_checked_model(o.model);
  const auto ds = head_rows(data::load_dataset(require_file(o.data)), o.max_rows);
  const auto ints = parse_int_list(o.int_bits);
  const auto fracs = parse_int_range(o.frac_bits);

  // One double-precision pass anchors every ratio; degenerate labels are
  // rejected here before any sweep work happens.
  const auto ref = metrics::ScoredDataset{data::run_batch_reference(m, ds), ds.labels};
  const auto ref_auc = metrics::one_vs_rest_auc(ref);

  std::ostringstream csv;
  csv << "# schema: rnnfx.sweep-quant.v1\n";
  csv << "integer_bits,frac_bits,width,class,auc,ref_auc,auc_ratio\n";
  for (const int i_bits : ints) {
    for (const int f_bits : fracs) {
      NumericOpts num = o.num;
      num.precision = "fixed<" + std::to_string(i_bits + f_bits) + "," + std::to_string(i_bits) + ">";
      const auto cfg = make_engine_cfg(num);
      const auto s = to_scored(data::run_batch(m, ds, cfg), ds.labels);
      const auto auc = metrics::one_vs_rest_auc(s);
      const auto ratio = metrics::auc_ratio(s, ref);
      for (std::size_t c = 0; c < ratio.size(); ++c) {
        csv << i_bits << ',' << f_bits << ',' << (i_bits + f_bits) << ','
            << class_id(s.columns(), int(c)) << ',' << fmt_double(auc[c]) << ','
            << fmt_double(ref_auc[c]) << ',' << fmt_double(ratio[c]) << "\n";
      }
    }
  }
  write_text(o.out, csv.str());
  return 0;
}

// ---------------------------------------------------------- sweep-reuse ----

struct SweepReuseOpts {
  std::string model;
  std::vector<std::string> reuse;
  std::string widths = "16";
  int int_bits = 6;
  std::string mode = "static";
  HardwareOpts hw;
  std::string out = "-";
};

int run_sweep_reuse(const SweepReuseOpts& o) {
  const auto m = load_checked_model(o.model);
  const auto mode = engine::mode_from_name(o.mode);
  const auto calib = resolve_calibration(o.hw);
  const auto strategy = perf::strategy_from_name(o.hw.strategy);
  const auto budget = resolve_device(o.hw);

  std::vector<perf::ReuseFactor> reuses;
  for (const auto& text : o.reuse) reuses.push_back(perf::parse_reuse(text));
  std::sort(reuses.begin(), reuses.end(), [](const auto& a, const auto& b) {
    return a.kernel != b.kernel ? a.kernel < b.kernel : a.recurrent < b.recurrent;
  });
  reuses.erase(std::unique(reuses.begin(), reuses.end()), reuses.end());
  const auto widths = parse_int_range(o.widths);

  std::ostringstream csv;
  csv << "# schema: rnnfx.sweep-reuse.v1\n";
  csv << "reuse_kernel,reuse_recurrent,width,integer_bits,dsp,ff,lut,bram,"
         "latency_cycles,latency_us,ii_cycles,throughput_hz,fits\n";
  for (const auto& r : reuses) {
    perf::HardwareConfig hw;
    hw.reuse = r;
    hw.strategy = strategy;
    hw.mode = mode;
    hw.clock_mhz = o.hw.clock_mhz;
    hw.budget = budget;
    hw.validate();
    for (const int w : widths) {
      fxp::FxpFormat fmt{true, w, o.int_bits};
      fmt.validate();
      const auto est = perf::estimate(m, hw, fmt, calib);
      csv << r.kernel << ',' << r.recurrent << ',' << w << ',' << o.int_bits << ','
          << est.total.dsp << ',' << est.total.ff << ',' << est.total.lut << ','
          << est.total.bram << ',' << fmt_double(est.latency_cycles) << ','
          << fmt_double(est.latency_us) << ',' << fmt_double(est.ii_cycles) << ','
          << fmt_double(est.throughput_hz) << ',';
      if (est.budget.has_value()) csv << (est.budget->fits ? '1' : '0');
      csv << "\n";
    }
  }
  write_text(o.out, csv.str());
  return 0;
}

// -------------------------------------------------------- compare-modes ----

struct CompareModesOpts {
  std::string model;
  NumericOpts num;  // mode unused; both are run
  std::string reuse = "1:1";
  HardwareOpts hw;
  std::uint64_t probe_seed = 0x70726f62ull;
  std::string out = "-";
};

int run_compare_modes(const CompareModesOpts& o) {
  const auto m = load_checked_model(o.model);
  const auto reuse = perf::parse_reuse(o.reuse);
  const auto calib = resolve_calibration(o.hw);
  const auto fmt = fxp::parse_format(o.num.precision);

  const auto est_static = perf::estimate(m, make_hw(reuse, o.hw, engine::Mode::static_), fmt, calib);
  const auto est_non = perf::estimate(m, make_hw(reuse, o.hw, engine::Mode::non_static), fmt, calib);

  // Probe both execution paths on one deterministic input; the engines must
  // agree bit for bit.
  NumericOpts num = o.num;
  num.mode = "static";
  auto cfg_static = make_engine_cfg(num);
  num.mode = "non-static";
  auto cfg_non = make_engine_cfg(num);
  fixtures::SplitMix64 rng(o.probe_seed);
  std::vector<double> seq(std::size_t(m.seq_len()) * m.input_dim());
  for (auto& v : seq) v = rng.range(-1.0, 1.0);
  const auto a = engine::run_sequence(m, seq, cfg_static);
  const auto b = engine::run_sequence(m, seq, cfg_non);

  json j;
  j["schema"] = "rnnfx.compare-modes.v1";
  j["model"] = o.model;
  j["model_name"] = m.name;
  j["precision"] = fmt.to_string();
  j["reuse"] = perf::reuse_to_string(reuse);
  j["strategy"] = perf::strategy_name(perf::strategy_from_name(o.hw.strategy));
  j["clock_mhz"] = o.hw.clock_mhz;
  if (!o.hw.device.empty()) j["device"] = o.hw.device;
  j["static"] = estimate_block(est_static);
  j["non_static"] = estimate_block(est_non);
  j["outputs_bit_identical"] = (a == b);
  write_text(o.out, j.dump(2) + "\n");
  return 0;
}

// ------------------------------------------------------------- estimate ----

struct EstimateOpts {
  std::string model;
  std::string precision = "fixed<16,6>";
  std::string reuse = "1:1";
  std::string mode = "static";
  HardwareOpts hw;
  std::string out = "-";
};

int run_estimate(const EstimateOpts& o) {
  const auto m = load_checked_model(o.model);
  const auto fmt = fxp::parse_format(o.precision);
  fmt.validate();
  const auto hw = make_hw(perf::parse_reuse(o.reuse), o.hw, engine::mode_from_name(o.mode));
  const auto est = perf::estimate(m, hw, fmt, resolve_calibration(o.hw));

  json j;
  j["schema"] = "rnnfx.estimate.v1";
  j["model"] = o.model;
  j["model_name"] = m.name;
  j["precision"] = fmt.to_string();
  j["reuse"] = perf::reuse_to_string(hw.reuse);
  j["strategy"] = perf::strategy_name(hw.strategy);
  j["mode"] = engine::mode_name(hw.mode);
  j["clock_mhz"] = hw.clock_mhz;
  j["resources"] = resources_json(est.total);
  json layers = json::array();
  for (const auto& lc : est.per_layer) {
    json l = resources_json(lc.res);
    l["layer"] = lc.layer;
    l["kind"] = model::kind_name(lc.kind);
    layers.push_back(std::move(l));
  }
  j["per_layer"] = std::move(layers);
  j["latency"] = latency_json(est);
  j["ii_cycles"] = est.ii_cycles;
  j["throughput_hz"] = est.throughput_hz;
  j["warnings"] = est.warnings;
  if (est.budget.has_value()) j["budget"] = budget_json(*est.budget);
  write_text(o.out, j.dump(2) + "\n");
  return 0;
}

// --------------------------------------------------------- gen-fixtures ----

struct GenFixturesOpts {
  std::string out_dir = "data/fixtures";
  std::uint64_t seed = fixtures::default_weight_seed;
  int samples = 200;
};

int run_gen_fixtures(const GenFixturesOpts& o) {
  fs::create_directories(o.out_dir);
  std::vector<std::string> wrote;

  for (const auto b : {fixtures::Benchmark::top_tagging, fixtures::Benchmark::flavor_tagging,
                       fixtures::Benchmark::quickdraw}) {
    for (const auto cell : {model::LayerKind::lstm, model::LayerKind::gru}) {
      const auto m = fixtures::make_benchmark_shape(b, cell, o.seed);
      const auto path =
          fs::path(o.out_dir) / (fixtures::benchmark_name(b) + "-" + model::kind_name(cell) + ".json");
      model::save_model(m, path);
      wrote.push_back(path.string());
    }
  }
  const auto binary = fixtures::make_synthetic_dataset(fixtures::Task::binary_seq, o.samples, o.seed);
  const auto binary_path = fs::path(o.out_dir) / "binary-sequences.csv";
  data::save_dataset(binary, binary_path);
  wrote.push_back(binary_path.string());
  const auto multi =
      fixtures::make_synthetic_dataset(fixtures::Task::multiclass_seq, o.samples, o.seed);
  const auto multi_path = fs::path(o.out_dir) / "multiclass-sequences.csv";
  data::save_dataset(multi, multi_path);
  wrote.push_back(multi_path.string());

  std::sort(wrote.begin(), wrote.end());
  for (const auto& p : wrote) std::cout << "wrote " << p << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fixed-point RNN inference and FPGA cost estimation"};
  app.require_subcommand(1);
  app.fallthrough();  // lets --config appear after the subcommand name too
  app.set_config("--config", "", "read options from a TOML file (sections per subcommand)");

  InferOpts infer;
  auto* infer_cmd = app.add_subcommand(
      "infer", "run a model over a dataset and write per-row scores plus a metrics summary");
  infer_cmd->add_option("--model", infer.model, "model JSON file")->required();
  infer_cmd->add_option("--data", infer.data, "dataset CSV or JSON file")->required();
  add_numeric_flags(infer_cmd, infer.num);
  infer_cmd->add_option("--scores-out", infer.scores_out, "scores CSV path, or - for stdout")
      ->capture_default_str();
  infer_cmd->add_option("--summary-out", infer.summary_out, "summary JSON path, or - for stdout")
      ->capture_default_str();

  SweepQuantOpts sq;
  auto* sq_cmd = app.add_subcommand(
      "sweep-quant", "scan precision (integer bits x fractional bits) and report AUC ratios "
                     "against the double-precision pass");
  sq_cmd->add_option("--model", sq.model, "model JSON file")->required();
  sq_cmd->add_option("--data", sq.data, "dataset CSV or JSON file")->required();
  sq_cmd->add_option("--int-bits", sq.int_bits, "comma list of integer bit counts")
      ->capture_default_str();
  sq_cmd->add_option("--frac-bits", sq.frac_bits, "fractional bit range A, A:B, or A:B:step")
      ->capture_default_str();
  add_numeric_flags(sq_cmd, sq.num);
  sq_cmd->add_option("--max-rows", sq.max_rows, "limit the dataset to its first N rows (0 = all)")
      ->capture_default_str();
  sq_cmd->add_option("--out", sq.out, "output CSV path, or - for stdout")->capture_default_str();

  SweepReuseOpts sr;
  auto* sr_cmd = app.add_subcommand(
      "sweep-reuse", "scan reuse factors and widths and report resource and latency estimates");
  sr_cmd->add_option("--model", sr.model, "model JSON file")->required();
  sr_cmd->add_option("--reuse", sr.reuse, "reuse factor X:Y, (X,Y), or a single integer; repeatable")
      ->required();
  sr_cmd->add_option("--widths", sr.widths, "total width range A, A:B, or A:B:step")
      ->capture_default_str();
  sr_cmd->add_option("--int-bits", sr.int_bits, "integer bits held fixed across the width scan")
      ->capture_default_str();
  sr_cmd->add_option("--mode", sr.mode, "recurrent execution mode: static | non-static")
      ->capture_default_str();
  add_hardware_flags(sr_cmd, sr.hw);
  sr_cmd->add_option("--out", sr.out, "output CSV path, or - for stdout")->capture_default_str();

  CompareModesOpts cm;
  auto* cm_cmd = app.add_subcommand(
      "compare-modes", "estimate static vs non-static execution side by side and probe that both "
                       "engine paths produce identical bits");
  cm_cmd->add_option("--model", cm.model, "model JSON file")->required();
  add_numeric_flags(cm_cmd, cm.num, /*with_mode=*/false);
  cm_cmd->add_option("--reuse", cm.reuse, "reuse factor X:Y, (X,Y), or a single integer")
      ->capture_default_str();
  add_hardware_flags(cm_cmd, cm.hw);
  cm_cmd->add_option("--probe-seed", cm.probe_seed, "seed for the probe input sequence")
      ->capture_default_str();
  cm_cmd->add_option("--out", cm.out, "output JSON path, or - for stdout")->capture_default_str();

  EstimateOpts es;
  auto* es_cmd =
      app.add_subcommand("estimate", "resource, latency, II, and throughput estimate for one "
                                     "configuration, with an optional device budget check");
  es_cmd->add_option("--model", es.model, "model JSON file")->required();
  es_cmd->add_option("--precision", es.precision, "fixed-point format, fixed<W,I> or ufixed<W,I>")
      ->capture_default_str();
  es_cmd->add_option("--reuse", es.reuse, "reuse factor X:Y, (X,Y), or a single integer")
      ->capture_default_str();
  es_cmd->add_option("--mode", es.mode, "recurrent execution mode: static | non-static")
      ->capture_default_str();
  add_hardware_flags(es_cmd, es.hw);
  es_cmd->add_option("--out", es.out, "output JSON path, or - for stdout")->capture_default_str();

  GenFixturesOpts gf;
  auto* gf_cmd = app.add_subcommand(
      "gen-fixtures", "write the benchmark-shaped models and synthetic datasets to a directory");
  gf_cmd->add_option("--out-dir", gf.out_dir, "output directory")->capture_default_str();
  gf_cmd->add_option("--seed", gf.seed, "generator seed")->capture_default_str();
  gf_cmd->add_option("--samples", gf.samples, "rows per synthetic dataset")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (infer_cmd->parsed()) return run_infer(infer);
    if (sq_cmd->parsed()) return run_sweep_quant(sq);
    if (sr_cmd->parsed()) return run_sweep_reuse(sr);
    if (cm_cmd->parsed()) return run_compare_modes(cm);
    if (es_cmd->parsed()) return run_estimate(es);
    if (gf_cmd->parsed()) return run_gen_fixtures(gf);
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
