#include "rnnfx/perf.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace rnnfx::perf {

using model::LayerKind;
using model::NetworkModel;

namespace {

[[noreturn]] void bad(const std::string& what) { throw std::invalid_argument(what); }

int parse_positive(std::string_view text, const std::string& whole) {
  int v = 0;
  const char* b = text.data();
  const char* e = b + text.size();
  while (b < e && *b == ' ') ++b;
  while (e > b && e[-1] == ' ') --e;
  const auto r = std::from_chars(b, e, v);
  if (r.ec != std::errc{} || r.ptr != e || v < 1)
    bad("reuse '" + whole + "' is not a positive integer pair");
  return v;
}

long long ceil_div(long long a, long long b) { return (a + b - 1) / b; }

}  // namespace

ReuseFactor parse_reuse(const std::string& text) {
  std::string t = text;
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
  while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
  if (!t.empty() && t.front() == '(' && t.back() == ')') {
    t = t.substr(1, t.size() - 2);
    const auto comma = t.find(',');
    if (comma == std::string::npos) bad("reuse '" + text + "' needs '(X,Y)'");
    return ReuseFactor{parse_positive(std::string_view(t).substr(0, comma), text),
                       parse_positive(std::string_view(t).substr(comma + 1), text)};
  }
  const auto colon = t.find(':');
  if (colon != std::string::npos)
    return ReuseFactor{parse_positive(std::string_view(t).substr(0, colon), text),
                       parse_positive(std::string_view(t).substr(colon + 1), text)};
  const int both = parse_positive(t, text);
  return ReuseFactor{both, both};
}

std::string reuse_to_string(const ReuseFactor& r) {
  return std::to_string(r.kernel) + ":" + std::to_string(r.recurrent);
}

Strategy strategy_from_name(const std::string& name) {
  if (name == "resource") return Strategy::resource;
  if (name == "latency") return Strategy::latency;
  bad("unknown strategy '" + name + "' (resource | latency)");
}

std::string strategy_name(Strategy s) {
  return s == Strategy::resource ? "resource" : "latency";
}

void CalibConstants::validate() const {
  if (step_base < 0 || step_per_reuse < 0 || band_per_hidden < 0 || pipeline_depth <= 0)
    bad("latency calibration constants must be non-negative");
  if (ff_per_mult_bit < 0 || lut_per_mult_bit < 0 || lut_table_divisor <= 0)
    bad("area calibration constants must be positive");
  if (gate_table_bits < 0 || softmax_table_bits < 0) bad("table bits must be non-negative");
  if (bram_block_bits <= 0) bad("bram block size must be positive");
  if (vivado_ff_factor <= 0 || vivado_lut_factor <= 0)
    bad("post-synthesis factors must be positive");
  if (latency_strategy_max_params < 0) bad("feasibility threshold must be non-negative");
}

CalibConstants default_calibration() { return {}; }

CalibConstants load_calibration(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    bad(path.string() + ": " + e.what());
  }
  CalibConstants c;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "step_base")
        c.step_base = value.get<double>();
      else if (key == "step_per_reuse")
        c.step_per_reuse = value.get<double>();
      else if (key == "band_per_hidden")
        c.band_per_hidden = value.get<double>();
      else if (key == "pipeline_depth")
        c.pipeline_depth = value.get<double>();
      else if (key == "latency_strategy_max_params")
        c.latency_strategy_max_params = value.get<long long>();
      else if (key == "ff_per_mult_bit")
        c.ff_per_mult_bit = value.get<double>();
      else if (key == "lut_per_mult_bit")
        c.lut_per_mult_bit = value.get<double>();
      else if (key == "lut_table_divisor")
        c.lut_table_divisor = value.get<double>();
      else if (key == "gate_table_bits")
        c.gate_table_bits = value.get<double>();
      else if (key == "softmax_table_bits")
        c.softmax_table_bits = value.get<double>();
      else if (key == "bram_block_bits")
        c.bram_block_bits = value.get<long long>();
      else if (key == "vivado_ff_factor")
        c.vivado_ff_factor = value.get<double>();
      else if (key == "vivado_lut_factor")
        c.vivado_lut_factor = value.get<double>();
      else
        bad(path.string() + ": unknown calibration key '" + key + "'");
    } catch (const nlohmann::json::exception& e) {
      bad(path.string() + ": key '" + key + "': " + e.what());
    }
  }
  c.validate();
  return c;
}

void HardwareConfig::validate() const {
  if (reuse.kernel < 1 || reuse.recurrent < 1) bad("reuse components must be >= 1");
  if (clock_mhz <= 0) bad("clock must be positive");
  if (dsp_input_width < 1) bad("dsp input width must be positive");
}

namespace {

// Shared per-layer walk so the public operations can never disagree.
std::vector<LayerCost> layer_costs(const NetworkModel& m, const HardwareConfig& hw,
                                   const fxp::FxpFormat& precision,
                                   const CalibConstants& calib) {
  m.validate();
  hw.validate();
  calib.validate();
  precision.validate();

  const double w_bits = precision.total_bits;
  const long long dsp_scale = precision.total_bits > hw.dsp_input_width ? 2 : 1;
  const long long x = hw.reuse.kernel;
  const long long y = hw.reuse.recurrent;
  const bool replicate = hw.mode == engine::Mode::non_static;
  const bool weights_in_bram = hw.strategy == Strategy::resource;

  const auto mults = model::count_multiplies(m);
  const auto params = model::count_parameters(m);

  std::vector<LayerCost> out;
  for (std::size_t i = 0; i < m.layers.size(); ++i) {
    const auto& spec = m.layers[i].spec;
    LayerCost cost;
    cost.layer = std::to_string(i) + ":" + model::kind_name(spec.kind);
    cost.kind = spec.kind;
    const long long copies =
        (model::is_recurrent(spec.kind) && replicate) ? spec.seq_len : 1;

    if (model::is_recurrent(spec.kind)) {
      const long long mk = mults.per_layer[i].kernel_per_step;
      const long long mr = mults.per_layer[i].recurrent_per_step;
      cost.res.dsp = copies * dsp_scale * (ceil_div(mk, x) + ceil_div(mr, y));
      cost.ff_reuse_term =
          double(copies) * calib.ff_per_mult_bit * w_bits *
          (double(mk) / double(x) + double(mr) / double(y));
      cost.lut_reuse_term =
          double(copies) * calib.lut_per_mult_bit * w_bits *
          (double(mk) / double(x) + double(mr) / double(y));
      const double state_bits =
          double(copies) * w_bits * spec.units * (spec.kind == LayerKind::lstm ? 2 : 1);
      const double table_luts =
          double(copies) * 2.0 * calib.gate_table_bits / calib.lut_table_divisor;
      cost.res.ff = llround(calib.vivado_ff_factor * (cost.ff_reuse_term + state_bits));
      cost.res.lut = llround(calib.vivado_lut_factor * (cost.lut_reuse_term + table_luts));
      if (weights_in_bram)
        cost.res.bram = copies * ceil_div(params.per_layer[i].params *
                                              precision.total_bits,
                                          calib.bram_block_bits);
    } else if (spec.kind == LayerKind::dense) {
      const long long md = mults.per_layer[i].dense_total;
      cost.res.dsp = dsp_scale * ceil_div(md, x);
      cost.ff_reuse_term = calib.ff_per_mult_bit * w_bits * double(md) / double(x);
      cost.lut_reuse_term = calib.lut_per_mult_bit * w_bits * double(md) / double(x);
      const double state_bits = w_bits * spec.units;
      cost.res.ff = llround(calib.vivado_ff_factor * (cost.ff_reuse_term + state_bits));
      cost.res.lut = llround(calib.vivado_lut_factor * cost.lut_reuse_term);
      if (weights_in_bram)
        cost.res.bram = ceil_div(params.per_layer[i].params * precision.total_bits,
                                 calib.bram_block_bits);
    } else {
      // activation layers: table area only
      double table_luts = 0.0;
      switch (spec.kind) {
        case LayerKind::sigmoid:
        case LayerKind::tanh_act:
          table_luts = calib.gate_table_bits / calib.lut_table_divisor;
          break;
        case LayerKind::softmax:
          table_luts = calib.softmax_table_bits / calib.lut_table_divisor;
          break;
        case LayerKind::relu:
          table_luts = w_bits * spec.units;  // one mux slice per bit
          break;
        default:
          break;
      }
      cost.res.lut = llround(calib.vivado_lut_factor * table_luts);
    }
    out.push_back(std::move(cost));
  }
  return out;
}

}  // namespace

long long estimate_dsp(const NetworkModel& m, const HardwareConfig& hw,
                       const fxp::FxpFormat& precision, const CalibConstants& calib) {
  long long total = 0;
  for (const auto& layer : layer_costs(m, hw, precision, calib)) total += layer.res.dsp;
  return total;
}

LatencyII estimate_latency_ii(const NetworkModel& m, const HardwareConfig& hw,
                              const CalibConstants& calib) {
  m.validate();
  hw.validate();
  calib.validate();

  LatencyII out;
  const model::Layer* rnn = m.recurrent_layer();
  const double seq = rnn ? double(rnn->spec.seq_len) : 0.0;
  const double hidden = rnn ? double(rnn->spec.units) : 0.0;

  if (hw.strategy == Strategy::latency) {
    const double cycles = std::max(1.0, seq) * calib.pipeline_depth;
    out.latency_cycles_min = out.latency_cycles_max = out.latency_cycles = cycles;
    out.ii_cycles = hw.mode == engine::Mode::static_ ? cycles : 1.0;
    const long long total_params = model::count_parameters(m).total;
    if (total_params >= calib.latency_strategy_max_params)
      out.warnings.push_back(
          "latency strategy above the feasibility threshold: " +
          std::to_string(total_params) + " parameters >= " +
          std::to_string(calib.latency_strategy_max_params));
    return out;
  }

  const double step_fast =
      calib.step_base +
      calib.step_per_reuse * double(std::max(hw.reuse.kernel, hw.reuse.recurrent));
  double head = 0.0;
  for (const auto& layer : m.layers)
    if (layer.spec.kind == LayerKind::dense)
      head += calib.step_base + calib.step_per_reuse * double(hw.reuse.kernel);

  const double step_band = calib.band_per_hidden * hidden;
  out.latency_cycles_min = seq * step_fast + head;
  out.latency_cycles_max = out.latency_cycles_min + seq * step_band;
  out.latency_cycles = 0.5 * (out.latency_cycles_min + out.latency_cycles_max);
  out.ii_cycles = hw.mode == engine::Mode::static_
                      ? out.latency_cycles
                      : (rnn ? step_fast + 0.5 * step_band : out.latency_cycles);
  return out;
}

FfLutBram estimate_ff_lut_bram(const NetworkModel& m, const HardwareConfig& hw,
                               const fxp::FxpFormat& precision,
                               const CalibConstants& calib) {
  FfLutBram out;
  for (const auto& layer : layer_costs(m, hw, precision, calib)) {
    out.ff += layer.res.ff;
    out.lut += layer.res.lut;
    out.bram += layer.res.bram;
  }
  return out;
}

BudgetCheck check_budget(const ResourceCount& use, const DeviceBudget& budget) {
  BudgetCheck b;
  b.device = budget.name;
  b.fits_dsp = use.dsp <= budget.dsp;
  b.fits_ff = use.ff <= budget.ff;
  b.fits_lut = use.lut <= budget.lut;
  b.fits_bram = use.bram <= budget.bram;
  b.fits = b.fits_dsp && b.fits_ff && b.fits_lut && b.fits_bram;
  auto util = [](long long u, long long cap) {
    return cap > 0 ? double(u) / double(cap) : 0.0;
  };
  b.util_dsp = util(use.dsp, budget.dsp);
  b.util_ff = util(use.ff, budget.ff);
  b.util_lut = util(use.lut, budget.lut);
  b.util_bram = util(use.bram, budget.bram);
  return b;
}

PerfEstimate estimate(const NetworkModel& m, const HardwareConfig& hw,
                      const fxp::FxpFormat& precision, const CalibConstants& calib) {
  PerfEstimate est;
  est.per_layer = layer_costs(m, hw, precision, calib);
  for (const auto& layer : est.per_layer) {
    est.total.dsp += layer.res.dsp;
    est.total.ff += layer.res.ff;
    est.total.lut += layer.res.lut;
    est.total.bram += layer.res.bram;
  }
  const LatencyII lat = estimate_latency_ii(m, hw, calib);
  est.latency_cycles_min = lat.latency_cycles_min;
  est.latency_cycles_max = lat.latency_cycles_max;
  est.latency_cycles = lat.latency_cycles;
  est.ii_cycles = lat.ii_cycles;
  est.warnings = lat.warnings;
  est.latency_us_min = lat.latency_cycles_min / hw.clock_mhz;
  est.latency_us_max = lat.latency_cycles_max / hw.clock_mhz;
  est.latency_us = lat.latency_cycles / hw.clock_mhz;
  est.throughput_hz = hw.clock_mhz * 1e6 / lat.ii_cycles;
  if (hw.budget) est.budget = check_budget(est.total, *hw.budget);
  return est;
}

std::vector<DeviceBudget> builtin_device_db() {
  return {
      {"xcku115-flvb2104-2-i", 5520, 1326720, 663360, 2160},
      {"xcu250-figd2104-2-e", 12288, 3456000, 1728000, 2688},
      {"vu9p-slr", 2280, 788160, 394080, 720},
  };
}

std::vector<DeviceBudget> load_device_db(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    bad(path.string() + ": " + e.what());
  }
  std::vector<DeviceBudget> db;
  try {
    for (const auto& [name, entry] : j.items()) {
      DeviceBudget d;
      d.name = name;
      d.dsp = entry.at("dsp").get<long long>();
      d.ff = entry.at("ff").get<long long>();
      d.lut = entry.at("lut").get<long long>();
      d.bram = entry.at("bram").get<long long>();
      if (d.dsp < 0 || d.ff < 0 || d.lut < 0 || d.bram < 0)
        bad(path.string() + ": negative budget for '" + name + "'");
      db.push_back(std::move(d));
    }
  } catch (const nlohmann::json::exception& e) {
    bad(path.string() + ": " + e.what());
  }
  if (db.empty()) bad(path.string() + ": no devices");
  return db;
}

const DeviceBudget* find_device(const std::vector<DeviceBudget>& db,
                                const std::string& name) {
  for (const auto& d : db)
    if (d.name == name) return &d;
  return nullptr;
}

}  // namespace rnnfx::perf
