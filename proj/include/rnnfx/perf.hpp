#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rnnfx/engine.hpp"
#include "rnnfx/fxp.hpp"
#include "rnnfx/model.hpp"

namespace rnnfx::perf {

// Reuse factor R = (X, Y): how many multiplications each DSP serves in the
// kernel (X) and recurrent-kernel (Y) matrix products.
struct ReuseFactor {
  int kernel = 1;
  int recurrent = 1;

  friend bool operator==(const ReuseFactor&, const ReuseFactor&) = default;
};

// Accepts "X:Y", "(X,Y)", or a single integer applied to both.
ReuseFactor parse_reuse(const std::string& text);
std::string reuse_to_string(const ReuseFactor& r);

// resource: weights in BRAM, multipliers time-shared by R.
// latency: everything unrolled into fabric; feasible for small models only.
enum class Strategy { resource, latency };
Strategy strategy_from_name(const std::string& name);
std::string strategy_name(Strategy s);

// Every constant of the cost model in one editable bundle.  The latency and
// area forms are linear fits; the defaults reproduce the calibration anchors
// in the tests.
struct CalibConstants {
  double step_base = 18.0;          // per-step latency floor, cycles
  double step_per_reuse = 1.0;      // extra cycles per unit of max(X, Y)
  double band_per_hidden = 2.0;     // latency spread per hidden unit per step
  double pipeline_depth = 17.0;     // latency-strategy cycles per step
  long long latency_strategy_max_params = 40000;
  double ff_per_mult_bit = 3.0;     // FFs per multiplier bit, scaled by 1/R
  double lut_per_mult_bit = 8.0;    // LUTs per multiplier bit, scaled by 1/R
  double lut_table_divisor = 64.0;  // table bits folded into LUTs
  double gate_table_bits = 18432.0;     // one 1024 x 18b activation bank
  double softmax_table_bits = 147456.0; // two 4096 x 18b banks
  long long bram_block_bits = 36864;
  double vivado_ff_factor = 1.0;    // optional post-synthesis multipliers
  double vivado_lut_factor = 1.0;

  void validate() const;
};

CalibConstants default_calibration();
// JSON file; any subset of the field names above overrides the default.
CalibConstants load_calibration(const std::filesystem::path& path);

struct DeviceBudget {
  std::string name;
  long long dsp = 0;
  long long ff = 0;
  long long lut = 0;
  long long bram = 0;
};

struct HardwareConfig {
  ReuseFactor reuse;
  Strategy strategy = Strategy::resource;
  engine::Mode mode = engine::Mode::static_;
  double clock_mhz = 200.0;
  int dsp_input_width = 18;
  std::optional<DeviceBudget> budget;

  void validate() const;
};

struct ResourceCount {
  long long dsp = 0;
  long long ff = 0;
  long long lut = 0;
  long long bram = 0;
};

struct LayerCost {
  std::string layer;
  model::LayerKind kind = model::LayerKind::dense;
  ResourceCount res;
  // The 1/R-scaled multiplier area before integer rounding; doubling both
  // reuse components halves these exactly.
  double ff_reuse_term = 0.0;
  double lut_reuse_term = 0.0;
};

struct BudgetCheck {
  std::string device;
  bool fits_dsp = false, fits_ff = false, fits_lut = false, fits_bram = false;
  bool fits = false;
  double util_dsp = 0.0, util_ff = 0.0, util_lut = 0.0, util_bram = 0.0;
};

struct LatencyII {
  double latency_cycles_min = 0.0;
  double latency_cycles_max = 0.0;
  double latency_cycles = 0.0;  // midpoint of the band, the headline number
  double ii_cycles = 0.0;
  std::vector<std::string> warnings;
};

struct PerfEstimate {
  ResourceCount total;
  std::vector<LayerCost> per_layer;
  double latency_cycles_min = 0.0;
  double latency_cycles_max = 0.0;
  double latency_cycles = 0.0;
  double latency_us_min = 0.0;
  double latency_us_max = 0.0;
  double latency_us = 0.0;
  double ii_cycles = 0.0;
  double throughput_hz = 0.0;
  std::vector<std::string> warnings;
  std::optional<BudgetCheck> budget;
};

// DSP blocks: each matrix product contributes ceil(multiplies / reuse),
// doubled when the working width exceeds the DSP input port.  Non-static mode
// replicates the recurrent layer once per time step.
long long estimate_dsp(const model::NetworkModel& m, const HardwareConfig& hw,
                       const fxp::FxpFormat& precision,
                       const CalibConstants& calib = {});

// Latency band and initiation interval.  Resource strategy: each step costs
// step_base + step_per_reuse * max(X, Y) cycles at the fast edge, and the
// band widens by band_per_hidden per hidden unit per step; the headline
// latency and the static II sit at the band midpoint, the non-static II at
// the per-step midpoint.  Latency strategy: a fully pipelined step costs
// pipeline_depth cycles; the static II equals the latency and the non-static
// II is one.
LatencyII estimate_latency_ii(const model::NetworkModel& m, const HardwareConfig& hw,
                              const CalibConstants& calib = {});

struct FfLutBram {
  long long ff = 0;
  long long lut = 0;
  long long bram = 0;
};

// Flip-flops and LUTs scale with multiplier bits over reuse, plus state bits
// and activation-table terms; BRAM holds the weights under the resource
// strategy only.
FfLutBram estimate_ff_lut_bram(const model::NetworkModel& m, const HardwareConfig& hw,
                               const fxp::FxpFormat& precision,
                               const CalibConstants& calib = {});

BudgetCheck check_budget(const ResourceCount& use, const DeviceBudget& budget);

// The full report: resources, latency band, II, throughput = clock / II,
// per-layer breakdown, and the budget check when a device is configured.
PerfEstimate estimate(const model::NetworkModel& m, const HardwareConfig& hw,
                      const fxp::FxpFormat& precision,
                      const CalibConstants& calib = {});

std::vector<DeviceBudget> builtin_device_db();
std::vector<DeviceBudget> load_device_db(const std::filesystem::path& path);
const DeviceBudget* find_device(const std::vector<DeviceBudget>& db,
                                const std::string& name);

}  // namespace rnnfx::perf
