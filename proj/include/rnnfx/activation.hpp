#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rnnfx/fxp.hpp"

namespace rnnfx::act {

enum class Function { sigmoid, tanh_fn, exp_fn, inverse };

// Where inside each bin the stored sample is taken.  Left-edge sampling makes
// the entry at x = 0 exact for odd functions and for sigmoid's midpoint;
// midpoint sampling halves the worst-case interpolation error instead.
enum class SamplePoint { left_edge, midpoint };

struct LutConfig {
  int table_size = 1024;       // power of two
  double input_range = 8.0;    // r; the domain spans [-r, r) (see below)
  fxp::FxpFormat entry_format = {true, 18, 2};
  SamplePoint sample_point = SamplePoint::left_edge;

  void validate() const;  // throws std::invalid_argument
};

LutConfig default_sigmoid_config();
LutConfig default_tanh_config();
// Softmax runs on inputs shifted by the vector max, so its exp table only
// needs [-r, 0); the reciprocal table covers sums in [0, r).
LutConfig default_softmax_exp_config();
LutConfig default_softmax_inv_config();

// The function value, evaluated exactly in double precision.
double reference_eval(Function f, double x);

// Precomputed lookup table over the function's domain:
//   sigmoid/tanh: [-r, r)    exp: [-r, 0)    inverse: [0, r)
// Inputs outside the domain clamp to the first / last bin.
class LutTable {
 public:
  LutTable(Function f, const LutConfig& cfg);

  fxp::FxpValue eval(const fxp::FxpValue& x) const;
  std::int64_t eval_raw(std::int64_t raw, int frac_bits) const;  // returns entry raw

  int bin_of_raw(std::int64_t raw, int frac_bits) const;
  double sample_x(int bin) const;
  fxp::FxpValue entry(int bin) const;

  Function function() const { return fn_; }
  const fxp::FxpFormat& entry_format() const { return cfg_.entry_format; }
  int size() const { return cfg_.table_size; }
  double domain_lo() const { return lo_; }
  double domain_hi() const { return lo_ + width_ * cfg_.table_size; }
  double bin_width() const { return width_; }

 private:
  Function fn_;
  LutConfig cfg_;
  double lo_ = 0.0;
  double width_ = 0.0;
  std::vector<std::int64_t> entries_;
};

// One-shot table lookup; builds the table on each call, so hot paths should
// hold a LutTable instead.
fxp::FxpValue lut_eval(Function f, const fxp::FxpValue& x, const LutConfig& cfg);

// Exact: negative values clamp to zero in the input's own format.
fxp::FxpValue relu(const fxp::FxpValue& x);

// LUT softmax: subtracts the vector max, exponentiates through cfg_exp's
// table, and multiplies by the reciprocal of the summed exponentials from
// cfg_inv's table.  Outputs are quantized into out_fmt and capped at 1.
std::vector<fxp::FxpValue> softmax_lut(std::span<const fxp::FxpValue> v,
                                       const LutConfig& cfg_exp, const LutConfig& cfg_inv,
                                       const fxp::FxpFormat& out_fmt,
                                       fxp::QuantPolicy policy = {});

// Same computation against caller-owned tables (exp_fn and inverse).
std::vector<fxp::FxpValue> softmax_with_tables(std::span<const fxp::FxpValue> v,
                                               const LutTable& exp_table,
                                               const LutTable& inv_table,
                                               const fxp::FxpFormat& out_fmt,
                                               fxp::QuantPolicy policy = {});

}  // namespace rnnfx::act
