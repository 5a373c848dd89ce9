#include "rnnfx/activation.hpp"

#include <cmath>
#include <stdexcept>

namespace rnnfx::act {

namespace {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace

void LutConfig::validate() const {
  if (!is_power_of_two(table_size) || table_size < 2)
    throw std::invalid_argument("LUT table size must be a power of two >= 2, got " +
                                std::to_string(table_size));
  if (!(input_range > 0.0) || !std::isfinite(input_range))
    throw std::invalid_argument("LUT input range must be positive and finite");
  entry_format.validate();
}

LutConfig default_sigmoid_config() { return LutConfig{}; }
LutConfig default_tanh_config() { return LutConfig{}; }

LutConfig default_softmax_exp_config() {
  return LutConfig{4096, 8.0, {false, 18, 1}, SamplePoint::left_edge};
}

LutConfig default_softmax_inv_config() {
  return LutConfig{4096, 8.0, {false, 18, 1}, SamplePoint::left_edge};
}

double reference_eval(Function f, double x) {
  switch (f) {
    case Function::sigmoid:
      return 1.0 / (1.0 + std::exp(-x));
    case Function::tanh_fn:
      return std::tanh(x);
    case Function::exp_fn:
      return std::exp(x);
    case Function::inverse:
      return 1.0 / x;
  }
  throw std::logic_error("unknown activation function");
}

LutTable::LutTable(Function f, const LutConfig& cfg) : fn_(f), cfg_(cfg) {
  cfg_.validate();
  const double r = cfg_.input_range;
  // Shifted-input exp only ever sees non-positive values; the reciprocal only
  // positive sums.  The sigmoid-shaped domains stay symmetric about zero.
  switch (f) {
    case Function::sigmoid:
    case Function::tanh_fn:
      lo_ = -r;
      width_ = 2.0 * r / cfg_.table_size;
      break;
    case Function::exp_fn:
      lo_ = -r;
      width_ = r / cfg_.table_size;
      break;
    case Function::inverse:
      lo_ = 0.0;
      width_ = r / cfg_.table_size;
      break;
  }

  const double offset = cfg_.sample_point == SamplePoint::midpoint ? 0.5 : 0.0;
  const fxp::QuantPolicy entry_policy{fxp::Rounding::nearest_even, fxp::Overflow::saturate};
  entries_.reserve(cfg_.table_size);
  for (int k = 0; k < cfg_.table_size; ++k) {
    const double xs = lo_ + (k + offset) * width_;
    double y;
    if (fn_ == Function::inverse && xs <= 0.0) {
      // 1/x diverges at the domain edge; pin the entry to the format maximum.
      y = cfg_.entry_format.max_value();
    } else {
      y = reference_eval(fn_, xs);
      if (!std::isfinite(y)) y = y > 0 ? cfg_.entry_format.max_value() : cfg_.entry_format.min_value();
    }
    entries_.push_back(fxp::quantize(y, cfg_.entry_format, entry_policy).raw);
  }
}

int LutTable::bin_of_raw(std::int64_t raw, int frac_bits) const {
  const double x = std::ldexp(double(raw), -frac_bits);
  const double pos = (x - lo_) / width_;
  if (pos <= 0.0) return 0;
  if (pos >= cfg_.table_size) return cfg_.table_size - 1;
  return static_cast<int>(pos);
}

double LutTable::sample_x(int bin) const {
  const double offset = cfg_.sample_point == SamplePoint::midpoint ? 0.5 : 0.0;
  return lo_ + (bin + offset) * width_;
}

fxp::FxpValue LutTable::entry(int bin) const {
  return fxp::FxpValue{entries_.at(bin), cfg_.entry_format};
}

std::int64_t LutTable::eval_raw(std::int64_t raw, int frac_bits) const {
  return entries_[bin_of_raw(raw, frac_bits)];
}

fxp::FxpValue LutTable::eval(const fxp::FxpValue& x) const {
  return fxp::FxpValue{eval_raw(x.raw, x.format.frac_bits()), cfg_.entry_format};
}

fxp::FxpValue lut_eval(Function f, const fxp::FxpValue& x, const LutConfig& cfg) {
  return LutTable(f, cfg).eval(x);
}

fxp::FxpValue relu(const fxp::FxpValue& x) {
  return x.raw < 0 ? fxp::FxpValue{0, x.format} : x;
}

std::vector<fxp::FxpValue> softmax_lut(std::span<const fxp::FxpValue> v,
                                       const LutConfig& cfg_exp, const LutConfig& cfg_inv,
                                       const fxp::FxpFormat& out_fmt,
                                       fxp::QuantPolicy policy) {
  return softmax_with_tables(v, LutTable(Function::exp_fn, cfg_exp),
                             LutTable(Function::inverse, cfg_inv), out_fmt, policy);
}

std::vector<fxp::FxpValue> softmax_with_tables(std::span<const fxp::FxpValue> v,
                                               const LutTable& exp_table,
                                               const LutTable& inv_table,
                                               const fxp::FxpFormat& out_fmt,
                                               fxp::QuantPolicy policy) {
  if (v.empty()) throw std::invalid_argument("softmax input must be non-empty");
  out_fmt.validate();
  const fxp::FxpFormat in_fmt = v.front().format;
  for (const auto& e : v)
    if (e.format != in_fmt)
      throw std::invalid_argument("softmax inputs must share one format");

  const int f_in = in_fmt.frac_bits();
  const int f_exp = exp_table.entry_format().frac_bits();
  const int f_inv = inv_table.entry_format().frac_bits();

  std::int64_t max_raw = v.front().raw;
  for (const auto& e : v)
    if (e.raw > max_raw) max_raw = e.raw;

  // Shifted differences need one extra bit beyond the input format, so they
  // are looked up as bare (raw, frac) pairs rather than FxpValues.
  std::vector<std::int64_t> exps(v.size());
  std::int64_t sum = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    exps[i] = exp_table.eval_raw(v[i].raw - max_raw, f_in);
    sum += exps[i];
  }
  const std::int64_t inv = inv_table.eval_raw(sum, f_exp);

  // Probabilities cannot exceed one; keep the cap inside the output range.
  const __int128 one = __int128(1) << out_fmt.frac_bits();
  const std::int64_t cap =
      one <= out_fmt.raw_max() ? static_cast<std::int64_t>(one) : out_fmt.raw_max();

  std::vector<fxp::FxpValue> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::int64_t y = fxp::requantize_raw(__int128(exps[i]) * inv, f_exp + f_inv, out_fmt,
                                         {policy.rounding, fxp::Overflow::saturate});
    if (y > cap) y = cap;
    out.push_back(fxp::FxpValue{y, out_fmt});
  }
  return out;
}

}  // namespace rnnfx::act
