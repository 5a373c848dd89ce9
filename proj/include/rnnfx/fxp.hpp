#pragma once

#include <cstdint>
#include <string>

namespace rnnfx::fxp {

enum class Rounding { truncate, nearest_even };
enum class Overflow { saturate, wrap };

struct QuantPolicy {
  Rounding rounding = Rounding::truncate;
  Overflow overflow = Overflow::saturate;

  friend bool operator==(const QuantPolicy&, const QuantPolicy&) = default;
};

// Fixed-point format: total_bits = W, integer_bits = I (sign bit counts
// toward I for signed formats), frac_bits = W - I.  Values are raw integers
// scaled by 2^-frac_bits.  Raw values are carried in int64_t, which caps
// unsigned formats at 63 bits.
struct FxpFormat {
  bool is_signed = true;
  int total_bits = 16;
  int integer_bits = 6;

  int frac_bits() const { return total_bits - integer_bits; }
  std::int64_t raw_min() const;
  std::int64_t raw_max() const;
  double min_value() const;
  double max_value() const;
  double step() const;  // granularity, 2^-frac_bits

  bool valid() const;
  void validate() const;  // throws std::invalid_argument when not valid()

  // fixed<W,I> or ufixed<W,I>
  std::string to_string() const;

  friend bool operator==(const FxpFormat&, const FxpFormat&) = default;
};

// Parses "fixed<W,I>" / "ufixed<W,I>".  Throws std::invalid_argument on
// malformed text or an invalid format.
FxpFormat parse_format(const std::string& text);

// One fixed-point number: raw integer in units of 2^-frac_bits.
struct FxpValue {
  std::int64_t raw = 0;
  FxpFormat format;

  double to_double() const;

  friend bool operator==(const FxpValue&, const FxpValue&) = default;
};

FxpValue from_raw(std::int64_t raw, const FxpFormat& fmt);

// Nearest representable value under the policy.  Truncation rounds toward
// minus infinity in value space; nearest_even breaks ties to the even raw.
// Non-finite input throws std::invalid_argument.
FxpValue quantize(double x, const FxpFormat& fmt, QuantPolicy policy = {});

// Exact sum / product, requantized once into out_fmt.
FxpValue fxp_add(const FxpValue& a, const FxpValue& b, const FxpFormat& out_fmt,
                 QuantPolicy policy = {});
FxpValue fxp_mul(const FxpValue& a, const FxpValue& b, const FxpFormat& out_fmt,
                 QuantPolicy policy = {});

// Requantizes a widened accumulator carrying src_frac_bits fractional bits
// into fmt.  This is the single post-accumulation quantization point used for
// dot products: products are summed exactly in 128-bit and rounded here once.
std::int64_t requantize_raw(__int128 acc, int src_frac_bits, const FxpFormat& fmt,
                            QuantPolicy policy);

}  // namespace rnnfx::fxp
