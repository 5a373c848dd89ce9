#include "rnnfx/fxp.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace rnnfx::fxp {

namespace {

using int128 = __int128;
using uint128 = unsigned __int128;

// v / 2^shift, exact integer arithmetic.  Arithmetic right shift is floor;
// nearest_even inspects the discarded remainder.  shift >= 1.
int128 shift_right_rounded(int128 v, int shift, Rounding mode) {
  if (shift >= 127) {
    // |v| < 2^126, so the true quotient lies strictly inside (-1/2, 1/2).
    if (mode == Rounding::nearest_even) return 0;
    return v < 0 ? -1 : 0;
  }
  int128 q = v >> shift;
  if (mode == Rounding::nearest_even) {
    const int128 r = v - (q << shift);  // in [0, 2^shift)
    const int128 half = int128(1) << (shift - 1);
    if (r > half || (r == half && (q & 1))) ++q;
  }
  return q;
}

// Wraps the low total_bits of q (two's complement for signed formats).
std::int64_t wrap_bits(int128 q, const FxpFormat& fmt) {
  auto low = static_cast<std::uint64_t>(static_cast<uint128>(q));
  const int w = fmt.total_bits;
  if (fmt.is_signed) {
    if (w < 64) {
      low <<= (64 - w);
      return static_cast<std::int64_t>(low) >> (64 - w);  // sign extend
    }
    return static_cast<std::int64_t>(low);
  }
  const std::uint64_t mask = (w >= 64) ? ~0ull : ((1ull << w) - 1ull);
  return static_cast<std::int64_t>(low & mask);
}

std::int64_t fit_raw(int128 q, const FxpFormat& fmt, Overflow overflow) {
  const int128 lo = fmt.raw_min();
  const int128 hi = fmt.raw_max();
  if (q >= lo && q <= hi) return static_cast<std::int64_t>(q);
  if (overflow == Overflow::saturate) return q < lo ? fmt.raw_min() : fmt.raw_max();
  return wrap_bits(q, fmt);
}

}  // namespace

std::int64_t FxpFormat::raw_min() const {
  if (!is_signed) return 0;
  if (total_bits == 64) return std::numeric_limits<std::int64_t>::min();
  return -(std::int64_t(1) << (total_bits - 1));
}

std::int64_t FxpFormat::raw_max() const {
  if (is_signed) {
    if (total_bits == 64) return std::numeric_limits<std::int64_t>::max();
    return (std::int64_t(1) << (total_bits - 1)) - 1;
  }
  return static_cast<std::int64_t>((~0ull) >> (64 - total_bits));
}

double FxpFormat::min_value() const { return std::ldexp(double(raw_min()), -frac_bits()); }
double FxpFormat::max_value() const { return std::ldexp(double(raw_max()), -frac_bits()); }
double FxpFormat::step() const { return std::ldexp(1.0, -frac_bits()); }

bool FxpFormat::valid() const {
  if (total_bits < 1 || total_bits > 64) return false;
  if (!is_signed && total_bits > 63) return false;
  if (integer_bits < 0 || integer_bits > total_bits) return false;
  return true;
}

void FxpFormat::validate() const {
  if (valid()) return;
  throw std::invalid_argument("invalid fixed-point format " + to_string() +
                              " (need 1 <= W <= 64, W <= 63 unsigned, 0 <= I <= W)");
}

std::string FxpFormat::to_string() const {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%sfixed<%d,%d>", is_signed ? "" : "u", total_bits,
                integer_bits);
  return buf;
}

FxpFormat parse_format(const std::string& text) {
  FxpFormat fmt;
  int w = 0, i = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "fixed< %d , %d %c", &w, &i, &tail) == 3 && tail == '>') {
    fmt.is_signed = true;
  } else if (std::sscanf(text.c_str(), "ufixed< %d , %d %c", &w, &i, &tail) == 3 &&
             tail == '>') {
    fmt.is_signed = false;
  } else {
    throw std::invalid_argument("cannot parse precision '" + text +
                                "' (expected fixed<W,I> or ufixed<W,I>)");
  }
  fmt.total_bits = w;
  fmt.integer_bits = i;
  fmt.validate();
  return fmt;
}

double FxpValue::to_double() const { return std::ldexp(double(raw), -format.frac_bits()); }

FxpValue from_raw(std::int64_t raw, const FxpFormat& fmt) {
  fmt.validate();
  if (raw < fmt.raw_min() || raw > fmt.raw_max())
    throw std::invalid_argument("raw value out of range for " + fmt.to_string());
  return FxpValue{raw, fmt};
}

FxpValue quantize(double x, const FxpFormat& fmt, QuantPolicy policy) {
  fmt.validate();
  if (!std::isfinite(x)) throw std::invalid_argument("cannot quantize non-finite value");

  // Decompose x = mi * 2^e exactly; mi has at most 53 significant bits.
  int e = 0;
  const double m = std::frexp(x, &e);
  const auto mi = static_cast<std::int64_t>(std::ldexp(m, 53));
  e -= 53;

  // Scaled value x * 2^F = mi * 2^s.
  const int s = e + fmt.frac_bits();
  int128 q;
  if (mi == 0) {
    q = 0;
  } else if (s >= 0) {
    if (s > 74) {
      // Magnitude at least 2^126: beyond any representable raw, and
      // mi * 2^s mod 2^64 is zero once s >= 64.
      if (policy.overflow == Overflow::saturate)
        return FxpValue{mi < 0 ? fmt.raw_min() : fmt.raw_max(), fmt};
      return FxpValue{0, fmt};
    }
    q = int128(mi) << s;
  } else {
    q = shift_right_rounded(int128(mi), -s, policy.rounding);
  }
  return FxpValue{fit_raw(q, fmt, policy.overflow), fmt};
}

std::int64_t requantize_raw(__int128 acc, int src_frac_bits, const FxpFormat& fmt,
                            QuantPolicy policy) {
  const int shift = src_frac_bits - fmt.frac_bits();
  if (shift > 0) return fit_raw(shift_right_rounded(acc, shift, policy.rounding), fmt, policy.overflow);
  if (shift == 0) return fit_raw(acc, fmt, policy.overflow);

  // Widening the fractional part: raw = acc * 2^-shift, overflow-checked
  // before shifting so the 128-bit intermediate cannot wrap silently.
  const int lshift = -shift;
  if (lshift >= 127) {
    if (acc == 0) return 0;
    if (policy.overflow == Overflow::saturate)
      return acc < 0 ? fmt.raw_min() : fmt.raw_max();
    return 0;  // acc * 2^127 mod 2^W == 0 for W <= 64
  }
  const int128 hi = int128(fmt.raw_max()) >> lshift;
  const int128 lo = -((-int128(fmt.raw_min())) >> lshift);
  if (acc > hi || acc < lo) {
    if (policy.overflow == Overflow::saturate)
      return acc < lo ? fmt.raw_min() : fmt.raw_max();
    // Modular result: only the low 64 bits of acc * 2^lshift can survive.
    const std::uint64_t low =
        (lshift >= 64) ? 0ull : static_cast<std::uint64_t>(static_cast<uint128>(acc)) << lshift;
    return wrap_bits(int128(static_cast<std::int64_t>(low)), fmt);
  }
  return fit_raw(acc << lshift, fmt, policy.overflow);
}

FxpValue fxp_add(const FxpValue& a, const FxpValue& b, const FxpFormat& out_fmt,
                 QuantPolicy policy) {
  out_fmt.validate();
  const int fa = a.format.frac_bits();
  const int fb = b.format.frac_bits();
  const int fc = fa > fb ? fa : fb;
  const int128 va = int128(a.raw) << (fc - fa);
  const int128 vb = int128(b.raw) << (fc - fb);
  return FxpValue{requantize_raw(va + vb, fc, out_fmt, policy), out_fmt};
}

FxpValue fxp_mul(const FxpValue& a, const FxpValue& b, const FxpFormat& out_fmt,
                 QuantPolicy policy) {
  out_fmt.validate();
  const int128 prod = int128(a.raw) * int128(b.raw);
  return FxpValue{requantize_raw(prod, a.format.frac_bits() + b.format.frac_bits(), out_fmt, policy),
                  out_fmt};
}

}  // namespace rnnfx::fxp
