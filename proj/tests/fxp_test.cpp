#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "rnnfx/fxp.hpp"

using namespace rnnfx::fxp;
using boost::multiprecision::cpp_int;

namespace {

// Deterministic 64-bit generator for test inputs.
struct Rng {
  std::uint64_t s;
  std::uint64_t next() {
    std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double uniform() { return double(next() >> 11) * 0x1p-53; }
};

// Exact-rational reference for quantization, written against the contract
// rather than the library internals: scale by 2^F as an exact fraction,
// round in integer arithmetic, then apply the overflow rule.
struct Rational {
  cpp_int num;
  cpp_int den;  // > 0
};

Rational rational_from_double(double x) {
  REQUIRE(std::isfinite(x));
  Rational r{0, 1};
  if (x == 0.0) return r;
  int e = 0;
  double m = std::frexp(x, &e);
  // 53 doublings keep every bit of the mantissa in an integer.
  long long mi = static_cast<long long>(std::ldexp(m, 53));
  e -= 53;
  r.num = mi;
  if (e >= 0)
    r.num <<= e;
  else
    r.den = cpp_int(1) << -e;
  return r;
}

Rational rational_mul(const Rational& a, const Rational& b) {
  return Rational{a.num * b.num, a.den * b.den};
}

Rational rational_add(const Rational& a, const Rational& b) {
  return Rational{a.num * b.den + b.num * a.den, a.den * b.den};
}

std::int64_t oracle_round(Rational scaled, const FxpFormat& fmt, QuantPolicy p) {
  // Floor division (cpp_int '/' truncates toward zero).
  cpp_int q = scaled.num / scaled.den;
  if (q * scaled.den != scaled.num && scaled.num < 0) --q;
  if (p.rounding == Rounding::nearest_even) {
    const cpp_int rem2 = (scaled.num - q * scaled.den) * 2;
    if (rem2 > scaled.den || (rem2 == scaled.den && q % 2 != 0)) ++q;
  }
  const cpp_int lo = fmt.raw_min();
  const cpp_int hi = fmt.raw_max();
  if (q < lo || q > hi) {
    if (p.overflow == Overflow::saturate) {
      q = q < lo ? lo : hi;
    } else {
      const cpp_int mod = cpp_int(1) << fmt.total_bits;
      q = ((q % mod) + mod) % mod;
      if (fmt.is_signed && q >= (mod >> 1)) q -= mod;
    }
  }
  return q.convert_to<std::int64_t>();
}

std::int64_t oracle_quantize(double x, const FxpFormat& fmt, QuantPolicy p) {
  Rational r = rational_from_double(x);
  r.num <<= fmt.frac_bits();
  return oracle_round(r, fmt, p);
}

Rational rational_of(const FxpValue& v) {
  return Rational{cpp_int(v.raw), cpp_int(1) << v.format.frac_bits()};
}

FxpFormat random_format(Rng& rng) {
  FxpFormat f;
  f.is_signed = (rng.next() & 1) != 0;
  f.total_bits = 1 + int(rng.next() % (f.is_signed ? 64 : 63));
  f.integer_bits = int(rng.next() % (f.total_bits + 1));
  return f;
}

double random_value(Rng& rng) {
  const double u = rng.uniform() * 2.0 - 1.0;
  const int k = int(rng.next() % 81) - 40;
  return std::ldexp(u, k);
}

const QuantPolicy kPolicies[] = {
    {Rounding::truncate, Overflow::saturate},
    {Rounding::truncate, Overflow::wrap},
    {Rounding::nearest_even, Overflow::saturate},
    {Rounding::nearest_even, Overflow::wrap},
};

}  // namespace

TEST_CASE("format ranges and granularity") {
  FxpFormat u74{false, 7, 4};
  CHECK(u74.step() == 0.125);
  CHECK(u74.min_value() == 0.0);
  CHECK(u74.max_value() == 15.875);

  FxpFormat s42{true, 4, 2};
  CHECK(s42.min_value() == -2.0);
  CHECK(s42.max_value() == 1.75);
  CHECK(s42.step() == 0.25);

  FxpFormat s64{true, 64, 64};
  CHECK(s64.raw_max() == std::numeric_limits<std::int64_t>::max());
  CHECK(s64.raw_min() == std::numeric_limits<std::int64_t>::min());
}

TEST_CASE("format validation") {
  CHECK_THROWS_AS(FxpFormat({true, 0, 0}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(FxpFormat({true, 65, 4}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(FxpFormat({false, 64, 4}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(FxpFormat({true, 16, 17}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(FxpFormat({true, 16, -1}).validate(), std::invalid_argument);
  CHECK_NOTHROW(FxpFormat({true, 64, 0}).validate());
  CHECK_NOTHROW(FxpFormat({false, 63, 63}).validate());
}

TEST_CASE("format parse and print round-trip") {
  CHECK(parse_format("fixed<16,6>") == FxpFormat{true, 16, 6});
  CHECK(parse_format("ufixed<7,4>") == FxpFormat{false, 7, 4});
  CHECK(parse_format("fixed< 32 , 8 >") == FxpFormat{true, 32, 8});
  CHECK(FxpFormat{true, 16, 6}.to_string() == "fixed<16,6>");
  CHECK(FxpFormat{false, 7, 4}.to_string() == "ufixed<7,4>");
  CHECK_THROWS_AS(parse_format("float<16,6>"), std::invalid_argument);
  CHECK_THROWS_AS(parse_format("fixed<16>"), std::invalid_argument);
  CHECK_THROWS_AS(parse_format("fixed<65,4>"), std::invalid_argument);
  for (int i = 0; i < 200; ++i) {
    Rng rng{std::uint64_t(7000 + i)};
    const FxpFormat f = random_format(rng);
    CHECK(parse_format(f.to_string()) == f);
  }
}

TEST_CASE("saturation clamps out-of-range values") {
  // ufixed<7,4> covers 0 .. 15.875 in steps of 0.125.
  const FxpFormat u74{false, 7, 4};
  CHECK(quantize(20.0, u74).to_double() == 15.875);
  CHECK(quantize(-3.0, u74).to_double() == 0.0);
  CHECK(quantize(1e300, FxpFormat{true, 64, 64}).raw ==
        std::numeric_limits<std::int64_t>::max());
  CHECK(quantize(-1e300, FxpFormat{true, 64, 64}).raw ==
        std::numeric_limits<std::int64_t>::min());
}

TEST_CASE("truncation rounds toward minus infinity") {
  const FxpFormat s42{true, 4, 2};
  CHECK(quantize(-0.3, s42).to_double() == -0.5);
  CHECK(quantize(0.3, s42).to_double() == 0.25);
  CHECK(quantize(-0.26, s42).to_double() == -0.5);
}

TEST_CASE("round to nearest even breaks ties to even raw") {
  const FxpFormat s84{true, 8, 4};  // step 1/16
  const QuantPolicy rne{Rounding::nearest_even, Overflow::saturate};
  CHECK(quantize(3.0 / 32, s84, rne).raw == 2);   // tie between 1 and 2
  CHECK(quantize(1.0 / 32, s84, rne).raw == 0);   // tie between 0 and 1
  CHECK(quantize(-1.0 / 32, s84, rne).raw == 0);  // tie between -1 and 0
  CHECK(quantize(5.0 / 64, s84, rne).raw == 1);   // below midpoint
}

TEST_CASE("wrap keeps the low bits") {
  const FxpFormat s42{true, 4, 2};
  const QuantPolicy wrap{Rounding::truncate, Overflow::wrap};
  // 2.5 scales to raw 10, which wraps to -6 in 4 bits: value -1.5.
  CHECK(quantize(2.5, s42, wrap).to_double() == -1.5);
  CHECK(quantize(2.5, s42, wrap).raw == oracle_quantize(2.5, s42, wrap));
}

TEST_CASE("multiplication truncates at the output granularity") {
  const FxpFormat s63{true, 6, 3};  // step 1/8
  const FxpValue a = quantize(0.375, s63);
  const FxpValue b = quantize(0.375, s63);
  // Exact product 0.140625 truncates to 0.125 with 3 fractional bits.
  CHECK(fxp_mul(a, b, s63).to_double() == 0.125);
}

TEST_CASE("non-finite input is rejected") {
  const FxpFormat f{true, 16, 6};
  CHECK_THROWS_AS(quantize(std::nan(""), f), std::invalid_argument);
  CHECK_THROWS_AS(quantize(HUGE_VAL, f), std::invalid_argument);
  CHECK_THROWS_AS(quantize(-HUGE_VAL, f), std::invalid_argument);
}

TEST_CASE("from_raw validates range") {
  const FxpFormat u84{false, 8, 4};
  CHECK(from_raw(255, u84).to_double() == 15.9375);
  CHECK_THROWS_AS(from_raw(256, u84), std::invalid_argument);
  CHECK_THROWS_AS(from_raw(-1, u84), std::invalid_argument);
}

TEST_CASE("quantization is idempotent on representable values") {
  Rng rng{11};
  for (int i = 0; i < 20000; ++i) {
    const FxpFormat fmt = random_format(rng);
    const QuantPolicy p = kPolicies[rng.next() % 4];
    const FxpValue v = quantize(random_value(rng), fmt, p);
    if (fmt.total_bits <= 53) {  // to_double is exact in this regime
      CHECK(quantize(v.to_double(), fmt, p).raw == v.raw);
    }
  }
}

TEST_CASE("quantization is monotone under saturation") {
  Rng rng{12};
  for (int i = 0; i < 20000; ++i) {
    const FxpFormat fmt = random_format(rng);
    const Rounding r = (rng.next() & 1) ? Rounding::truncate : Rounding::nearest_even;
    const QuantPolicy p{r, Overflow::saturate};
    double a = random_value(rng);
    double b = random_value(rng);
    if (a > b) std::swap(a, b);
    CHECK(quantize(a, fmt, p).raw <= quantize(b, fmt, p).raw);
  }
}

TEST_CASE("results always lie inside the representable range") {
  Rng rng{13};
  for (int i = 0; i < 20000; ++i) {
    const FxpFormat fmt = random_format(rng);
    const QuantPolicy p = kPolicies[rng.next() % 4];
    const FxpValue v = quantize(random_value(rng), fmt, p);
    CHECK(v.raw >= fmt.raw_min());
    CHECK(v.raw <= fmt.raw_max());
  }
}

TEST_CASE("quantize agrees with the exact rational reference") {
  Rng rng{14};
  for (int i = 0; i < 100000; ++i) {
    const FxpFormat fmt = random_format(rng);
    const QuantPolicy p = kPolicies[rng.next() % 4];
    double x = random_value(rng);
    // Mix in values sitting exactly on and around the raw grid.
    if (rng.next() % 4 == 0 && fmt.total_bits <= 50) {
      const double span = double(fmt.raw_max() - fmt.raw_min());
      const std::int64_t k = fmt.raw_min() + std::int64_t(rng.uniform() * span);
      x = std::ldexp(double(k), -fmt.frac_bits());
      if (rng.next() % 2) x += std::ldexp(rng.uniform() - 0.5, -fmt.frac_bits());
    }
    const std::int64_t got = quantize(x, fmt, p).raw;
    const std::int64_t want = oracle_quantize(x, fmt, p);
    REQUIRE_MESSAGE(got == want, fmt.to_string(), " x=", x);
  }
}

TEST_CASE("add and mul requantize the exact result once") {
  Rng rng{15};
  for (int i = 0; i < 20000; ++i) {
    const FxpFormat fa = random_format(rng);
    const FxpFormat fb = random_format(rng);
    const FxpFormat fo = random_format(rng);
    const QuantPolicy p = kPolicies[rng.next() % 4];
    const FxpValue a = quantize(random_value(rng), fa, p);
    const FxpValue b = quantize(random_value(rng), fb, p);

    Rational sum = rational_add(rational_of(a), rational_of(b));
    sum.num <<= fo.frac_bits();
    CHECK(fxp_add(a, b, fo, p).raw == oracle_round(sum, fo, p));

    Rational prod = rational_mul(rational_of(a), rational_of(b));
    prod.num <<= fo.frac_bits();
    CHECK(fxp_mul(a, b, fo, p).raw == oracle_round(prod, fo, p));
  }
}

TEST_CASE("requantize_raw matches the rational reference for wide accumulators") {
  Rng rng{16};
  for (int i = 0; i < 20000; ++i) {
    const FxpFormat fmt = random_format(rng);
    const QuantPolicy p = kPolicies[rng.next() % 4];
    const int src_frac = int(rng.next() % 100);
    __int128 acc = 0;
    for (int t = 0; t < 4; ++t) {
      acc += __int128(static_cast<std::int64_t>(rng.next())) *
             static_cast<std::int64_t>(rng.next() % 1024);
    }
    // Same value as an exact big integer.
    cpp_int acc_big = cpp_int(static_cast<long long>(acc >> 64));
    acc_big <<= 64;
    acc_big += cpp_int(static_cast<unsigned long long>(static_cast<unsigned __int128>(acc)));
    Rational r{acc_big * (cpp_int(1) << fmt.frac_bits()), cpp_int(1) << src_frac};
    CHECK(requantize_raw(acc, src_frac, fmt, p) == oracle_round(r, fmt, p));
  }
}
