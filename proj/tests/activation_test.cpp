#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "rnnfx/activation.hpp"

using namespace rnnfx;
using namespace rnnfx::act;
using fxp::FxpFormat;
using fxp::FxpValue;
using fxp::quantize;

namespace {

const FxpFormat kWork{true, 16, 6};

double max_slope(Function f) {
  switch (f) {
    case Function::sigmoid:
      return 0.25;
    case Function::tanh_fn:
      return 1.0;
    case Function::exp_fn:
      return 1.0;  // on (-inf, 0]
    case Function::inverse:
      return 1.0;  // on [1, inf)
  }
  return 0.0;
}

// Worst-case table error: one full bin of drift plus entry quantization.
double error_bound(Function f, const LutConfig& cfg) {
  const double full_domain = (f == Function::sigmoid || f == Function::tanh_fn)
                                 ? 2.0 * cfg.input_range
                                 : cfg.input_range;
  return (full_domain / cfg.table_size) * max_slope(f) +
         std::ldexp(1.0, -cfg.entry_format.frac_bits());
}

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

}  // namespace

TEST_CASE("config validation") {
  LutConfig cfg;
  cfg.table_size = 1000;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.table_size = 1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.table_size = 1024;
  cfg.input_range = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.input_range = 8.0;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("zero input hits exact entries with left-edge sampling") {
  const LutConfig cfg = default_sigmoid_config();
  CHECK(lut_eval(Function::sigmoid, quantize(0.0, kWork), cfg).to_double() == 0.5);
  CHECK(lut_eval(Function::tanh_fn, quantize(0.0, kWork), cfg).to_double() == 0.0);
}

TEST_CASE("out-of-range input clamps to the last bin") {
  LutConfig cfg;
  cfg.table_size = 1024;
  cfg.input_range = 8.0;
  const LutTable table(Function::tanh_fn, cfg);
  // Last bin starts at 8 - 16/1024; its left-edge sample is the stored value.
  const double expected = std::tanh(8.0 - 16.0 / 1024.0);
  const FxpValue got = table.eval(quantize(10.0, kWork));
  CHECK(got.raw == quantize(expected, cfg.entry_format,
                            {fxp::Rounding::nearest_even, fxp::Overflow::saturate})
                       .raw);
  // Same story below the domain.
  CHECK(table.eval(quantize(-12.0, kWork)).raw == table.entry(0).raw);
}

TEST_CASE("relu is exact") {
  CHECK(relu(quantize(2.625, kWork)).to_double() == 2.625);
  CHECK(relu(quantize(-0.375, kWork)).to_double() == 0.0);
  CHECK(relu(quantize(0.0, kWork)).to_double() == 0.0);
  Rng rng{21};
  for (int i = 0; i < 1000; ++i) {
    const FxpValue x = quantize((rng.uniform() - 0.5) * 60.0, kWork);
    const FxpValue y = relu(x);
    CHECK(y.format == x.format);
    CHECK(y.to_double() == std::max(x.to_double(), 0.0));
  }
}

TEST_CASE("table error stays inside the analytic bound") {
  for (const auto sample : {SamplePoint::left_edge, SamplePoint::midpoint}) {
    for (const auto f : {Function::sigmoid, Function::tanh_fn, Function::exp_fn}) {
      LutConfig cfg;
      cfg.sample_point = sample;
      if (f == Function::exp_fn) cfg.entry_format = {false, 18, 1};
      const LutTable table(f, cfg);
      const double bound = error_bound(f, cfg);
      const double lo = table.domain_lo();
      const double hi = table.domain_hi();
      const int points = 200001;
      double worst = 0.0;
      for (int i = 0; i < points; ++i) {
        const double x = lo + (hi - lo) * i / points;
        const FxpValue q = quantize(x, {true, 32, 8});
        const double err = std::abs(table.eval(q).to_double() - reference_eval(f, q.to_double()));
        worst = std::max(worst, err);
      }
      CHECK_MESSAGE(worst <= bound, "function ", int(f), " sample ", int(sample),
                    " worst ", worst, " bound ", bound);
    }
  }
}

TEST_CASE("reciprocal table error on [1, r)") {
  const LutConfig cfg = default_softmax_inv_config();
  const LutTable table(Function::inverse, cfg);
  const double bound = error_bound(Function::inverse, cfg);
  for (int i = 0; i < 100000; ++i) {
    const double x = 1.0 + (cfg.input_range - 1.0) * i / 100000.0;
    const FxpValue q = quantize(x, {true, 32, 8});
    const double err = std::abs(table.eval(q).to_double() - 1.0 / q.to_double());
    CHECK(err <= bound);
  }
}

TEST_CASE("tables of monotone functions are monotone") {
  for (const auto sample : {SamplePoint::left_edge, SamplePoint::midpoint}) {
    for (const auto f : {Function::sigmoid, Function::tanh_fn, Function::exp_fn}) {
      LutConfig cfg;
      cfg.table_size = 256;
      cfg.sample_point = sample;
      if (f == Function::exp_fn) cfg.entry_format = {false, 18, 1};
      const LutTable table(f, cfg);
      for (int k = 1; k < table.size(); ++k)
        CHECK(table.entry(k).raw >= table.entry(k - 1).raw);
    }
  }
}

TEST_CASE("midpoint-sampled tanh table is odd") {
  LutConfig cfg;
  cfg.sample_point = SamplePoint::midpoint;
  const LutTable table(Function::tanh_fn, cfg);
  for (int k = 0; k < table.size(); ++k) {
    CHECK(table.sample_x(table.size() - 1 - k) == -table.sample_x(k));
    CHECK(table.entry(table.size() - 1 - k).raw == -table.entry(k).raw);
  }
}

TEST_CASE("softmax matches a double-precision softmax of the quantized inputs") {
  Rng rng{31};
  const LutConfig ce = default_softmax_exp_config();
  const LutConfig ci = default_softmax_inv_config();
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + int(rng.next() % 5);
    std::vector<FxpValue> v;
    std::vector<double> vd;
    for (int i = 0; i < n; ++i) {
      v.push_back(quantize((rng.uniform() - 0.5) * 12.0, kWork));
      vd.push_back(v.back().to_double());
    }
    const auto y = softmax_lut(v, ce, ci, kWork);
    REQUIRE(y.size() == v.size());

    const double vmax = *std::max_element(vd.begin(), vd.end());
    double denom = 0.0;
    for (double x : vd) denom += std::exp(x - vmax);

    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double yi = y[i].to_double();
      CHECK(yi >= 0.0);
      CHECK(yi <= 1.0);
      CHECK(std::abs(yi - std::exp(vd[i] - vmax) / denom) <= 0.01);
      sum += yi;
    }
    CHECK(std::abs(sum - 1.0) <= 0.01 * n);
  }
}

TEST_CASE("softmax of a uniform vector is uniform") {
  std::vector<FxpValue> v(5, quantize(0.75, kWork));
  const auto y =
      softmax_lut(v, default_softmax_exp_config(), default_softmax_inv_config(), kWork);
  for (const auto& e : y) {
    CHECK(e.raw == y.front().raw);
    CHECK(std::abs(e.to_double() - 0.2) <= 0.01);
  }
}

TEST_CASE("softmax input validation") {
  const std::vector<FxpValue> empty;
  CHECK_THROWS_AS(softmax_lut(empty, default_softmax_exp_config(),
                              default_softmax_inv_config(), kWork),
                  std::invalid_argument);
  std::vector<FxpValue> mixed{quantize(0.5, kWork), quantize(0.5, {true, 12, 4})};
  CHECK_THROWS_AS(softmax_lut(mixed, default_softmax_exp_config(),
                              default_softmax_inv_config(), kWork),
                  std::invalid_argument);
}
