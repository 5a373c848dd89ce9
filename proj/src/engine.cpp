#include "rnnfx/engine.hpp"

#include <cmath>
#include <stdexcept>

namespace rnnfx::engine {

using fxp::FxpFormat;
using fxp::FxpValue;
using fxp::QuantPolicy;
using model::LayerKind;
using model::NetworkModel;

using int128 = __int128;

Mode mode_from_name(const std::string& name) {
  if (name == "static") return Mode::static_;
  if (name == "non-static" || name == "non_static") return Mode::non_static;
  throw std::invalid_argument("unknown mode '" + name + "' (static | non-static)");
}

std::string mode_name(Mode m) { return m == Mode::static_ ? "static" : "non-static"; }

void EngineConfig::validate() const {
  precision.validate();
  if (precision.total_bits > 48)
    throw std::invalid_argument(
        "working precision is limited to 48 total bits (accumulator headroom)");
  sigmoid_cfg.validate();
  tanh_cfg.validate();
  softmax_exp_cfg.validate();
  softmax_inv_cfg.validate();
}

CellState CellState::zeros(LayerKind kind, int units, const FxpFormat& fmt) {
  CellState s;
  s.h.assign(units, FxpValue{0, fmt});
  if (kind == LayerKind::lstm) s.c.assign(units, FxpValue{0, fmt});
  return s;
}

namespace {

// ---------------------------------------------------------------------------
// Quantized network representation.  All hot-path arithmetic runs on raw
// int64 values in the working format; FxpValue appears only at the API edge.

struct StepCtx {
  FxpFormat fmt;
  QuantPolicy policy;
  ActivationMode act_mode = ActivationMode::lut;
  const act::LutTable* sigmoid_table = nullptr;
  const act::LutTable* tanh_table = nullptr;

  std::int64_t sigmoid(std::int64_t raw) const;
  std::int64_t tanh(std::int64_t raw) const;

  std::int64_t mul_q(std::int64_t a, std::int64_t b) const {
    return fxp::requantize_raw(int128(a) * b, 2 * fmt.frac_bits(), fmt, policy);
  }
  std::int64_t add_q(std::int64_t a, std::int64_t b) const {
    return fxp::requantize_raw(int128(a) + int128(b), fmt.frac_bits(), fmt, policy);
  }
};

std::int64_t StepCtx::sigmoid(std::int64_t raw) const {
  if (act_mode == ActivationMode::lut) {
    const auto& table = *sigmoid_table;
    return fxp::requantize_raw(table.eval_raw(raw, fmt.frac_bits()),
                               table.entry_format().frac_bits(), fmt, policy);
  }
  const double x = std::ldexp(double(raw), -fmt.frac_bits());
  return fxp::quantize(1.0 / (1.0 + std::exp(-x)), fmt, policy).raw;
}

std::int64_t StepCtx::tanh(std::int64_t raw) const {
  if (act_mode == ActivationMode::lut) {
    const auto& table = *tanh_table;
    return fxp::requantize_raw(table.eval_raw(raw, fmt.frac_bits()),
                               table.entry_format().frac_bits(), fmt, policy);
  }
  const double x = std::ldexp(double(raw), -fmt.frac_bits());
  return fxp::quantize(std::tanh(x), fmt, policy).raw;
}

// Accumulates x . W[:, col_begin:col_end] (+ bias) exactly, then quantizes
// each output once.  The int64 accumulator is used whenever 2W plus the
// length headroom fits a machine word.
template <class Acc>
void matvec_acc(std::span<const std::int64_t> x, const std::int64_t* w, int cols,
                int col_begin, int col_end, const std::int64_t* bias, const StepCtx& ctx,
                std::int64_t* out) {
  const int m = col_end - col_begin;
  const int f = ctx.fmt.frac_bits();
  std::vector<Acc> acc(m);
  for (int j = 0; j < m; ++j)
    acc[j] = bias ? (Acc(bias[col_begin + j]) << f) : Acc(0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::int64_t xi = x[i];
    if (xi == 0) continue;
    const std::int64_t* row = w + i * cols + col_begin;
    for (int j = 0; j < m; ++j) acc[j] += Acc(xi) * row[j];
  }
  for (int j = 0; j < m; ++j)
    out[j] = fxp::requantize_raw(int128(acc[j]), 2 * f, ctx.fmt, ctx.policy);
}

bool fits_int64_acc(const FxpFormat& fmt, std::size_t len) {
  int bits = 2 * fmt.total_bits + 1;
  std::size_t n = len + 1;
  while (n > 1) {
    ++bits;
    n >>= 1;
  }
  return bits <= 62;
}

void matvec(std::span<const std::int64_t> x, const std::vector<std::int64_t>& w, int cols,
            int col_begin, int col_end, const std::vector<std::int64_t>* bias,
            const StepCtx& ctx, std::int64_t* out) {
  if (fits_int64_acc(ctx.fmt, x.size()))
    matvec_acc<std::int64_t>(x, w.data(), cols, col_begin, col_end,
                             bias ? bias->data() : nullptr, ctx, out);
  else
    matvec_acc<int128>(x, w.data(), cols, col_begin, col_end,
                       bias ? bias->data() : nullptr, ctx, out);
}

std::vector<std::int64_t> quantize_all(std::span<const double> values, const FxpFormat& fmt,
                                       QuantPolicy policy) {
  std::vector<std::int64_t> out;
  out.reserve(values.size());
  for (const double v : values) out.push_back(fxp::quantize(v, fmt, policy).raw);
  return out;
}

struct QuantRecurrent {
  LayerKind kind = LayerKind::lstm;
  bool reset_after = true;
  int input_dim = 0;
  int units = 0;
  int gates = 0;
  std::vector<std::int64_t> kernel;      // input_dim x gates*units
  std::vector<std::int64_t> recurrent;   // units x gates*units
  std::vector<std::int64_t> bias_in;     // gates*units
  std::vector<std::int64_t> bias_rec;    // gates*units; zero unless reset_after GRU

  QuantRecurrent(const model::LayerSpec& spec, const model::RecurrentWeights& w,
                 const FxpFormat& fmt, QuantPolicy policy) {
    kind = spec.kind;
    reset_after = spec.reset_after;
    input_dim = spec.input_dim;
    units = spec.units;
    gates = model::gate_count(kind);
    kernel = quantize_all(w.kernel.data, fmt, policy);
    recurrent = quantize_all(w.recurrent_kernel.data, fmt, policy);
    const std::size_t gn = std::size_t(gates) * units;
    if (kind == LayerKind::gru && reset_after) {
      bias_in = quantize_all(std::span(w.bias).subspan(0, gn), fmt, policy);
      bias_rec = quantize_all(std::span(w.bias).subspan(gn, gn), fmt, policy);
    } else {
      bias_in = quantize_all(w.bias, fmt, policy);
      bias_rec.assign(gn, 0);
    }
  }
};

struct RawState {
  std::vector<std::int64_t> h;
  std::vector<std::int64_t> c;
};

// One LSTM update: two quantized matrix-vector blocks, LUT gates, then the
// state completion c' = f.c + i.g, h' = o.tanh(c') with every elementwise
// product quantized as its own hardware multiply.
void lstm_step_raw(const QuantRecurrent& w, std::span<const std::int64_t> x, RawState& s,
                   const StepCtx& ctx) {
  const int n = w.units;
  const int gn = 4 * n;
  std::vector<std::int64_t> kpart(gn), rpart(gn);
  matvec(x, w.kernel, gn, 0, gn, &w.bias_in, ctx, kpart.data());
  matvec(std::span<const std::int64_t>(s.h), w.recurrent, gn, 0, gn, nullptr, ctx,
         rpart.data());
  for (int j = 0; j < gn; ++j) kpart[j] = ctx.add_q(kpart[j], rpart[j]);

  for (int j = 0; j < n; ++j) {
    const std::int64_t gi = ctx.sigmoid(kpart[j]);
    const std::int64_t gf = ctx.sigmoid(kpart[n + j]);
    const std::int64_t gc = ctx.tanh(kpart[2 * n + j]);
    const std::int64_t go = ctx.sigmoid(kpart[3 * n + j]);
    const std::int64_t c_new = ctx.add_q(ctx.mul_q(gf, s.c[j]), ctx.mul_q(gi, gc));
    s.c[j] = c_new;
    s.h[j] = ctx.mul_q(go, ctx.tanh(c_new));
  }
}

// One GRU update in the update/reset/candidate layout.  With reset_after
// semantics the reset gate scales the biased recurrent block; without it the
// reset gate scales the state before the candidate's recurrent product.
void gru_step_raw(const QuantRecurrent& w, std::span<const std::int64_t> x, RawState& s,
                  const StepCtx& ctx) {
  const int n = w.units;
  const int gn = 3 * n;
  std::vector<std::int64_t> kpart(gn), rpart(gn);
  matvec(x, w.kernel, gn, 0, gn, &w.bias_in, ctx, kpart.data());
  const std::int64_t one = fxp::requantize_raw(int128(1) << ctx.fmt.frac_bits(),
                                               ctx.fmt.frac_bits(), ctx.fmt, ctx.policy);
  if (w.reset_after) {
    matvec(std::span<const std::int64_t>(s.h), w.recurrent, gn, 0, gn, &w.bias_rec, ctx,
           rpart.data());
    for (int j = 0; j < n; ++j) {
      const std::int64_t z = ctx.sigmoid(ctx.add_q(kpart[j], rpart[j]));
      const std::int64_t r = ctx.sigmoid(ctx.add_q(kpart[n + j], rpart[n + j]));
      const std::int64_t cand =
          ctx.tanh(ctx.add_q(kpart[2 * n + j], ctx.mul_q(r, rpart[2 * n + j])));
      const std::int64_t zbar = ctx.add_q(one, -z);
      s.h[j] = ctx.add_q(ctx.mul_q(z, s.h[j]), ctx.mul_q(zbar, cand));
    }
  } else {
    matvec(std::span<const std::int64_t>(s.h), w.recurrent, gn, 0, 2 * n, nullptr, ctx,
           rpart.data());
    std::vector<std::int64_t> z(n), r(n), rh(n);
    for (int j = 0; j < n; ++j) {
      z[j] = ctx.sigmoid(ctx.add_q(kpart[j], rpart[j]));
      r[j] = ctx.sigmoid(ctx.add_q(kpart[n + j], rpart[n + j]));
    }
    for (int j = 0; j < n; ++j) rh[j] = ctx.mul_q(r[j], s.h[j]);
    matvec(std::span<const std::int64_t>(rh), w.recurrent, gn, 2 * n, gn, nullptr, ctx,
           rpart.data());
    for (int j = 0; j < n; ++j) {
      const std::int64_t cand = ctx.tanh(ctx.add_q(kpart[2 * n + j], rpart[j]));
      const std::int64_t zbar = ctx.add_q(one, -z[j]);
      s.h[j] = ctx.add_q(ctx.mul_q(z[j], s.h[j]), ctx.mul_q(zbar, cand));
    }
  }
}

void step_raw(const QuantRecurrent& w, std::span<const std::int64_t> x, RawState& s,
              const StepCtx& ctx) {
  if (w.kind == LayerKind::lstm)
    lstm_step_raw(w, x, s, ctx);
  else
    gru_step_raw(w, x, s, ctx);
}

struct QuantDense {
  int input_dim = 0;
  int units = 0;
  std::vector<std::int64_t> kernel;
  std::vector<std::int64_t> bias;
};

}  // namespace

// ---------------------------------------------------------------------------

struct CompiledModel::Impl {
  NetworkModel net;  // kept for the double-precision reference path
  EngineConfig cfg;
  StepCtx ctx;
  std::unique_ptr<act::LutTable> sigmoid_table, tanh_table, exp_table, inv_table;
  std::unique_ptr<QuantRecurrent> recurrent;
  std::vector<QuantDense> dense;  // indexed parallel to net.layers

  Impl(const NetworkModel& m, const EngineConfig& config) : net(m), cfg(config) {
    cfg.validate();
    net.validate();
    ctx.fmt = cfg.precision;
    ctx.policy = cfg.policy;
    ctx.act_mode = cfg.activation;
    bool need_softmax = false;
    for (const auto& layer : net.layers)
      if (layer.spec.kind == LayerKind::softmax) need_softmax = true;
    if (cfg.activation == ActivationMode::lut) {
      sigmoid_table = std::make_unique<act::LutTable>(act::Function::sigmoid, cfg.sigmoid_cfg);
      tanh_table = std::make_unique<act::LutTable>(act::Function::tanh_fn, cfg.tanh_cfg);
      ctx.sigmoid_table = sigmoid_table.get();
      ctx.tanh_table = tanh_table.get();
      if (need_softmax) {
        exp_table = std::make_unique<act::LutTable>(act::Function::exp_fn, cfg.softmax_exp_cfg);
        inv_table = std::make_unique<act::LutTable>(act::Function::inverse, cfg.softmax_inv_cfg);
      }
    }
    dense.resize(net.layers.size());
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
      const auto& layer = net.layers[i];
      if (model::is_recurrent(layer.spec.kind)) {
        recurrent = std::make_unique<QuantRecurrent>(layer.spec, *layer.rnn, ctx.fmt,
                                                     ctx.policy);
      } else if (layer.spec.kind == LayerKind::dense) {
        dense[i] = QuantDense{layer.spec.input_dim, layer.spec.units,
                              quantize_all(layer.dense->kernel.data, ctx.fmt, ctx.policy),
                              quantize_all(layer.dense->bias, ctx.fmt, ctx.policy)};
      }
    }
  }

  std::vector<std::int64_t> softmax_raw(const std::vector<std::int64_t>& v) const {
    if (cfg.activation == ActivationMode::reference) {
      // max-shifted softmax in double, then one quantization per output
      const int f = ctx.fmt.frac_bits();
      double vmax = -HUGE_VAL;
      for (const auto raw : v) vmax = std::max(vmax, std::ldexp(double(raw), -f));
      double denom = 0.0;
      std::vector<double> e(v.size());
      for (std::size_t i = 0; i < v.size(); ++i) {
        e[i] = std::exp(std::ldexp(double(v[i]), -f) - vmax);
        denom += e[i];
      }
      std::vector<std::int64_t> out(v.size());
      for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = fxp::quantize(e[i] / denom, ctx.fmt, ctx.policy).raw;
      return out;
    }
    std::vector<FxpValue> in;
    in.reserve(v.size());
    for (const auto raw : v) in.push_back(FxpValue{raw, ctx.fmt});
    const auto y = act::softmax_with_tables(in, *exp_table, *inv_table, ctx.fmt, ctx.policy);
    std::vector<std::int64_t> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i].raw;
    return out;
  }

  // Everything after the recurrent layer (or the whole net without one).
  std::vector<std::int64_t> run_head(std::vector<std::int64_t> v, std::size_t first) const {
    for (std::size_t i = first; i < net.layers.size(); ++i) {
      const auto& spec = net.layers[i].spec;
      switch (spec.kind) {
        case LayerKind::dense: {
          const QuantDense& d = dense[i];
          std::vector<std::int64_t> out(d.units);
          matvec(std::span<const std::int64_t>(v), d.kernel, d.units, 0, d.units, &d.bias,
                 ctx, out.data());
          v = std::move(out);
          break;
        }
        case LayerKind::relu:
          for (auto& raw : v)
            if (raw < 0) raw = 0;
          break;
        case LayerKind::sigmoid:
          for (auto& raw : v) raw = ctx.sigmoid(raw);
          break;
        case LayerKind::tanh_act:
          for (auto& raw : v) raw = ctx.tanh(raw);
          break;
        case LayerKind::softmax:
          v = softmax_raw(v);
          break;
        default:
          throw std::logic_error("recurrent layer after the head");
      }
    }
    return v;
  }

  std::vector<std::int64_t> quantize_input(std::span<const double> seq) const {
    const std::size_t want = std::size_t(net.seq_len()) * net.input_dim();
    if (seq.size() != want)
      throw std::invalid_argument("input has " + std::to_string(seq.size()) +
                                  " values, expected " + std::to_string(want));
    return quantize_all(seq, ctx.fmt, ctx.policy);
  }

  // Static schedule: one cell instance, state updated in place.
  std::vector<std::int64_t> run_static(const std::vector<std::int64_t>& input) const {
    if (!recurrent) return run_head(input, 0);
    const int in_dim = recurrent->input_dim;
    RawState s;
    s.h.assign(recurrent->units, 0);
    s.c.assign(recurrent->units, 0);
    const int steps = net.seq_len();
    for (int t = 0; t < steps; ++t)
      step_raw(*recurrent, std::span(input).subspan(std::size_t(t) * in_dim, in_dim), s,
               ctx);
    return run_head(std::move(s.h), 1);
  }

  // Non-static schedule: one instance per time step, state handed from each
  // instance to the next by value.
  std::vector<std::int64_t> run_non_static(const std::vector<std::int64_t>& input) const {
    if (!recurrent) return run_head(input, 0);
    const int in_dim = recurrent->input_dim;
    struct StepInstance {
      const QuantRecurrent* cell;
      std::span<const std::int64_t> x;
      RawState apply(RawState s, const StepCtx& ctx) const {
        step_raw(*cell, x, s, ctx);
        return s;
      }
    };
    std::vector<StepInstance> chain;
    chain.reserve(net.seq_len());
    for (int t = 0; t < net.seq_len(); ++t)
      chain.push_back(StepInstance{
          recurrent.get(), std::span(input).subspan(std::size_t(t) * in_dim, in_dim)});
    RawState s;
    s.h.assign(recurrent->units, 0);
    s.c.assign(recurrent->units, 0);
    for (const auto& inst : chain) s = inst.apply(std::move(s), ctx);
    return run_head(std::move(s.h), 1);
  }
};

CompiledModel::CompiledModel(const NetworkModel& m, const EngineConfig& cfg)
    : impl_(std::make_unique<Impl>(m, cfg)) {}
CompiledModel::~CompiledModel() = default;
CompiledModel::CompiledModel(CompiledModel&&) noexcept = default;
CompiledModel& CompiledModel::operator=(CompiledModel&&) noexcept = default;

const EngineConfig& CompiledModel::config() const { return impl_->cfg; }
int CompiledModel::seq_len() const { return impl_->net.seq_len(); }
int CompiledModel::input_dim() const { return impl_->net.input_dim(); }
int CompiledModel::output_dim() const { return impl_->net.output_dim(); }

std::vector<FxpValue> CompiledModel::run(std::span<const double> seq) const {
  const auto input = impl_->quantize_input(seq);
  const auto raw = impl_->cfg.mode == Mode::static_ ? impl_->run_static(input)
                                                    : impl_->run_non_static(input);
  std::vector<FxpValue> out;
  out.reserve(raw.size());
  for (const auto r : raw) out.push_back(FxpValue{r, impl_->ctx.fmt});
  return out;
}

std::vector<double> CompiledModel::run_reference(std::span<const double> seq) const {
  return reference_sequence(impl_->net, seq);
}

// ---------------------------------------------------------------------------

std::vector<FxpValue> hadamard(std::span<const FxpValue> a, std::span<const FxpValue> b,
                               const FxpFormat& out_fmt, QuantPolicy policy) {
  if (a.size() != b.size())
    throw std::invalid_argument("hadamard operands differ in length");
  std::vector<FxpValue> out;
  out.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    out.push_back(fxp::fxp_mul(a[i], b[i], out_fmt, policy));
  return out;
}

namespace {

RawState state_to_raw(const CellState& state, const FxpFormat& fmt, bool need_c, int units) {
  if (int(state.h.size()) != units)
    throw std::invalid_argument("state h has wrong length");
  if (need_c && int(state.c.size()) != units)
    throw std::invalid_argument("state c has wrong length");
  RawState s;
  auto copy = [&](const std::vector<FxpValue>& src, std::vector<std::int64_t>& dst) {
    dst.reserve(src.size());
    for (const auto& v : src) {
      if (v.format != fmt)
        throw std::invalid_argument("state precision does not match the engine config");
      dst.push_back(v.raw);
    }
  };
  copy(state.h, s.h);
  if (need_c)
    copy(state.c, s.c);
  else
    s.c.assign(units, 0);
  return s;
}

std::vector<std::int64_t> inputs_to_raw(std::span<const FxpValue> x, const FxpFormat& fmt) {
  std::vector<std::int64_t> out;
  out.reserve(x.size());
  for (const auto& v : x) {
    if (v.format != fmt)
      throw std::invalid_argument("input precision does not match the engine config");
    out.push_back(v.raw);
  }
  return out;
}

CellState run_one_step(LayerKind kind, bool reset_after, std::span<const FxpValue> x,
                       const CellState& state, const model::RecurrentWeights& w,
                       const EngineConfig& cfg) {
  cfg.validate();
  model::LayerSpec spec;
  spec.kind = kind;
  spec.input_dim = int(x.size());
  spec.units = w.recurrent_kernel.rows;  // state lengths are checked against this
  spec.seq_len = 1;
  spec.reset_after = reset_after;
  model::Layer layer;
  layer.spec = spec;
  layer.rnn = w;
  model::NetworkModel shell;
  shell.layers.push_back(layer);
  shell.validate();
  if (int(state.h.size()) != spec.units)
    throw std::invalid_argument("state h has length " + std::to_string(state.h.size()) +
                                ", weights expect " + std::to_string(spec.units));

  StepCtx ctx;
  ctx.fmt = cfg.precision;
  ctx.policy = cfg.policy;
  ctx.act_mode = cfg.activation;
  std::unique_ptr<act::LutTable> sig, th;
  if (cfg.activation == ActivationMode::lut) {
    sig = std::make_unique<act::LutTable>(act::Function::sigmoid, cfg.sigmoid_cfg);
    th = std::make_unique<act::LutTable>(act::Function::tanh_fn, cfg.tanh_cfg);
    ctx.sigmoid_table = sig.get();
    ctx.tanh_table = th.get();
  }
  const QuantRecurrent q(spec, w, ctx.fmt, ctx.policy);
  RawState s = state_to_raw(state, ctx.fmt, kind == LayerKind::lstm, spec.units);
  const auto xr = inputs_to_raw(x, ctx.fmt);
  step_raw(q, xr, s, ctx);

  CellState out;
  out.h.reserve(s.h.size());
  for (const auto r : s.h) out.h.push_back(FxpValue{r, ctx.fmt});
  if (kind == LayerKind::lstm) {
    out.c.reserve(s.c.size());
    for (const auto r : s.c) out.c.push_back(FxpValue{r, ctx.fmt});
  }
  return out;
}

}  // namespace

CellState lstm_step(std::span<const FxpValue> x, const CellState& state,
                    const model::RecurrentWeights& w, const EngineConfig& cfg) {
  return run_one_step(LayerKind::lstm, false, x, state, w, cfg);
}

CellState gru_step(std::span<const FxpValue> x, const CellState& state,
                   const model::RecurrentWeights& w, const EngineConfig& cfg,
                   bool reset_after) {
  return run_one_step(LayerKind::gru, reset_after, x, state, w, cfg);
}

std::vector<FxpValue> run_sequence(const NetworkModel& m, std::span<const double> seq,
                                   const EngineConfig& cfg) {
  return CompiledModel(m, cfg).run(seq);
}

std::vector<std::vector<FxpValue>> run_batch(const NetworkModel& m,
                                             std::span<const double> rows, int n_rows,
                                             const EngineConfig& cfg) {
  const CompiledModel compiled(m, cfg);
  const std::size_t row_len = std::size_t(compiled.seq_len()) * compiled.input_dim();
  if (rows.size() != row_len * std::size_t(n_rows))
    throw std::invalid_argument("batch size does not match rows * seq_len * input_dim");
  std::vector<std::vector<FxpValue>> out;
  out.reserve(n_rows);
  for (int i = 0; i < n_rows; ++i) {
    try {
      out.push_back(compiled.run(rows.subspan(std::size_t(i) * row_len, row_len)));
    } catch (const std::exception& e) {
      throw std::runtime_error("row " + std::to_string(i) + ": " + e.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Double-precision reference path with exact activations.

namespace {

double ref_sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

std::vector<double> ref_recurrent(const model::Layer& layer, std::span<const double> seq) {
  const auto& spec = layer.spec;
  const auto& w = *layer.rnn;
  const int n = spec.units;
  const int in = spec.input_dim;
  const int g = model::gate_count(spec.kind);
  const int gn = g * n;
  std::vector<double> h(n, 0.0), c(n, 0.0);
  std::vector<double> pre(gn), kp(gn), rp(gn);

  for (int t = 0; t < spec.seq_len; ++t) {
    const double* x = seq.data() + std::size_t(t) * in;
    if (spec.kind == LayerKind::lstm) {
      for (int j = 0; j < gn; ++j) {
        double a = w.bias[j];
        for (int i = 0; i < in; ++i) a += x[i] * w.kernel.at(i, j);
        for (int k = 0; k < n; ++k) a += h[k] * w.recurrent_kernel.at(k, j);
        pre[j] = a;
      }
      for (int j = 0; j < n; ++j) {
        const double gi = ref_sigmoid(pre[j]);
        const double gf = ref_sigmoid(pre[n + j]);
        const double gc = std::tanh(pre[2 * n + j]);
        const double go = ref_sigmoid(pre[3 * n + j]);
        c[j] = gf * c[j] + gi * gc;
        h[j] = go * std::tanh(c[j]);
      }
    } else if (spec.reset_after) {
      for (int j = 0; j < gn; ++j) {
        double a = w.bias[j];
        for (int i = 0; i < in; ++i) a += x[i] * w.kernel.at(i, j);
        kp[j] = a;
        double b = w.bias[gn + j];
        for (int k = 0; k < n; ++k) b += h[k] * w.recurrent_kernel.at(k, j);
        rp[j] = b;
      }
      for (int j = 0; j < n; ++j) {
        const double z = ref_sigmoid(kp[j] + rp[j]);
        const double r = ref_sigmoid(kp[n + j] + rp[n + j]);
        const double cand = std::tanh(kp[2 * n + j] + r * rp[2 * n + j]);
        h[j] = z * h[j] + (1.0 - z) * cand;
      }
    } else {
      for (int j = 0; j < gn; ++j) {
        double a = w.bias[j];
        for (int i = 0; i < in; ++i) a += x[i] * w.kernel.at(i, j);
        kp[j] = a;
      }
      std::vector<double> z(n), r(n), rh(n);
      for (int j = 0; j < 2 * n; ++j) {
        double b = 0;
        for (int k = 0; k < n; ++k) b += h[k] * w.recurrent_kernel.at(k, j);
        rp[j] = b;
      }
      for (int j = 0; j < n; ++j) {
        z[j] = ref_sigmoid(kp[j] + rp[j]);
        r[j] = ref_sigmoid(kp[n + j] + rp[n + j]);
        rh[j] = r[j] * h[j];
      }
      for (int j = 0; j < n; ++j) {
        double b = 0;
        for (int k = 0; k < n; ++k) b += rh[k] * w.recurrent_kernel.at(k, 2 * n + j);
        h[j] = z[j] * h[j] + (1.0 - z[j]) * std::tanh(kp[2 * n + j] + b);
      }
    }
  }
  return h;
}

}  // namespace

std::vector<double> reference_sequence(const NetworkModel& m, std::span<const double> seq) {
  m.validate();
  const std::size_t want = std::size_t(m.seq_len()) * m.input_dim();
  if (seq.size() != want)
    throw std::invalid_argument("input has " + std::to_string(seq.size()) +
                                " values, expected " + std::to_string(want));

  std::vector<double> v;
  std::size_t first = 0;
  if (m.recurrent_layer()) {
    v = ref_recurrent(m.layers.front(), seq);
    first = 1;
  } else {
    v.assign(seq.begin(), seq.end());
  }
  for (std::size_t i = first; i < m.layers.size(); ++i) {
    const auto& layer = m.layers[i];
    switch (layer.spec.kind) {
      case LayerKind::dense: {
        const auto& w = *layer.dense;
        std::vector<double> out(layer.spec.units);
        for (int j = 0; j < layer.spec.units; ++j) {
          double a = w.bias[j];
          for (int k = 0; k < layer.spec.input_dim; ++k) a += v[k] * w.kernel.at(k, j);
          out[j] = a;
        }
        v = std::move(out);
        break;
      }
      case LayerKind::relu:
        for (auto& x : v) x = std::max(x, 0.0);
        break;
      case LayerKind::sigmoid:
        for (auto& x : v) x = ref_sigmoid(x);
        break;
      case LayerKind::tanh_act:
        for (auto& x : v) x = std::tanh(x);
        break;
      case LayerKind::softmax: {
        double vmax = v[0];
        for (const auto x : v) vmax = std::max(vmax, x);
        double denom = 0.0;
        for (auto& x : v) {
          x = std::exp(x - vmax);
          denom += x;
        }
        for (auto& x : v) x /= denom;
        break;
      }
      default:
        throw std::logic_error("recurrent layer after the head");
    }
  }
  return v;
}

}  // namespace rnnfx::engine
