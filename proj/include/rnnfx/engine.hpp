#pragma once

#include <memory>
#include <span>
#include <vector>

#include "rnnfx/activation.hpp"
#include "rnnfx/fxp.hpp"
#include "rnnfx/model.hpp"

namespace rnnfx::engine {

// Execution schedule being modeled.  static_ reuses one cell instance across
// the whole sequence; non_static chains one instance per time step.  The two
// produce bit-identical numbers and differ only in the hardware cost model.
enum class Mode { static_, non_static };

// How activations are evaluated: table lookups mirror the hardware; the
// reference mode computes the function in double precision and quantizes the
// result, isolating pure arithmetic error from table discretization.
enum class ActivationMode { lut, reference };

Mode mode_from_name(const std::string& name);
std::string mode_name(Mode m);

struct EngineConfig {
  fxp::FxpFormat precision{true, 16, 6};
  fxp::QuantPolicy policy{};
  Mode mode = Mode::static_;
  ActivationMode activation = ActivationMode::lut;
  act::LutConfig sigmoid_cfg = act::default_sigmoid_config();
  act::LutConfig tanh_cfg = act::default_tanh_config();
  act::LutConfig softmax_exp_cfg = act::default_softmax_exp_config();
  act::LutConfig softmax_inv_cfg = act::default_softmax_inv_config();

  // The dot-product accumulator needs 2W plus headroom inside 128 bits.
  void validate() const;
};

struct CellState {
  std::vector<fxp::FxpValue> h;
  std::vector<fxp::FxpValue> c;  // LSTM only; empty for GRU

  static CellState zeros(model::LayerKind kind, int units, const fxp::FxpFormat& fmt);
};

// Elementwise product, each element quantized into out_fmt.
std::vector<fxp::FxpValue> hadamard(std::span<const fxp::FxpValue> a,
                                    std::span<const fxp::FxpValue> b,
                                    const fxp::FxpFormat& out_fmt,
                                    fxp::QuantPolicy policy = {});

// One recurrent update.  Inputs and state must already be in cfg.precision.
// Gate order follows the stored weight layout: LSTM input/forget/candidate/
// output, GRU update/reset/candidate.
CellState lstm_step(std::span<const fxp::FxpValue> x, const CellState& state,
                    const model::RecurrentWeights& w, const EngineConfig& cfg);
CellState gru_step(std::span<const fxp::FxpValue> x, const CellState& state,
                   const model::RecurrentWeights& w, const EngineConfig& cfg,
                   bool reset_after = true);

// A model with weights quantized once under a fixed configuration.
class CompiledModel {
 public:
  CompiledModel(const model::NetworkModel& m, const EngineConfig& cfg);
  ~CompiledModel();
  CompiledModel(CompiledModel&&) noexcept;
  CompiledModel& operator=(CompiledModel&&) noexcept;

  // seq holds seq_len * input_dim values, time-major; they are quantized on
  // entry.  Returns the network output in working precision.
  std::vector<fxp::FxpValue> run(std::span<const double> seq) const;

  // The same network evaluated in double precision with exact activations.
  std::vector<double> run_reference(std::span<const double> seq) const;

  const EngineConfig& config() const;
  int seq_len() const;
  int input_dim() const;
  int output_dim() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

std::vector<fxp::FxpValue> run_sequence(const model::NetworkModel& m,
                                        std::span<const double> seq,
                                        const EngineConfig& cfg);

// Row-wise execution; a failing row is reported with its index.
std::vector<std::vector<fxp::FxpValue>> run_batch(const model::NetworkModel& m,
                                                  std::span<const double> rows, int n_rows,
                                                  const EngineConfig& cfg);

std::vector<double> reference_sequence(const model::NetworkModel& m,
                                       std::span<const double> seq);

}  // namespace rnnfx::engine
