#pragma once

#include <string>
#include <vector>

#include "mvn/dsp.hpp"
#include "mvn/optim.hpp"
#include "mvn/tape.hpp"

namespace mvn {

enum class CellKind { Gru, Vanilla };
enum class ModelKind { Mvn, AvgInput, AvgOutput, MaxOutput };

// State handed to the first channel of frame t: the last channel's state
// from frame t-1 (default), or the first channel's own previous state
// (ablation variant).
enum class FirstChannelState { PrevFrameLast, PrevFrameFirst };

const char* cell_name(CellKind c);
CellKind cell_from_name(const std::string& name);
const char* model_name(ModelKind m);
ModelKind model_from_name(const std::string& name);
const char* first_channel_name(FirstChannelState f);
FirstChannelState first_channel_from_name(const std::string& name);

// Shared recurrent backbone: one cell plus a 2-class softmax head. All four
// model kinds use the same parameter set; they differ only in how channels
// are folded.
struct BackboneParams {
  CellKind cell = CellKind::Gru;
  int in_dim = 513;
  int hidden = 512;
  FirstChannelState first_channel = FirstChannelState::PrevFrameLast;
  ParamSet p;

  static BackboneParams init(CellKind cell, int in_dim, int hidden, Rng& rng);
};

struct FramePrediction {
  Matrix probs;             // T x 2, rows sum to 1
  std::vector<int> labels;  // argmax per frame, ties to the lower class
};

// Tape handles for one parameter set, index-aligned with BackboneParams::p.
struct BackboneLeaves {
  CellKind cell = CellKind::Gru;
  int hidden = 0;
  std::vector<Val> vals;  // aligned with ParamSet order

  static BackboneLeaves make(Tape& tape, const BackboneParams& params, bool needs_grad);
  Val get(const BackboneParams& params, const std::string& name) const;
};

// One cell application: x is 1 x in_dim, h_prev is 1 x hidden.
Val cell_forward(Tape& tape, Val x, Val h_prev, const BackboneParams& params,
                 const BackboneLeaves& leaves);

// Plain unroll across rows of a slab; returns every hidden state.
std::vector<Val> run_sequence(Tape& tape, Val slab, const BackboneParams& params,
                              const BackboneLeaves& leaves);

// softmax head over a stack of states: concat -> matmul -> (+bias) logits.
Val head_logits(Tape& tape, const std::vector<Val>& states, const BackboneParams& params,
                const BackboneLeaves& leaves);

// Time unroll + head for one channel slab: T x 2 logits.
Val single_channel_logits(Tape& tape, const Matrix& slab, const BackboneParams& params,
                          const BackboneLeaves& leaves);

// Channel-time unroll (serpentine): within each frame the cell scans channels
// 1..K, and the frame's prediction is read after the last channel. T x 2.
Val mvn_logits(Tape& tape, const SpectraGrid& grid, const BackboneParams& params,
               const BackboneLeaves& leaves);

Matrix average_channels(const SpectraGrid& grid);

// Training objective per model kind (mean frame cross-entropy; per-channel
// models average the per-channel losses).
Val model_loss(Tape& tape, const SpectraGrid& grid, const std::vector<uint8_t>& labels,
               const BackboneParams& params, const BackboneLeaves& leaves, ModelKind kind);

// Inference with fusion applied; accepts any channel count K >= 1.
FramePrediction predict(const SpectraGrid& grid, const BackboneParams& params,
                        ModelKind kind);

// Convenience single-step / single-slab wrappers used by tests and tools.
std::vector<double> cell_step_values(const std::vector<double>& x,
                                     const std::vector<double>& h_prev,
                                     const BackboneParams& params);
Matrix rnn_time_forward_values(const Matrix& slab, const BackboneParams& params);
std::vector<double> head_probabilities(const std::vector<double>& h,
                                       const BackboneParams& params);

}  // namespace mvn
