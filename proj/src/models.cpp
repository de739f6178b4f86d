#include "mvn/models.hpp"

#include <algorithm>

#include "mvn/errors.hpp"

namespace mvn {

const char* cell_name(CellKind c) {
  return c == CellKind::Gru ? "gru" : "vanilla";
}
CellKind cell_from_name(const std::string& name) {
  if (name == "gru") return CellKind::Gru;
  if (name == "vanilla") return CellKind::Vanilla;
  throw ConfigError("unknown cell kind: " + name);
}

const char* model_name(ModelKind m) {
  switch (m) {
    case ModelKind::Mvn: return "mvn";
    case ModelKind::AvgInput: return "avg_input";
    case ModelKind::AvgOutput: return "avg_output";
    case ModelKind::MaxOutput: return "max_output";
  }
  return "mvn";
}
ModelKind model_from_name(const std::string& name) {
  if (name == "mvn") return ModelKind::Mvn;
  if (name == "avg_input") return ModelKind::AvgInput;
  if (name == "avg_output") return ModelKind::AvgOutput;
  if (name == "max_output") return ModelKind::MaxOutput;
  throw ConfigError("unknown model kind: " + name);
}

const char* first_channel_name(FirstChannelState f) {
  return f == FirstChannelState::PrevFrameLast ? "prev_frame_last" : "prev_frame_first";
}
FirstChannelState first_channel_from_name(const std::string& name) {
  if (name == "prev_frame_last") return FirstChannelState::PrevFrameLast;
  if (name == "prev_frame_first") return FirstChannelState::PrevFrameFirst;
  throw ConfigError("unknown first-channel mode: " + name);
}

BackboneParams BackboneParams::init(CellKind cell, int in_dim, int hidden, Rng& rng) {
  BackboneParams bp;
  bp.cell = cell;
  bp.in_dim = in_dim;
  bp.hidden = hidden;
  if (cell == CellKind::Gru) {
    for (const char* name : {"wz", "wr", "wc"})
      bp.p.add(name, Matrix::init_uniform(in_dim, hidden, in_dim, rng));
    for (const char* name : {"uz", "ur", "uc"})
      bp.p.add(name, Matrix::init_uniform(hidden, hidden, hidden, rng));
    for (const char* name : {"bz", "br", "bc"}) bp.p.add(name, Matrix(1, hidden));
  } else {
    bp.p.add("w", Matrix::init_uniform(in_dim, hidden, in_dim, rng));
    bp.p.add("u", Matrix::init_uniform(hidden, hidden, hidden, rng));
    bp.p.add("b", Matrix(1, hidden));
  }
  bp.p.add("head_w", Matrix::init_uniform(hidden, 2, hidden, rng));
  bp.p.add("head_b", Matrix(1, 2));
  return bp;
}

BackboneLeaves BackboneLeaves::make(Tape& tape, const BackboneParams& params,
                                    bool needs_grad) {
  BackboneLeaves lv;
  lv.cell = params.cell;
  lv.hidden = params.hidden;
  lv.vals.reserve(params.p.count());
  for (const auto& m : params.p.values) lv.vals.push_back(tape.leaf(m, needs_grad));
  return lv;
}

Val BackboneLeaves::get(const BackboneParams& params, const std::string& name) const {
  int i = params.p.index_of(name);
  if (i < 0) throw ContractError("no leaf for parameter: " + name);
  return vals[i];
}

namespace {

// Input projections (bias folded in) for a whole sequence, one matrix per
// gate; the recurrent loop then only touches hidden-sized products.
struct SeqProjection {
  Val z, r, c;  // gru
  Val w;        // vanilla
};

SeqProjection project_sequence(Tape& tape, Val slab, const BackboneParams& params,
                               const BackboneLeaves& lv) {
  SeqProjection proj;
  if (params.cell == CellKind::Gru) {
    proj.z = tape.add_rowvec(tape.matmul(slab, lv.get(params, "wz")), lv.get(params, "bz"));
    proj.r = tape.add_rowvec(tape.matmul(slab, lv.get(params, "wr")), lv.get(params, "br"));
    proj.c = tape.add_rowvec(tape.matmul(slab, lv.get(params, "wc")), lv.get(params, "bc"));
  } else {
    proj.w = tape.add_rowvec(tape.matmul(slab, lv.get(params, "w")), lv.get(params, "b"));
  }
  return proj;
}

Val projected_cell_step(Tape& tape, const SeqProjection& proj, int row, Val h_prev,
                        const BackboneParams& params, const BackboneLeaves& lv) {
  if (params.cell == CellKind::Gru) {
    Val z = tape.sigmoid(
        tape.add(tape.slice_rows(proj.z, row, row + 1), tape.matmul(h_prev, lv.get(params, "uz"))));
    Val r = tape.sigmoid(
        tape.add(tape.slice_rows(proj.r, row, row + 1), tape.matmul(h_prev, lv.get(params, "ur"))));
    Val cand = tape.tanh(tape.add(tape.slice_rows(proj.c, row, row + 1),
                                  tape.matmul(tape.mul(r, h_prev), lv.get(params, "uc"))));
    return tape.add(tape.mul(tape.one_minus(z), h_prev), tape.mul(z, cand));
  }
  return tape.tanh(tape.add(tape.slice_rows(proj.w, row, row + 1),
                            tape.matmul(h_prev, lv.get(params, "u"))));
}

Val zero_state(Tape& tape, int hidden) {
  return tape.leaf(Matrix(1, hidden), false);
}

void check_slab(const Matrix& slab, const BackboneParams& params) {
  if (slab.cols != params.in_dim)
    throw ShapeError("input has " + std::to_string(slab.cols) + " bins, backbone expects " +
                     std::to_string(params.in_dim));
}

}  // namespace

Val cell_forward(Tape& tape, Val x, Val h_prev, const BackboneParams& params,
                 const BackboneLeaves& lv) {
  const Matrix& xv = tape.value(x);
  const Matrix& hv = tape.value(h_prev);
  if (xv.rows != 1 || xv.cols != params.in_dim || hv.rows != 1 || hv.cols != params.hidden)
    throw ShapeError("cell_forward: expected 1x" + std::to_string(params.in_dim) +
                     " input and 1x" + std::to_string(params.hidden) + " state");
  SeqProjection proj = project_sequence(tape, x, params, lv);
  return projected_cell_step(tape, proj, 0, h_prev, params, lv);
}

std::vector<Val> run_sequence(Tape& tape, Val slab, const BackboneParams& params,
                              const BackboneLeaves& lv) {
  check_slab(tape.value(slab), params);
  const int steps = tape.value(slab).rows;
  SeqProjection proj = project_sequence(tape, slab, params, lv);
  std::vector<Val> states;
  states.reserve(steps);
  Val h = zero_state(tape, params.hidden);
  for (int s = 0; s < steps; ++s) {
    h = projected_cell_step(tape, proj, s, h, params, lv);
    states.push_back(h);
  }
  return states;
}

Val head_logits(Tape& tape, const std::vector<Val>& states, const BackboneParams& params,
                const BackboneLeaves& lv) {
  Val stacked = states.size() == 1 ? states[0] : tape.concat_rows(states);
  return tape.add_rowvec(tape.matmul(stacked, lv.get(params, "head_w")),
                         lv.get(params, "head_b"));
}

Val single_channel_logits(Tape& tape, const Matrix& slab, const BackboneParams& params,
                          const BackboneLeaves& lv) {
  Val x = tape.leaf(slab, false);
  return head_logits(tape, run_sequence(tape, x, params, lv), params, lv);
}

namespace {

// Rows ordered frame-major: (t=0, k=0..K-1), (t=1, k=0..K-1), ...
Matrix serpentine_matrix(const SpectraGrid& grid) {
  const int k_count = grid.channels(), t_count = grid.frames(), f_count = grid.bins();
  Matrix m(k_count * t_count, f_count);
  for (int t = 0; t < t_count; ++t)
    for (int k = 0; k < k_count; ++k)
      std::copy(grid.ch[k].row(t), grid.ch[k].row(t) + f_count,
                m.row(t * k_count + k));
  return m;
}

}  // namespace

Val mvn_logits(Tape& tape, const SpectraGrid& grid, const BackboneParams& params,
               const BackboneLeaves& lv) {
  const int k_count = grid.channels(), t_count = grid.frames();
  if (k_count < 1 || t_count < 1) throw ShapeError("mvn: empty spectra grid");
  check_slab(grid.ch[0], params);

  Val x = tape.leaf(serpentine_matrix(grid), false);
  SeqProjection proj = project_sequence(tape, x, params, lv);

  std::vector<Val> pred_states;
  pred_states.reserve(t_count);
  Val h = zero_state(tape, params.hidden);
  Val first_prev = h;  // channel-1 state of the previous frame (ablation mode)
  for (int t = 0; t < t_count; ++t) {
    for (int k = 0; k < k_count; ++k) {
      if (k == 0 && params.first_channel == FirstChannelState::PrevFrameFirst) h = first_prev;
      h = projected_cell_step(tape, proj, t * k_count + k, h, params, lv);
      if (k == 0) first_prev = h;
    }
    pred_states.push_back(h);  // after observing every channel of frame t
  }
  return head_logits(tape, pred_states, params, lv);
}

Matrix average_channels(const SpectraGrid& grid) {
  const int k_count = grid.channels();
  if (k_count < 1) throw ShapeError("average_channels: empty grid");
  Matrix mean = grid.ch[0];
  for (int k = 1; k < k_count; ++k)
    for (size_t i = 0; i < mean.size(); ++i) mean.d[i] += grid.ch[k].d[i];
  for (auto& v : mean.d) v /= k_count;
  return mean;
}

Val model_loss(Tape& tape, const SpectraGrid& grid, const std::vector<uint8_t>& labels,
               const BackboneParams& params, const BackboneLeaves& lv, ModelKind kind) {
  if (static_cast<int>(labels.size()) != grid.frames())
    throw ShapeError("model_loss: label count != frame count");
  std::vector<int> y(labels.begin(), labels.end());
  switch (kind) {
    case ModelKind::Mvn:
      return tape.softmax_xent_mean(mvn_logits(tape, grid, params, lv), y);
    case ModelKind::AvgInput:
      return tape.softmax_xent_mean(
          single_channel_logits(tape, average_channels(grid), params, lv), y);
    case ModelKind::AvgOutput:
    case ModelKind::MaxOutput: {
      // fusion happens at inference; the shared backbone trains on every
      // channel as an independent single-channel sequence
      Val total{};
      for (int k = 0; k < grid.channels(); ++k) {
        Val loss = tape.softmax_xent_mean(
            single_channel_logits(tape, grid.ch[k], params, lv), y);
        total = k == 0 ? loss : tape.add(total, loss);
      }
      return grid.channels() == 1 ? total : tape.scale(total, 1.0 / grid.channels());
    }
  }
  throw ContractError("model_loss: unhandled model kind");
}

namespace {

FramePrediction prediction_from_probs(Matrix probs) {
  FramePrediction out;
  out.labels.resize(probs.rows);
  for (int t = 0; t < probs.rows; ++t) {
    const double* row = probs.row(t);
    int best = 0;
    for (int j = 1; j < probs.cols; ++j)
      if (row[j] > row[best]) best = j;  // ties keep the lower index
    out.labels[t] = best;
  }
  out.probs = std::move(probs);
  return out;
}

Matrix softmax_rows(const Matrix& logits) {
  Matrix probs(logits.rows, logits.cols);
  std::vector<double> row(logits.cols);
  for (int t = 0; t < logits.rows; ++t) {
    for (int j = 0; j < logits.cols; ++j) row[j] = logits.at(t, j);
    auto p = softmax(row);
    for (int j = 0; j < logits.cols; ++j) probs.at(t, j) = p[j];
  }
  return probs;
}

}  // namespace

FramePrediction predict(const SpectraGrid& grid, const BackboneParams& params,
                        ModelKind kind) {
  Tape tape;
  BackboneLeaves lv = BackboneLeaves::make(tape, params, false);
  switch (kind) {
    case ModelKind::Mvn:
      return prediction_from_probs(softmax_rows(tape.value(mvn_logits(tape, grid, params, lv))));
    case ModelKind::AvgInput:
      return prediction_from_probs(softmax_rows(
          tape.value(single_channel_logits(tape, average_channels(grid), params, lv))));
    case ModelKind::AvgOutput: {
      Matrix mean;
      for (int k = 0; k < grid.channels(); ++k) {
        Matrix p = softmax_rows(tape.value(single_channel_logits(tape, grid.ch[k], params, lv)));
        if (k == 0) {
          mean = std::move(p);
        } else {
          for (size_t i = 0; i < mean.size(); ++i) mean.d[i] += p.d[i];
        }
      }
      if (grid.channels() > 1)
        for (auto& v : mean.d) v /= grid.channels();
      return prediction_from_probs(std::move(mean));
    }
    case ModelKind::MaxOutput: {
      // per frame, keep the row of the channel holding the single most
      // confident (channel, class) probability
      std::vector<Matrix> per_ch;
      per_ch.reserve(grid.channels());
      for (int k = 0; k < grid.channels(); ++k)
        per_ch.push_back(
            softmax_rows(tape.value(single_channel_logits(tape, grid.ch[k], params, lv))));
      const int t_count = grid.frames();
      Matrix probs(t_count, 2);
      for (int t = 0; t < t_count; ++t) {
        int best_k = 0;
        double best_p = -1.0;
        for (int k = 0; k < grid.channels(); ++k) {
          for (int j = 0; j < 2; ++j) {
            double p = per_ch[k].at(t, j);
            if (p > best_p) {
              best_p = p;
              best_k = k;
            }
          }
        }
        probs.at(t, 0) = per_ch[best_k].at(t, 0);
        probs.at(t, 1) = per_ch[best_k].at(t, 1);
      }
      return prediction_from_probs(std::move(probs));
    }
  }
  throw ContractError("predict: unhandled model kind");
}

std::vector<double> cell_step_values(const std::vector<double>& x,
                                     const std::vector<double>& h_prev,
                                     const BackboneParams& params) {
  Tape tape;
  BackboneLeaves lv = BackboneLeaves::make(tape, params, false);
  Val xv = tape.leaf(Matrix::row_vector(x), false);
  Val hv = tape.leaf(Matrix::row_vector(h_prev), false);
  return tape.value(cell_forward(tape, xv, hv, params, lv)).d;
}

Matrix rnn_time_forward_values(const Matrix& slab, const BackboneParams& params) {
  Tape tape;
  BackboneLeaves lv = BackboneLeaves::make(tape, params, false);
  Val x = tape.leaf(slab, false);
  auto states = run_sequence(tape, x, params, lv);
  Matrix out(static_cast<int>(states.size()), params.hidden);
  for (size_t s = 0; s < states.size(); ++s) {
    const Matrix& h = tape.value(states[s]);
    std::copy(h.d.begin(), h.d.end(), out.row(static_cast<int>(s)));
  }
  return out;
}

std::vector<double> head_probabilities(const std::vector<double>& h,
                                       const BackboneParams& params) {
  Tape tape;
  BackboneLeaves lv = BackboneLeaves::make(tape, params, false);
  std::vector<Val> state{tape.leaf(Matrix::row_vector(h), false)};
  const Matrix& logits = tape.value(head_logits(tape, state, params, lv));
  return softmax(logits.d);
}

}  // namespace mvn
