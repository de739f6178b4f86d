#pragma once

#include <memory>
#include <string>
#include <vector>

#include "mvn/checkpoint.hpp"
#include "mvn/data.hpp"
#include "mvn/models.hpp"
#include "mvn/room.hpp"

namespace mvn {

enum class ExperimentKind { Simple, Room };

const char* experiment_name(ExperimentKind e);
ExperimentKind experiment_from_name(const std::string& name);

struct TrainConfig {
  ModelKind model = ModelKind::Mvn;
  CellKind cell = CellKind::Gru;
  FirstChannelState first_channel = FirstChannelState::PrevFrameLast;
  int in_dim = 513;
  int hidden = 32;
  int epochs = 10;
  int batches_per_epoch = 25;
  int batch_size = 8;
  int channels = 4;
  SnrScheme train_scheme = SnrScheme::TrainingGrid;
  bool per_frame_shuffle = true;
  int val_mixtures = 100;
  bool fixed_epoch_data = false;  // default: fresh recipes every epoch
  LrSchedule lr;
  AdamConfig adam;
  uint64_t seed = 1;
  ExperimentKind experiment = ExperimentKind::Simple;
  FrameSpec stft;
  std::string resume_path;  // continue from a resume container
};

// Deterministic example stream: train_example(e, i) must depend only on the
// construction arguments and (e, i), never on call order.
class ExampleSource {
 public:
  virtual ~ExampleSource() = default;
  virtual LabeledExample train_example(int epoch, int64_t index) = 0;
  virtual const std::vector<LabeledExample>& validation_set() = 0;
};

class SimpleMixtureSource : public ExampleSource {
 public:
  SimpleMixtureSource(ClipBank speech, ClipBank noise, SnrSchedule schedule,
                      bool per_frame_shuffle, bool fixed_epoch_data, int val_mixtures,
                      FrameSpec stft, uint64_t seed);

  LabeledExample train_example(int epoch, int64_t index) override;
  const std::vector<LabeledExample>& validation_set() override;
  LabeledExample example_for_seed(uint64_t stream, int64_t index);
  const ClipBank& speech_bank() const { return speech_; }
  const ClipBank& noise_bank() const { return noise_; }

 private:
  ClipBank speech_, noise_;
  SnrSchedule schedule_;
  bool per_frame_shuffle_;
  bool fixed_epoch_data_;
  int val_mixtures_;
  FrameSpec stft_;
  uint64_t seed_;
  std::vector<LabeledExample> val_;
};

struct RoomDataConfig {
  SceneSampleParams scene;
  int train_scenes = 16;
  bool per_frame_shuffle = false;
};

class RoomMixtureSource : public ExampleSource {
 public:
  RoomMixtureSource(ClipBank speech, ClipBank noise, SnrSchedule schedule,
                    RoomDataConfig room, int channels, int val_mixtures, FrameSpec stft,
                    uint64_t seed, std::vector<RoomScene> scenes = {});

  LabeledExample train_example(int epoch, int64_t index) override;
  const std::vector<LabeledExample>& validation_set() override;
  const std::vector<RoomScene>& scenes() const { return scenes_; }

 private:
  LabeledExample make(uint64_t stream, int64_t index);
  ClipBank speech_, noise_;
  SnrSchedule schedule_;
  RoomDataConfig room_;
  int channels_;
  int val_mixtures_;
  FrameSpec stft_;
  uint64_t seed_;
  std::vector<RoomScene> scenes_;
  std::vector<LabeledExample> val_;
};

// Renders one room example from explicit ingredients (shared by training,
// evaluation and the scene tooling).
LabeledExample make_room_example(const RoomScene& scene, const ClipBank& speech,
                                 const ClipBank& noise, const SnrSchedule& schedule,
                                 bool per_frame_shuffle, const FrameSpec& spec, Rng& rng,
                                 int64_t id);

struct TrainCurveRow {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double lr = 0.0;
};

struct TrainResult {
  Checkpoint checkpoint;  // parameters from the best-validation epoch
  Checkpoint resume;      // full last-epoch state incl. optimizer moments
  std::vector<TrainCurveRow> curve;
  int best_epoch = -1;
  double best_val_loss = 0.0;
};

// Tracks the strictly best validation loss; first epoch always wins.
struct BestTracker {
  int best_epoch = -1;
  double best_loss = 0.0;
  bool observe(int epoch, double loss);
};

TrainResult train(const TrainConfig& cfg, ExampleSource& source);

BackboneParams backbone_from_checkpoint(const Checkpoint& c);
ModelKind model_kind_from_checkpoint(const Checkpoint& c);

std::string curve_to_csv(const std::vector<TrainCurveRow>& curve);

double frame_accuracy(const std::vector<int>& predicted,
                      const std::vector<uint8_t>& truth);

struct EvalRow {
  std::string model;
  std::string scheme;
  int k = 0;
  int run = 0;
  double accuracy = 0.0;  // published precision: six decimals
};

// Rows store exactly what the CSV publishes, so aggregates recompute
// bit-exactly from a written report.
double published_accuracy(double raw);

struct EvalAggregate {
  std::string model;
  std::string scheme;
  int k = 0;
  double mean = 0.0;
  double stddev = 0.0;  // sample std, n-1 denominator; 0 for a single run
  int runs = 0;
};

struct EvalReport {
  std::vector<EvalRow> rows;
  bool with_model_column = false;

  std::vector<EvalAggregate> aggregates() const;
  std::string raw_csv() const;
  std::string aggregate_csv() const;
};

EvalReport parse_eval_csv(const std::string& text);

struct EvalConfig {
  ExperimentKind experiment = ExperimentKind::Simple;
  int mixtures_per_row = 32;
  uint64_t seed = 99;
  bool per_frame_shuffle = true;
  FrameSpec stft;
  uint64_t bank_seed = 7;
  int speech_clips = 40;
  int noise_clips = 40;
  SceneSampleParams scene;
  std::vector<RoomScene> test_scenes;  // room experiment: cycled if non-empty
};

// One row per (scheme value of `scheme`, K, run); accuracy pooled over all
// frames of the row's fresh test set. Rows are independent jobs.
EvalReport evaluate_sweep(const BackboneParams& params, ModelKind kind, SnrScheme scheme,
                          const std::vector<int>& k_values, int runs,
                          const EvalConfig& cfg, int jobs = 1);

// Stub hook used by harness tests: like evaluate_sweep but predictions come
// from the supplied function instead of a trained model.
using PredictFn = std::vector<int> (*)(const LabeledExample&, Rng&);
EvalReport evaluate_sweep_with(PredictFn fn, SnrScheme scheme,
                               const std::vector<int>& k_values, int runs,
                               const EvalConfig& cfg);

}  // namespace mvn
