#include "mvn/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <thread>

#include "mvn/errors.hpp"

namespace mvn {

namespace {
// seed stream tags
constexpr uint64_t kStreamTrain = 0x7261696e;
constexpr uint64_t kStreamVal = 0x76616c00;
constexpr uint64_t kStreamInit = 0x696e6974;
constexpr uint64_t kStreamEval = 0x6576616c;
constexpr uint64_t kStreamScene = 0x7363656e;
}  // namespace

const char* experiment_name(ExperimentKind e) {
  return e == ExperimentKind::Simple ? "simple" : "room";
}
ExperimentKind experiment_from_name(const std::string& name) {
  if (name == "simple") return ExperimentKind::Simple;
  if (name == "room") return ExperimentKind::Room;
  throw ConfigError("unknown experiment kind: " + name);
}

SimpleMixtureSource::SimpleMixtureSource(ClipBank speech, ClipBank noise,
                                         SnrSchedule schedule, bool per_frame_shuffle,
                                         bool fixed_epoch_data, int val_mixtures,
                                         FrameSpec stft, uint64_t seed)
    : speech_(std::move(speech)),
      noise_(std::move(noise)),
      schedule_(std::move(schedule)),
      per_frame_shuffle_(per_frame_shuffle),
      fixed_epoch_data_(fixed_epoch_data),
      val_mixtures_(val_mixtures),
      stft_(stft),
      seed_(seed) {}

LabeledExample SimpleMixtureSource::example_for_seed(uint64_t stream, int64_t index) {
  Rng rng(mix_seed(stream, static_cast<uint64_t>(index)));
  MixtureRecipe r = draw_recipe(rng, speech_, noise_, schedule_, per_frame_shuffle_, index);
  return realize(r, speech_, noise_, stft_);
}

LabeledExample SimpleMixtureSource::train_example(int epoch, int64_t index) {
  uint64_t stream =
      mix_seed(seed_, kStreamTrain, fixed_epoch_data_ ? 0 : static_cast<uint64_t>(epoch) + 1);
  return example_for_seed(stream, index);
}

const std::vector<LabeledExample>& SimpleMixtureSource::validation_set() {
  if (val_.empty() && val_mixtures_ > 0) {
    uint64_t stream = mix_seed(seed_, kStreamVal);
    val_.reserve(val_mixtures_);
    for (int i = 0; i < val_mixtures_; ++i) val_.push_back(example_for_seed(stream, i));
  }
  return val_;
}

LabeledExample make_room_example(const RoomScene& scene, const ClipBank& speech,
                                 const ClipBank& noise, const SnrSchedule& schedule,
                                 bool per_frame_shuffle, const FrameSpec& spec, Rng& rng,
                                 int64_t id) {
  if (static_cast<int>(scene.mics.size()) != schedule.channels())
    throw InputError("room example: scene has " + std::to_string(scene.mics.size()) +
                     " mics for a " + std::to_string(schedule.channels()) +
                     "-channel schedule");

  const ClipSource& sp = speech.clips[rng.uniform_int(speech.clips.size())];
  const ClipSource& nz = noise.clips[rng.uniform_int(noise.clips.size())];
  int64_t want = static_cast<int64_t>(std::llround(rng.uniform(0.0, 2.0) * 16000.0));
  int64_t len = std::min<int64_t>(want, sp.samples.length());
  int64_t offset = len < 32000 ? rng.uniform_int(32000 - len + 1) : 0;

  Waveform dry_speech;
  dry_speech.samples.assign(32000, 0.0);
  if (len > 0) {
    Waveform seg;
    seg.samples.assign(sp.samples.samples.begin(), sp.samples.samples.begin() + len);
    seg = normalize_unit_variance(seg);
    std::copy(seg.samples.begin(), seg.samples.end(), dry_speech.samples.begin() + offset);
  }

  SceneRender speech_render = render_moving_source(scene, dry_speech);
  SceneRender noise_render = render_static_source(scene, scene.noise_source, nz.samples);
  if (!std::isinf(scene.diffuse_db)) add_diffuse_noise(noise_render, scene.diffuse_db, rng);

  MultiChannelMixture mc = compose_room_mixture(speech_render, noise_render, schedule, rng);

  std::vector<Matrix> slabs;
  slabs.reserve(mc.channels.size());
  for (const auto& ch : mc.channels) slabs.push_back(magnitude(stft(ch, spec)));

  LabeledExample ex;
  ex.grid = stack_channels(std::move(slabs));
  ex.recipe = mc.recipe;
  ex.recipe.id = id;
  ex.recipe.speech_clip = sp.id;
  ex.recipe.noise_clip = nz.id;
  ex.recipe.speech_len = len;
  ex.recipe.insert_offset = offset;
  ex.recipe.frame_shuffle = per_frame_shuffle;
  ex.recipe.frame_shuffle_seed = rng.next_u64();
  if (per_frame_shuffle && ex.grid.channels() > 1) {
    Rng shuffle_rng(ex.recipe.frame_shuffle_seed);
    ex.grid = per_frame_snr_shuffle(ex.grid, shuffle_rng);
  }
  ex.labels = frame_labels(offset, len, spec, ex.grid.frames());
  return ex;
}

RoomMixtureSource::RoomMixtureSource(ClipBank speech, ClipBank noise, SnrSchedule schedule,
                                     RoomDataConfig room, int channels, int val_mixtures,
                                     FrameSpec stft, uint64_t seed,
                                     std::vector<RoomScene> scenes)
    : speech_(std::move(speech)),
      noise_(std::move(noise)),
      schedule_(std::move(schedule)),
      room_(room),
      channels_(channels),
      val_mixtures_(val_mixtures),
      stft_(stft),
      seed_(seed),
      scenes_(std::move(scenes)) {
  if (scenes_.empty()) {
    Rng rng(mix_seed(seed_, kStreamScene));
    scenes_.reserve(room_.train_scenes);
    for (int i = 0; i < room_.train_scenes; ++i)
      scenes_.push_back(scene_sample(rng, channels_, room_.scene));
  }
  for (const auto& s : scenes_)
    if (static_cast<int>(s.mics.size()) < channels_)
      throw InputError("room source: scene " + s.id + " has fewer than " +
                       std::to_string(channels_) + " mics");
}

LabeledExample RoomMixtureSource::make(uint64_t stream, int64_t index) {
  Rng rng(mix_seed(stream, static_cast<uint64_t>(index)));
  RoomScene scene = scenes_[rng.uniform_int(scenes_.size())];
  scene.mics.resize(channels_);
  return make_room_example(scene, speech_, noise_, schedule_, room_.per_frame_shuffle,
                           stft_, rng, index);
}

LabeledExample RoomMixtureSource::train_example(int epoch, int64_t index) {
  return make(mix_seed(seed_, kStreamTrain, static_cast<uint64_t>(epoch) + 1), index);
}

const std::vector<LabeledExample>& RoomMixtureSource::validation_set() {
  if (val_.empty() && val_mixtures_ > 0) {
    val_.reserve(val_mixtures_);
    for (int i = 0; i < val_mixtures_; ++i)
      val_.push_back(make(mix_seed(seed_, kStreamVal), i));
  }
  return val_;
}

bool BestTracker::observe(int epoch, double loss) {
  if (best_epoch < 0 || loss < best_loss) {
    best_epoch = epoch;
    best_loss = loss;
    return true;
  }
  return false;
}

namespace {

double validation_loss(const TrainConfig& cfg, const BackboneParams& params,
                       const std::vector<LabeledExample>& val) {
  if (val.empty()) return 0.0;
  double total = 0.0;
  for (const auto& ex : val) {
    Tape tape;
    BackboneLeaves lv = BackboneLeaves::make(tape, params, false);
    total += tape.value(model_loss(tape, ex.grid, ex.labels, params, lv, cfg.model)).d[0];
  }
  return total / val.size();
}

std::string grad_norm_report(const ParamSet& params, const std::vector<Matrix>& grads) {
  std::ostringstream s;
  for (size_t i = 0; i < params.count(); ++i) {
    double norm = 0.0;
    for (double g : grads[i].d) norm += g * g;
    s << (i ? " " : "") << params.names[i] << "=" << std::sqrt(norm);
  }
  return s.str();
}

void fill_checkpoint_meta(Checkpoint& c, const TrainConfig& cfg) {
  c.meta["model"] = model_name(cfg.model);
  c.meta["cell"] = cell_name(cfg.cell);
  c.meta["first_channel"] = first_channel_name(cfg.first_channel);
  c.meta["in_dim"] = std::to_string(cfg.in_dim);
  c.meta["hidden"] = std::to_string(cfg.hidden);
  c.meta["precision"] = "f64";
  c.meta["seed"] = std::to_string(cfg.seed);
  c.meta["epochs"] = std::to_string(cfg.epochs);
  c.meta["batches_per_epoch"] = std::to_string(cfg.batches_per_epoch);
  c.meta["batch_size"] = std::to_string(cfg.batch_size);
  c.meta["train_channels"] = std::to_string(cfg.channels);
  c.meta["train_scheme"] = scheme_name(cfg.train_scheme);
  c.meta["per_frame_shuffle"] = cfg.per_frame_shuffle ? "1" : "0";
  c.meta["experiment"] = experiment_name(cfg.experiment);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", cfg.lr.initial);
  c.meta["lr_initial"] = buf;
  std::snprintf(buf, sizeof(buf), "%.17g", cfg.lr.factor);
  c.meta["lr_factor"] = buf;
  c.meta["lr_period"] = std::to_string(cfg.lr.period);
}

}  // namespace

TrainResult train(const TrainConfig& cfg, ExampleSource& source) {
  if (cfg.epochs < 1 || cfg.batches_per_epoch < 1 || cfg.batch_size < 1)
    throw ConfigError("train: epochs, batches and batch size must be positive");

  Rng init_rng(mix_seed(cfg.seed, kStreamInit));
  BackboneParams params = BackboneParams::init(cfg.cell, cfg.in_dim, cfg.hidden, init_rng);
  params.first_channel = cfg.first_channel;
  AdamState adam = AdamState::init(params.p, cfg.adam);

  int start_epoch = 0;
  ParamSet best_params = params.p;
  BestTracker best;

  if (!cfg.resume_path.empty()) {
    Checkpoint rc = load_checkpoint(cfg.resume_path);
    if (rc.meta_or("kind", "") != "resume")
      throw ConfigError(cfg.resume_path + ": not a resume container");
    for (size_t i = 0; i < params.p.count(); ++i) {
      const std::string& name = params.p.names[i];
      params.p.values[i] = rc.params.get(name);
      adam.m[i] = rc.params.get("adam_m:" + name);
      adam.v[i] = rc.params.get("adam_v:" + name);
      best_params.values[i] = rc.params.get("best:" + name);
    }
    adam.step = std::stoll(rc.meta_or("adam_step", "0"));
    start_epoch = std::stoi(rc.meta_or("next_epoch", "0"));
    best.best_epoch = std::stoi(rc.meta_or("best_epoch", "-1"));
    best.best_loss = std::stod(rc.meta_or("best_val_loss", "0"));
  }

  TrainResult result;
  const auto& val = source.validation_set();

  for (int epoch = start_epoch; epoch < cfg.epochs; ++epoch) {
    const double lr = cfg.lr.at(epoch);
    double epoch_loss = 0.0;

    for (int batch = 0; batch < cfg.batches_per_epoch; ++batch) {
      Tape tape;
      BackboneLeaves lv = BackboneLeaves::make(tape, params, true);
      const int m = tape.mark();

      double batch_loss = 0.0;
      for (int i = 0; i < cfg.batch_size; ++i) {
        int64_t index = static_cast<int64_t>(batch) * cfg.batch_size + i;
        LabeledExample ex = source.train_example(epoch, index);
        Val loss = model_loss(tape, ex.grid, ex.labels, params, lv, cfg.model);
        batch_loss += tape.value(loss).d[0];
        tape.backward(loss);
        tape.truncate(m);
      }
      batch_loss /= cfg.batch_size;

      std::vector<Matrix> grads;
      grads.reserve(params.p.count());
      for (size_t i = 0; i < params.p.count(); ++i) {
        const Matrix& v = tape.value(lv.vals[i]);
        Matrix g(v.rows, v.cols);
        if (tape.needs_grad(lv.vals[i])) {
          const Matrix& acc = tape.grad(lv.vals[i]);
          for (size_t k = 0; k < g.size(); ++k) g.d[k] = acc.d[k] / cfg.batch_size;
        }
        grads.push_back(std::move(g));
      }

      bool finite = std::isfinite(batch_loss);
      for (const auto& g : grads)
        if (finite && !g.all_finite()) finite = false;
      if (!finite)
        throw TrainError("non-finite loss at epoch " + std::to_string(epoch) + " batch " +
                         std::to_string(batch) +
                         "; grad norms: " + grad_norm_report(params.p, grads));

      adam_step(params.p, grads, adam, lr);
      epoch_loss += batch_loss;
    }

    TrainCurveRow row;
    row.epoch = epoch;
    row.train_loss = epoch_loss / cfg.batches_per_epoch;
    row.val_loss = validation_loss(cfg, params, val);
    row.lr = lr;
    result.curve.push_back(row);

    if (best.observe(epoch, row.val_loss)) best_params = params.p;
  }

  result.best_epoch = best.best_epoch;
  result.best_val_loss = best.best_loss;

  result.checkpoint.params = best_params;
  result.checkpoint.dtypes.assign(best_params.count(), 0);
  fill_checkpoint_meta(result.checkpoint, cfg);
  result.checkpoint.meta["kind"] = "model";
  result.checkpoint.meta["best_epoch"] = std::to_string(best.best_epoch);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", best.best_loss);
  result.checkpoint.meta["best_val_loss"] = buf;

  fill_checkpoint_meta(result.resume, cfg);
  result.resume.meta["kind"] = "resume";
  result.resume.meta["adam_step"] = std::to_string(adam.step);
  result.resume.meta["next_epoch"] = std::to_string(cfg.epochs);
  result.resume.meta["best_epoch"] = std::to_string(best.best_epoch);
  result.resume.meta["best_val_loss"] = buf;
  for (size_t i = 0; i < params.p.count(); ++i) {
    const std::string& name = params.p.names[i];
    result.resume.params.add(name, params.p.values[i]);
    result.resume.params.add("adam_m:" + name, adam.m[i]);
    result.resume.params.add("adam_v:" + name, adam.v[i]);
    result.resume.params.add("best:" + name, best_params.values[i]);
  }
  result.resume.dtypes.assign(result.resume.params.count(), 0);
  return result;
}

BackboneParams backbone_from_checkpoint(const Checkpoint& c) {
  BackboneParams bp;
  bp.cell = cell_from_name(c.meta_or("cell", "gru"));
  bp.in_dim = std::stoi(c.meta_or("in_dim", "513"));
  bp.hidden = std::stoi(c.meta_or("hidden", "512"));
  bp.first_channel = first_channel_from_name(c.meta_or("first_channel", "prev_frame_last"));
  // preserve canonical parameter order
  Rng dummy(0);
  BackboneParams ref = BackboneParams::init(bp.cell, bp.in_dim, bp.hidden, dummy);
  for (const auto& name : ref.p.names) bp.p.add(name, c.params.get(name));
  return bp;
}

ModelKind model_kind_from_checkpoint(const Checkpoint& c) {
  return model_from_name(c.meta_or("model", "mvn"));
}

std::string curve_to_csv(const std::vector<TrainCurveRow>& curve) {
  std::ostringstream s;
  s << "epoch,train_loss,val_loss,lr\n";
  char buf[128];
  for (const auto& r : curve) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6g\n", r.epoch, r.train_loss,
                  r.val_loss, r.lr);
    s << buf;
  }
  return s.str();
}

double published_accuracy(double raw) {
  return std::round(raw * 1e6) / 1e6;
}

double frame_accuracy(const std::vector<int>& predicted,
                      const std::vector<uint8_t>& truth) {
  if (predicted.size() != truth.size())
    throw ShapeError("frame_accuracy: " + std::to_string(predicted.size()) +
                     " predictions vs " + std::to_string(truth.size()) + " labels");
  if (predicted.empty()) throw InputError("frame_accuracy: empty inputs");
  int64_t hits = 0;
  for (size_t i = 0; i < predicted.size(); ++i)
    if (predicted[i] == static_cast<int>(truth[i])) ++hits;
  return static_cast<double>(hits) / predicted.size();
}

std::vector<EvalAggregate> EvalReport::aggregates() const {
  std::vector<EvalAggregate> out;
  auto find = [&](const EvalRow& r) -> EvalAggregate* {
    for (auto& a : out)
      if (a.model == r.model && a.scheme == r.scheme && a.k == r.k) return &a;
    return nullptr;
  };
  // first pass: means
  for (const auto& r : rows) {
    EvalAggregate* a = find(r);
    if (!a) {
      out.push_back({r.model, r.scheme, r.k, 0.0, 0.0, 0});
      a = &out.back();
    }
    a->mean += r.accuracy;
    a->runs += 1;
  }
  for (auto& a : out) a.mean /= a.runs;
  // second pass: sample std
  for (const auto& r : rows) {
    EvalAggregate* a = find(r);
    double d = r.accuracy - a->mean;
    a->stddev += d * d;
  }
  for (auto& a : out)
    a.stddev = a.runs > 1 ? std::sqrt(a.stddev / (a.runs - 1)) : 0.0;
  return out;
}

std::string EvalReport::raw_csv() const {
  std::ostringstream s;
  s << (with_model_column ? "model,scheme,K,run,accuracy\n" : "scheme,K,run,accuracy\n");
  char buf[160];
  for (const auto& r : rows) {
    if (with_model_column)
      std::snprintf(buf, sizeof(buf), "%s,%s,%d,%d,%.6f\n", r.model.c_str(),
                    r.scheme.c_str(), r.k, r.run, r.accuracy);
    else
      std::snprintf(buf, sizeof(buf), "%s,%d,%d,%.6f\n", r.scheme.c_str(), r.k, r.run,
                    r.accuracy);
    s << buf;
  }
  return s.str();
}

std::string EvalReport::aggregate_csv() const {
  std::ostringstream s;
  s << (with_model_column ? "model,scheme,K,mean,std\n" : "scheme,K,mean,std\n");
  char buf[160];
  for (const auto& a : aggregates()) {
    if (with_model_column)
      std::snprintf(buf, sizeof(buf), "%s,%s,%d,%.6f,%.6f\n", a.model.c_str(),
                    a.scheme.c_str(), a.k, a.mean, a.stddev);
    else
      std::snprintf(buf, sizeof(buf), "%s,%d,%.6f,%.6f\n", a.scheme.c_str(), a.k, a.mean,
                    a.stddev);
    s << buf;
  }
  return s.str();
}

EvalReport parse_eval_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InputError("eval csv: empty file");
  EvalReport report;
  if (line == "model,scheme,K,run,accuracy")
    report.with_model_column = true;
  else if (line == "scheme,K,run,accuracy")
    report.with_model_column = false;
  else
    throw InputError("eval csv: unrecognized header '" + line + "'");
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string item;
    while (std::getline(ls, item, ',')) f.push_back(item);
    size_t want = report.with_model_column ? 5 : 4;
    if (f.size() != want)
      throw InputError("eval csv line " + std::to_string(line_no) + ": expected " +
                       std::to_string(want) + " fields");
    try {
      EvalRow r;
      size_t i = 0;
      if (report.with_model_column) r.model = f[i++];
      r.scheme = f[i++];
      r.k = std::stoi(f[i++]);
      r.run = std::stoi(f[i++]);
      r.accuracy = std::stod(f[i]);
      report.rows.push_back(std::move(r));
    } catch (const std::exception&) {
      throw InputError("eval csv line " + std::to_string(line_no) + ": bad value");
    }
  }
  return report;
}

namespace {

struct RowJob {
  int k = 0;
  int run = 0;
};

LabeledExample eval_example(const EvalConfig& cfg, SnrScheme scheme, int k,
                            const ClipBank& speech, const ClipBank& noise, Rng& rng,
                            int64_t id) {
  SnrSchedule schedule = snr_schedule(scheme, k);
  if (cfg.experiment == ExperimentKind::Simple) {
    MixtureRecipe r = draw_recipe(rng, speech, noise, schedule, cfg.per_frame_shuffle, id);
    return realize(r, speech, noise, cfg.stft);
  }
  RoomScene scene;
  if (cfg.test_scenes.empty()) {
    scene = scene_sample(rng, k, cfg.scene);
  } else {
    scene = cfg.test_scenes[rng.uniform_int(cfg.test_scenes.size())];
    if (static_cast<int>(scene.mics.size()) < k)
      throw InputError("eval: scene " + scene.id + " has fewer than " + std::to_string(k) +
                       " mics");
    scene.mics.resize(k);
  }
  return make_room_example(scene, speech, noise, schedule, cfg.per_frame_shuffle, cfg.stft,
                           rng, id);
}

uint64_t row_seed(const EvalConfig& cfg, SnrScheme scheme, int k, int run) {
  return mix_seed(mix_seed(cfg.seed, kStreamEval, static_cast<uint64_t>(scheme)),
                  static_cast<uint64_t>(k), static_cast<uint64_t>(run));
}

}  // namespace

EvalReport evaluate_sweep(const BackboneParams& params, ModelKind kind, SnrScheme scheme,
                          const std::vector<int>& k_values, int runs, const EvalConfig& cfg,
                          int jobs) {
  if (runs < 1) throw ConfigError("evaluate_sweep: runs must be >= 1");
  const ClipBank speech = synth_bank(ClipKind::Speech, mix_seed(cfg.bank_seed, 1), cfg.speech_clips);
  const ClipBank noise = synth_bank(ClipKind::Noise, mix_seed(cfg.bank_seed, 2), cfg.noise_clips);

  std::vector<RowJob> jobs_list;
  for (int k : k_values)
    for (int run = 0; run < runs; ++run) jobs_list.push_back({k, run});

  std::vector<EvalRow> rows(jobs_list.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t j = next.fetch_add(1);
      if (j >= jobs_list.size()) return;
      const RowJob& job = jobs_list[j];
      Rng rng(row_seed(cfg, scheme, job.k, job.run));
      int64_t hits = 0, total = 0;
      for (int i = 0; i < cfg.mixtures_per_row; ++i) {
        LabeledExample ex = eval_example(cfg, scheme, job.k, speech, noise, rng, i);
        FramePrediction pred = predict(ex.grid, params, kind);
        for (size_t t = 0; t < ex.labels.size(); ++t) {
          hits += pred.labels[t] == static_cast<int>(ex.labels[t]);
          ++total;
        }
      }
      rows[j] = {model_name(kind), scheme_name(scheme), job.k, job.run,
                 published_accuracy(static_cast<double>(hits) / total)};
    }
  };

  int n_threads = std::max(1, jobs);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  EvalReport report;
  report.rows = std::move(rows);
  return report;
}

EvalReport evaluate_sweep_with(PredictFn fn, SnrScheme scheme,
                               const std::vector<int>& k_values, int runs,
                               const EvalConfig& cfg) {
  const ClipBank speech = synth_bank(ClipKind::Speech, mix_seed(cfg.bank_seed, 1), cfg.speech_clips);
  const ClipBank noise = synth_bank(ClipKind::Noise, mix_seed(cfg.bank_seed, 2), cfg.noise_clips);
  EvalReport report;
  for (int k : k_values) {
    for (int run = 0; run < runs; ++run) {
      Rng rng(row_seed(cfg, scheme, k, run));
      int64_t hits = 0, total = 0;
      for (int i = 0; i < cfg.mixtures_per_row; ++i) {
        LabeledExample ex = eval_example(cfg, scheme, k, speech, noise, rng, i);
        std::vector<int> pred = fn(ex, rng);
        if (pred.size() != ex.labels.size())
          throw ShapeError("stub prediction length mismatch");
        for (size_t t = 0; t < ex.labels.size(); ++t) {
          hits += pred[t] == static_cast<int>(ex.labels[t]);
          ++total;
        }
      }
      report.rows.push_back({"stub", scheme_name(scheme), k, run,
                             published_accuracy(static_cast<double>(hits) / total)});
    }
  }
  return report;
}

}  // namespace mvn
