#include "mvn/driver.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "mvn/errors.hpp"
#include "mvn/svg.hpp"
#include "mvn/wav.hpp"

namespace mvn {

namespace fs = std::filesystem;

FrameSpec frame_spec_from(const RunConfig& cfg) {
  FrameSpec spec;
  spec.window = static_cast<int>(cfg.i64("stft.window"));
  spec.hop = static_cast<int>(cfg.i64("stft.hop"));
  const std::string& kind = cfg.str("stft.window_kind");
  if (kind == "hann")
    spec.kind = WindowKind::Hann;
  else if (kind == "rect")
    spec.kind = WindowKind::Rect;
  else
    throw ConfigError("stft.window_kind: expected hann or rect, got '" + kind + "'");
  if (spec.window <= 0 || spec.hop <= 0 || spec.hop > spec.window)
    throw ConfigError("stft: window/hop invalid");
  return spec;
}

SceneSampleParams scene_params_from(const RunConfig& cfg) {
  SceneSampleParams p;
  p.width = cfg.dbl("room.width");
  p.depth = cfg.dbl("room.depth");
  p.absorption = cfg.dbl("room.absorption");
  p.ism_order = static_cast<int>(cfg.i64("room.ism_order"));
  p.noise_grid = static_cast<int>(cfg.i64("room.grid"));
  p.wall_margin = cfg.dbl("room.margin");
  p.path_steps = static_cast<int>(cfg.i64("room.path_steps"));
  p.path_jitter = cfg.dbl("room.path_jitter");
  p.diffuse_db = cfg.dbl("room.diffuse_db");
  if (p.absorption <= 0.0 || p.absorption >= 1.0)
    throw ConfigError("room.absorption must be in (0, 1)");
  if (p.ism_order < 0) throw ConfigError("room.ism_order must be >= 0");
  return p;
}

bool per_frame_shuffle_from(const RunConfig& cfg) {
  const std::string& v = cfg.str("data.per_frame_shuffle");
  if (v == "auto") return cfg.str("experiment") == "simple";
  if (v == "on") return true;
  if (v == "off") return false;
  throw ConfigError("data.per_frame_shuffle: expected auto/on/off, got '" + v + "'");
}

TrainConfig train_config_from(const RunConfig& cfg) {
  TrainConfig t;
  t.model = model_from_name(cfg.str("model.kind"));
  t.cell = cell_from_name(cfg.str("model.cell"));
  t.first_channel = first_channel_from_name(cfg.str("model.first_channel"));
  t.hidden = static_cast<int>(cfg.i64("model.hidden"));
  t.epochs = static_cast<int>(cfg.i64("train.epochs"));
  t.batches_per_epoch = static_cast<int>(cfg.i64("train.batches_per_epoch"));
  t.batch_size = static_cast<int>(cfg.i64("train.batch_size"));
  t.channels = static_cast<int>(cfg.i64("train.channels"));
  t.train_scheme = scheme_from_name(cfg.str("data.scheme"));
  t.per_frame_shuffle = per_frame_shuffle_from(cfg);
  t.val_mixtures = static_cast<int>(cfg.i64("train.val_mixtures"));
  t.fixed_epoch_data = cfg.flag("train.fixed_epoch_data");
  t.lr.initial = cfg.dbl("train.lr_initial");
  t.lr.factor = cfg.dbl("train.lr_decay_factor");
  t.lr.period = static_cast<int>(cfg.i64("train.lr_decay_period"));
  t.seed = static_cast<uint64_t>(cfg.i64("seed"));
  t.experiment = experiment_from_name(cfg.str("experiment"));
  t.stft = frame_spec_from(cfg);
  t.in_dim = t.stft.window / 2 + 1;
  t.resume_path = cfg.str("train.resume");
  if (t.channels < 1) throw ConfigError("train.channels must be >= 1");
  if (t.hidden < 1) throw ConfigError("model.hidden must be >= 1");
  if (t.lr.initial <= 0) throw ConfigError("train.lr_initial must be > 0");
  if (t.lr.period < 1) throw ConfigError("train.lr_decay_period must be >= 1");
  return t;
}

EvalConfig eval_config_from(const RunConfig& cfg) {
  EvalConfig e;
  e.experiment = experiment_from_name(cfg.str("experiment"));
  e.mixtures_per_row = static_cast<int>(cfg.i64("eval.mixtures_per_row"));
  e.seed = static_cast<uint64_t>(cfg.i64("seed"));
  e.per_frame_shuffle = per_frame_shuffle_from(cfg);
  e.stft = frame_spec_from(cfg);
  e.bank_seed = static_cast<uint64_t>(cfg.i64("bank.seed"));
  e.speech_clips = static_cast<int>(cfg.i64("bank.speech_clips"));
  e.noise_clips = static_cast<int>(cfg.i64("bank.noise_clips"));
  e.scene = scene_params_from(cfg);
  if (e.mixtures_per_row < 1) throw ConfigError("eval.mixtures_per_row must be >= 1");
  if (cfg.has("room.scenes_dir") && e.experiment == ExperimentKind::Room) {
    // held-out tail of the sorted scene set (train/test split by scene id)
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(cfg.str("room.scenes_dir")))
      if (entry.path().extension() == ".txt") files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());
    if (!files.empty()) {
      size_t test_from = files.size() - std::max<size_t>(1, files.size() / 10);
      for (size_t i = test_from; i < files.size(); ++i)
        e.test_scenes.push_back(load_scene(files[i]));
    }
  }
  return e;
}

CorpusBanks banks_from(const RunConfig& cfg) {
  CorpusBanks banks;
  if (cfg.has("data.speech_dir") || cfg.has("data.noise_dir")) {
    if (!cfg.has("data.speech_dir") || !cfg.has("data.noise_dir"))
      throw ConfigError("corpus mode needs both data.speech_dir and data.noise_dir");
    return load_corpus(cfg.str("data.speech_dir"), cfg.str("data.noise_dir"),
                       static_cast<uint64_t>(cfg.i64("bank.seed")));
  }
  banks.speech = synth_bank(ClipKind::Speech, mix_seed(cfg.i64("bank.seed"), 1),
                            static_cast<int>(cfg.i64("bank.speech_clips")));
  banks.noise = synth_bank(ClipKind::Noise, mix_seed(cfg.i64("bank.seed"), 2),
                           static_cast<int>(cfg.i64("bank.noise_clips")));
  return banks;
}

namespace {

// Fixed dataset loaded from a manifest; recipes cycle per epoch, the tail
// forms the validation split.
class ManifestSource : public ExampleSource {
 public:
  ManifestSource(Manifest manifest, int val_mixtures, FrameSpec spec)
      : manifest_(std::move(manifest)), spec_(spec) {
    speech_ = bank_from_descriptor(manifest_.speech_bank);
    noise_ = bank_from_descriptor(manifest_.noise_bank);
    int64_t n = static_cast<int64_t>(manifest_.recipes.size());
    val_count_ = std::min<int64_t>(val_mixtures, n > 1 ? n / 5 : 0);
    train_count_ = n - val_count_;
    if (train_count_ < 1) throw InputError("manifest has no training examples");
  }

  LabeledExample train_example(int, int64_t index) override {
    return realize(manifest_.recipes[index % train_count_], speech_, noise_, spec_);
  }

  const std::vector<LabeledExample>& validation_set() override {
    if (val_.empty() && val_count_ > 0) {
      for (int64_t i = 0; i < val_count_; ++i)
        val_.push_back(realize(manifest_.recipes[train_count_ + i], speech_, noise_, spec_));
    }
    return val_;
  }

 private:
  Manifest manifest_;
  FrameSpec spec_;
  ClipBank speech_, noise_;
  int64_t train_count_ = 0, val_count_ = 0;
  std::vector<LabeledExample> val_;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw IoError(path + ": cannot write");
  f << text;
  if (!f) throw IoError(path + ": write failed");
}

void ensure_out_dir(const std::string& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir))
    throw IoError(out_dir + ": cannot create output directory");
}

void write_resolved(const RunConfig& cfg, const std::string& out_dir) {
  write_text((fs::path(out_dir) / "config_resolved.cfg").string(), cfg.serialize());
}

std::vector<RoomScene> load_train_scenes(const RunConfig& cfg, int mics) {
  std::vector<std::string> files;
  for (const auto& entry : fs::directory_iterator(cfg.str("room.scenes_dir")))
    if (entry.path().extension() == ".txt") files.push_back(entry.path().string());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InputError(cfg.str("room.scenes_dir") + ": no scene files");
  size_t test_from = files.size() - std::max<size_t>(1, files.size() / 10);
  std::vector<RoomScene> scenes;
  for (size_t i = 0; i < test_from; ++i) scenes.push_back(load_scene(files[i]));
  if (scenes.empty()) throw InputError("scene split left no training scenes");
  (void)mics;
  return scenes;
}

}  // namespace

std::unique_ptr<ExampleSource> source_from(const RunConfig& cfg) {
  const FrameSpec spec = frame_spec_from(cfg);
  const int channels = static_cast<int>(cfg.i64("train.channels"));
  const int val = static_cast<int>(cfg.i64("train.val_mixtures"));
  const uint64_t seed = static_cast<uint64_t>(cfg.i64("seed"));
  const SnrSchedule schedule = snr_schedule(scheme_from_name(cfg.str("data.scheme")), channels);
  const bool shuffle = per_frame_shuffle_from(cfg);

  if (cfg.has("data.manifest")) {
    if (cfg.str("experiment") != "simple")
      throw ConfigError("data.manifest is only supported for the simple experiment");
    if (!fs::exists(cfg.str("data.manifest")))
      throw IoError(cfg.str("data.manifest") + ": data manifest not found");
    return std::make_unique<ManifestSource>(read_manifest(cfg.str("data.manifest")), val, spec);
  }

  CorpusBanks banks = banks_from(cfg);
  if (cfg.str("experiment") == "simple") {
    return std::make_unique<SimpleMixtureSource>(std::move(banks.speech),
                                                 std::move(banks.noise), schedule, shuffle,
                                                 cfg.flag("train.fixed_epoch_data"), val,
                                                 spec, seed);
  }
  RoomDataConfig room;
  room.scene = scene_params_from(cfg);
  room.train_scenes = static_cast<int>(cfg.i64("room.scenes"));
  room.per_frame_shuffle = shuffle;
  std::vector<RoomScene> scenes;
  if (cfg.has("room.scenes_dir")) scenes = load_train_scenes(cfg, channels);
  return std::make_unique<RoomMixtureSource>(std::move(banks.speech), std::move(banks.noise),
                                             schedule, room, channels, val, spec, seed,
                                             std::move(scenes));
}

namespace cmd {

void gen_data(const RunConfig& cfg, const std::string& out_dir) {
  ensure_out_dir(out_dir);
  const int64_t n = cfg.i64("data.mixtures");
  if (n < 1) throw ConfigError("data.mixtures must be >= 1");
  const int channels = static_cast<int>(cfg.i64("data.channels"));
  if (channels < 1) throw ConfigError("data.channels must be >= 1");
  const SnrSchedule schedule = snr_schedule(scheme_from_name(cfg.str("data.scheme")), channels);
  const bool shuffle = per_frame_shuffle_from(cfg);
  const uint64_t seed = static_cast<uint64_t>(cfg.i64("seed"));
  const FrameSpec spec = frame_spec_from(cfg);
  const bool dump_wav = cfg.flag("data.write_wav");
  const bool room = cfg.str("experiment") == "room";

  CorpusBanks banks = banks_from(cfg);
  Manifest manifest;
  manifest.speech_bank = banks.speech.descriptor;
  manifest.noise_bank = banks.noise.descriptor;

  if (dump_wav) ensure_out_dir((fs::path(out_dir) / "audio").string());

  std::vector<RoomScene> scenes;
  if (room) {
    Rng scene_rng(mix_seed(seed, 0x5c30));
    const int n_scenes = static_cast<int>(cfg.i64("room.scenes"));
    ensure_out_dir((fs::path(out_dir) / "scenes").string());
    for (int i = 0; i < n_scenes; ++i) {
      scenes.push_back(scene_sample(scene_rng, channels, scene_params_from(cfg)));
      save_scene((fs::path(out_dir) / "scenes" / ("scene_" + scenes.back().id + ".txt")).string(),
                 scenes.back());
    }
  }

  for (int64_t i = 0; i < n; ++i) {
    Rng rng(mix_seed(seed, 0xda7a, static_cast<uint64_t>(i)));
    if (room) {
      const RoomScene& scene = scenes[rng.uniform_int(scenes.size())];
      LabeledExample ex = make_room_example(scene, banks.speech, banks.noise, schedule,
                                            shuffle, spec, rng, i);
      manifest.recipes.push_back(ex.recipe);
      // room waveform dump would re-render; recipes alone document provenance
    } else {
      MixtureRecipe r = draw_recipe(rng, banks.speech, banks.noise, schedule, shuffle, i);
      manifest.recipes.push_back(r);
      if (dump_wav) {
        MultiChannelMixture mc = realize_channels(r, banks.speech, banks.noise);
        char name[40];
        std::snprintf(name, sizeof(name), "ex%06lld.wav", static_cast<long long>(i));
        write_wav((fs::path(out_dir) / "audio" / name).string(), mc.channels);
      }
    }
  }
  write_manifest((fs::path(out_dir) / "manifest.txt").string(), manifest);
  write_resolved(cfg, out_dir);
}

void simulate(const RunConfig& cfg, const std::string& out_dir) {
  ensure_out_dir(out_dir);
  const int n_scenes = static_cast<int>(cfg.i64("room.scenes"));
  if (n_scenes < 1) throw ConfigError("room.scenes must be >= 1");
  const int mics = static_cast<int>(cfg.i64("room.mics"));
  Rng rng(mix_seed(static_cast<uint64_t>(cfg.i64("seed")), 0x5c31));
  for (int i = 0; i < n_scenes; ++i) {
    RoomScene scene = scene_sample(rng, mics, scene_params_from(cfg));
    save_scene((fs::path(out_dir) / ("scene_" + scene.id + ".txt")).string(), scene);
    if (cfg.flag("room.cache_render")) {
      // impulse through the noise-source response caches each mic's RIR;
      // per-mic lengths differ, pad to the longest for the interleaved file
      Waveform impulse;
      impulse.samples.assign(1, 1.0);
      SceneRender r = render_static_source(scene, scene.noise_source, impulse);
      size_t longest = 0;
      for (const auto& m : r.mics) longest = std::max(longest, m.samples.size());
      for (auto& m : r.mics) m.samples.resize(longest, 0.0);
      write_wav((fs::path(out_dir) / ("render_" + scene.id + ".wav")).string(), r.mics);
    }
  }
  write_resolved(cfg, out_dir);
}

void train_run(const RunConfig& cfg, const std::string& out_dir) {
  ensure_out_dir(out_dir);
  TrainConfig tc = train_config_from(cfg);
  std::unique_ptr<ExampleSource> source = source_from(cfg);
  TrainResult result = train(tc, *source);
  save_checkpoint((fs::path(out_dir) / "checkpoint.bin").string(), result.checkpoint);
  save_checkpoint((fs::path(out_dir) / "resume.bin").string(), result.resume);
  write_text((fs::path(out_dir) / "training_curve.csv").string(),
             curve_to_csv(result.curve));
  write_resolved(cfg, out_dir);
}

void eval_run(const RunConfig& cfg, const std::vector<std::string>& checkpoint_paths,
              const std::string& out_dir) {
  if (checkpoint_paths.empty()) throw ConfigError("eval: no checkpoint given");
  ensure_out_dir(out_dir);
  EvalConfig ec = eval_config_from(cfg);
  const std::vector<int> ks = cfg.int_list("eval.k_values");
  const int runs = static_cast<int>(cfg.i64("eval.runs"));
  const int jobs = static_cast<int>(cfg.i64("jobs"));

  std::vector<SnrScheme> schemes;
  for (const auto& name : cfg.str_list("eval.schemes")) schemes.push_back(scheme_from_name(name));
  if (schemes.empty()) throw ConfigError("eval.schemes is empty");

  EvalReport combined;
  combined.with_model_column = checkpoint_paths.size() > 1;
  for (const auto& path : checkpoint_paths) {
    Checkpoint c = load_checkpoint(path);
    BackboneParams params = backbone_from_checkpoint(c);
    ModelKind kind = model_kind_from_checkpoint(c);
    for (SnrScheme scheme : schemes) {
      EvalReport r = evaluate_sweep(params, kind, scheme, ks, runs, ec, jobs);
      combined.rows.insert(combined.rows.end(), r.rows.begin(), r.rows.end());
    }
  }
  write_text((fs::path(out_dir) / "report_raw.csv").string(), combined.raw_csv());
  write_text((fs::path(out_dir) / "report_agg.csv").string(), combined.aggregate_csv());
  write_resolved(cfg, out_dir);
}

std::vector<std::string> plot(const std::vector<std::string>& csv_paths,
                              const std::string& out_dir, int width, int height) {
  if (csv_paths.empty()) throw ConfigError("plot: no report CSV given");
  std::vector<EvalRow> rows;
  for (const auto& path : csv_paths) {
    std::ifstream f(path);
    if (!f) throw IoError(path + ": cannot open");
    std::ostringstream ss;
    ss << f.rdbuf();
    EvalReport r = parse_eval_csv(ss.str());
    std::string fallback = fs::path(path).stem().string();
    for (auto& row : r.rows) {
      if (row.model.empty()) row.model = fallback;
      rows.push_back(row);
    }
  }
  if (rows.empty()) throw InputError("plot: no data rows in report");
  ensure_out_dir(out_dir);

  std::vector<std::string> schemes;
  for (const auto& r : rows)
    if (std::find(schemes.begin(), schemes.end(), r.scheme) == schemes.end())
      schemes.push_back(r.scheme);

  std::vector<std::string> written;
  for (const auto& scheme : schemes) {
    EvalReport sub;
    sub.with_model_column = true;
    for (const auto& r : rows)
      if (r.scheme == scheme) sub.rows.push_back(r);
    std::vector<ChartSeries> series;
    for (const auto& a : sub.aggregates()) {
      ChartSeries* s = nullptr;
      for (auto& cs : series)
        if (cs.name == a.model) s = &cs;
      if (!s) {
        series.push_back({a.model, {}});
        s = &series.back();
      }
      s->points.push_back({static_cast<double>(a.k), a.mean, a.stddev});
    }
    std::string svg = render_chart_svg("frame accuracy (" + scheme + " SNR)", series,
                                       width, height);
    std::string path = (fs::path(out_dir) / ("plot_" + scheme + ".svg")).string();
    write_text(path, svg);
    written.push_back(path);
  }
  return written;
}

}  // namespace cmd

}  // namespace mvn
