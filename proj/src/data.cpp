#include "mvn/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mvn/errors.hpp"
#include "mvn/wav.hpp"

namespace mvn {

namespace {
constexpr int64_t kBedSamples = 32000;  // 2 s at 16 kHz

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

const ClipSource& ClipBank::by_id(const std::string& id) const {
  for (const auto& c : clips)
    if (c.id == id) return c;
  throw InputError("clip id not in bank: " + id);
}

const char* scheme_name(SnrScheme s) {
  switch (s) {
    case SnrScheme::TrainingGrid: return "training_grid";
    case SnrScheme::Decreasing: return "decreasing";
    case SnrScheme::Increasing: return "increasing";
    case SnrScheme::Explicit: return "explicit";
  }
  return "explicit";
}

SnrScheme scheme_from_name(const std::string& name) {
  if (name == "training_grid") return SnrScheme::TrainingGrid;
  if (name == "decreasing") return SnrScheme::Decreasing;
  if (name == "increasing") return SnrScheme::Increasing;
  if (name == "explicit") return SnrScheme::Explicit;
  throw ConfigError("unknown SNR scheme: " + name);
}

SnrSchedule snr_schedule(SnrScheme scheme, int k) {
  if (k < 1) throw InputError("snr_schedule: channel count must be >= 1");
  SnrSchedule s;
  s.scheme = scheme;
  s.values_db.resize(k);
  switch (scheme) {
    case SnrScheme::Decreasing:
      for (int i = 0; i < k; ++i) s.values_db[i] = -static_cast<double>(i);
      break;
    case SnrScheme::Increasing:
      for (int i = 0; i < k; ++i) s.values_db[i] = -29.0 + i;
      break;
    case SnrScheme::TrainingGrid:
      if (k == 1) {
        s.values_db[0] = 0.0;  // midpoint of the grid span
      } else {
        for (int i = 0; i < k; ++i)
          s.values_db[i] = -5.0 + 10.0 * i / (k - 1);
      }
      break;
    case SnrScheme::Explicit:
      throw ContractError("snr_schedule: explicit scheme needs explicit_schedule()");
  }
  return s;
}

SnrSchedule explicit_schedule(std::vector<double> values_db) {
  if (values_db.empty()) throw InputError("explicit_schedule: empty value list");
  SnrSchedule s;
  s.scheme = SnrScheme::Explicit;
  s.values_db = std::move(values_db);
  return s;
}

Waveform normalize_unit_variance(const Waveform& w) {
  const size_t n = w.samples.size();
  if (n == 0) throw DegenerateInputError("normalize: empty waveform");
  double mean = 0.0;
  for (double x : w.samples) mean += x;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double x : w.samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(n);
  if (var <= 0.0 || !std::isfinite(var))
    throw DegenerateInputError("normalize: zero-variance waveform");
  double scale = 1.0 / std::sqrt(var);
  Waveform out = w;
  for (auto& x : out.samples) x *= scale;
  return out;
}

namespace {

// Power of the noise bed over the insertion window; the speech gain is
// referenced to it so the component SNR measured on that window is exact.
double window_rms(const Waveform& noise, int64_t offset, int64_t len) {
  double acc = 0.0;
  for (int64_t i = 0; i < len; ++i) acc += noise.samples[offset + i] * noise.samples[offset + i];
  return std::sqrt(acc / static_cast<double>(len));
}

Waveform mix_at(const Waveform& speech, const Waveform& noise, double snr_db,
                int64_t offset, double noise_window_rms) {
  Waveform mix = noise;
  const double gain = std::pow(10.0, snr_db / 20.0) * noise_window_rms;
  for (size_t i = 0; i < speech.samples.size(); ++i)
    mix.samples[offset + i] += gain * speech.samples[i];
  return mix;
}

void check_mix_inputs(const Waveform& speech, const Waveform& noise) {
  if (noise.length() != kBedSamples)
    throw InputError("mixture: noise bed must be exactly 2 s (32000 samples), got " +
                     std::to_string(noise.length()));
  if (speech.length() > noise.length())
    throw InputError("mixture: speech segment longer than the noise bed");
}

}  // namespace

SingleMixture make_single_mixture(const Waveform& speech, const Waveform& noise,
                                  double snr_db, Rng& rng) {
  check_mix_inputs(speech, noise);
  SingleMixture out;
  if (speech.length() == 0) {
    out.mix = noise;
    return out;
  }
  out.offset = rng.uniform_int(noise.length() - speech.length() + 1);
  double r = window_rms(noise, out.offset, speech.length());
  out.speech_gain = std::pow(10.0, snr_db / 20.0) * r;
  out.mix = mix_at(speech, noise, snr_db, out.offset, r);
  return out;
}

MultiChannelMixture build_multichannel(const Waveform& speech, const Waveform& noise,
                                       const SnrSchedule& schedule, Rng& rng) {
  check_mix_inputs(speech, noise);
  const int k = schedule.channels();
  if (k < 1) throw InputError("build_multichannel: empty schedule");

  MultiChannelMixture out;
  out.recipe.scheme = scheme_name(schedule.scheme);
  out.recipe.snr_db = schedule.values_db;
  out.recipe.speech_len = speech.length();

  int64_t offset = 0;
  double r = 0.0;
  if (speech.length() > 0) {
    offset = rng.uniform_int(noise.length() - speech.length() + 1);
    r = window_rms(noise, offset, speech.length());
  }
  out.recipe.insert_offset = offset;
  out.recipe.channel_perm = rng.permutation(k);

  out.channels.reserve(k);
  for (int i = 0; i < k; ++i) {
    if (speech.length() == 0)
      out.channels.push_back(noise);
    else
      out.channels.push_back(
          mix_at(speech, noise, schedule.values_db[out.recipe.channel_perm[i]], offset, r));
  }
  return out;
}

SpectraGrid per_frame_snr_shuffle(const SpectraGrid& grid, Rng& rng) {
  const int k = grid.channels();
  SpectraGrid out = grid;
  if (k <= 1) return out;
  const int t_count = grid.frames();
  const int f_count = grid.bins();
  for (int t = 0; t < t_count; ++t) {
    std::vector<int> perm = rng.permutation(k);
    for (int i = 0; i < k; ++i) {
      const double* src = grid.ch[perm[i]].row(t);
      std::copy(src, src + f_count, out.ch[i].row(t));
    }
  }
  return out;
}

std::vector<uint8_t> frame_labels(int64_t offset, int64_t speech_len,
                                  const FrameSpec& spec, int frames) {
  std::vector<uint8_t> labels(frames, 0);
  const int64_t s0 = offset, s1 = offset + speech_len;
  for (int t = 0; t < frames; ++t) {
    int64_t f0 = static_cast<int64_t>(t) * spec.hop;
    int64_t f1 = f0 + spec.window;
    int64_t overlap = std::min(f1, s1) - std::max(f0, s0);
    if (overlap > 0 && 2 * overlap >= spec.window) labels[t] = 1;
  }
  return labels;
}

namespace {

Waveform synth_speech_clip(Rng& rng, double* f0_out) {
  const int n = kBedSamples;
  const double fs = 16000.0;
  const double f0 = rng.uniform(100.0, 300.0);
  const int nharm = std::min(12, static_cast<int>(7800.0 / f0));
  const double am_rate = rng.uniform(2.0, 8.0);
  const double am_phase = rng.uniform(0.0, 2.0 * M_PI);
  std::vector<double> phases(nharm);
  for (auto& p : phases) p = rng.uniform(0.0, 2.0 * M_PI);

  Waveform w;
  w.samples.resize(n);
  const int ramp = 800;  // 50 ms onset/offset
  for (int i = 0; i < n; ++i) {
    double t = i / fs;
    double v = 0.0;
    for (int h = 1; h <= nharm; ++h)
      v += std::sin(2.0 * M_PI * h * f0 * t + phases[h - 1]) / h;
    double am = 1.0 + 0.5 * std::sin(2.0 * M_PI * am_rate * t + am_phase);
    double env = 1.0;
    if (i < ramp) env = 0.5 - 0.5 * std::cos(M_PI * i / ramp);
    if (i >= n - ramp) env = 0.5 - 0.5 * std::cos(M_PI * (n - 1 - i) / ramp);
    w.samples[i] = v * am * env;
  }
  *f0_out = f0;
  return w;
}

Waveform synth_noise_clip(Rng& rng) {
  const int n = kBedSamples;
  const bool lowpass = rng.uniform() < 0.5;
  const double a = rng.uniform(0.4, 0.95);
  Waveform w;
  w.samples.resize(n);
  double prev_x = 0.0, prev_y = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.gaussian();
    double y = lowpass ? (1.0 - a) * x + a * prev_y  // downward tilt
                       : x - a * prev_x;             // upward tilt
    prev_x = x;
    prev_y = y;
    w.samples[i] = y;
  }
  return w;
}

}  // namespace

ClipBank synth_bank(ClipKind kind, uint64_t seed, int n) {
  ClipBank bank;
  bank.kind = kind;
  std::ostringstream desc;
  desc << "synth:" << (kind == ClipKind::Speech ? "speech" : "noise") << ":seed=" << seed
       << ":n=" << n;
  bank.descriptor = desc.str();
  bank.clips.reserve(n);
  for (int i = 0; i < n; ++i) {
    Rng rng(mix_seed(seed, static_cast<uint64_t>(i)));
    ClipSource c;
    c.kind = kind;
    char idbuf[16];
    std::snprintf(idbuf, sizeof(idbuf), "%s%04d", kind == ClipKind::Speech ? "sp" : "ns", i);
    c.id = idbuf;
    c.origin = bank.descriptor;
    if (kind == ClipKind::Speech)
      c.samples = synth_speech_clip(rng, &c.f0);
    else
      c.samples = synth_noise_clip(rng);
    bank.clips.push_back(std::move(c));
  }
  return bank;
}

ClipBank bank_from_descriptor(const std::string& descriptor) {
  // synth:<kind>:seed=<u64>:n=<int>
  std::vector<std::string> parts;
  std::stringstream ss(descriptor);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() == 4 && parts[0] == "synth" && parts[2].rfind("seed=", 0) == 0 &&
      parts[3].rfind("n=", 0) == 0) {
    ClipKind kind;
    if (parts[1] == "speech")
      kind = ClipKind::Speech;
    else if (parts[1] == "noise")
      kind = ClipKind::Noise;
    else
      throw ConfigError("bank descriptor: unknown kind " + parts[1]);
    uint64_t seed = std::stoull(parts[2].substr(5));
    int n = std::stoi(parts[3].substr(2));
    return synth_bank(kind, seed, n);
  }
  throw ConfigError("unsupported bank descriptor: " + descriptor);
}

namespace {

std::vector<std::string> list_wavs(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw IngestionError(dir + ": not a directory");
  std::vector<std::string> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string p = e.path().string();
    if (p.size() >= 4 && p.substr(p.size() - 4) == ".wav") files.push_back(p);
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IngestionError(dir + ": no .wav files found");
  return files;
}

}  // namespace

CorpusBanks load_corpus(const std::string& speech_dir, const std::string& noise_dir,
                        uint64_t seed) {
  CorpusBanks banks;
  banks.speech.kind = ClipKind::Speech;
  banks.noise.kind = ClipKind::Noise;
  banks.speech.descriptor = "dir:speech:" + speech_dir + ":seed=" + std::to_string(seed);
  banks.noise.descriptor = "dir:noise:" + noise_dir + ":seed=" + std::to_string(seed);

  std::vector<std::string> bad;
  auto ingest = [&](const std::string& dir, ClipKind kind, ClipBank& bank, uint64_t ns) {
    for (const auto& path : list_wavs(dir)) {
      if (path.find_first_of(" \t\n") != std::string::npos) {
        bad.push_back(path + " (whitespace in file name)");
        continue;
      }
      try {
        Waveform w = read_wav_mono(path);
        Rng rng(mix_seed(seed, ns, std::hash<std::string>{}(path)));
        ClipSource c;
        c.kind = kind;
        c.id = std::filesystem::path(path).filename().string();
        c.origin = path;
        if (kind == ClipKind::Noise) {
          if (w.length() < kBedSamples) {
            bad.push_back(path + " (noise shorter than 2 s)");
            continue;
          }
          int64_t start = rng.uniform_int(w.length() - kBedSamples + 1);
          c.samples.samples.assign(w.samples.begin() + start,
                                   w.samples.begin() + start + kBedSamples);
        } else {
          int64_t len = std::min<int64_t>(
              w.length(), static_cast<int64_t>(std::llround(rng.uniform(0.0, 2.0) * 16000.0)));
          int64_t start = w.length() > len ? rng.uniform_int(w.length() - len + 1) : 0;
          c.samples.samples.assign(w.samples.begin() + start, w.samples.begin() + start + len);
        }
        bank.clips.push_back(std::move(c));
      } catch (const IngestionError& e) {
        bad.push_back(e.what());
      }
    }
  };
  ingest(speech_dir, ClipKind::Speech, banks.speech, 1);
  ingest(noise_dir, ClipKind::Noise, banks.noise, 2);
  if (!bad.empty()) {
    std::string msg = "corpus ingestion failed for " + std::to_string(bad.size()) + " file(s):";
    for (const auto& b : bad) msg += "\n  " + b;
    throw IngestionError(msg);
  }
  return banks;
}

MixtureRecipe draw_recipe(Rng& rng, const ClipBank& speech, const ClipBank& noise,
                          const SnrSchedule& schedule, bool frame_shuffle, int64_t id) {
  if (speech.empty() || noise.empty()) throw InputError("draw_recipe: empty clip bank");
  MixtureRecipe r;
  r.id = id;
  const ClipSource& sp = speech.clips[rng.uniform_int(speech.clips.size())];
  const ClipSource& ns = noise.clips[rng.uniform_int(noise.clips.size())];
  r.speech_clip = sp.id;
  r.noise_clip = ns.id;
  int64_t want = static_cast<int64_t>(std::llround(rng.uniform(0.0, 2.0) * 16000.0));
  r.speech_len = std::min<int64_t>(want, sp.samples.length());
  r.insert_offset = r.speech_len < kBedSamples
                        ? rng.uniform_int(kBedSamples - r.speech_len + 1)
                        : 0;
  r.scheme = scheme_name(schedule.scheme);
  r.snr_db = schedule.values_db;
  r.channel_perm = rng.permutation(schedule.channels());
  r.frame_shuffle = frame_shuffle;
  r.frame_shuffle_seed = rng.next_u64();
  return r;
}

MultiChannelMixture realize_channels(const MixtureRecipe& r, const ClipBank& speech,
                                     const ClipBank& noise) {
  const Waveform noise_bed = normalize_unit_variance(noise.by_id(r.noise_clip).samples);
  if (noise_bed.length() != kBedSamples)
    throw InputError("realize: noise clip " + r.noise_clip + " is not exactly 2 s");

  MultiChannelMixture out;
  out.recipe = r;
  const int k = r.channels();
  if (static_cast<int>(r.channel_perm.size()) != k)
    throw InputError("realize: permutation length != channel count");

  if (r.speech_len == 0) {
    out.channels.assign(k, noise_bed);
    return out;
  }

  const ClipSource& sp = speech.by_id(r.speech_clip);
  if (r.speech_len > sp.samples.length())
    throw InputError("realize: speech_len exceeds clip " + r.speech_clip);
  Waveform seg;
  seg.samples.assign(sp.samples.samples.begin(), sp.samples.samples.begin() + r.speech_len);
  seg = normalize_unit_variance(seg);

  double rms = 0.0;
  for (int64_t i = 0; i < r.speech_len; ++i) {
    double v = noise_bed.samples[r.insert_offset + i];
    rms += v * v;
  }
  rms = std::sqrt(rms / static_cast<double>(r.speech_len));

  out.channels.reserve(k);
  for (int i = 0; i < k; ++i) {
    double snr = r.snr_db[r.channel_perm[i]];
    double gain = std::pow(10.0, snr / 20.0) * rms;
    Waveform ch = noise_bed;
    for (int64_t s = 0; s < r.speech_len; ++s)
      ch.samples[r.insert_offset + s] += gain * seg.samples[s];
    out.channels.push_back(std::move(ch));
  }
  return out;
}

LabeledExample realize(const MixtureRecipe& r, const ClipBank& speech,
                       const ClipBank& noise, const FrameSpec& spec) {
  MultiChannelMixture mc = realize_channels(r, speech, noise);
  std::vector<Matrix> slabs;
  slabs.reserve(mc.channels.size());
  for (const auto& ch : mc.channels) slabs.push_back(magnitude(stft(ch, spec)));

  LabeledExample ex;
  ex.grid = stack_channels(std::move(slabs));
  if (r.frame_shuffle && ex.grid.channels() > 1) {
    Rng shuffle_rng(r.frame_shuffle_seed);
    ex.grid = per_frame_snr_shuffle(ex.grid, shuffle_rng);
  }
  ex.labels = frame_labels(r.insert_offset, r.speech_len, spec, ex.grid.frames());
  ex.recipe = r;
  return ex;
}

bool MixtureRecipe::operator==(const MixtureRecipe& o) const {
  return id == o.id && speech_clip == o.speech_clip && noise_clip == o.noise_clip &&
         speech_len == o.speech_len && insert_offset == o.insert_offset &&
         scheme == o.scheme && snr_db == o.snr_db && channel_perm == o.channel_perm &&
         frame_shuffle == o.frame_shuffle && frame_shuffle_seed == o.frame_shuffle_seed &&
         scene_id == o.scene_id;
}

std::string recipe_to_line(const MixtureRecipe& r) {
  std::ostringstream s;
  s << "id=" << r.id << " speech=" << r.speech_clip << " noise=" << r.noise_clip
    << " len=" << r.speech_len << " offset=" << r.insert_offset << " scheme=" << r.scheme
    << " snr=";
  for (size_t i = 0; i < r.snr_db.size(); ++i) {
    if (i) s << ",";
    s << fmt_double(r.snr_db[i]);
  }
  s << " perm=";
  for (size_t i = 0; i < r.channel_perm.size(); ++i) {
    if (i) s << ",";
    s << r.channel_perm[i];
  }
  s << " fshuf=" << (r.frame_shuffle ? 1 : 0) << " fseed=" << r.frame_shuffle_seed
    << " scene=" << r.scene_id;
  return s.str();
}

namespace {
std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}
}  // namespace

MixtureRecipe recipe_from_line(const std::string& line, int line_no) {
  MixtureRecipe r;
  bool saw_id = false;
  for (const auto& tok : split(line, ' ')) {
    if (tok.empty()) continue;
    auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw ConfigError("manifest line " + std::to_string(line_no) + ": bad token '" + tok + "'");
    std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    try {
      if (key == "id") {
        r.id = std::stoll(val);
        saw_id = true;
      } else if (key == "speech") {
        r.speech_clip = val;
      } else if (key == "noise") {
        r.noise_clip = val;
      } else if (key == "len") {
        r.speech_len = std::stoll(val);
      } else if (key == "offset") {
        r.insert_offset = std::stoll(val);
      } else if (key == "scheme") {
        r.scheme = val;
      } else if (key == "snr") {
        r.snr_db.clear();
        if (!val.empty())
          for (const auto& v : split(val, ',')) r.snr_db.push_back(std::stod(v));
      } else if (key == "perm") {
        r.channel_perm.clear();
        if (!val.empty())
          for (const auto& v : split(val, ',')) r.channel_perm.push_back(std::stoi(v));
      } else if (key == "fshuf") {
        r.frame_shuffle = val == "1";
      } else if (key == "fseed") {
        r.frame_shuffle_seed = std::stoull(val);
      } else if (key == "scene") {
        r.scene_id = val;
      } else {
        throw ConfigError("manifest line " + std::to_string(line_no) + ": unknown key '" +
                          key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("manifest line " + std::to_string(line_no) + ": bad value for '" +
                        key + "'");
    }
  }
  if (!saw_id)
    throw ConfigError("manifest line " + std::to_string(line_no) + ": missing id field");
  return r;
}

void write_manifest(const std::string& path, const Manifest& m) {
  std::ofstream f(path);
  if (!f) throw IoError(path + ": cannot write");
  f << "manifest_version=1\n";
  f << "speech_bank=" << m.speech_bank << "\n";
  f << "noise_bank=" << m.noise_bank << "\n";
  for (const auto& r : m.recipes) f << recipe_to_line(r) << "\n";
  if (!f) throw IoError(path + ": write failed");
}

Manifest read_manifest(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError(path + ": cannot open");
  Manifest m;
  std::string line;
  int line_no = 0;
  bool versioned = false;
  while (std::getline(f, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    if (line.rfind("manifest_version=", 0) == 0) {
      if (line != "manifest_version=1")
        throw ConfigError(path + ": unsupported manifest version (" + line + ")");
      versioned = true;
    } else if (line.rfind("speech_bank=", 0) == 0) {
      m.speech_bank = line.substr(12);
    } else if (line.rfind("noise_bank=", 0) == 0) {
      m.noise_bank = line.substr(11);
    } else if (line.rfind("id=", 0) == 0) {
      m.recipes.push_back(recipe_from_line(line, line_no));
    } else {
      throw ConfigError(path + " line " + std::to_string(line_no) + ": unrecognized line");
    }
  }
  if (!versioned) throw ConfigError(path + ": missing manifest_version header");
  return m;
}

}  // namespace mvn
