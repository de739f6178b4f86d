#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvn/dsp.hpp"
#include "mvn/rng.hpp"

namespace mvn {

enum class ClipKind { Speech, Noise };

struct ClipSource {
  ClipKind kind = ClipKind::Speech;
  std::string id;
  std::string origin;  // file path or synthetic generator tag
  Waveform samples;
  double f0 = 0.0;  // fundamental of synthetic speech proxies, 0 otherwise
};

struct ClipBank {
  ClipKind kind = ClipKind::Speech;
  std::string descriptor;  // self-describing; a manifest can rebuild the bank
  std::vector<ClipSource> clips;

  const ClipSource& by_id(const std::string& id) const;
  bool empty() const { return clips.empty(); }
};

enum class SnrScheme { TrainingGrid, Decreasing, Increasing, Explicit };

const char* scheme_name(SnrScheme s);
SnrScheme scheme_from_name(const std::string& name);

struct SnrSchedule {
  SnrScheme scheme = SnrScheme::Explicit;
  std::vector<double> values_db;

  int channels() const { return static_cast<int>(values_db.size()); }
};

// decreasing: [0, -1, ..., -(K-1)]; increasing: [-29, -28, ..., -29+K-1];
// training grid: K points evenly spaced over [-5, +5].
SnrSchedule snr_schedule(SnrScheme scheme, int k);
SnrSchedule explicit_schedule(std::vector<double> values_db);

// Scaling only, no centering; output variance 1. Zero-variance input throws.
Waveform normalize_unit_variance(const Waveform& w);

struct SingleMixture {
  Waveform mix;
  int64_t offset = 0;     // sample index where the speech segment starts
  double speech_gain = 0; // applied linear gain (diagnostic)
};

// Adds a unit-variance speech segment into a unit-variance noise bed at a
// random admissible offset. The gain is referenced to the noise power over
// the insertion window, so the component SNR measured there equals the
// request; with noise whose local power equals its global power this reduces
// to a plain 10^(snr/20) scale.
SingleMixture make_single_mixture(const Waveform& speech, const Waveform& noise,
                                  double snr_db, Rng& rng);

// Full provenance of one multi-channel example. A recipe plus the banks it
// references reproduces the example bit-exactly.
struct MixtureRecipe {
  int64_t id = 0;
  std::string speech_clip;  // empty = all-noise example
  std::string noise_clip;
  int64_t speech_len = 0;     // samples used from the speech clip
  int64_t insert_offset = 0;  // samples into the 2 s bed
  std::string scheme;
  std::vector<double> snr_db;     // schedule values, pre-permutation
  std::vector<int> channel_perm;  // channel i mixed at snr_db[channel_perm[i]]
  bool frame_shuffle = false;
  uint64_t frame_shuffle_seed = 0;
  std::string scene_id;  // room experiment only

  int channels() const { return static_cast<int>(snr_db.size()); }
  bool operator==(const MixtureRecipe& o) const;
};

struct MultiChannelMixture {
  std::vector<Waveform> channels;
  MixtureRecipe recipe;
};

// Same speech/noise content on every channel, per-channel SNR taken from the
// (uniformly drawn, recorded) permutation of the schedule.
MultiChannelMixture build_multichannel(const Waveform& speech, const Waveform& noise,
                                       const SnrSchedule& schedule, Rng& rng);

// Independently permutes the channel slabs at every frame index.
SpectraGrid per_frame_snr_shuffle(const SpectraGrid& grid, Rng& rng);

// label(t) = 1 iff at least half of frame t's samples fall inside
// [offset, offset + speech_len).
std::vector<uint8_t> frame_labels(int64_t offset, int64_t speech_len,
                                  const FrameSpec& spec, int frames);

struct LabeledExample {
  SpectraGrid grid;
  std::vector<uint8_t> labels;
  MixtureRecipe recipe;
};

// Synthetic stand-in corpus. Speech proxies are amplitude-modulated harmonic
// complexes (randomized f0 in 100..300 Hz); noise clips are stationary
// colored noise with a randomized spectral tilt. Deterministic per seed.
ClipBank synth_bank(ClipKind kind, uint64_t seed, int n);
ClipBank bank_from_descriptor(const std::string& descriptor);

struct CorpusBanks {
  ClipBank speech;
  ClipBank noise;
};

// Ingests mono 16 kHz WAV directories; speech files are excerpted to a
// uniform length in [0, 2] s, noise files to exactly 2 s.
CorpusBanks load_corpus(const std::string& speech_dir, const std::string& noise_dir,
                        uint64_t seed);

// Draws every random choice of one example and freezes it into a recipe.
MixtureRecipe draw_recipe(Rng& rng, const ClipBank& speech, const ClipBank& noise,
                          const SnrSchedule& schedule, bool frame_shuffle, int64_t id);

// Pure functions of (recipe, banks): waveform channels, or spectra + labels.
MultiChannelMixture realize_channels(const MixtureRecipe& r, const ClipBank& speech,
                                     const ClipBank& noise);
LabeledExample realize(const MixtureRecipe& r, const ClipBank& speech,
                       const ClipBank& noise, const FrameSpec& spec);

// Manifest: versioned header lines, then one key=value line per recipe.
std::string recipe_to_line(const MixtureRecipe& r);
MixtureRecipe recipe_from_line(const std::string& line, int line_no);

struct Manifest {
  std::string speech_bank;
  std::string noise_bank;
  std::vector<MixtureRecipe> recipes;
};

void write_manifest(const std::string& path, const Manifest& m);
Manifest read_manifest(const std::string& path);

}  // namespace mvn
