#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mvn/data.hpp"
#include "mvn/dsp.hpp"
#include "mvn/rng.hpp"

namespace mvn {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

struct SourcePath {
  Point2 start;
  Point2 end;
  double jitter_m = 0.25;
  int steps = 16;
  uint64_t seed = 0;  // jitter stream; stored so rendering is pure
};

// 2-D shoebox room. Positions are meters from the south-west corner.
struct RoomScene {
  std::string id;
  double width = 20.0;
  double depth = 20.0;
  double absorption = 0.1;  // amplitude reflection loss per wall bounce
  int ism_order = 4;
  double sound_speed = 343.0;
  std::vector<Point2> mics;
  Point2 noise_source;
  SourcePath path;
  double diffuse_db = -20.0;  // relative to a unit-variance render; -inf disables

  bool operator==(const RoomScene& o) const;
};

struct ImageSource {
  Point2 pos;
  int order = 0;          // total reflections
  double amplitude = 1.0;  // (1 - absorption)^order, spreading applied later
};

struct Rir {
  std::vector<double> taps;  // at 16 kHz
  std::string source;
  int mic = -1;
};

// Mirror lattice restricted to |p| + |q| <= ism_order; source must be
// strictly inside the room.
std::vector<ImageSource> image_sources(const RoomScene& scene, Point2 source);

// Tap per image at round(distance / c * fs), amplitude
// (1-a)^order / max(distance, 0.1 m).
Rir rir(const RoomScene& scene, Point2 source, Point2 mic);

// Length of the prefix holding 99.9% of the tap energy.
int effective_rir_length(const Rir& r);

struct SceneRender {
  std::string scene_id;
  std::vector<Waveform> mics;
};

// Static source: full convolution with each mic's impulse response.
SceneRender render_static_source(const RoomScene& scene, Point2 source,
                                 const Waveform& dry);

// Moving source: the path is discretized into `steps` jittered positions,
// each segment rendered with its own static response, segments joined by
// linear cross-fades of one hop (512 samples). Output trimmed to the dry
// length.
SceneRender render_moving_source(const RoomScene& scene, const Waveform& dry);

// Independent white noise per mic at `level_db` relative to unit variance.
void add_diffuse_noise(SceneRender& render, double level_db, Rng& rng);

struct SceneSampleParams {
  double width = 20.0;
  double depth = 20.0;
  double absorption = 0.1;
  int ism_order = 4;
  double wall_margin = 0.5;
  int noise_grid = 10;  // G x G lattice of candidate noise positions
  int path_steps = 16;
  double path_jitter = 0.25;
  double diffuse_db = -20.0;
};

// Mics uniform inside the walls (with margin), noise source snapped to the
// grid, path between two distinct room corners.
RoomScene scene_sample(Rng& rng, int mic_count, const SceneSampleParams& params = {});

// Mixes a moving-speech render with a noise render from the same geometry at
// per-channel SNRs, then shuffles the channel order. Renders are normalized
// per channel; the recipe records schedule and permutation.
MultiChannelMixture compose_room_mixture(const SceneRender& speech,
                                         const SceneRender& noise,
                                         const SnrSchedule& schedule, Rng& rng);

std::string serialize_scene(const RoomScene& scene);
RoomScene parse_scene(const std::string& text);
void save_scene(const std::string& path, const RoomScene& scene);
RoomScene load_scene(const std::string& path);

}  // namespace mvn
