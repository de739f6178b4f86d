#include "mvn/room.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mvn/errors.hpp"

namespace mvn {

namespace {

constexpr double kMinSpreadDistance = 0.1;
constexpr int kCrossfade = 512;  // one analysis hop

void require_inside(const RoomScene& scene, Point2 p, const char* what) {
  if (!(p.x > 0.0 && p.x < scene.width && p.y > 0.0 && p.y < scene.depth))
    throw InputError(std::string(what) + " (" + std::to_string(p.x) + ", " +
                     std::to_string(p.y) + ") outside room " + std::to_string(scene.width) +
                     "x" + std::to_string(scene.depth));
}

double dist(Point2 a, Point2 b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<ImageSource> image_sources(const RoomScene& scene, Point2 source) {
  require_inside(scene, source, "source");
  const int order = scene.ism_order;
  std::vector<ImageSource> images;
  images.reserve((2 * order * (order + 1)) + 1);
  const double refl = 1.0 - scene.absorption;
  for (int p = -order; p <= order; ++p) {
    const int qmax = order - std::abs(p);
    // 1-D mirror lattice along x: even counts translate, odd counts reflect
    const double ix = (p % 2 == 0) ? p * scene.width + source.x
                                   : (p + 1) * scene.width - source.x;
    for (int q = -qmax; q <= qmax; ++q) {
      const double iy = (q % 2 == 0) ? q * scene.depth + source.y
                                     : (q + 1) * scene.depth - source.y;
      ImageSource img;
      img.pos = {ix, iy};
      img.order = std::abs(p) + std::abs(q);
      img.amplitude = std::pow(refl, img.order);
      images.push_back(img);
    }
  }
  return images;
}

Rir rir(const RoomScene& scene, Point2 source, Point2 mic) {
  require_inside(scene, mic, "microphone");
  const auto images = image_sources(scene, source);
  const double fs = 16000.0;

  int64_t max_delay = 0;
  for (const auto& img : images) {
    int64_t d = std::llround(dist(img.pos, mic) / scene.sound_speed * fs);
    max_delay = std::max(max_delay, d);
  }
  Rir out;
  out.taps.assign(max_delay + 1, 0.0);
  for (const auto& img : images) {
    const double r = dist(img.pos, mic);
    const int64_t d = std::llround(r / scene.sound_speed * fs);
    out.taps[d] += img.amplitude / std::max(r, kMinSpreadDistance);
  }
  return out;
}

int effective_rir_length(const Rir& r) {
  double total = 0.0;
  for (double t : r.taps) total += t * t;
  if (total <= 0.0) return 0;
  double acc = 0.0;
  for (size_t i = 0; i < r.taps.size(); ++i) {
    acc += r.taps[i] * r.taps[i];
    if (acc >= 0.999 * total) return static_cast<int>(i) + 1;
  }
  return static_cast<int>(r.taps.size());
}

namespace {

// Sparse shift-add convolution through the image set; bit-identical to dense
// convolution with the impulse taps built in the same image order.
void render_into(const RoomScene& scene, const std::vector<ImageSource>& images,
                 Point2 mic, const double* dry, int64_t dry_len, int64_t dry_pos,
                 std::vector<double>& out) {
  const double fs = 16000.0;
  for (const auto& img : images) {
    const double r = dist(img.pos, mic);
    const int64_t d = std::llround(r / scene.sound_speed * fs);
    const double a = img.amplitude / std::max(r, kMinSpreadDistance);
    const int64_t base = dry_pos + d;
    const int64_t n = std::min<int64_t>(dry_len, static_cast<int64_t>(out.size()) - base);
    for (int64_t i = 0; i < n; ++i) out[base + i] += a * dry[i];
  }
}

int64_t max_delay_samples(const RoomScene& scene) {
  // farthest image-to-mic distance is bounded by the lattice extent
  const double span = (scene.ism_order + 1) * std::max(scene.width, scene.depth);
  const double diag = std::hypot(span + scene.width, span + scene.depth);
  return std::llround(diag / scene.sound_speed * 16000.0) + 1;
}

}  // namespace

SceneRender render_static_source(const RoomScene& scene, Point2 source,
                                 const Waveform& dry) {
  const auto images = image_sources(scene, source);
  SceneRender render;
  render.scene_id = scene.id;
  render.mics.reserve(scene.mics.size());
  const double fs = 16000.0;
  for (size_t m = 0; m < scene.mics.size(); ++m) {
    require_inside(scene, scene.mics[m], "microphone");
    int64_t max_d = 0;
    for (const auto& img : images)
      max_d = std::max<int64_t>(
          max_d, std::llround(dist(img.pos, scene.mics[m]) / scene.sound_speed * fs));
    Waveform w;
    w.samples.assign(dry.length() + max_d, 0.0);
    render_into(scene, images, scene.mics[m], dry.samples.data(), dry.length(), 0,
                w.samples);
    render.mics.push_back(std::move(w));
  }
  return render;
}

SceneRender render_moving_source(const RoomScene& scene, const Waveform& dry) {
  const int steps = scene.path.steps;
  if (steps < 1) throw InputError("moving source: path must have at least one step");
  const int64_t n = dry.length();
  const int64_t seg = (n + steps - 1) / steps;

  // jittered positions along the line, clamped inside the walls
  Rng jitter_rng(scene.path.seed);
  std::vector<Point2> positions(steps);
  for (int s = 0; s < steps; ++s) {
    double f = steps == 1 ? 0.0 : static_cast<double>(s) / (steps - 1);
    Point2 p{scene.path.start.x + f * (scene.path.end.x - scene.path.start.x),
             scene.path.start.y + f * (scene.path.end.y - scene.path.start.y)};
    if (scene.path.jitter_m > 0.0) {
      p.x += scene.path.jitter_m * jitter_rng.gaussian();
      p.y += scene.path.jitter_m * jitter_rng.gaussian();
    }
    p.x = std::clamp(p.x, 0.05, scene.width - 0.05);
    p.y = std::clamp(p.y, 0.05, scene.depth - 0.05);
    positions[s] = p;
  }

  const int64_t out_len = n + max_delay_samples(scene);
  const int64_t xf = std::min<int64_t>(kCrossfade, seg);
  std::vector<std::vector<double>> acc(scene.mics.size(),
                                       std::vector<double>(out_len, 0.0));
  std::vector<double> piece;
  for (int s = 0; s < steps; ++s) {
    // windowed segment with linear cross-fades at interior boundaries
    const int64_t core0 = s * seg;
    const int64_t core1 = std::min<int64_t>(n, (s + 1) * seg);
    if (core0 >= n) break;
    const int64_t lo = s == 0 ? core0 : core0 - xf / 2;
    const int64_t hi = s == steps - 1 ? core1 : std::min<int64_t>(n, core1 + xf / 2);
    piece.assign(hi - lo, 0.0);
    for (int64_t i = lo; i < hi; ++i) {
      double gain = 1.0;
      if (s > 0 && i < core0 + xf / 2)
        gain = (i - (core0 - xf / 2) + 0.5) / static_cast<double>(xf);
      if (s < steps - 1 && i >= core1 - xf / 2)
        gain = 1.0 - (i - (core1 - xf / 2) + 0.5) / static_cast<double>(xf);
      piece[i - lo] = dry.samples[i] * gain;
    }
    const auto images = image_sources(scene, positions[s]);
    for (size_t m = 0; m < scene.mics.size(); ++m)
      render_into(scene, images, scene.mics[m], piece.data(), piece.size(), lo, acc[m]);
  }

  SceneRender render;
  render.scene_id = scene.id;
  render.mics.resize(scene.mics.size());
  for (size_t m = 0; m < scene.mics.size(); ++m) {
    render.mics[m].samples.assign(acc[m].begin(), acc[m].begin() + n);
  }
  return render;
}

void add_diffuse_noise(SceneRender& render, double level_db, Rng& rng) {
  const double scale = std::isinf(level_db) && level_db < 0
                           ? 0.0
                           : std::pow(10.0, level_db / 20.0);
  if (scale == 0.0) return;
  for (auto& mic : render.mics)
    for (auto& s : mic.samples) s += scale * rng.gaussian();
}

RoomScene scene_sample(Rng& rng, int mic_count, const SceneSampleParams& params) {
  if (mic_count < 2 || mic_count > 30)
    throw InputError("scene_sample: mic count must be in [2, 30], got " +
                     std::to_string(mic_count));
  RoomScene scene;
  scene.width = params.width;
  scene.depth = params.depth;
  scene.absorption = params.absorption;
  scene.ism_order = params.ism_order;
  scene.diffuse_db = params.diffuse_db;

  const double m = params.wall_margin;
  scene.mics.resize(mic_count);
  for (auto& mic : scene.mics) {
    mic.x = rng.uniform(m, scene.width - m);
    mic.y = rng.uniform(m, scene.depth - m);
  }

  // noise source on cell centers of a G x G lattice
  const int g = params.noise_grid;
  int gx = static_cast<int>(rng.uniform_int(g));
  int gy = static_cast<int>(rng.uniform_int(g));
  scene.noise_source = {(gx + 0.5) * scene.width / g, (gy + 0.5) * scene.depth / g};

  const Point2 corners[4] = {{m, m},
                             {scene.width - m, m},
                             {scene.width - m, scene.depth - m},
                             {m, scene.depth - m}};
  int c0 = static_cast<int>(rng.uniform_int(4));
  int c1 = static_cast<int>(rng.uniform_int(3));
  if (c1 >= c0) ++c1;
  scene.path.start = corners[c0];
  scene.path.end = corners[c1];
  scene.path.jitter_m = params.path_jitter;
  scene.path.steps = params.path_steps;
  scene.path.seed = rng.next_u64();

  char idbuf[20];
  std::snprintf(idbuf, sizeof(idbuf), "%016llx",
                static_cast<unsigned long long>(rng.next_u64()));
  scene.id = idbuf;
  return scene;
}

MultiChannelMixture compose_room_mixture(const SceneRender& speech,
                                         const SceneRender& noise,
                                         const SnrSchedule& schedule, Rng& rng) {
  if (speech.scene_id != noise.scene_id)
    throw InputError("compose_room_mixture: renders from different scenes (" +
                     speech.scene_id + " vs " + noise.scene_id + ")");
  if (speech.mics.size() != noise.mics.size())
    throw InputError("compose_room_mixture: mic count mismatch");
  const int k = schedule.channels();
  if (static_cast<int>(speech.mics.size()) != k)
    throw InputError("compose_room_mixture: schedule has " + std::to_string(k) +
                     " entries for " + std::to_string(speech.mics.size()) + " mics");

  const int64_t n = 32000;
  auto fit = [n](const Waveform& w) {
    Waveform out;
    out.samples.assign(n, 0.0);
    const int64_t c = std::min<int64_t>(n, w.length());
    std::copy(w.samples.begin(), w.samples.begin() + c, out.samples.begin());
    return out;
  };

  MultiChannelMixture out;
  out.recipe.scheme = scheme_name(schedule.scheme);
  out.recipe.snr_db = schedule.values_db;
  out.recipe.channel_perm = rng.permutation(k);
  out.recipe.scene_id = speech.scene_id;

  std::vector<Waveform> mixed(k);
  for (int i = 0; i < k; ++i) {
    Waveform nz = normalize_unit_variance(fit(noise.mics[i]));
    Waveform sp = fit(speech.mics[i]);
    double var = 0.0, mean = 0.0;
    for (double x : sp.samples) mean += x;
    mean /= n;
    for (double x : sp.samples) var += (x - mean) * (x - mean);
    var /= n;
    if (var > 0.0) {
      sp = normalize_unit_variance(sp);
      const double gain = std::pow(10.0, schedule.values_db[i] / 20.0);
      for (int64_t s = 0; s < n; ++s) nz.samples[s] += gain * sp.samples[s];
    }
    mixed[i] = std::move(nz);
  }
  out.channels.resize(k);
  for (int i = 0; i < k; ++i) out.channels[i] = std::move(mixed[out.recipe.channel_perm[i]]);
  return out;
}

bool RoomScene::operator==(const RoomScene& o) const {
  auto eq = [](Point2 a, Point2 b) { return a.x == b.x && a.y == b.y; };
  if (!(id == o.id && width == o.width && depth == o.depth && absorption == o.absorption &&
        ism_order == o.ism_order && sound_speed == o.sound_speed &&
        diffuse_db == o.diffuse_db && mics.size() == o.mics.size() &&
        eq(noise_source, o.noise_source) && eq(path.start, o.path.start) &&
        eq(path.end, o.path.end) && path.jitter_m == o.path.jitter_m &&
        path.steps == o.path.steps && path.seed == o.path.seed))
    return false;
  for (size_t i = 0; i < mics.size(); ++i)
    if (!eq(mics[i], o.mics[i])) return false;
  return true;
}

std::string serialize_scene(const RoomScene& scene) {
  std::ostringstream s;
  s << "scene_version=1\n";
  s << "id=" << scene.id << "\n";
  s << "width=" << fmt_double(scene.width) << "\n";
  s << "depth=" << fmt_double(scene.depth) << "\n";
  s << "absorption=" << fmt_double(scene.absorption) << "\n";
  s << "ism_order=" << scene.ism_order << "\n";
  s << "sound_speed=" << fmt_double(scene.sound_speed) << "\n";
  s << "diffuse_db=" << fmt_double(scene.diffuse_db) << "\n";
  s << "mics=";
  for (size_t i = 0; i < scene.mics.size(); ++i) {
    if (i) s << ";";
    s << fmt_double(scene.mics[i].x) << "," << fmt_double(scene.mics[i].y);
  }
  s << "\n";
  s << "noise_source=" << fmt_double(scene.noise_source.x) << ","
    << fmt_double(scene.noise_source.y) << "\n";
  s << "path_start=" << fmt_double(scene.path.start.x) << ","
    << fmt_double(scene.path.start.y) << "\n";
  s << "path_end=" << fmt_double(scene.path.end.x) << "," << fmt_double(scene.path.end.y)
    << "\n";
  s << "path_jitter=" << fmt_double(scene.path.jitter_m) << "\n";
  s << "path_steps=" << scene.path.steps << "\n";
  s << "path_seed=" << scene.path.seed << "\n";
  return s.str();
}

namespace {

Point2 parse_point(const std::string& v, const std::string& key) {
  auto comma = v.find(',');
  if (comma == std::string::npos)
    throw ConfigError("scene file: bad point for key '" + key + "'");
  try {
    return {std::stod(v.substr(0, comma)), std::stod(v.substr(comma + 1))};
  } catch (const std::exception&) {
    throw ConfigError("scene file: bad point for key '" + key + "'");
  }
}

}  // namespace

RoomScene parse_scene(const std::string& text) {
  RoomScene scene;
  std::istringstream in(text);
  std::string line;
  bool versioned = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("scene file line " + std::to_string(line_no) + ": expected key=value");
    std::string key = line.substr(0, eq), val = line.substr(eq + 1);
    try {
      if (key == "scene_version") {
        if (val != "1") throw ConfigError("scene file: unsupported version " + val);
        versioned = true;
      } else if (key == "id") {
        scene.id = val;
      } else if (key == "width") {
        scene.width = std::stod(val);
      } else if (key == "depth") {
        scene.depth = std::stod(val);
      } else if (key == "absorption") {
        scene.absorption = std::stod(val);
      } else if (key == "ism_order") {
        scene.ism_order = std::stoi(val);
      } else if (key == "sound_speed") {
        scene.sound_speed = std::stod(val);
      } else if (key == "diffuse_db") {
        scene.diffuse_db = std::stod(val);
      } else if (key == "mics") {
        scene.mics.clear();
        std::stringstream ms(val);
        std::string item;
        while (std::getline(ms, item, ';'))
          if (!item.empty()) scene.mics.push_back(parse_point(item, key));
      } else if (key == "noise_source") {
        scene.noise_source = parse_point(val, key);
      } else if (key == "path_start") {
        scene.path.start = parse_point(val, key);
      } else if (key == "path_end") {
        scene.path.end = parse_point(val, key);
      } else if (key == "path_jitter") {
        scene.path.jitter_m = std::stod(val);
      } else if (key == "path_steps") {
        scene.path.steps = std::stoi(val);
      } else if (key == "path_seed") {
        scene.path.seed = std::stoull(val);
      } else {
        throw ConfigError("scene file: unknown key '" + key + "'");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw ConfigError("scene file: bad value for key '" + key + "'");
    }
  }
  if (!versioned) throw ConfigError("scene file: missing scene_version");
  if (scene.absorption <= 0.0 || scene.absorption >= 1.0)
    throw ConfigError("scene file: absorption must be in (0, 1)");
  return scene;
}

void save_scene(const std::string& path, const RoomScene& scene) {
  std::ofstream f(path);
  if (!f) throw IoError(path + ": cannot write");
  f << serialize_scene(scene);
  if (!f) throw IoError(path + ": write failed");
}

RoomScene load_scene(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError(path + ": cannot open");
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scene(ss.str());
}

}  // namespace mvn
