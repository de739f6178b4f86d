#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "mvn/errors.hpp"
#include "mvn/room.hpp"
#include "test_support.hpp"

using namespace mvn;
using namespace mvn_test;

namespace {

RoomScene basic_scene() {
  RoomScene s;
  s.id = "test";
  s.mics = {{5.0, 5.0}};
  s.noise_source = {12.0, 8.0};
  s.path.start = {1.0, 1.0};
  s.path.end = {19.0, 19.0};
  s.path.jitter_m = 0.0;
  s.path.steps = 1;
  s.path.seed = 4;
  s.diffuse_db = -std::numeric_limits<double>::infinity();
  return s;
}

// brute-force oracle: recursively reflect across each wall, dedupe positions,
// keep the minimum reflection count per position
void mirror_recurse(double w, double d, double x, double y, int depth, int max_depth,
                    std::map<std::pair<long long, long long>, int>& out) {
  auto key = std::make_pair(std::llround(x * 1e6), std::llround(y * 1e6));
  auto it = out.find(key);
  if (it == out.end() || it->second > depth) out[key] = depth;
  if (depth == max_depth) return;
  mirror_recurse(w, d, -x, y, depth + 1, max_depth, out);
  mirror_recurse(w, d, 2 * w - x, y, depth + 1, max_depth, out);
  mirror_recurse(w, d, x, -y, depth + 1, max_depth, out);
  mirror_recurse(w, d, x, 2 * d - y, depth + 1, max_depth, out);
}

// direct dense convolution oracle
std::vector<double> conv_oracle(const std::vector<double>& x, const std::vector<double>& h) {
  std::vector<double> y(x.size() + h.size() - 1, 0.0);
  for (size_t i = 0; i < x.size(); ++i)
    for (size_t j = 0; j < h.size(); ++j) y[i + j] += x[i] * h[j];
  return y;
}

}  // namespace

TEST_CASE("image counts follow the L1 ball") {
  RoomScene s = basic_scene();
  for (int order = 0; order <= 5; ++order) {
    s.ism_order = order;
    auto images = image_sources(s, {7.0, 3.0});
    int expect = 1;
    for (int d = 1; d <= order; ++d) expect += 4 * d;
    CHECK(static_cast<int>(images.size()) == expect);
  }
  s.ism_order = 4;
  CHECK(image_sources(s, {7.0, 3.0}).size() == 41);
}

TEST_CASE("first-order image mirrors across the wall") {
  RoomScene s = basic_scene();
  s.ism_order = 1;
  auto images = image_sources(s, {3.0, 11.0});
  bool found = false;
  for (const auto& img : images)
    if (img.pos.x == -3.0 && img.pos.y == 11.0 && img.order == 1) found = true;
  CHECK(found);
}

TEST_CASE("image positions match the mirror-recursion oracle") {
  RoomScene s = basic_scene();
  s.ism_order = 4;
  Rng rng(51);
  for (int trial = 0; trial < 10; ++trial) {
    Point2 src{rng.uniform(0.5, 19.5), rng.uniform(0.5, 19.5)};
    auto images = image_sources(s, src);

    std::map<std::pair<long long, long long>, int> oracle;
    mirror_recurse(s.width, s.depth, src.x, src.y, 0, 4, oracle);

    REQUIRE(images.size() == oracle.size());
    for (const auto& img : images) {
      auto key = std::make_pair(std::llround(img.pos.x * 1e6), std::llround(img.pos.y * 1e6));
      auto it = oracle.find(key);
      REQUIRE(it != oracle.end());
      CHECK(it->second == img.order);
      CHECK(img.amplitude ==
            doctest::Approx(std::pow(1.0 - s.absorption, img.order)).epsilon(1e-12));
    }
  }
}

TEST_CASE("image_sources rejects an outside source") {
  RoomScene s = basic_scene();
  CHECK_THROWS_AS(image_sources(s, {-1.0, 5.0}), InputError);
  CHECK_THROWS_AS(image_sources(s, {5.0, 25.0}), InputError);
}

TEST_CASE("free-field tap lands at distance/c samples") {
  RoomScene s = basic_scene();
  s.ism_order = 0;
  // distance 3.43 m at 343 m/s -> 10 ms -> sample 160
  Rir r = rir(s, {5.0, 5.0}, {8.43, 5.0});
  REQUIRE(static_cast<int>(r.taps.size()) == 161);
  for (int i = 0; i < 160; ++i) CHECK(r.taps[i] == 0.0);
  CHECK(r.taps[160] == doctest::Approx(1.0 / 3.43).epsilon(1e-12));
}

TEST_CASE("direct tap follows the 1/r spreading law") {
  RoomScene s = basic_scene();
  s.ism_order = 0;
  Rir near = rir(s, {5.0, 5.0}, {7.0, 5.0});   // 2 m
  Rir far = rir(s, {5.0, 5.0}, {9.0, 5.0});    // 4 m
  double a_near = *std::max_element(near.taps.begin(), near.taps.end());
  double a_far = *std::max_element(far.taps.begin(), far.taps.end());
  CHECK(std::abs(a_far - 0.5 * a_near) < 1e-9);
}

TEST_CASE("direct-path delay is exact to half a sample over geometries") {
  Rng rng(52);
  RoomScene s = basic_scene();
  s.ism_order = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    Point2 src{rng.uniform(0.5, 19.5), rng.uniform(0.5, 19.5)};
    Point2 mic{rng.uniform(0.5, 19.5), rng.uniform(0.5, 19.5)};
    Rir r = rir(s, src, mic);
    int tap = -1;
    for (size_t i = 0; i < r.taps.size(); ++i)
      if (r.taps[i] != 0.0) tap = static_cast<int>(i);
    REQUIRE(tap >= 0);
    double exact = std::hypot(src.x - mic.x, src.y - mic.y) / 343.0 * 16000.0;
    CHECK(std::abs(tap - exact) <= 0.5);
  }
}

TEST_CASE("effective rir length sits in the reverberant regime") {
  Rng rng(53);
  RoomScene s = basic_scene();
  std::vector<int> lengths;
  for (int trial = 0; trial < 100; ++trial) {
    Point2 src{rng.uniform(0.5, 19.5), rng.uniform(0.5, 19.5)};
    Point2 mic{rng.uniform(0.5, 19.5), rng.uniform(0.5, 19.5)};
    lengths.push_back(effective_rir_length(rir(s, src, mic)));
  }
  std::sort(lengths.begin(), lengths.end());
  int median = lengths[lengths.size() / 2];
  CHECK(median >= 3 * 1024);
  CHECK(median <= 8 * 1024);
}

TEST_CASE("static render of an impulse is the rir") {
  RoomScene s = basic_scene();
  s.mics = {{4.0, 6.0}, {15.0, 15.0}};
  Waveform impulse;
  impulse.samples = {1.0};
  SceneRender r = render_static_source(s, {10.0, 10.0}, impulse);
  REQUIRE(r.mics.size() == 2);
  for (int m = 0; m < 2; ++m) {
    Rir want = rir(s, {10.0, 10.0}, s.mics[m]);
    REQUIRE(r.mics[m].samples.size() == want.taps.size());
    for (size_t i = 0; i < want.taps.size(); ++i)
      CHECK(r.mics[m].samples[i] == want.taps[i]);
  }
}

TEST_CASE("static render is linear and matches dense convolution") {
  RoomScene s = basic_scene();
  Rng rng(54);
  Waveform x;
  x.samples.resize(500);
  for (auto& v : x.samples) v = rng.uniform(-1.0, 1.0);

  SceneRender rx = render_static_source(s, {10.0, 10.0}, x);
  Waveform ax = x;
  for (auto& v : ax.samples) v *= -2.5;
  SceneRender rax = render_static_source(s, {10.0, 10.0}, ax);
  for (size_t i = 0; i < rx.mics[0].samples.size(); ++i)
    CHECK(std::abs(rax.mics[0].samples[i] + 2.5 * rx.mics[0].samples[i]) < 1e-9);

  Rir h = rir(s, {10.0, 10.0}, s.mics[0]);
  auto dense = conv_oracle(x.samples, h.taps);
  REQUIRE(dense.size() == rx.mics[0].samples.size());
  for (size_t i = 0; i < dense.size(); ++i)
    CHECK(std::abs(dense[i] - rx.mics[0].samples[i]) < 1e-9);

  // silence in, silence out
  Waveform zero;
  zero.samples.assign(400, 0.0);
  SceneRender rz = render_static_source(s, {10.0, 10.0}, zero);
  for (double v : rz.mics[0].samples) CHECK(v == 0.0);
}

TEST_CASE("static render is shift-equivariant") {
  RoomScene s = basic_scene();
  Rng rng(55);
  const int shift = 37;
  Waveform x;
  x.samples.resize(300);
  for (auto& v : x.samples) v = rng.uniform(-1.0, 1.0);
  Waveform shifted;
  shifted.samples.assign(300 + shift, 0.0);
  std::copy(x.samples.begin(), x.samples.end(), shifted.samples.begin() + shift);

  SceneRender a = render_static_source(s, {10.0, 10.0}, x);
  SceneRender b = render_static_source(s, {10.0, 10.0}, shifted);
  for (size_t i = 0; i < a.mics[0].samples.size(); ++i)
    CHECK(std::abs(b.mics[0].samples[i + shift] - a.mics[0].samples[i]) < 1e-9);
}

TEST_CASE("single-segment path equals the static render at the start point") {
  RoomScene s = basic_scene();
  s.path.steps = 1;
  s.path.jitter_m = 0.0;
  Rng rng(56);
  Waveform dry;
  dry.samples.resize(32000);
  for (auto& v : dry.samples) v = rng.uniform(-1.0, 1.0);
  SceneRender moving = render_moving_source(s, dry);
  SceneRender fixed = render_static_source(s, s.path.start, dry);
  REQUIRE(moving.mics[0].samples.size() == 32000);
  for (size_t i = 0; i < 32000; ++i)
    CHECK(moving.mics[0].samples[i] == fixed.mics[0].samples[i]);
}

TEST_CASE("moving render of silence is silence") {
  RoomScene s = basic_scene();
  s.path.steps = 8;
  s.path.jitter_m = 0.25;
  Waveform dry;
  dry.samples.assign(32000, 0.0);
  SceneRender r = render_moving_source(s, dry);
  for (double v : r.mics[0].samples) CHECK(v == 0.0);
}

TEST_CASE("two-segment moving render matches a hand-built overlap-add oracle") {
  RoomScene s = basic_scene();
  s.path.steps = 2;
  s.path.jitter_m = 0.0;
  Rng rng(57);
  Waveform dry;
  dry.samples.resize(32000);
  for (auto& v : dry.samples) v = rng.uniform(-1.0, 1.0);

  SceneRender got = render_moving_source(s, dry);

  // oracle: window the dry signal with complementary linear ramps around the
  // midpoint, convolve each piece with the static rir of its endpoint
  const int64_t n = 32000, seg = 16000, xf = 512;
  std::vector<double> w0(n, 0.0), w1(n, 0.0);
  for (int64_t i = 0; i < n; ++i) {
    double up = 0.0;
    if (i < seg - xf / 2)
      up = 0.0;
    else if (i < seg + xf / 2)
      up = (i - (seg - xf / 2) + 0.5) / static_cast<double>(xf);
    else
      up = 1.0;
    w1[i] = up;
    w0[i] = 1.0 - up;
  }
  Rir h0 = rir(s, s.path.start, s.mics[0]);
  Rir h1 = rir(s, s.path.end, s.mics[0]);
  std::vector<double> p0(n), p1(n);
  for (int64_t i = 0; i < n; ++i) {
    p0[i] = dry.samples[i] * w0[i];
    p1[i] = dry.samples[i] * w1[i];
  }
  auto y0 = conv_oracle(p0, h0.taps);
  auto y1 = conv_oracle(p1, h1.taps);
  for (int64_t i = 0; i < n; ++i) {
    double want = y0[i] + y1[i];
    CHECK(std::abs(got.mics[0].samples[i] - want) < 1e-9);
  }
}

TEST_CASE("diffuse noise level and independence") {
  RoomScene s = basic_scene();
  s.mics = {{4.0, 4.0}, {15.0, 6.0}};
  SceneRender r;
  r.scene_id = "x";
  r.mics.resize(2);
  r.mics[0].samples.assign(32000, 0.0);
  r.mics[1].samples.assign(32000, 0.0);

  SUBCASE("disabled level is the identity") {
    SceneRender copy = r;
    Rng rng(58);
    add_diffuse_noise(copy, -std::numeric_limits<double>::infinity(), rng);
    CHECK(copy.mics[0].samples == r.mics[0].samples);
  }

  SUBCASE("zero dB noise has unit variance and uncorrelated channels") {
    Rng rng(59);
    add_diffuse_noise(r, 0.0, rng);
    for (int m = 0; m < 2; ++m) {
      double var = 0.0;
      for (double v : r.mics[m].samples) var += v * v;
      var /= 32000.0;
      CHECK(std::abs(var - 1.0) < 0.02);
    }
    double dot = 0.0, n0 = 0.0, n1 = 0.0;
    for (int64_t i = 0; i < 32000; ++i) {
      dot += r.mics[0].samples[i] * r.mics[1].samples[i];
      n0 += r.mics[0].samples[i] * r.mics[0].samples[i];
      n1 += r.mics[1].samples[i] * r.mics[1].samples[i];
    }
    CHECK(std::abs(dot / std::sqrt(n0 * n1)) < 0.05);
  }
}

TEST_CASE("scene sampling is deterministic and respects constraints") {
  SceneSampleParams params;
  Rng a(60), b(60);
  RoomScene s1 = scene_sample(a, 4, params);
  RoomScene s2 = scene_sample(b, 4, params);
  CHECK(s1 == s2);

  Rng rng(61);
  for (int trial = 0; trial < 1000; ++trial) {
    int k = 2 + static_cast<int>(rng.uniform_int(29));
    RoomScene s = scene_sample(rng, k, params);
    REQUIRE(static_cast<int>(s.mics.size()) == k);
    for (const auto& m : s.mics) {
      CHECK(m.x >= params.wall_margin);
      CHECK(m.x <= params.width - params.wall_margin);
      CHECK(m.y >= params.wall_margin);
      CHECK(m.y <= params.depth - params.wall_margin);
    }
    // noise source on the lattice of cell centers
    double gx = s.noise_source.x / (params.width / params.noise_grid) - 0.5;
    double gy = s.noise_source.y / (params.depth / params.noise_grid) - 0.5;
    CHECK(std::abs(gx - std::round(gx)) < 1e-9);
    CHECK(std::abs(gy - std::round(gy)) < 1e-9);
    // path endpoints are distinct corners
    CHECK((s.path.start.x != s.path.end.x || s.path.start.y != s.path.end.y));
  }
  CHECK_THROWS_AS(scene_sample(rng, 1, params), InputError);
  CHECK_THROWS_AS(scene_sample(rng, 31, params), InputError);
}

TEST_CASE("room mixture composition hits the schedule") {
  SceneSampleParams params;
  Rng rng(62);
  RoomScene scene = scene_sample(rng, 4, params);
  scene.diffuse_db = -std::numeric_limits<double>::infinity();

  Rng content(63);
  Waveform dry_speech, dry_noise;
  dry_speech.samples.resize(32000);
  dry_noise.samples.resize(32000);
  for (auto& v : dry_speech.samples) v = content.gaussian();
  for (auto& v : dry_noise.samples) v = content.gaussian();

  SceneRender speech = render_moving_source(scene, dry_speech);
  SceneRender noise = render_static_source(scene, scene.noise_source, dry_noise);

  SUBCASE("all-zero schedule balances powers per channel") {
    Rng mix_rng(64);
    MultiChannelMixture mc =
        compose_room_mixture(speech, noise, explicit_schedule({0, 0, 0, 0}), mix_rng);
    REQUIRE(mc.channels.size() == 4);
    // components are recoverable: channel i = norm(noise at mic perm[i]) + g * norm(speech)
    for (int i = 0; i < 4; ++i) {
      int mic = mc.recipe.channel_perm[i];
      Waveform nz;
      nz.samples.assign(noise.mics[mic].samples.begin(),
                        noise.mics[mic].samples.begin() + 32000);
      nz = normalize_unit_variance(nz);
      double ps = 0.0, pn = 0.0;
      for (int64_t t = 0; t < 32000; ++t) {
        double sp = mc.channels[i].samples[t] - nz.samples[t];
        ps += sp * sp;
        pn += nz.samples[t] * nz.samples[t];
      }
      CHECK(std::abs(10.0 * std::log10(ps / pn)) < 0.1);
    }
  }

  SUBCASE("decreasing schedule appears as a multiset") {
    Rng mix_rng(65);
    MultiChannelMixture mc =
        compose_room_mixture(speech, noise, snr_schedule(SnrScheme::Decreasing, 4), mix_rng);
    std::multiset<int> got;
    for (int i = 0; i < 4; ++i) {
      Waveform nz;
      nz.samples.assign(noise.mics[mc.recipe.channel_perm[i]].samples.begin(),
                        noise.mics[mc.recipe.channel_perm[i]].samples.begin() + 32000);
      nz = normalize_unit_variance(nz);
      double ps = 0.0, pn = 0.0;
      for (int64_t t = 0; t < 32000; ++t) {
        double sp = mc.channels[i].samples[t] - nz.samples[t];
        ps += sp * sp;
        pn += nz.samples[t] * nz.samples[t];
      }
      got.insert(static_cast<int>(std::lround(10.0 * std::log10(ps / pn))));
    }
    CHECK(got == std::multiset<int>{0, -1, -2, -3});
  }

  SUBCASE("renders from different scenes are rejected") {
    SceneRender other = noise;
    other.scene_id = "elsewhere";
    Rng mix_rng(66);
    CHECK_THROWS_AS(
        compose_room_mixture(speech, other, explicit_schedule({0, 0, 0, 0}), mix_rng),
        InputError);
  }
}

TEST_CASE("scene serialization round-trips") {
  SceneSampleParams params;
  Rng rng(67);
  RoomScene scene = scene_sample(rng, 7, params);
  RoomScene back = parse_scene(serialize_scene(scene));
  CHECK(back == scene);
  CHECK(serialize_scene(back) == serialize_scene(scene));
}

TEST_CASE("scene parser names the offending key") {
  try {
    parse_scene("scene_version=1\nwidth=banana\n");
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("width") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scene("scene_version=1\nwat=1\n"), ConfigError);
  CHECK_THROWS_AS(parse_scene("width=20\n"), ConfigError);
}
