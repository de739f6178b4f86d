#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "mvn/dsp.hpp"
#include "mvn/errors.hpp"
#include "test_support.hpp"

using namespace mvn;
using namespace mvn_test;

namespace {

// O(N^2) reference transform
std::vector<std::complex<double>> naive_dft(const std::vector<double>& x) {
  const size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (size_t k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (size_t i = 0; i < n; ++i) {
      double ang = -2.0 * M_PI * static_cast<double>(k) * static_cast<double>(i) / n;
      acc += x[i] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

Waveform sinusoid(double freq_hz, int n, double amp = 1.0) {
  Waveform w;
  w.samples.resize(n);
  for (int i = 0; i < n; ++i)
    w.samples[i] = amp * std::sin(2.0 * M_PI * freq_hz * i / 16000.0);
  return w;
}

}  // namespace

TEST_CASE("frame count arithmetic") {
  FrameSpec spec;
  CHECK(stft_frame_count(32000, spec) == 61);
  CHECK(stft_frame_count(1024, spec) == 1);
  CHECK(stft_frame_count(1023, spec) == 0);
  CHECK(stft_frame_count(1024 + 511, spec) == 1);
  CHECK(stft_frame_count(1024 + 512, spec) == 2);
  for (int64_t n : {2048, 4096, 50000}) {
    CHECK(stft_frame_count(n, spec) == static_cast<int>((n - 1024) / 512 + 1));
  }
}

TEST_CASE("stft rejects short signals") {
  Waveform w;
  w.samples.assign(512, 0.1);
  CHECK_THROWS_AS(stft(w, FrameSpec{}), InputError);
}

TEST_CASE("fft matches the naive DFT") {
  Rng rng(21);
  std::vector<double> re(1024), im(1024, 0.0);
  for (auto& x : re) x = rng.uniform(-1.0, 1.0);
  auto want = naive_dft(re);
  fft_inplace(re, im);
  double scale = 0.0;
  for (const auto& c : want) scale = std::max(scale, std::abs(c));
  for (int k = 0; k < 1024; ++k) {
    CHECK(std::abs(re[k] - want[k].real()) / scale < 1e-9);
    CHECK(std::abs(im[k] - want[k].imag()) / scale < 1e-9);
  }
}

TEST_CASE("constant signal puts all energy in bin zero (rect window)") {
  FrameSpec spec;
  spec.kind = WindowKind::Rect;
  Waveform w;
  w.samples.assign(4096, 3.5);
  Matrix mag = magnitude(stft(w, spec));
  for (int t = 0; t < mag.rows; ++t) {
    CHECK(mag.at(t, 0) == doctest::Approx(3.5 * 1024).epsilon(1e-12));
    for (int f = 1; f < mag.cols; ++f) CHECK(mag.at(t, f) / mag.at(t, 0) < 1e-9);
  }
}

TEST_CASE("bin-centered sinusoid peaks at its bin and matches the DFT oracle") {
  // bin 16 center frequency: 16 * 16000 / 1024 = 250 Hz
  FrameSpec spec;
  spec.kind = WindowKind::Rect;
  Waveform w = sinusoid(250.0, 32000);
  ComplexFrames frames = stft(w, spec);
  Matrix mag = magnitude(frames);
  CHECK(mag.rows == 61);
  CHECK(mag.cols == 513);
  for (int t = 0; t < mag.rows; ++t) {
    int argmax = 0;
    for (int f = 1; f < mag.cols; ++f)
      if (mag.at(t, f) > mag.at(t, argmax)) argmax = f;
    CHECK(argmax == 16);
  }
  // oracle on one frame
  std::vector<double> frame(w.samples.begin() + 5 * 512, w.samples.begin() + 5 * 512 + 1024);
  auto want = naive_dft(frame);
  for (int f = 0; f < 513; ++f)
    CHECK(std::abs(mag.at(5, f) - std::abs(want[f])) / std::abs(want[16]) < 1e-9);
}

TEST_CASE("hann-window stft matches a windowed DFT oracle") {
  Rng rng(22);
  Waveform w;
  w.samples.resize(2048);
  for (auto& x : w.samples) x = rng.uniform(-1.0, 1.0);
  FrameSpec spec;  // hann
  ComplexFrames frames = stft(w, spec);
  std::vector<double> windowed(1024);
  for (int i = 0; i < 1024; ++i) {
    double win = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / 1024);
    windowed[i] = w.samples[512 + i] * win;  // frame 1
  }
  auto want = naive_dft(windowed);
  double scale = 0.0;
  for (const auto& c : want) scale = std::max(scale, std::abs(c));
  for (int f = 0; f < 513; ++f) {
    CHECK(std::abs(frames.real_at(1, f) - want[f].real()) / scale < 1e-9);
    CHECK(std::abs(frames.imag_at(1, f) - want[f].imag()) / scale < 1e-9);
  }
}

TEST_CASE("parseval energy balance for a rectangular window") {
  Rng rng(23);
  Waveform w;
  w.samples.resize(1024);
  for (auto& x : w.samples) x = rng.uniform(-1.0, 1.0);
  FrameSpec spec;
  spec.kind = WindowKind::Rect;
  Matrix mag = magnitude(stft(w, spec));
  double fdomain = mag.at(0, 0) * mag.at(0, 0) + mag.at(0, 512) * mag.at(0, 512);
  for (int f = 1; f < 512; ++f) fdomain += 2.0 * mag.at(0, f) * mag.at(0, f);
  fdomain /= 1024.0;
  double tdomain = 0.0;
  for (double x : w.samples) tdomain += x * x;
  CHECK(std::abs(fdomain - tdomain) / tdomain < 1e-6);
}

TEST_CASE("stft is linear") {
  Rng rng(24);
  Waveform x, y;
  x.samples.resize(3072);
  y.samples.resize(3072);
  for (auto& v : x.samples) v = rng.uniform(-1.0, 1.0);
  for (auto& v : y.samples) v = rng.uniform(-1.0, 1.0);
  const double a = 1.7, b = -0.4;
  Waveform z;
  z.samples.resize(3072);
  for (size_t i = 0; i < z.samples.size(); ++i)
    z.samples[i] = a * x.samples[i] + b * y.samples[i];
  FrameSpec spec;
  ComplexFrames fx = stft(x, spec), fy = stft(y, spec), fz = stft(z, spec);
  for (size_t i = 0; i < fz.re.size(); ++i) {
    CHECK(std::abs(fz.re[i] - (a * fx.re[i] + b * fy.re[i])) < 1e-9);
    CHECK(std::abs(fz.im[i] - (a * fx.im[i] + b * fy.im[i])) < 1e-9);
  }
}

TEST_CASE("magnitude basics") {
  ComplexFrames f;
  f.frames = 1;
  f.bins = 3;
  f.re = {3.0, 0.0, 1.0};
  f.im = {4.0, 0.0, -1.0};
  Matrix m = magnitude(f);
  CHECK(m.at(0, 0) == 5.0);
  CHECK(m.at(0, 1) == 0.0);
  CHECK(m.at(0, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("magnitude matches the direct formula on random frames") {
  Rng rng(25);
  ComplexFrames f;
  f.frames = 4;
  f.bins = 8;
  f.re.resize(32);
  f.im.resize(32);
  for (auto& x : f.re) x = rng.uniform(-2.0, 2.0);
  for (auto& x : f.im) x = rng.uniform(-2.0, 2.0);
  Matrix m = magnitude(f);
  for (size_t i = 0; i < m.size(); ++i)
    CHECK(m.d[i] == std::sqrt(f.re[i] * f.re[i] + f.im[i] * f.im[i]));
}

TEST_CASE("stack_channels preserves order and rejects ragged slabs") {
  Rng rng(26);
  Matrix a = random_matrix(4, 6, rng), b = random_matrix(4, 6, rng);
  SpectraGrid one = stack_channels({a});
  CHECK(one.channels() == 1);
  CHECK(one.ch[0] == a);

  SpectraGrid two = stack_channels({a, a});
  CHECK(two.channels() == 2);
  CHECK(two.ch[0] == two.ch[1]);

  SpectraGrid ordered = stack_channels({a, b});
  CHECK(ordered.ch[0] == a);
  CHECK(ordered.ch[1] == b);

  Matrix ragged = random_matrix(5, 6, rng);
  CHECK_THROWS_AS(stack_channels({a, ragged}), ShapeError);
}
