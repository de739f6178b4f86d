#pragma once

#include <cstdint>
#include <vector>

#include "mvn/matrix.hpp"

namespace mvn {

constexpr double kSampleRate = 16000.0;

struct Waveform {
  std::vector<double> samples;
  double sample_rate = kSampleRate;

  int64_t length() const { return static_cast<int64_t>(samples.size()); }
  double duration() const { return samples.size() / sample_rate; }
};

enum class WindowKind { Hann, Rect };

struct FrameSpec {
  int window = 1024;
  int hop = 512;
  WindowKind kind = WindowKind::Hann;

  int bins() const { return window / 2 + 1; }
};

// Number of full analysis frames; trailing partial frame is dropped.
int stft_frame_count(int64_t n, const FrameSpec& spec);

// One-sided complex frames, T x F.
struct ComplexFrames {
  int frames = 0;
  int bins = 0;
  std::vector<double> re;
  std::vector<double> im;

  double real_at(int t, int f) const { return re[static_cast<size_t>(t) * bins + f]; }
  double imag_at(int t, int f) const { return im[static_cast<size_t>(t) * bins + f]; }
};

// Magnitude spectrogram stack, one T x F slab per channel. All slabs share
// shape; magnitudes are non-negative.
struct SpectraGrid {
  std::vector<Matrix> ch;

  int channels() const { return static_cast<int>(ch.size()); }
  int frames() const { return ch.empty() ? 0 : ch[0].rows; }
  int bins() const { return ch.empty() ? 0 : ch[0].cols; }
};

// In-place iterative radix-2 FFT; size must be a power of two.
void fft_inplace(std::vector<double>& re, std::vector<double>& im);

// Windowed one-sided short-time transform. Frames start at sample 0 with no
// padding or centering; a signal shorter than one window is an error.
ComplexFrames stft(const Waveform& w, const FrameSpec& spec);

// Elementwise modulus of complex frames -> T x F slab.
Matrix magnitude(const ComplexFrames& frames);

// Stacks per-channel slabs into a grid; ragged shapes are an error.
SpectraGrid stack_channels(std::vector<Matrix> slabs);

}  // namespace mvn
