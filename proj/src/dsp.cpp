#include "mvn/dsp.hpp"

#include <cmath>
#include <string>

#include "mvn/errors.hpp"

namespace mvn {

int stft_frame_count(int64_t n, const FrameSpec& spec) {
  if (n < spec.window) return 0;
  return static_cast<int>((n - spec.window) / spec.hop) + 1;
}

void fft_inplace(std::vector<double>& re, std::vector<double>& im) {
  const size_t n = re.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw ContractError("fft: size must be a power of two, got " + std::to_string(n));
  if (im.size() != n) throw ShapeError("fft: re/im size mismatch");

  // bit-reversal permutation
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) {
      std::swap(re[i], re[j]);
      std::swap(im[i], im[j]);
    }
  }

  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = -2.0 * M_PI / static_cast<double>(len);
    double wr = std::cos(ang), wi = std::sin(ang);
    for (size_t i = 0; i < n; i += len) {
      double cr = 1.0, ci = 0.0;
      for (size_t k = 0; k < len / 2; ++k) {
        size_t a = i + k, b = i + k + len / 2;
        double tr = re[b] * cr - im[b] * ci;
        double ti = re[b] * ci + im[b] * cr;
        re[b] = re[a] - tr;
        im[b] = im[a] - ti;
        re[a] += tr;
        im[a] += ti;
        double ncr = cr * wr - ci * wi;
        ci = cr * wi + ci * wr;
        cr = ncr;
      }
    }
  }
}

namespace {
std::vector<double> make_window(const FrameSpec& spec) {
  std::vector<double> w(spec.window, 1.0);
  if (spec.kind == WindowKind::Hann) {
    // periodic Hann, the usual choice for 50% overlap analysis
    for (int i = 0; i < spec.window; ++i)
      w[i] = 0.5 - 0.5 * std::cos(2.0 * M_PI * i / spec.window);
  }
  return w;
}
}  // namespace

ComplexFrames stft(const Waveform& w, const FrameSpec& spec) {
  if (spec.window <= 0 || spec.hop <= 0 || spec.hop > spec.window)
    throw ContractError("stft: invalid frame spec");
  if (w.length() < spec.window)
    throw InputError("stft: signal of " + std::to_string(w.length()) +
                     " samples is shorter than one window (" +
                     std::to_string(spec.window) + ")");

  const int T = stft_frame_count(w.length(), spec);
  const int F = spec.bins();
  const std::vector<double> win = make_window(spec);

  ComplexFrames out;
  out.frames = T;
  out.bins = F;
  out.re.resize(static_cast<size_t>(T) * F);
  out.im.resize(static_cast<size_t>(T) * F);

  std::vector<double> re(spec.window), im(spec.window);
  for (int t = 0; t < T; ++t) {
    const int64_t start = static_cast<int64_t>(t) * spec.hop;
    for (int i = 0; i < spec.window; ++i) {
      re[i] = w.samples[start + i] * win[i];
      im[i] = 0.0;
    }
    fft_inplace(re, im);
    double* dst_re = out.re.data() + static_cast<size_t>(t) * F;
    double* dst_im = out.im.data() + static_cast<size_t>(t) * F;
    for (int f = 0; f < F; ++f) {
      dst_re[f] = re[f];
      dst_im[f] = im[f];
    }
  }
  return out;
}

Matrix magnitude(const ComplexFrames& frames) {
  Matrix slab(frames.frames, frames.bins);
  for (size_t i = 0; i < slab.size(); ++i)
    slab.d[i] = std::sqrt(frames.re[i] * frames.re[i] + frames.im[i] * frames.im[i]);
  return slab;
}

SpectraGrid stack_channels(std::vector<Matrix> slabs) {
  SpectraGrid g;
  for (size_t k = 0; k < slabs.size(); ++k) {
    if (k > 0 && !slabs[k].same_shape(slabs[0]))
      throw ShapeError("stack_channels: slab " + std::to_string(k) + " is " +
                       std::to_string(slabs[k].rows) + "x" + std::to_string(slabs[k].cols) +
                       ", expected " + std::to_string(slabs[0].rows) + "x" +
                       std::to_string(slabs[0].cols));
  }
  g.ch = std::move(slabs);
  return g;
}

}  // namespace mvn
