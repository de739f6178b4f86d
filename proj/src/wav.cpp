#include "mvn/wav.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "mvn/errors.hpp"

namespace mvn {

namespace {

uint32_t rd_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t rd_u16(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::ofstream& f, uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16),
                        static_cast<unsigned char>(v >> 24)};
  f.write(reinterpret_cast<char*>(b), 4);
}
void wr_u16(std::ofstream& f, uint16_t v) {
  unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
  f.write(reinterpret_cast<char*>(b), 2);
}

}  // namespace

Waveform read_wav_mono(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IngestionError(path + ": cannot open");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 44 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw IngestionError(path + ": not a RIFF/WAVE file");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  size_t data_off = 0, data_len = 0;
  bool have_fmt = false;

  size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    uint32_t chunk_len = rd_u32(bytes.data() + pos + 4);
    const char* id = reinterpret_cast<const char*>(bytes.data() + pos);
    size_t body = pos + 8;
    if (std::memcmp(id, "fmt ", 4) == 0 && body + 16 <= bytes.size()) {
      format = rd_u16(bytes.data() + body);
      channels = rd_u16(bytes.data() + body + 2);
      rate = rd_u32(bytes.data() + body + 4);
      bits = rd_u16(bytes.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      data_off = body;
      data_len = chunk_len;
    }
    pos = body + chunk_len + (chunk_len & 1);
  }
  if (!have_fmt || data_off == 0) throw IngestionError(path + ": missing fmt/data chunk");
  if (channels != 1) throw IngestionError(path + ": not mono (" + std::to_string(channels) + " channels)");
  if (rate != 16000)
    throw IngestionError(path + ": sample rate " + std::to_string(rate) +
                         " Hz, expected 16000 (no resampling)");
  if (data_off + data_len > bytes.size()) data_len = bytes.size() - data_off;

  Waveform w;
  w.sample_rate = 16000.0;
  if (format == 1 && bits == 16) {
    size_t n = data_len / 2;
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      int16_t s = static_cast<int16_t>(rd_u16(bytes.data() + data_off + 2 * i));
      w.samples[i] = s / 32768.0;
    }
  } else if (format == 3 && bits == 32) {
    size_t n = data_len / 4;
    w.samples.resize(n);
    for (size_t i = 0; i < n; ++i) {
      uint32_t u = rd_u32(bytes.data() + data_off + 4 * i);
      float v;
      std::memcpy(&v, &u, 4);
      w.samples[i] = static_cast<double>(v);
    }
  } else {
    throw IngestionError(path + ": unsupported encoding (format " + std::to_string(format) +
                         ", " + std::to_string(bits) + " bit); need PCM16 or float32");
  }
  for (double s : w.samples)
    if (!std::isfinite(s)) throw IngestionError(path + ": non-finite samples");
  return w;
}

void write_wav(const std::string& path, const std::vector<Waveform>& channels,
               int sample_rate) {
  if (channels.empty()) throw InputError("write_wav: no channels");
  size_t n = channels[0].samples.size();
  for (const auto& c : channels)
    if (c.samples.size() != n) throw ShapeError("write_wav: ragged channel lengths");

  const uint16_t nch = static_cast<uint16_t>(channels.size());
  const uint32_t data_len = static_cast<uint32_t>(n * nch * 4);

  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError(path + ": cannot write");
  f.write("RIFF", 4);
  wr_u32(f, 36 + data_len);
  f.write("WAVE", 4);
  f.write("fmt ", 4);
  wr_u32(f, 16);
  wr_u16(f, 3);  // IEEE float
  wr_u16(f, nch);
  wr_u32(f, static_cast<uint32_t>(sample_rate));
  wr_u32(f, static_cast<uint32_t>(sample_rate) * nch * 4);
  wr_u16(f, static_cast<uint16_t>(nch * 4));
  wr_u16(f, 32);
  f.write("data", 4);
  wr_u32(f, data_len);
  for (size_t i = 0; i < n; ++i) {
    for (const auto& c : channels) {
      float v = static_cast<float>(c.samples[i]);
      uint32_t u;
      std::memcpy(&u, &v, 4);
      wr_u32(f, u);
    }
  }
  if (!f) throw IoError(path + ": write failed");
}

void write_wav_mono(const std::string& path, const Waveform& w) {
  write_wav(path, {w}, static_cast<int>(w.sample_rate));
}

}  // namespace mvn
