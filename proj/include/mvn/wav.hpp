#pragma once

#include <string>
#include <vector>

#include "mvn/dsp.hpp"

namespace mvn {

// Minimal RIFF/WAVE support: PCM 16-bit and IEEE float 32-bit. Reading
// rejects anything else (no silent resampling or downmixing).
Waveform read_wav_mono(const std::string& path);

// Interleaved float32 writer; one Waveform per channel, all equal length.
void write_wav(const std::string& path, const std::vector<Waveform>& channels,
               int sample_rate = 16000);
void write_wav_mono(const std::string& path, const Waveform& w);

}  // namespace mvn
