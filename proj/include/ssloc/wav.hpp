#pragma once

#include <string>
#include <vector>

namespace ssloc {

/// Reads a mono source signal. Accepts 16-bit PCM or 32-bit float WAV
/// (first channel of multichannel files), or raw little-endian float64 when
/// the file has no RIFF header.
std::vector<double> read_mono_audio(const std::string& path);

/// Writes a two-channel 32-bit float WAV.
void write_stereo_wav(const std::string& path, const std::vector<double>& left,
                      const std::vector<double>& right, double sample_rate_hz);

}  // namespace ssloc
