#include "ssloc/wav.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "ssloc/errors.hpp"

namespace ssloc {

namespace {

template <typename T>
T read_le(const std::uint8_t* p) {
    T v;
    std::memcpy(&v, p, sizeof(T));
    return v;
}

template <typename T>
void append_le(std::vector<std::uint8_t>& out, T v) {
    std::uint8_t buf[sizeof(T)];
    std::memcpy(buf, &v, sizeof(T));
    out.insert(out.end(), buf, buf + sizeof(T));
}

}  // namespace

std::vector<double> read_mono_audio(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot open audio file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());

    if (bytes.size() >= 44 && std::memcmp(bytes.data(), "RIFF", 4) == 0 &&
        std::memcmp(bytes.data() + 8, "WAVE", 4) == 0) {
        std::size_t pos = 12;
        std::uint16_t format = 0, channels = 1, bits = 16;
        const std::uint8_t* data = nullptr;
        std::size_t data_len = 0;
        while (pos + 8 <= bytes.size()) {
            const std::uint32_t chunk_len = read_le<std::uint32_t>(bytes.data() + pos + 4);
            if (std::memcmp(bytes.data() + pos, "fmt ", 4) == 0 && chunk_len >= 16) {
                format = read_le<std::uint16_t>(bytes.data() + pos + 8);
                channels = read_le<std::uint16_t>(bytes.data() + pos + 10);
                bits = read_le<std::uint16_t>(bytes.data() + pos + 22);
            } else if (std::memcmp(bytes.data() + pos, "data", 4) == 0) {
                data = bytes.data() + pos + 8;
                data_len = std::min<std::size_t>(chunk_len, bytes.size() - pos - 8);
            }
            pos += 8 + chunk_len + (chunk_len & 1);
        }
        if (!data || channels == 0) throw validation_error("malformed WAV file: " + path);

        std::vector<double> samples;
        if (format == 1 && bits == 16) {
            const std::size_t n = data_len / 2 / channels;
            samples.reserve(n);
            for (std::size_t i = 0; i < n; ++i)
                samples.push_back(read_le<std::int16_t>(data + i * channels * 2) / 32768.0);
        } else if (format == 3 && bits == 32) {
            const std::size_t n = data_len / 4 / channels;
            samples.reserve(n);
            for (std::size_t i = 0; i < n; ++i)
                samples.push_back(read_le<float>(data + i * channels * 4));
        } else {
            throw validation_error("unsupported WAV encoding (need PCM16 or float32): " + path);
        }
        return samples;
    }

    // Raw little-endian float64.
    if (bytes.size() % 8 != 0)
        throw validation_error("raw audio file length is not a multiple of 8: " + path);
    std::vector<double> samples(bytes.size() / 8);
    for (std::size_t i = 0; i < samples.size(); ++i)
        samples[i] = read_le<double>(bytes.data() + i * 8);
    return samples;
}

void write_stereo_wav(const std::string& path, const std::vector<double>& left,
                      const std::vector<double>& right, double sample_rate_hz) {
    if (left.size() != right.size())
        throw validation_error("write_stereo_wav: channel lengths differ");
    const std::uint32_t n = static_cast<std::uint32_t>(left.size());
    const std::uint32_t data_len = n * 2 * 4;

    std::vector<std::uint8_t> out;
    out.reserve(44 + data_len);
    out.insert(out.end(), {'R', 'I', 'F', 'F'});
    append_le<std::uint32_t>(out, 36 + data_len);
    out.insert(out.end(), {'W', 'A', 'V', 'E', 'f', 'm', 't', ' '});
    append_le<std::uint32_t>(out, 16);
    append_le<std::uint16_t>(out, 3);  // IEEE float
    append_le<std::uint16_t>(out, 2);
    append_le<std::uint32_t>(out, static_cast<std::uint32_t>(sample_rate_hz));
    append_le<std::uint32_t>(out, static_cast<std::uint32_t>(sample_rate_hz) * 2 * 4);
    append_le<std::uint16_t>(out, 8);
    append_le<std::uint16_t>(out, 32);
    out.insert(out.end(), {'d', 'a', 't', 'a'});
    append_le<std::uint32_t>(out, data_len);
    for (std::uint32_t i = 0; i < n; ++i) {
        append_le<float>(out, static_cast<float>(left[i]));
        append_le<float>(out, static_cast<float>(right[i]));
    }

    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write WAV file: " + path);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
}

}  // namespace ssloc
