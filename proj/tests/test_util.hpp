#pragma once

#include "doctest.h"

#include "syncscan/audio_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace testutil {

inline syncscan::AudioBuffer make_sine(double freq_hz, double duration_s, double amplitude = 1.0,
                                       int rate = 44100) {
    syncscan::AudioBuffer b;
    b.sample_rate_hz = rate;
    const size_t n = static_cast<size_t>(std::llround(duration_s * rate));
    b.samples.resize(n);
    const double w = 2.0 * std::numbers::pi * freq_hz / rate;
    for (size_t i = 0; i < n; ++i) b.samples[i] = amplitude * std::sin(w * static_cast<double>(i));
    return b;
}

inline double rms(const std::vector<double>& x) {
    if (x.empty()) return 0.0;
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

inline double db(double ratio) { return 20.0 * std::log10(ratio); }

// Self-deleting scratch directory for file round trips.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                (tag + "-" + std::to_string(std::random_device{}()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

// Little-endian WAV byte builder for loader tests that must not depend on
// write_wav.
class WavBuilder {
public:
    WavBuilder& u16(uint16_t v) {
        bytes.push_back(v & 0xFF);
        bytes.push_back((v >> 8) & 0xFF);
        return *this;
    }
    WavBuilder& u32(uint32_t v) {
        for (int i = 0; i < 4; ++i) bytes.push_back((v >> (8 * i)) & 0xFF);
        return *this;
    }
    WavBuilder& tag(const char* t) {
        bytes.insert(bytes.end(), t, t + 4);
        return *this;
    }
    WavBuilder& f32(float v) {
        uint32_t u;
        std::memcpy(&u, &v, 4);
        return u32(u);
    }
    void write(const std::string& path) const {
        FILE* f = std::fopen(path.c_str(), "wb");
        REQUIRE(f != nullptr);
        std::fwrite(bytes.data(), 1, bytes.size(), f);
        std::fclose(f);
    }
    std::vector<uint8_t> bytes;
};

// Standard 44-byte header + samples for a PCM16 file.
inline void write_pcm16_wav(const std::string& path, const std::vector<int16_t>& samples,
                            uint16_t channels, uint32_t rate) {
    WavBuilder w;
    const uint32_t data_size = static_cast<uint32_t>(samples.size() * 2);
    w.tag("RIFF").u32(36 + data_size).tag("WAVE");
    w.tag("fmt ").u32(16).u16(1).u16(channels).u32(rate).u32(rate * 2 * channels)
        .u16(static_cast<uint16_t>(2 * channels)).u16(16);
    w.tag("data").u32(data_size);
    for (int16_t s : samples) w.u16(static_cast<uint16_t>(s));
    w.write(path);
}

} // namespace testutil
