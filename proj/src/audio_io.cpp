#include "syncscan/audio_io.hpp"

#include "syncscan/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>

namespace syncscan {

namespace {

uint32_t read_u32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t read_u16(const uint8_t* p) {
    return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

double sinc(double x) {
    if (std::abs(x) < 1e-12) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

} // namespace

AudioBuffer load_wav(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::vector<uint8_t> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

    if (raw.size() < 12 || std::memcmp(raw.data(), "RIFF", 4) != 0 ||
        std::memcmp(raw.data() + 8, "WAVE", 4) != 0) {
        throw FormatError("malformed RIFF/WAVE header: " + path);
    }

    uint16_t fmt_code = 0;
    uint16_t channels = 0;
    uint32_t rate = 0;
    uint16_t bits = 0;
    bool have_fmt = false;
    const uint8_t* data = nullptr;
    uint32_t data_size = 0;

    size_t pos = 12;
    while (pos + 8 <= raw.size()) {
        const char* id = reinterpret_cast<const char*>(raw.data() + pos);
        uint32_t size = read_u32(raw.data() + pos + 4);
        pos += 8;
        if (pos + size > raw.size()) throw FormatError("truncated chunk in " + path);
        if (std::memcmp(id, "fmt ", 4) == 0) {
            if (size < 16) throw FormatError("fmt chunk too small in " + path);
            fmt_code = read_u16(raw.data() + pos);
            channels = read_u16(raw.data() + pos + 2);
            rate = read_u32(raw.data() + pos + 4);
            bits = read_u16(raw.data() + pos + 14);
            have_fmt = true;
        } else if (std::memcmp(id, "data", 4) == 0) {
            data = raw.data() + pos;
            data_size = size;
        }
        pos += size + (size & 1); // chunks are word-aligned
    }

    if (!have_fmt) throw FormatError("missing fmt chunk: " + path);
    if (data == nullptr) throw FormatError("missing data chunk: " + path);
    if (data_size == 0) throw FormatError("zero-length data chunk: " + path);
    if (channels != 1 && channels != 2) {
        throw FormatError("unsupported channel count " + std::to_string(channels) + ": " + path);
    }
    if (rate == 0) throw FormatError("zero sample rate: " + path);

    const bool pcm16 = fmt_code == 1 && bits == 16;
    const bool float32 = fmt_code == 3 && bits == 32;
    if (!pcm16 && !float32) {
        throw FormatError("unsupported codec (fmt=" + std::to_string(fmt_code) +
                          ", bits=" + std::to_string(bits) + "): " + path);
    }

    const size_t bytes_per_sample = pcm16 ? 2 : 4;
    const size_t frame_bytes = bytes_per_sample * channels;
    const size_t n_frames = data_size / frame_bytes;
    if (n_frames == 0) throw FormatError("zero-length data chunk: " + path);

    AudioBuffer out;
    out.sample_rate_hz = static_cast<int>(rate);
    out.samples.resize(n_frames);
    for (size_t i = 0; i < n_frames; ++i) {
        double acc = 0.0;
        for (size_t c = 0; c < channels; ++c) {
            const uint8_t* p = data + i * frame_bytes + c * bytes_per_sample;
            if (pcm16) {
                int16_t v;
                std::memcpy(&v, p, 2);
                acc += v / 32768.0;
            } else {
                float v;
                std::memcpy(&v, p, 4);
                acc += v;
            }
        }
        out.samples[i] = acc / channels;
    }

    if (out.sample_rate_hz != kCanonicalRateHz) out = resample(out, kCanonicalRateHz);

    double peak = 0.0;
    for (double s : out.samples) peak = std::max(peak, std::abs(s));
    if (peak > 1.0) out = peak_normalize(out);
    return out;
}

void write_wav(const AudioBuffer& buffer, const std::string& path) {
    if (buffer.samples.empty()) throw InvalidArgument("refusing to write zero-length data chunk");

    const uint32_t n = static_cast<uint32_t>(buffer.samples.size());
    const uint32_t data_size = n * 2;
    const uint32_t rate = static_cast<uint32_t>(buffer.sample_rate_hz);

    std::vector<uint8_t> out;
    out.reserve(44 + data_size);
    auto put_u32 = [&out](uint32_t v) {
        out.push_back(v & 0xFF);
        out.push_back((v >> 8) & 0xFF);
        out.push_back((v >> 16) & 0xFF);
        out.push_back((v >> 24) & 0xFF);
    };
    auto put_u16 = [&out](uint16_t v) {
        out.push_back(v & 0xFF);
        out.push_back((v >> 8) & 0xFF);
    };
    auto put_tag = [&out](const char* t) { out.insert(out.end(), t, t + 4); };

    put_tag("RIFF");
    put_u32(36 + data_size);
    put_tag("WAVE");
    put_tag("fmt ");
    put_u32(16);
    put_u16(1);  // PCM
    put_u16(1);  // mono
    put_u32(rate);
    put_u32(rate * 2);
    put_u16(2);
    put_u16(16);
    put_tag("data");
    put_u32(data_size);
    for (double s : buffer.samples) {
        // Full-scale step 1/32768 on both paths keeps the round trip within
        // one quantization step; +1.0 saturates at 32767.
        const double clamped = std::clamp(s, -1.0, 1.0);
        const long long q = std::llround(clamped * 32768.0);
        const int16_t v = static_cast<int16_t>(std::clamp<long long>(q, -32768, 32767));
        put_u16(static_cast<uint16_t>(v));
    }

    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open for write: " + path);
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("write failed: " + path);
}

AudioBuffer peak_normalize(const AudioBuffer& buffer) {
    double peak = 0.0;
    for (double s : buffer.samples) peak = std::max(peak, std::abs(s));
    if (peak == 0.0) return buffer;
    AudioBuffer out = buffer;
    const double g = 1.0 / peak;
    for (double& s : out.samples) s *= g;
    return out;
}

AudioBuffer bandpass(const AudioBuffer& buffer, double low_hz, double high_hz) {
    const double nyquist = buffer.sample_rate_hz / 2.0;
    if (!(low_hz > 0.0 && low_hz < high_hz && high_hz < nyquist)) {
        throw InvalidArgument("invalid band edges [" + std::to_string(low_hz) + ", " +
                              std::to_string(high_hz) + ")");
    }

    constexpr int kTaps = 255;
    constexpr int kCenter = kTaps / 2;
    const double f_lo = low_hz / buffer.sample_rate_hz;
    const double f_hi = high_hz / buffer.sample_rate_hz;

    std::array<double, kTaps> h;
    for (int i = 0; i < kTaps; ++i) {
        const int m = i - kCenter;
        const double ideal = 2.0 * f_hi * sinc(2.0 * f_hi * m) - 2.0 * f_lo * sinc(2.0 * f_lo * m);
        const double w = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (kTaps - 1));
        h[i] = ideal * w;
    }

    const auto& x = buffer.samples;
    const long n = static_cast<long>(x.size());
    AudioBuffer out;
    out.sample_rate_hz = buffer.sample_rate_hz;
    out.samples.assign(x.size(), 0.0);
    for (long i = 0; i < n; ++i) {
        double acc = 0.0;
        // y[i] = sum_k h[k] * x[i + center - k], zero outside the signal
        const long base = i + kCenter;
        const long k_lo = std::max<long>(0, base - (n - 1));
        const long k_hi = std::min<long>(kTaps - 1, base);
        for (long k = k_lo; k <= k_hi; ++k) acc += h[static_cast<size_t>(k)] * x[static_cast<size_t>(base - k)];
        out.samples[static_cast<size_t>(i)] = acc;
    }
    return out;
}

AudioBuffer resample(const AudioBuffer& buffer, int target_rate_hz) {
    if (target_rate_hz <= 0) throw InvalidArgument("target rate must be positive");
    if (buffer.sample_rate_hz == target_rate_hz) return buffer;

    constexpr int kHalfTaps = 16; // 32-tap kernel
    const double ratio = static_cast<double>(target_rate_hz) / buffer.sample_rate_hz;
    const double cutoff = std::min(1.0, ratio); // relative to source Nyquist

    const auto& x = buffer.samples;
    const long n = static_cast<long>(x.size());
    const long n_out = std::lround(static_cast<double>(n) * ratio);

    AudioBuffer out;
    out.sample_rate_hz = target_rate_hz;
    out.samples.resize(static_cast<size_t>(n_out));
    for (long i = 0; i < n_out; ++i) {
        const double p = static_cast<double>(i) / ratio; // source position
        const long k0 = static_cast<long>(std::floor(p)) - kHalfTaps + 1;
        double acc = 0.0;
        for (long k = k0; k < k0 + 2 * kHalfTaps; ++k) {
            if (k < 0 || k >= n) continue;
            const double d = p - k;
            const double w = 0.54 + 0.46 * std::cos(std::numbers::pi * d / kHalfTaps);
            acc += x[static_cast<size_t>(k)] * cutoff * sinc(cutoff * d) * w;
        }
        out.samples[static_cast<size_t>(i)] = acc;
    }
    return out;
}

} // namespace syncscan
