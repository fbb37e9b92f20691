#include "syncscan/embed.hpp"

#include "syncscan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace syncscan {

namespace {

// Raised-cosine envelope: ramp_n samples up, flat, ramp_n samples down.
double envelope(long i, long n, long ramp_n) {
    if (ramp_n <= 0) return 1.0;
    if (i < ramp_n) return 0.5 * (1.0 - std::cos(std::numbers::pi * i / ramp_n));
    if (i >= n - ramp_n) {
        return 0.5 * (1.0 - std::cos(std::numbers::pi * (n - 1 - i) / ramp_n));
    }
    return 1.0;
}

void render_symbol(std::span<double> dst, double freq_hz, double amplitude, long ramp_n,
                   int sample_rate_hz) {
    const long n = static_cast<long>(dst.size());
    const double w = 2.0 * std::numbers::pi * freq_hz / sample_rate_hz;
    for (long i = 0; i < n; ++i) {
        dst[static_cast<size_t>(i)] = amplitude * envelope(i, n, ramp_n) * std::sin(w * i);
    }
}

} // namespace

AudioBuffer synth_symbol(uint8_t b, const ProtocolConfig& cfg, double gain_db, double ramp_ms) {
    AudioBuffer out;
    out.sample_rate_hz = kCanonicalRateHz;
    const long n = static_cast<long>(std::floor(cfg.symbol_s() * kCanonicalRateHz));
    out.samples.assign(static_cast<size_t>(n), 0.0);
    if (std::isinf(gain_db) && gain_db < 0) return out;  // mute sentinel

    const double amp = std::pow(10.0, gain_db / 20.0);
    const long ramp_n = std::lround(ramp_ms / 1000.0 * kCanonicalRateHz);
    render_symbol(out.samples, byte_to_freq(b, cfg.byte_map()), amp, ramp_n, kCanonicalRateHz);
    return out;
}

EmbedResult embed_symbols(const AudioBuffer& carrier, std::span<const uint8_t> bytes,
                          double at_time_s, const ProtocolConfig& cfg, double gain_db,
                          double ramp_ms, double freq_offset_hz,
                          std::span<const int> muted_symbols) {
    if (at_time_s < 0.0) throw InvalidArgument("at_time_s must be non-negative");
    const int rate = carrier.sample_rate_hz;
    const double sym = cfg.symbol_s() * rate;
    const long s0 = std::llround(at_time_s * rate);
    const long s_end = s0 + std::llround(static_cast<double>(bytes.size()) * sym);
    if (s_end > static_cast<long>(carrier.samples.size())) {
        throw InvalidArgument("carrier too short for the requested embedding");
    }

    const double amp = std::pow(10.0, gain_db / 20.0);
    const long ramp_n = std::lround(ramp_ms / 1000.0 * rate);
    const ByteFreqMap map = cfg.byte_map();
    auto muted = [&](size_t k) {
        return std::find(muted_symbols.begin(), muted_symbols.end(), static_cast<int>(k)) !=
               muted_symbols.end();
    };

    EmbedResult result;
    result.audio = carrier;
    std::vector<double> tone;
    // Runs of identical bytes render as one continuous tone: a phase restart
    // at every symbol boundary would smear the dominant frequency of analysis
    // windows that straddle it. Ramps sit only at tone changes.
    size_t k = 0;
    while (k < bytes.size()) {
        if (muted(k)) {
            ++k;
            continue;
        }
        size_t e = k + 1;
        while (e < bytes.size() && bytes[e] == bytes[k] && !muted(e)) ++e;
        const long a = s0 + std::llround(static_cast<double>(k) * sym);
        const long b = s0 + std::llround(static_cast<double>(e) * sym);
        tone.resize(static_cast<size_t>(b - a));
        render_symbol(tone, byte_to_freq(bytes[k], map) + freq_offset_hz, amp, ramp_n, rate);
        for (long i = a; i < b; ++i) {
            double& s = result.audio.samples[static_cast<size_t>(i)];
            s += tone[static_cast<size_t>(i - a)];
            if (s > 1.0) {
                s = 1.0;
                result.clipped = true;
            } else if (s < -1.0) {
                s = -1.0;
                result.clipped = true;
            }
        }
        k = e;
    }
    return result;
}

EmbedResult embed_message(const AudioBuffer& carrier, const EmbedSpec& spec,
                          const ProtocolConfig& cfg) {
    std::vector<uint8_t> frame(ProtocolConfig::sync_pattern.begin(),
                               ProtocolConfig::sync_pattern.end());
    frame.insert(frame.end(), spec.payload.begin(), spec.payload.end());
    return embed_symbols(carrier, frame, spec.at_time_s, cfg, spec.gain_db, spec.ramp_ms,
                         spec.freq_offset_hz, spec.muted_symbols);
}

AudioBuffer generate_carrier_silence(double duration_s, int sample_rate_hz) {
    if (duration_s <= 0.0) throw InvalidArgument("duration must be positive");
    AudioBuffer out;
    out.sample_rate_hz = sample_rate_hz;
    out.samples.assign(static_cast<size_t>(std::llround(duration_s * sample_rate_hz)), 0.0);
    return out;
}

AudioBuffer generate_carrier_noise(double duration_s, double level_db, uint64_t seed,
                                   int sample_rate_hz) {
    AudioBuffer out = generate_carrier_silence(duration_s, sample_rate_hz);
    // Uniform in [-a, a] has RMS a/sqrt(3).
    const double a = std::sqrt(3.0) * std::pow(10.0, level_db / 20.0);
    if (a > 1.0) throw InvalidArgument("noise level would exceed full scale");
    std::mt19937_64 rng(seed);
    for (double& s : out.samples) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
        s = a * (2.0 * u - 1.0);
    }
    return out;
}

AudioBuffer generate_carrier_tones(double duration_s, std::span<const double> freqs_hz,
                                   int sample_rate_hz) {
    AudioBuffer out = generate_carrier_silence(duration_s, sample_rate_hz);
    if (freqs_hz.empty()) return out;
    const double amp = 0.9 / static_cast<double>(freqs_hz.size());
    for (double f : freqs_hz) {
        const double w = 2.0 * std::numbers::pi * f / sample_rate_hz;
        for (size_t i = 0; i < out.samples.size(); ++i) {
            out.samples[i] += amp * std::sin(w * static_cast<double>(i));
        }
    }
    return out;
}

} // namespace syncscan
