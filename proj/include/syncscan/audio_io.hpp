#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace syncscan {

// Canonical signal carrier: mono samples in [-1, 1] at a fixed rate.
// load_wav() always yields 44100 Hz; synthetic generators may use other rates.
struct AudioBuffer {
    std::vector<double> samples;
    int sample_rate_hz = 44100;

    size_t size() const { return samples.size(); }
    double duration_s() const {
        return sample_rate_hz > 0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
    }
};

inline constexpr int kCanonicalRateHz = 44100;

// Reads a RIFF/WAVE file (PCM16 or float32, 1-2 channels). Stereo is downmixed
// by per-sample channel average, non-44100 rates are resampled, and the result
// is peak-normalized only if any |s| > 1 (possible for float input).
// Unknown chunks are skipped.
AudioBuffer load_wav(const std::string& path);

// Writes mono 16-bit PCM at the buffer's rate. Samples are clamped to [-1, 1],
// scaled by 32767 and rounded to nearest. Empty buffers are rejected.
void write_wav(const AudioBuffer& buffer, const std::string& path);

// Scales so max|s| == 1. All-zero input is returned unchanged. Idempotent.
AudioBuffer peak_normalize(const AudioBuffer& buffer);

// Linear-phase FIR band-pass (windowed sinc, 255 taps, Hamming). Group delay
// is compensated so output aligns with input; length is preserved with the
// signal treated as zero outside its ends.
AudioBuffer bandpass(const AudioBuffer& buffer, double low_hz, double high_hz);

// Windowed-sinc resampler (32-tap kernel). Returns the input unchanged when
// the rate already matches.
AudioBuffer resample(const AudioBuffer& buffer, int target_rate_hz);

} // namespace syncscan
