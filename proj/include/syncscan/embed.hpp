#pragma once

#include "syncscan/audio_io.hpp"
#include "syncscan/protocol.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace syncscan {

struct EmbedSpec {
    std::array<uint8_t, 32> payload{};
    double at_time_s = 0.0;
    double gain_db = -6.0;   // per tone, dBFS
    double ramp_ms = 2.0;    // raised-cosine onset/offset
    // Test hooks: global tone detuning and per-frame-symbol muting
    // (indices 0..39 cover sync + payload).
    double freq_offset_hz = 0.0;
    std::vector<int> muted_symbols;
};

// One 25 ms tone for byte b at byte_to_freq(b). gain_db of -infinity yields a
// silent symbol. Phase starts at 0.
AudioBuffer synth_symbol(uint8_t b, const ProtocolConfig& cfg = {}, double gain_db = -6.0,
                         double ramp_ms = 2.0);

struct EmbedResult {
    AudioBuffer audio;
    bool clipped = false;  // any sample was clamped to [-1, 1]
};

// Mixes the 40-symbol frame (8 sync + 32 payload) additively into the carrier
// at spec.at_time_s.
EmbedResult embed_message(const AudioBuffer& carrier, const EmbedSpec& spec,
                          const ProtocolConfig& cfg = {});

// Arbitrary byte sequences as symbol frames (used by the fragment wire format).
EmbedResult embed_symbols(const AudioBuffer& carrier, std::span<const uint8_t> bytes,
                          double at_time_s, const ProtocolConfig& cfg = {},
                          double gain_db = -6.0, double ramp_ms = 2.0,
                          double freq_offset_hz = 0.0,
                          std::span<const int> muted_symbols = {});

AudioBuffer generate_carrier_silence(double duration_s, int sample_rate_hz = kCanonicalRateHz);
// Spectrally flat noise at the given RMS level; deterministic for a given seed
// across standard libraries (explicit bit mapping, no std distributions).
AudioBuffer generate_carrier_noise(double duration_s, double level_db, uint64_t seed,
                                   int sample_rate_hz = kCanonicalRateHz);
AudioBuffer generate_carrier_tones(double duration_s, std::span<const double> freqs_hz,
                                   int sample_rate_hz = kCanonicalRateHz);

} // namespace syncscan
