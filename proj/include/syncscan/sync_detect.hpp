#pragma once

#include "syncscan/audio_io.hpp"
#include "syncscan/protocol.hpp"
#include "syncscan/spectral.hpp"

#include <array>
#include <vector>

#include "json.hpp"

namespace syncscan {

// Symbols measuring below this are treated as absent; silence must not
// quantize to spurious bytes.
inline constexpr double kSymbolPowerFloorDb = -60.0;

// A located sync frame.
struct SyncEvent {
    double start_time_s = 0.0;            // start of the first sync symbol
    std::array<double, 8> symbol_freqs_hz{};  // measured, not nominal
    double confidence = 0.0;              // 1.0 at nominal frequencies
    long hop_index = 0;
};

struct SymbolMeasure {
    double freq_hz = 0.0;
    double power_db = kSilenceFloorDb;
};

// Symbol-synchronous re-measurement: one Hann-windowed FFT per symbol over its
// exact symbol_ms span starting at start_time_s.
std::vector<SymbolMeasure> symbolize(const AudioBuffer& audio, double start_time_s,
                                     int n_symbols, const ProtocolConfig& cfg = {});

// Model M1 scan. Stage 1 finds coarse runs of FF-band dominant frames followed
// by a terminator-band frame; stage 2 refines the start offset at 1 ms
// granularity by re-measuring all 8 symbols and applying is_sync_symbols.
// Events are sorted by time, deduplicated within one frame duration.
std::vector<SyncEvent> scan(const DominantTrack& track, const AudioBuffer& audio,
                            const ProtocolConfig& cfg = {});

nlohmann::ordered_json sync_event_to_json(const SyncEvent& ev);
nlohmann::ordered_json sync_events_to_json(const std::vector<SyncEvent>& events);

} // namespace syncscan
