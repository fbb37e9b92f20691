#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "json.hpp"

namespace syncscan {

// Affine byte->frequency map pinned to the two observable anchors:
// byte 0x80 <-> 2045 Hz (sync terminator) and byte 0xFF <-> 3230 Hz.
// Step between consecutive bytes is the exact rational (3230-2045)/127.
struct ByteFreqMap {
    double anchor_mid_hz = 2045.0;  // byte 0x80
    double anchor_top_hz = 3230.0;  // byte 0xFF

    double step_hz() const { return (anchor_top_hz - anchor_mid_hz) / 127.0; }
};

// Wire-format constants shared by the embedder and every detector/decoder.
struct ProtocolConfig {
    double sync_terminator_hz = 2045.0;
    double tolerance_hz = 20.0;  // epsilon
    double ff_freq_hz = 3230.0;
    double symbol_ms = 25.0;  // one byte per symbol, one analysis window

    static constexpr std::array<uint8_t, 8> sync_pattern = {0xFF, 0xFF, 0xFF, 0xFF,
                                                            0xFF, 0xFF, 0xFF, 0x80};
    static constexpr size_t payload_len = 32;
    static constexpr size_t frame_symbols = sync_pattern.size() + payload_len;  // 40

    ByteFreqMap byte_map() const { return {sync_terminator_hz, ff_freq_hz}; }
    double symbol_s() const { return symbol_ms / 1000.0; }
};

// f(b) = anchor_mid + (b - 128) * step. Exact at both anchors.
double byte_to_freq(uint8_t b, const ByteFreqMap& map = {});

// Nearest-byte quantization with clamping; exact midpoints round toward the
// lower byte.
uint8_t freq_to_byte(double freq_hz, const ByteFreqMap& map = {});

// Sync frame predicate over 8 measured symbol frequencies: the first seven lie
// within tolerance of ff_freq_hz with max-min spread <= tolerance, and the
// eighth lies within tolerance of the terminator.
bool is_sync_symbols(std::span<const double> freqs, const ProtocolConfig& cfg = {});

nlohmann::ordered_json protocol_to_json(const ProtocolConfig& cfg);
ProtocolConfig protocol_from_json(const nlohmann::json& j);
ProtocolConfig load_protocol(const std::string& path);

} // namespace syncscan
