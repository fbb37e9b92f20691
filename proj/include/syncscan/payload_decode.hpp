#pragma once

#include "syncscan/audio_io.hpp"
#include "syncscan/protocol.hpp"
#include "syncscan/sync_detect.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

namespace syncscan {

// One decoded 8-byte command field group (Model M2 layout):
// byte 0 target id, bytes 1-2 X coordinate (high byte first), bytes 3-4 Y
// coordinate, byte 5 speed, byte 6 heading, byte 7 command code.
struct GuidanceBlock {
    uint8_t target_id = 0;
    uint16_t coord_x = 0;
    uint16_t coord_y = 0;
    uint8_t speed = 0;
    uint8_t heading = 0;
    uint8_t command_code = 0;

    double heading_deg() const { return heading * 360.0 / 256.0; }

    bool operator==(const GuidanceBlock&) const = default;
};

GuidanceBlock decode_block(std::span<const uint8_t> block);
std::array<uint8_t, 8> encode_block(const GuidanceBlock& block);
std::array<GuidanceBlock, 4> decode_message(std::span<const uint8_t> raw);

struct PayloadExtraction {
    std::array<uint8_t, 32> bytes{};
    std::array<double, 32> confidences{};
};

// Reads the 32 payload symbols that follow a sync frame and quantizes each to
// a byte. A symbol below the power floor raises MissingSymbolError with its
// index; a span past the buffer end raises InvalidArgument.
PayloadExtraction extract_payload(const AudioBuffer& audio, const SyncEvent& sync,
                                  const ProtocolConfig& cfg = {});

struct StegoMessage {
    SyncEvent sync;
    std::array<uint8_t, 32> raw_payload{};
    std::array<GuidanceBlock, 4> blocks{};
    std::array<double, 32> symbol_confidences{};
};

// extract_payload + decode_message for one detection.
StegoMessage decode_at(const AudioBuffer& audio, const SyncEvent& sync,
                       const ProtocolConfig& cfg = {});

// Framing FSM states. PAYLOAD carries the index of the symbol being collected.
enum class DecoderPhase { Search, SyncVerify, Payload, Complete, Abort };

// Runs the framing FSM over a symbol stream (as produced by symbolize starting
// at stream_t0_s). SEARCH advances one symbol at a time until eight
// consecutive symbols satisfy is_sync_symbols; PAYLOAD collects 32 symbols; a
// below-floor payload symbol aborts and the search resumes at the symbol after
// the failed sync start. Malformed input yields zero messages, never a throw.
std::vector<StegoMessage> run_fsm(std::span<const SymbolMeasure> stream,
                                  const ProtocolConfig& cfg = {}, double stream_t0_s = 0.0);

nlohmann::ordered_json block_to_json(const GuidanceBlock& b);
nlohmann::ordered_json message_to_json(const StegoMessage& m);

} // namespace syncscan
