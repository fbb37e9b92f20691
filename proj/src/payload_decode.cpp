#include "syncscan/payload_decode.hpp"

#include "syncscan/errors.hpp"
#include "syncscan/hexutil.hpp"

#include <algorithm>
#include <cmath>

namespace syncscan {

namespace {

double symbol_confidence(double freq_hz, const ByteFreqMap& map) {
    const double nominal = byte_to_freq(freq_to_byte(freq_hz, map), map);
    const double half_step = map.step_hz() / 2.0;
    return 1.0 - std::min(std::abs(freq_hz - nominal) / half_step, 1.0);
}

} // namespace

GuidanceBlock decode_block(std::span<const uint8_t> block) {
    if (block.size() != 8) throw InvalidArgument("guidance block must be exactly 8 bytes");
    GuidanceBlock g;
    g.target_id = block[0];
    g.coord_x = static_cast<uint16_t>(block[1] * 256 + block[2]);
    g.coord_y = static_cast<uint16_t>(block[3] * 256 + block[4]);
    g.speed = block[5];
    g.heading = block[6];
    g.command_code = block[7];
    return g;
}

std::array<uint8_t, 8> encode_block(const GuidanceBlock& block) {
    return {block.target_id,
            static_cast<uint8_t>(block.coord_x >> 8),
            static_cast<uint8_t>(block.coord_x & 0xFF),
            static_cast<uint8_t>(block.coord_y >> 8),
            static_cast<uint8_t>(block.coord_y & 0xFF),
            block.speed,
            block.heading,
            block.command_code};
}

std::array<GuidanceBlock, 4> decode_message(std::span<const uint8_t> raw) {
    if (raw.size() != ProtocolConfig::payload_len) {
        throw InvalidArgument("payload must be exactly 32 bytes");
    }
    std::array<GuidanceBlock, 4> blocks;
    for (size_t i = 0; i < 4; ++i) blocks[i] = decode_block(raw.subspan(i * 8, 8));
    return blocks;
}

PayloadExtraction extract_payload(const AudioBuffer& audio, const SyncEvent& sync,
                                  const ProtocolConfig& cfg) {
    const double frame_end =
        sync.start_time_s + ProtocolConfig::frame_symbols * cfg.symbol_s();
    if (frame_end > audio.duration_s() + 0.5 / audio.sample_rate_hz) {
        throw InvalidArgument("payload span exceeds audio duration");
    }

    const double payload_t0 = sync.start_time_s + 8.0 * cfg.symbol_s();
    const auto symbols = symbolize(audio, payload_t0, 32, cfg);

    PayloadExtraction out;
    const ByteFreqMap map = cfg.byte_map();
    for (size_t i = 0; i < 32; ++i) {
        if (symbols[i].power_db < kSymbolPowerFloorDb) {
            throw MissingSymbolError(static_cast<int>(i),
                                     "payload symbol " + std::to_string(i) +
                                         " below power floor");
        }
        out.bytes[i] = freq_to_byte(symbols[i].freq_hz, map);
        out.confidences[i] = symbol_confidence(symbols[i].freq_hz, map);
    }
    return out;
}

StegoMessage decode_at(const AudioBuffer& audio, const SyncEvent& sync,
                       const ProtocolConfig& cfg) {
    const PayloadExtraction ex = extract_payload(audio, sync, cfg);
    StegoMessage m;
    m.sync = sync;
    m.raw_payload = ex.bytes;
    m.blocks = decode_message(ex.bytes);
    m.symbol_confidences = ex.confidences;
    return m;
}

std::vector<StegoMessage> run_fsm(std::span<const SymbolMeasure> stream,
                                  const ProtocolConfig& cfg, double stream_t0_s) {
    std::vector<StegoMessage> messages;
    const ByteFreqMap map = cfg.byte_map();
    const size_t n = stream.size();

    DecoderPhase phase = DecoderPhase::Search;
    size_t pos = 0;        // SEARCH cursor: candidate sync start
    size_t payload_k = 0;  // PAYLOAD progress 0..31
    StegoMessage current;

    while (true) {
        switch (phase) {
            case DecoderPhase::Search: {
                if (pos + 8 > n) return messages;
                std::array<double, 8> freqs{};
                bool present = true;
                for (size_t i = 0; i < 8; ++i) {
                    if (stream[pos + i].power_db < kSymbolPowerFloorDb) {
                        present = false;
                        break;
                    }
                    freqs[i] = stream[pos + i].freq_hz;
                }
                if (present && is_sync_symbols(freqs, cfg)) {
                    current = StegoMessage{};
                    current.sync.start_time_s = stream_t0_s + pos * cfg.symbol_s();
                    current.sync.symbol_freqs_hz = freqs;
                    current.sync.hop_index = static_cast<long>(pos);
                    double err = 0.0;
                    for (size_t i = 0; i < 7; ++i) err += std::abs(freqs[i] - cfg.ff_freq_hz);
                    err += std::abs(freqs[7] - cfg.sync_terminator_hz);
                    current.sync.confidence =
                        std::clamp(1.0 - (err / 8.0) / cfg.tolerance_hz, 0.0, 1.0);
                    phase = DecoderPhase::SyncVerify;
                } else {
                    ++pos;
                }
                break;
            }
            case DecoderPhase::SyncVerify: {
                // Sync verified during Search; payload must fit the stream.
                if (pos + ProtocolConfig::frame_symbols > n) return messages;
                payload_k = 0;
                phase = DecoderPhase::Payload;
                break;
            }
            case DecoderPhase::Payload: {
                const SymbolMeasure& s = stream[pos + 8 + payload_k];
                if (s.power_db < kSymbolPowerFloorDb) {
                    phase = DecoderPhase::Abort;
                    break;
                }
                current.raw_payload[payload_k] = freq_to_byte(s.freq_hz, map);
                current.symbol_confidences[payload_k] = symbol_confidence(s.freq_hz, map);
                if (++payload_k == ProtocolConfig::payload_len) phase = DecoderPhase::Complete;
                break;
            }
            case DecoderPhase::Complete: {
                current.blocks = decode_message(current.raw_payload);
                messages.push_back(current);
                pos += ProtocolConfig::frame_symbols;
                phase = DecoderPhase::Search;
                break;
            }
            case DecoderPhase::Abort: {
                pos += 1;  // resume at the symbol after the failed sync start
                phase = DecoderPhase::Search;
                break;
            }
        }
    }
}

nlohmann::ordered_json block_to_json(const GuidanceBlock& b) {
    nlohmann::ordered_json j;
    j["target_id"] = b.target_id;
    j["coord_x"] = b.coord_x;
    j["coord_y"] = b.coord_y;
    j["speed"] = b.speed;
    j["heading"] = b.heading;
    j["heading_deg"] = b.heading_deg();
    j["command_code"] = b.command_code;
    return j;
}

nlohmann::ordered_json message_to_json(const StegoMessage& m) {
    nlohmann::ordered_json j;
    j["start_time_s"] = m.sync.start_time_s;
    j["raw_payload_hex"] = to_hex(m.raw_payload);
    nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
    for (const auto& b : m.blocks) blocks.push_back(block_to_json(b));
    j["blocks"] = blocks;
    return j;
}

} // namespace syncscan
