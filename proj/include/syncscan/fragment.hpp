#pragma once

#include "syncscan/audio_io.hpp"
#include "syncscan/embed.hpp"
#include "syncscan/protocol.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace syncscan {

// One MCSF unit: an 8-byte slice of the 32-byte message plus its position.
// Wire format per carrier: 8 sync symbols, 1 header byte (high nibble =
// seq_index, low nibble = total), 8 block bytes. A zero total nibble is
// reserved, so encodable totals are 1..15.
struct Fragment {
    int seq_index = 0;  // 0..15
    int total = 1;      // 1..15 on the wire
    std::array<uint8_t, 8> block_bytes{};

    bool operator==(const Fragment&) const = default;
};

uint8_t pack_fragment_header(int seq_index, int total);
std::pair<int, int> unpack_fragment_header(uint8_t header);  // (seq_index, total)

// Splits a 32-byte message into 4 fragments of 8 bytes.
std::array<Fragment, 4> fragment_message(std::span<const uint8_t> raw);

EmbedResult embed_fragment(const AudioBuffer& carrier, const Fragment& frag, double at_time_s,
                           const ProtocolConfig& cfg = {}, double gain_db = -6.0,
                           double ramp_ms = 2.0);

struct DetectedFragment {
    Fragment fragment;
    size_t carrier_index = 0;
    double start_time_s = 0.0;  // sync start within the carrier
    double confidence = 0.0;
};

struct FragmentScanResult {
    std::vector<DetectedFragment> fragments;
    std::vector<std::string> warnings;  // per-carrier errors and ambiguous reads
};

// Scans every carrier independently and pools the recovered fragments.
// Per-carrier failures are collected as warnings, never fatal.
FragmentScanResult detect_fragments(std::span<const AudioBuffer> carriers,
                                    const ProtocolConfig& cfg = {});

// Reorders fragments by index and concatenates their blocks. Identical
// duplicates are deduplicated; conflicts raise DuplicateConflictError,
// disagreeing totals raise ConflictingTotalError, gaps raise MissingIndexError.
std::vector<uint8_t> reassemble(std::span<const Fragment> fragments);

nlohmann::ordered_json fragments_to_json(const std::vector<DetectedFragment>& fragments,
                                         std::span<const std::string> source_files);

} // namespace syncscan
