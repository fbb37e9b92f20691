#include "syncscan/fragment.hpp"

#include "syncscan/errors.hpp"
#include "syncscan/hexutil.hpp"
#include "syncscan/spectral.hpp"
#include "syncscan/sync_detect.hpp"

#include <algorithm>
#include <map>

namespace syncscan {

uint8_t pack_fragment_header(int seq_index, int total) {
    if (total < 1 || total > 15) {
        throw InvalidArgument("fragment total must be 1..15 on the wire (0 is reserved)");
    }
    if (seq_index < 0 || seq_index >= total) {
        throw InvalidArgument("seq_index must lie in [0, total)");
    }
    return static_cast<uint8_t>((seq_index << 4) | total);
}

std::pair<int, int> unpack_fragment_header(uint8_t header) {
    return {header >> 4, header & 0x0F};
}

std::array<Fragment, 4> fragment_message(std::span<const uint8_t> raw) {
    if (raw.size() != ProtocolConfig::payload_len) {
        throw InvalidArgument("message must be exactly 32 bytes");
    }
    std::array<Fragment, 4> frags;
    for (int i = 0; i < 4; ++i) {
        frags[static_cast<size_t>(i)].seq_index = i;
        frags[static_cast<size_t>(i)].total = 4;
        std::copy_n(raw.begin() + i * 8, 8, frags[static_cast<size_t>(i)].block_bytes.begin());
    }
    return frags;
}

EmbedResult embed_fragment(const AudioBuffer& carrier, const Fragment& frag, double at_time_s,
                           const ProtocolConfig& cfg, double gain_db, double ramp_ms) {
    std::vector<uint8_t> symbols(ProtocolConfig::sync_pattern.begin(),
                                 ProtocolConfig::sync_pattern.end());
    symbols.push_back(pack_fragment_header(frag.seq_index, frag.total));
    symbols.insert(symbols.end(), frag.block_bytes.begin(), frag.block_bytes.end());
    return embed_symbols(carrier, symbols, at_time_s, cfg, gain_db, ramp_ms);
}

FragmentScanResult detect_fragments(std::span<const AudioBuffer> carriers,
                                    const ProtocolConfig& cfg) {
    FragmentScanResult result;
    for (size_t ci = 0; ci < carriers.size(); ++ci) {
        try {
            const DominantTrack track = dominant_track(carriers[ci]);
            const auto events = scan(track, carriers[ci], cfg);
            for (const SyncEvent& ev : events) {
                // Header + block = 9 symbols after the sync frame.
                const double t0 = ev.start_time_s + 8.0 * cfg.symbol_s();
                const double need = t0 + 9.0 * cfg.symbol_s();
                if (need > carriers[ci].duration_s() + 1e-9) {
                    result.warnings.push_back("carrier " + std::to_string(ci) +
                                              ": fragment span exceeds audio");
                    continue;
                }
                const auto symbols = symbolize(carriers[ci], t0, 9, cfg);
                bool present = true;
                for (const auto& s : symbols) {
                    if (s.power_db < kSymbolPowerFloorDb) {
                        present = false;
                        break;
                    }
                }
                if (!present) {
                    result.warnings.push_back("carrier " + std::to_string(ci) +
                                              ": missing symbol in fragment read");
                    continue;
                }
                const ByteFreqMap map = cfg.byte_map();
                const uint8_t header = freq_to_byte(symbols[0].freq_hz, map);
                const auto [seq, total] = unpack_fragment_header(header);
                if (total == 0) {
                    result.warnings.push_back(
                        "carrier " + std::to_string(ci) +
                        ": ambiguous read, header total nibble is zero (not a fragment)");
                    continue;
                }
                if (seq >= total) {
                    result.warnings.push_back("carrier " + std::to_string(ci) +
                                              ": header index " + std::to_string(seq) +
                                              " out of range for total " + std::to_string(total));
                    continue;
                }
                DetectedFragment df;
                df.fragment.seq_index = seq;
                df.fragment.total = total;
                for (size_t k = 0; k < 8; ++k) {
                    df.fragment.block_bytes[k] = freq_to_byte(symbols[k + 1].freq_hz, map);
                }
                df.carrier_index = ci;
                df.start_time_s = ev.start_time_s;
                df.confidence = ev.confidence;
                result.fragments.push_back(df);
            }
        } catch (const Error& e) {
            result.warnings.push_back("carrier " + std::to_string(ci) + ": " + e.what());
        }
    }
    return result;
}

std::vector<uint8_t> reassemble(std::span<const Fragment> fragments) {
    if (fragments.empty()) throw InvalidArgument("no fragments to reassemble");

    const int total = fragments[0].total;
    for (const Fragment& f : fragments) {
        if (f.total != total) {
            throw ConflictingTotalError("fragments disagree on total (" +
                                        std::to_string(total) + " vs " +
                                        std::to_string(f.total) + ")");
        }
    }

    std::map<int, Fragment> by_index;
    for (const Fragment& f : fragments) {
        auto [it, inserted] = by_index.try_emplace(f.seq_index, f);
        if (!inserted && it->second.block_bytes != f.block_bytes) {
            throw DuplicateConflictError(f.seq_index,
                                         "conflicting duplicates for fragment index " +
                                             std::to_string(f.seq_index));
        }
    }

    std::vector<int> missing;
    for (int i = 0; i < total; ++i) {
        if (!by_index.contains(i)) missing.push_back(i);
    }
    if (!missing.empty()) {
        std::string list;
        for (int i : missing) list += (list.empty() ? "" : ", ") + std::to_string(i);
        throw MissingIndexError(missing, total, "missing fragment indices: " + list);
    }

    std::vector<uint8_t> out;
    out.reserve(static_cast<size_t>(total) * 8);
    for (int i = 0; i < total; ++i) {
        const auto& block = by_index.at(i).block_bytes;
        out.insert(out.end(), block.begin(), block.end());
    }
    return out;
}

nlohmann::ordered_json fragments_to_json(const std::vector<DetectedFragment>& fragments,
                                         std::span<const std::string> source_files) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const DetectedFragment& df : fragments) {
        nlohmann::ordered_json j;
        j["seq_index"] = df.fragment.seq_index;
        j["total"] = df.fragment.total;
        j["block_hex"] = to_hex(df.fragment.block_bytes);
        j["source_file"] = df.carrier_index < source_files.size()
                               ? source_files[df.carrier_index]
                               : std::to_string(df.carrier_index);
        j["start_time_s"] = df.start_time_s;
        arr.push_back(j);
    }
    return arr;
}

} // namespace syncscan
