#include "syncscan/analysis.hpp"

#include "syncscan/errors.hpp"
#include "syncscan/hexutil.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>

namespace syncscan {

namespace {

bool utf8_valid_stream(std::span<const uint8_t> b) {
    size_t i = 0;
    while (i < b.size()) {
        const uint8_t c = b[i];
        size_t len;
        uint32_t cp;
        if (c < 0x80) {
            len = 1;
            cp = c;
        } else if ((c & 0xE0) == 0xC0) {
            len = 2;
            cp = c & 0x1F;
        } else if ((c & 0xF0) == 0xE0) {
            len = 3;
            cp = c & 0x0F;
        } else if ((c & 0xF8) == 0xF0) {
            len = 4;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + len > b.size()) return false;
        for (size_t k = 1; k < len; ++k) {
            if ((b[i + k] & 0xC0) != 0x80) return false;
            cp = (cp << 6) | (b[i + k] & 0x3F);
        }
        // Overlong forms, surrogates and out-of-range code points are invalid.
        if (len == 2 && cp < 0x80) return false;
        if (len == 3 && cp < 0x800) return false;
        if (len == 4 && cp < 0x10000) return false;
        if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return false;
        i += len;
    }
    return true;
}

bool base64_decodable_stream(std::span<const uint8_t> raw) {
    std::string s;
    s.reserve(raw.size());
    for (uint8_t c : raw) {
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') continue;
        s.push_back(static_cast<char>(c));
    }
    if (s.empty() || s.size() % 4 != 0) return false;
    auto is_alpha = [](char c) {
        return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
               c == '+' || c == '/';
    };
    size_t pad = 0;
    while (pad < 2 && pad < s.size() && s[s.size() - 1 - pad] == '=') ++pad;
    for (size_t i = 0; i < s.size() - pad; ++i) {
        if (!is_alpha(s[i])) return false;
    }
    return true;
}

} // namespace

double byte_entropy_bits(std::span<const uint8_t> bytes) {
    if (bytes.empty()) throw InvalidArgument("entropy of empty byte sequence is undefined");
    std::array<size_t, 256> counts{};
    for (uint8_t b : bytes) ++counts[b];
    const double n = static_cast<double>(bytes.size());
    double h = 0.0;
    for (size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

double byte_entropy_norm(std::span<const uint8_t> bytes) {
    return byte_entropy_bits(bytes) / 8.0;
}

EntropyProfile entropy_profile(std::span<const uint8_t> bytes, size_t segment_len,
                               double threshold, double t0_s, double seconds_per_byte) {
    if (segment_len < 16) throw InvalidArgument("segment_len must be >= 16");
    EntropyProfile profile;
    profile.threshold = threshold;
    size_t pos = 0;
    while (pos < bytes.size()) {
        const size_t remaining = bytes.size() - pos;
        size_t len = std::min(segment_len, remaining);
        if (len < segment_len && len * 2 < segment_len) break;  // drop short tail
        EntropySegment seg;
        seg.t0_s = t0_s + static_cast<double>(pos) * seconds_per_byte;
        seg.t1_s = t0_s + static_cast<double>(pos + len) * seconds_per_byte;
        seg.entropy_norm = byte_entropy_norm(bytes.subspan(pos, len));
        if (seg.entropy_norm < threshold) profile.flagged.push_back(profile.segments.size());
        profile.segments.push_back(seg);
        pos += len;
    }
    return profile;
}

const std::vector<MagicEntry>& default_magic_table() {
    static const std::vector<MagicEntry> table = {
        {"PNG", {{0, {0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A}}}},
        {"ZIP", {{0, {0x50, 0x4B, 0x03, 0x04}}}},
        {"WAV", {{0, {'R', 'I', 'F', 'F'}}, {8, {'W', 'A', 'V', 'E'}}}},
        {"MP4", {{4, {'f', 't', 'y', 'p'}}}},
        {"GZIP", {{0, {0x1F, 0x8B}}}},
        {"PDF", {{0, {0x25, 0x50, 0x44, 0x46}}}},
        {"JPEG", {{0, {0xFF, 0xD8, 0xFF}}}},
    };
    return table;
}

std::optional<std::string> magic_match(std::span<const uint8_t> bytes,
                                       const std::vector<MagicEntry>& table) {
    for (const MagicEntry& entry : table) {
        bool ok = !entry.parts.empty();
        for (const MagicPart& part : entry.parts) {
            if (part.offset + part.bytes.size() > bytes.size() ||
                !std::equal(part.bytes.begin(), part.bytes.end(), bytes.begin() + part.offset)) {
                ok = false;
                break;
            }
        }
        if (ok) return entry.name;
    }
    return std::nullopt;
}

std::optional<std::string> magic_match(std::span<const uint8_t> bytes) {
    return magic_match(bytes, default_magic_table());
}

std::vector<MagicEntry> magic_table_from_json(const nlohmann::json& j) {
    std::vector<MagicEntry> table;
    for (const auto& je : j) {
        MagicEntry e;
        e.name = je.at("name").get<std::string>();
        for (const auto& jp : je.at("parts")) {
            MagicPart p;
            p.offset = jp.value("offset", 0u);
            p.bytes = from_hex(jp.at("hex").get<std::string>());
            e.parts.push_back(std::move(p));
        }
        table.push_back(std::move(e));
    }
    return table;
}

TextPlausibility text_plausibility(std::span<const uint8_t> bytes) {
    if (bytes.empty()) throw InvalidArgument("text plausibility of empty input is undefined");
    TextPlausibility t;
    size_t printable = 0;
    for (uint8_t b : bytes) {
        if ((b >= 0x20 && b <= 0x7E) || b == 0x09 || b == 0x0A || b == 0x0D) ++printable;
    }
    t.ascii_printable_ratio = static_cast<double>(printable) / static_cast<double>(bytes.size());
    t.utf8_valid = utf8_valid_stream(bytes);
    t.base64_decodable = base64_decodable_stream(bytes);
    return t;
}

AlignmentCheck alignment_check(std::span<const uint8_t> bytes) {
    if (bytes.empty()) throw InvalidArgument("alignment check of empty input is undefined");
    AlignmentCheck a;
    a.aligned_32 = bytes.size() % 32 == 0;
    const size_t groups = bytes.size() / 32;
    a.terminator_80 = groups > 0;
    for (size_t g = 0; g < groups; ++g) {
        const uint8_t last = bytes[g * 32 + 31];
        if (last != 0x80 && last != 0xFF) {
            a.terminator_80 = false;
            break;
        }
    }
    return a;
}

SymbolStream quantize_symbol_stream(const AudioBuffer& audio, const ProtocolConfig& cfg) {
    SymbolStream stream;
    stream.symbol_s = cfg.symbol_s();
    const int n = static_cast<int>(std::floor(audio.duration_s() / stream.symbol_s));
    if (n <= 0) return stream;
    const auto symbols = symbolize(audio, 0.0, n, cfg);
    const ByteFreqMap map = cfg.byte_map();
    stream.bytes.resize(symbols.size(), 0);
    stream.present.resize(symbols.size(), false);
    for (size_t i = 0; i < symbols.size(); ++i) {
        if (symbols[i].power_db < kSymbolPowerFloorDb) continue;
        stream.bytes[i] = freq_to_byte(symbols[i].freq_hz, map);
        stream.present[i] = true;
    }
    return stream;
}

namespace {

// Entropy over the present bytes of fixed-duration symbol windows. A window is
// reported only when at least half its slots carry a symbol.
EntropyProfile symbol_stream_entropy(const SymbolStream& stream, size_t segment_symbols,
                                     double threshold) {
    EntropyProfile profile;
    profile.threshold = threshold;
    if (segment_symbols == 0 || stream.bytes.empty()) return profile;
    for (size_t pos = 0; pos < stream.bytes.size(); pos += segment_symbols) {
        const size_t len = std::min(segment_symbols, stream.bytes.size() - pos);
        std::vector<uint8_t> present_bytes;
        present_bytes.reserve(len);
        for (size_t i = pos; i < pos + len; ++i) {
            if (stream.present[i]) present_bytes.push_back(stream.bytes[i]);
        }
        if (present_bytes.size() * 2 < segment_symbols) continue;
        EntropySegment seg;
        seg.t0_s = static_cast<double>(pos) * stream.symbol_s;
        seg.t1_s = static_cast<double>(pos + len) * stream.symbol_s;
        seg.entropy_norm = byte_entropy_norm(present_bytes);
        if (seg.entropy_norm < threshold) profile.flagged.push_back(profile.segments.size());
        profile.segments.push_back(seg);
    }
    return profile;
}

EnergyComparison compare_energy(const AudioBuffer& audio, const AnalysisConfig& cfg) {
    EnergyComparison energy;
    const double d = audio.duration_s();
    energy.normal_range = cfg.normal_range.value_or(std::make_pair(0.0, d / 2.0));
    energy.anomalous_range = cfg.anomalous_range.value_or(std::make_pair(d / 2.0, d));

    const auto normal = mean_spectrum(audio, cfg.window, energy.normal_range.first,
                                      energy.normal_range.second);
    const auto anomalous = mean_spectrum(audio, cfg.window, energy.anomalous_range.first,
                                         energy.anomalous_range.second);

    for (size_t k = 0; k < normal.size(); ++k) {
        const double f = normal[k].first;
        if (f < cfg.energy_band_lo_hz || f > cfg.energy_band_hi_hz) continue;
        const double ex = std::max(anomalous[k].second - normal[k].second, 0.0);
        energy.freqs_hz.push_back(f);
        energy.normal_energy.push_back(normal[k].second);
        energy.anomalous_energy.push_back(anomalous[k].second);
        energy.excess.push_back(ex);
        if (ex > energy.peak_excess_energy) {
            energy.peak_excess_energy = ex;
            energy.peak_excess_freq_hz = f;
        }
    }
    return energy;
}

} // namespace

ForensicReport full_report(const AudioBuffer& audio, const AnalysisConfig& cfg) {
    ForensicReport report;
    report.duration_s = audio.duration_s();
    report.sample_rate_hz = audio.sample_rate_hz;
    report.long_enough_for_message =
        audio.duration_s() >= ProtocolConfig::frame_symbols * cfg.protocol.symbol_s();

    // Steps 1-2: dominant track and sync scan.
    bool have_track = false;
    DominantTrack track;
    try {
        track = dominant_track(audio, cfg.window);
        have_track = true;
    } catch (const Error& e) {
        report.errors.push_back({"dominant_track", e.what()});
    }
    if (have_track) {
        try {
            report.detections = scan(track, audio, cfg.protocol);
        } catch (const Error& e) {
            report.errors.push_back({"sync_scan", e.what()});
        }
    }

    // Step 3: payload extraction and structured decode per detection.
    for (const SyncEvent& ev : report.detections) {
        try {
            report.messages.push_back(decode_at(audio, ev, cfg.protocol));
        } catch (const Error& e) {
            report.errors.push_back(
                {"payload_decode",
                 "detection at " + std::to_string(ev.start_time_s) + " s: " + e.what()});
        }
    }

    // Step 4: entropy over the quantized symbol stream.
    SymbolStream stream;
    try {
        stream = quantize_symbol_stream(audio, cfg.protocol);
        report.entropy =
            symbol_stream_entropy(stream, cfg.entropy_segment_symbols, cfg.entropy_threshold);
    } catch (const Error& e) {
        report.errors.push_back({"entropy", e.what()});
    }

    // Step 5: magic number, text and alignment checks over the decoded payload
    // bytes (the paper's byte layer), falling back to the raw symbol stream.
    if (!report.messages.empty()) {
        for (const StegoMessage& m : report.messages) {
            report.analyzed_bytes.insert(report.analyzed_bytes.end(), m.raw_payload.begin(),
                                         m.raw_payload.end());
        }
        report.analyzed_source = "decoded_payloads";
    } else {
        for (size_t i = 0; i < stream.bytes.size(); ++i) {
            if (stream.present[i]) report.analyzed_bytes.push_back(stream.bytes[i]);
        }
        if (!report.analyzed_bytes.empty()) report.analyzed_source = "symbol_stream";
    }
    if (!report.analyzed_bytes.empty()) {
        report.magic = magic_match(report.analyzed_bytes);
        report.text = text_plausibility(report.analyzed_bytes);
        report.alignment = alignment_check(report.analyzed_bytes);
    }

    // Step 6: normal vs anomalous band energy.
    try {
        report.energy = compare_energy(audio, cfg);
    } catch (const Error& e) {
        report.errors.push_back({"energy", e.what()});
    }
    return report;
}

nlohmann::ordered_json report_to_json(const ForensicReport& report) {
    nlohmann::ordered_json j;
    j["input"] = {{"duration_s", report.duration_s},
                  {"sample_rate_hz", report.sample_rate_hz},
                  {"long_enough_for_message", report.long_enough_for_message}};
    j["detections"] = sync_events_to_json(report.detections);
    nlohmann::ordered_json msgs = nlohmann::ordered_json::array();
    for (const auto& m : report.messages) msgs.push_back(message_to_json(m));
    j["messages"] = msgs;

    nlohmann::ordered_json segs = nlohmann::ordered_json::array();
    for (size_t i = 0; i < report.entropy.segments.size(); ++i) {
        const EntropySegment& s = report.entropy.segments[i];
        const bool flagged = std::find(report.entropy.flagged.begin(),
                                       report.entropy.flagged.end(),
                                       i) != report.entropy.flagged.end();
        segs.push_back({{"t0_s", s.t0_s},
                        {"t1_s", s.t1_s},
                        {"entropy_norm", s.entropy_norm},
                        {"entropy_bits", s.entropy_norm * 8.0},
                        {"flagged", flagged}});
    }
    j["entropy"] = {{"threshold", report.entropy.threshold},
                    {"segments", segs},
                    {"flagged", report.entropy.flagged}};

    j["bytes"] = {{"source", report.analyzed_source},
                  {"count", report.analyzed_bytes.size()},
                  {"hex", to_hex(report.analyzed_bytes)}};
    j["magic"] = report.magic ? nlohmann::ordered_json(*report.magic)
                              : nlohmann::ordered_json(nullptr);
    if (report.text) {
        j["text"] = {{"ascii_printable_ratio", report.text->ascii_printable_ratio},
                     {"utf8_valid", report.text->utf8_valid},
                     {"base64_decodable", report.text->base64_decodable}};
    } else {
        j["text"] = nullptr;
    }
    if (report.alignment) {
        j["alignment"] = {{"aligned_32", report.alignment->aligned_32},
                          {"terminator_80", report.alignment->terminator_80}};
    } else {
        j["alignment"] = nullptr;
    }

    nlohmann::ordered_json bins = nlohmann::ordered_json::array();
    for (size_t k = 0; k < report.energy.freqs_hz.size(); ++k) {
        bins.push_back({{"freq_hz", report.energy.freqs_hz[k]},
                        {"normal", report.energy.normal_energy[k]},
                        {"anomalous", report.energy.anomalous_energy[k]},
                        {"excess", report.energy.excess[k]}});
    }
    j["energy"] = {{"normal_range", {report.energy.normal_range.first,
                                     report.energy.normal_range.second}},
                   {"anomalous_range", {report.energy.anomalous_range.first,
                                        report.energy.anomalous_range.second}},
                   {"peak_excess_freq_hz", report.energy.peak_excess_freq_hz},
                   {"peak_excess_energy", report.energy.peak_excess_energy},
                   {"bins", bins}};

    nlohmann::ordered_json errs = nlohmann::ordered_json::array();
    for (const StageError& e : report.errors) {
        errs.push_back({{"stage", e.stage}, {"message", e.message}});
    }
    j["errors"] = errs;
    return j;
}

void export_energy_csv(const EnergyComparison& energy, const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open for write: " + path);
    f << "freq_hz,normal_energy,anomalous_energy,excess\n";
    for (size_t k = 0; k < energy.freqs_hz.size(); ++k) {
        f << energy.freqs_hz[k] << ',' << energy.normal_energy[k] << ','
          << energy.anomalous_energy[k] << ',' << energy.excess[k] << '\n';
    }
    if (!f) throw IoError("write failed: " + path);
}

void export_features_csv(const AudioBuffer& audio, const FeatureConfig& cfg,
                         const std::string& path) {
    const DominantTrack track = dominant_track(audio, cfg.window);
    std::vector<std::vector<std::pair<double, double>>> band_profiles;
    band_profiles.reserve(cfg.bands.size());
    for (const auto& [lo, hi] : cfg.bands) {
        band_profiles.push_back(band_energy_profile(audio, cfg.window, lo, hi));
    }
    const SymbolStream stream = quantize_symbol_stream(audio, cfg.protocol);

    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open for write: " + path);
    f << "time_s,dominant_freq_hz,dominant_power_db";
    for (const auto& [lo, hi] : cfg.bands) {
        f << ",band_e_" << static_cast<long>(lo) << '_' << static_cast<long>(hi);
    }
    f << ",local_byte_entropy\n";

    const long half = static_cast<long>(cfg.entropy_window_symbols) / 2;
    for (size_t i = 0; i < track.frames.size(); ++i) {
        const SpectralFrame& fr = track.frames[i];
        f << fr.start_time_s << ',' << fr.dominant_freq_hz << ',' << fr.dominant_power_db;
        for (const auto& profile : band_profiles) f << ',' << profile[i].second;

        double local_entropy = 0.0;
        if (!stream.bytes.empty()) {
            const long center = static_cast<long>(fr.start_time_s / stream.symbol_s);
            std::vector<uint8_t> local;
            for (long k = center - half; k < center + half; ++k) {
                if (k < 0 || k >= static_cast<long>(stream.bytes.size())) continue;
                if (stream.present[static_cast<size_t>(k)]) {
                    local.push_back(stream.bytes[static_cast<size_t>(k)]);
                }
            }
            if (local.size() >= 4) local_entropy = byte_entropy_norm(local);
        }
        f << ',' << local_entropy << '\n';
    }
    if (!f) throw IoError("write failed: " + path);
}

} // namespace syncscan
