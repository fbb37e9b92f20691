#pragma once

#include "syncscan/audio_io.hpp"
#include "syncscan/payload_decode.hpp"
#include "syncscan/protocol.hpp"
#include "syncscan/spectral.hpp"
#include "syncscan/sync_detect.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace syncscan {

// Shannon entropy of the empirical byte distribution. _norm divides by 8 so
// the result lies in [0, 1]; values under ~0.2 indicate repetitive content.
double byte_entropy_bits(std::span<const uint8_t> bytes);
double byte_entropy_norm(std::span<const uint8_t> bytes);

struct EntropySegment {
    double t0_s = 0.0;
    double t1_s = 0.0;
    double entropy_norm = 0.0;
};

struct EntropyProfile {
    std::vector<EntropySegment> segments;
    double threshold = 0.2;
    std::vector<size_t> flagged;  // indices with entropy_norm < threshold
};

// Disjoint consecutive segments of segment_len bytes (>= 16); the final
// partial segment is included when at least half a segment remains. t0/t1 are
// byte offsets scaled by seconds_per_byte, letting callers map byte streams
// onto a time axis.
EntropyProfile entropy_profile(std::span<const uint8_t> bytes, size_t segment_len,
                               double threshold = 0.2, double t0_s = 0.0,
                               double seconds_per_byte = 1.0);

struct MagicPart {
    size_t offset = 0;
    std::vector<uint8_t> bytes;
};
struct MagicEntry {
    std::string name;
    std::vector<MagicPart> parts;
};

// PNG, ZIP, WAV, MP4, GZIP, PDF, JPEG. First match wins.
const std::vector<MagicEntry>& default_magic_table();
std::optional<std::string> magic_match(std::span<const uint8_t> bytes);
std::optional<std::string> magic_match(std::span<const uint8_t> bytes,
                                       const std::vector<MagicEntry>& table);
// Extension hook: [{"name": "...", "parts": [{"offset": 0, "hex": "89504e47"}]}]
std::vector<MagicEntry> magic_table_from_json(const nlohmann::json& j);

struct TextPlausibility {
    double ascii_printable_ratio = 0.0;  // bytes in [0x20,0x7E] or {09,0A,0D}
    bool utf8_valid = false;             // strict whole-stream validation
    bool base64_decodable = false;       // canonical alphabet + padding
};
TextPlausibility text_plausibility(std::span<const uint8_t> bytes);

struct AlignmentCheck {
    bool aligned_32 = false;      // length divisible by 32
    bool terminator_80 = false;   // every 32-byte group ends in 0x80 or 0xFF
};
AlignmentCheck alignment_check(std::span<const uint8_t> bytes);

// Whole-file symbol quantization: one slot per symbol_ms, byte present only
// when the symbol is above the power floor.
struct SymbolStream {
    std::vector<uint8_t> bytes;    // defined where present[i]
    std::vector<bool> present;
    double symbol_s = 0.025;
};
SymbolStream quantize_symbol_stream(const AudioBuffer& audio, const ProtocolConfig& cfg = {});

struct AnalysisConfig {
    WindowConfig window{};
    ProtocolConfig protocol{};
    size_t entropy_segment_symbols = 40;  // 1 s of symbol slots per segment
    double entropy_threshold = 0.2;
    std::optional<std::pair<double, double>> normal_range;     // default: first half
    std::optional<std::pair<double, double>> anomalous_range;  // default: second half
    double energy_band_lo_hz = 2000.0;
    double energy_band_hi_hz = 4000.0;
};

struct EnergyComparison {
    std::pair<double, double> normal_range{0.0, 0.0};
    std::pair<double, double> anomalous_range{0.0, 0.0};
    std::vector<double> freqs_hz;        // bins inside the reporting band
    std::vector<double> normal_energy;   // mean per-bin energy, normal range
    std::vector<double> anomalous_energy;
    std::vector<double> excess;          // max(anomalous - normal, 0)
    double peak_excess_freq_hz = 0.0;
    double peak_excess_energy = 0.0;
};

struct StageError {
    std::string stage;
    std::string message;
};

// Consolidated six-step report: detection -> decoding -> entropy -> byte
// forensics -> energy comparison, with per-stage error capture.
struct ForensicReport {
    double duration_s = 0.0;
    int sample_rate_hz = 0;
    bool long_enough_for_message = false;
    std::vector<SyncEvent> detections;
    std::vector<StegoMessage> messages;
    EntropyProfile entropy;                  // over symbol-stream time segments
    std::vector<uint8_t> analyzed_bytes;     // decoded payloads, else symbol bytes
    std::string analyzed_source = "none";
    std::optional<std::string> magic;
    std::optional<TextPlausibility> text;
    std::optional<AlignmentCheck> alignment;
    EnergyComparison energy;
    std::vector<StageError> errors;
};

ForensicReport full_report(const AudioBuffer& audio, const AnalysisConfig& cfg = {});
nlohmann::ordered_json report_to_json(const ForensicReport& report);
void export_energy_csv(const EnergyComparison& energy, const std::string& path);

// Per-window feature matrix for downstream classifiers: dominant track plus
// configurable sub-band energies and a local symbol-byte entropy column.
struct FeatureConfig {
    WindowConfig window{};
    ProtocolConfig protocol{};
    std::vector<std::pair<double, double>> bands = {
        {500.0, 1000.0}, {1000.0, 2000.0}, {2000.0, 3000.0}, {3000.0, 4000.0}, {4000.0, 5000.0}};
    size_t entropy_window_symbols = 32;
};
void export_features_csv(const AudioBuffer& audio, const FeatureConfig& cfg,
                         const std::string& path);

} // namespace syncscan
