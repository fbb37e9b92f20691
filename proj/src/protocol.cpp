#include "syncscan/protocol.hpp"

#include "syncscan/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace syncscan {

double byte_to_freq(uint8_t b, const ByteFreqMap& map) {
    // (b-128)*span first, then /127: keeps both anchors exact in doubles.
    const double span = map.anchor_top_hz - map.anchor_mid_hz;
    return map.anchor_mid_hz + (static_cast<double>(b) - 128.0) * span / 127.0;
}

uint8_t freq_to_byte(double freq_hz, const ByteFreqMap& map) {
    if (!std::isfinite(freq_hz)) throw InvalidArgument("frequency must be finite");
    const double span = map.anchor_top_hz - map.anchor_mid_hz;
    const double v = (freq_hz - map.anchor_mid_hz) * 127.0 / span;
    // ceil(v - 0.5) rounds to nearest with exact midpoints going down.
    const double r = std::ceil(v - 0.5) + 128.0;
    return static_cast<uint8_t>(std::clamp(r, 0.0, 255.0));
}

bool is_sync_symbols(std::span<const double> freqs, const ProtocolConfig& cfg) {
    if (freqs.size() != 8) return false;
    const double eps = cfg.tolerance_hz;
    double lo = freqs[0], hi = freqs[0];
    for (size_t i = 0; i < 7; ++i) {
        if (std::abs(freqs[i] - cfg.ff_freq_hz) > eps) return false;
        lo = std::min(lo, freqs[i]);
        hi = std::max(hi, freqs[i]);
    }
    if (hi - lo > eps) return false;
    return std::abs(freqs[7] - cfg.sync_terminator_hz) <= eps;
}

nlohmann::ordered_json protocol_to_json(const ProtocolConfig& cfg) {
    return nlohmann::ordered_json{{"sync_terminator_hz", cfg.sync_terminator_hz},
                                  {"tolerance_hz", cfg.tolerance_hz},
                                  {"ff_freq_hz", cfg.ff_freq_hz},
                                  {"symbol_ms", cfg.symbol_ms}};
}

ProtocolConfig protocol_from_json(const nlohmann::json& j) {
    ProtocolConfig cfg;
    cfg.sync_terminator_hz = j.value("sync_terminator_hz", cfg.sync_terminator_hz);
    cfg.tolerance_hz = j.value("tolerance_hz", cfg.tolerance_hz);
    cfg.ff_freq_hz = j.value("ff_freq_hz", cfg.ff_freq_hz);
    cfg.symbol_ms = j.value("symbol_ms", cfg.symbol_ms);
    if (cfg.tolerance_hz <= 0.0) throw InvalidArgument("tolerance_hz must be positive");
    if (cfg.ff_freq_hz <= cfg.sync_terminator_hz) {
        throw InvalidArgument("ff_freq_hz must exceed sync_terminator_hz");
    }
    if (cfg.symbol_ms <= 0.0) throw InvalidArgument("symbol_ms must be positive");
    return cfg;
}

ProtocolConfig load_protocol(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open protocol file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("invalid protocol JSON in " + path + ": " + e.what());
    }
    return protocol_from_json(j);
}

} // namespace syncscan
