#include "syncscan/sync_detect.hpp"

#include "syncscan/errors.hpp"

#include <algorithm>
#include <cmath>

namespace syncscan {

namespace {

// Coarse-stage slack on top of the protocol tolerance: partial windows at
// symbol edges pull the measured peak slightly. Stage 2 enforces the exact
// tolerance.
constexpr double kCoarseSlackHz = 10.0;

// Minimum consecutive FF-band hop frames for a stage-1 candidate. At 10 ms hop
// the 175 ms FF span guarantees only 15-16 fully-covered windows, fewer in
// noise at the edges.
constexpr int kMinRunFrames = 14;

long symbol_start_sample(double start_time_s, int k, const ProtocolConfig& cfg, int rate) {
    const double sym = cfg.symbol_ms / 1000.0 * rate;
    return std::llround(start_time_s * rate + k * sym);
}

struct RefineResult {
    bool found = false;
    double start_time_s = 0.0;
    std::array<double, 8> freqs{};
    double confidence = 0.0;
};

double sync_confidence(std::span<const double> freqs, const ProtocolConfig& cfg) {
    double err = 0.0;
    for (int i = 0; i < 7; ++i) err += std::abs(freqs[i] - cfg.ff_freq_hz);
    err += std::abs(freqs[7] - cfg.sync_terminator_hz);
    return std::clamp(1.0 - (err / 8.0) / cfg.tolerance_hz, 0.0, 1.0);
}

RefineResult refine_candidate(const AudioBuffer& audio, double coarse_start_s,
                              const ProtocolConfig& cfg) {
    struct Passing {
        double t;
        std::array<double, 8> freqs;
        double conf;
        double sync_power;
    };
    std::vector<Passing> passing;

    const double sym_s = cfg.symbol_s();
    const double lo = std::max(0.0, coarse_start_s - sym_s);
    const double hi = coarse_start_s + sym_s;
    for (double t = lo; t <= hi + 1e-9; t += 0.001) {
        if ((t + 8.0 * sym_s) * audio.sample_rate_hz >
            static_cast<double>(audio.samples.size())) {
            break;
        }
        const auto symbols = symbolize(audio, t, 8, cfg);
        std::array<double, 8> freqs{};
        double power_sum = 0.0;
        bool all_present = true;
        for (int i = 0; i < 8; ++i) {
            if (symbols[i].power_db < kSymbolPowerFloorDb) {
                all_present = false;
                break;
            }
            freqs[static_cast<size_t>(i)] = symbols[i].freq_hz;
            power_sum += std::max(symbols[i].power_db, -80.0);
        }
        if (!all_present || !is_sync_symbols(freqs, cfg)) continue;
        passing.push_back({t, freqs, sync_confidence(freqs, cfg), power_sum});
    }

    RefineResult best;
    if (passing.empty()) return best;

    // Confidence plateaus while every window stays mostly inside its symbol
    // (the 7xFF run is one continuous tone and carries no timing gradient), so
    // alignment is decided by total measured symbol power across the plateau.
    // Payload symbols, when the frame fits, sharpen the power peak: each
    // straddled tone boundary costs energy.
    double best_conf = 0.0;
    for (const Passing& p : passing) best_conf = std::max(best_conf, p.conf);

    double best_score = -1e18;
    for (const Passing& p : passing) {
        if (p.conf < best_conf - 0.05) continue;
        double score = p.sync_power;
        const double payload_t0 = p.t + 8.0 * sym_s;
        const int max_fit = static_cast<int>(
            std::floor((audio.duration_s() - payload_t0) / sym_s));
        const int probes = std::clamp(max_fit, 0, 8);
        if (probes > 0) {
            const auto payload = symbolize(audio, payload_t0, probes, cfg);
            for (const auto& s : payload) score += std::max(s.power_db, -80.0);
        }
        if (score > best_score) {
            best_score = score;
            best.found = true;
            best.start_time_s = p.t;
            best.freqs = p.freqs;
            best.confidence = p.conf;
        }
    }
    return best;
}

} // namespace

std::vector<SymbolMeasure> symbolize(const AudioBuffer& audio, double start_time_s,
                                     int n_symbols, const ProtocolConfig& cfg) {
    if (n_symbols < 0) throw InvalidArgument("n_symbols must be non-negative");
    const int rate = audio.sample_rate_hz;
    const long end = symbol_start_sample(start_time_s, n_symbols, cfg, rate);
    if (start_time_s < 0.0 || end > static_cast<long>(audio.samples.size())) {
        throw InvalidArgument("symbol span exceeds buffer");
    }

    const WindowConfig wcfg{};  // default fft size and search band
    std::vector<SymbolMeasure> out;
    out.reserve(static_cast<size_t>(n_symbols));
    for (int k = 0; k < n_symbols; ++k) {
        const long s0 = symbol_start_sample(start_time_s, k, cfg, rate);
        const long s1 = symbol_start_sample(start_time_s, k + 1, cfg, rate);
        const std::span<const double> win(audio.samples.data() + s0,
                                          static_cast<size_t>(s1 - s0));
        const ToneMeasurement m =
            measure_tone(win, rate, wcfg.fft_size, wcfg.band_lo_hz, wcfg.band_hi_hz);
        out.push_back({m.freq_hz, m.has_dominant ? m.power_db : kSilenceFloorDb});
    }
    return out;
}

std::vector<SyncEvent> scan(const DominantTrack& track, const AudioBuffer& audio,
                            const ProtocolConfig& cfg) {
    if (track.config.hop_ms > cfg.symbol_ms / 2.0 + 1e-9) {
        throw InvalidArgument("track hop must be <= symbol_ms / 2");
    }
    if (std::abs(track.source_duration_s - audio.duration_s()) > track.config.window_ms / 1000.0) {
        throw InvalidArgument("track and audio durations disagree");
    }

    const double eps = cfg.tolerance_hz;
    auto in_ff = [&](const SpectralFrame& f) {
        return f.has_dominant && f.dominant_power_db >= kSymbolPowerFloorDb &&
               std::abs(f.dominant_freq_hz - cfg.ff_freq_hz) <= eps + kCoarseSlackHz;
    };
    auto in_term = [&](const SpectralFrame& f) {
        return f.has_dominant && f.dominant_power_db >= kSymbolPowerFloorDb &&
               std::abs(f.dominant_freq_hz - cfg.sync_terminator_hz) <= eps + kCoarseSlackHz;
    };

    // Stage 1: maximal FF-band runs followed by a terminator-band frame within
    // two symbol durations.
    const auto& frames = track.frames;
    std::vector<double> candidates;
    size_t i = 0;
    while (i < frames.size()) {
        if (!in_ff(frames[i])) {
            ++i;
            continue;
        }
        size_t j = i;
        while (j + 1 < frames.size() && in_ff(frames[j + 1])) ++j;
        const int run_len = static_cast<int>(j - i + 1);
        if (run_len >= kMinRunFrames) {
            const double run_end_t = frames[j].start_time_s;
            bool terminated = false;
            for (size_t k = j + 1; k < frames.size(); ++k) {
                if (frames[k].start_time_s > run_end_t + 2.0 * cfg.symbol_s()) break;
                if (in_term(frames[k])) {
                    terminated = true;
                    break;
                }
            }
            if (terminated) candidates.push_back(frames[i].start_time_s);
        }
        i = j + 1;
    }

    // Stage 2: per-candidate 1 ms offset search with full symbol re-measurement.
    std::vector<SyncEvent> events;
    for (double t : candidates) {
        const RefineResult r = refine_candidate(audio, t, cfg);
        if (!r.found) continue;
        SyncEvent ev;
        ev.start_time_s = r.start_time_s;
        ev.symbol_freqs_hz = r.freqs;
        ev.confidence = r.confidence;
        ev.hop_index = std::lround(r.start_time_s * 1000.0 / track.config.hop_ms);
        events.push_back(ev);
    }

    // Dedup within one full frame duration, keeping the highest confidence.
    std::stable_sort(events.begin(), events.end(),
                     [](const SyncEvent& a, const SyncEvent& b) { return a.confidence > b.confidence; });
    const double dedup_s = 8.0 * cfg.symbol_s() + 0.002;
    std::vector<SyncEvent> kept;
    for (const SyncEvent& ev : events) {
        bool clash = false;
        for (const SyncEvent& k : kept) {
            if (std::abs(k.start_time_s - ev.start_time_s) <= dedup_s) {
                clash = true;
                break;
            }
        }
        if (!clash) kept.push_back(ev);
    }
    std::sort(kept.begin(), kept.end(),
              [](const SyncEvent& a, const SyncEvent& b) { return a.start_time_s < b.start_time_s; });
    return kept;
}

nlohmann::ordered_json sync_event_to_json(const SyncEvent& ev) {
    nlohmann::ordered_json j;
    j["start_time_s"] = ev.start_time_s;
    j["confidence"] = ev.confidence;
    j["symbol_freqs_hz"] = ev.symbol_freqs_hz;
    return j;
}

nlohmann::ordered_json sync_events_to_json(const std::vector<SyncEvent>& events) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& ev : events) arr.push_back(sync_event_to_json(ev));
    return arr;
}

} // namespace syncscan
