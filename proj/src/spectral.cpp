#include "syncscan/spectral.hpp"

#include "syncscan/errors.hpp"
#include "syncscan/fft.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace syncscan {

namespace {

std::vector<double> hann_window(size_t n) {
    std::vector<double> w(n);
    if (n == 1) {
        w[0] = 1.0;
        return w;
    }
    for (size_t i = 0; i < n; ++i) {
        w[i] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (n - 1)));
    }
    return w;
}

double to_db_floor(double linear_power) {
    if (linear_power <= 0.0) return kSilenceFloorDb;
    return std::max(kSilenceFloorDb, 10.0 * std::log10(linear_power));
}

struct FrameGrid {
    size_t win = 0;
    size_t hop = 0;
    size_t count = 0;
};

FrameGrid frame_grid(const AudioBuffer& buffer, const WindowConfig& cfg) {
    if (cfg.window_ms <= 0.0 || cfg.hop_ms <= 0.0) {
        throw InvalidArgument("window_ms and hop_ms must be positive");
    }
    FrameGrid g;
    g.win = window_sample_count(cfg, buffer.sample_rate_hz);
    g.hop = hop_sample_count(cfg, buffer.sample_rate_hz);
    if (g.win == 0 || g.hop == 0) throw InvalidArgument("window/hop too small for sample rate");
    if (g.win > cfg.fft_size) throw InvalidArgument("fft_size smaller than the analysis window");
    if (buffer.samples.size() < g.win) {
        throw InvalidArgument("buffer shorter than one analysis window");
    }
    g.count = (buffer.samples.size() - g.win) / g.hop + 1;
    return g;
}

} // namespace

size_t window_sample_count(const WindowConfig& cfg, int sample_rate_hz) {
    return static_cast<size_t>(std::floor(cfg.window_ms / 1000.0 * sample_rate_hz));
}

size_t hop_sample_count(const WindowConfig& cfg, int sample_rate_hz) {
    return static_cast<size_t>(std::floor(cfg.hop_ms / 1000.0 * sample_rate_hz));
}

ToneMeasurement measure_tone(std::span<const double> samples, int sample_rate_hz,
                             size_t fft_size, double band_lo_hz, double band_hi_hz) {
    const double nyquist = sample_rate_hz / 2.0;
    if (!(band_lo_hz >= 0.0 && band_lo_hz < band_hi_hz && band_hi_hz <= nyquist)) {
        throw InvalidArgument("search band outside (0, Nyquist]");
    }
    if (samples.size() < 8) throw InvalidArgument("frame too short to measure");
    if (samples.size() > fft_size) throw InvalidArgument("frame longer than fft_size");

    const size_t n = samples.size();
    const std::vector<double> w = hann_window(n);
    double wsum = 0.0;
    std::vector<double> frame(n);
    for (size_t i = 0; i < n; ++i) {
        frame[i] = samples[i] * w[i];
        wsum += w[i];
    }

    const auto spec = real_fft(frame, fft_size);
    const double bin_hz = static_cast<double>(sample_rate_hz) / fft_size;
    const size_t n_bins = spec.size();

    size_t k_lo = static_cast<size_t>(std::ceil(band_lo_hz / bin_hz));
    size_t k_hi = static_cast<size_t>(std::floor(band_hi_hz / bin_hz));
    k_lo = std::clamp<size_t>(k_lo, 1, n_bins - 2);
    k_hi = std::clamp<size_t>(k_hi, 1, n_bins - 2);

    ToneMeasurement m;
    double band_power = 0.0; // sum of per-bin amplitude^2 estimates
    size_t k_peak = k_lo;
    double peak_mag = -1.0;
    for (size_t k = k_lo; k <= k_hi; ++k) {
        const double mag = std::abs(spec[k]);
        band_power += (2.0 * mag / wsum) * (2.0 * mag / wsum);
        if (mag > peak_mag) {
            peak_mag = mag;
            k_peak = k;
        }
    }
    m.total_power_db = to_db_floor(band_power);
    m.has_dominant = m.total_power_db > kNoDominantPowerDb;
    if (!m.has_dominant) return m;

    // Parabolic refinement on log magnitude around the peak bin.
    constexpr double kTiny = 1e-300;
    const double a = std::log(std::abs(spec[k_peak - 1]) + kTiny);
    const double b = std::log(std::abs(spec[k_peak]) + kTiny);
    const double c = std::log(std::abs(spec[k_peak + 1]) + kTiny);
    const double denom = a - 2.0 * b + c;
    double delta = 0.0;
    if (std::abs(denom) > 1e-12) delta = std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
    const double refined_log = b - 0.25 * (a - c) * delta;

    m.freq_hz = (static_cast<double>(k_peak) + delta) * bin_hz;
    const double amplitude = 2.0 * std::exp(refined_log) / wsum;
    m.power_db = std::max(kSilenceFloorDb, 20.0 * std::log10(std::max(amplitude, 1e-200)));
    return m;
}

DominantTrack dominant_track(const AudioBuffer& buffer, const WindowConfig& cfg) {
    const FrameGrid g = frame_grid(buffer, cfg);

    DominantTrack track;
    track.config = cfg;
    track.source_duration_s = buffer.duration_s();
    track.frames.resize(g.count);
    for (size_t i = 0; i < g.count; ++i) {
        const size_t start = i * g.hop;
        const std::span<const double> win(buffer.samples.data() + start, g.win);
        const ToneMeasurement m =
            measure_tone(win, buffer.sample_rate_hz, cfg.fft_size, cfg.band_lo_hz, cfg.band_hi_hz);
        SpectralFrame& f = track.frames[i];
        f.index = static_cast<int>(i);
        f.start_time_s = static_cast<double>(start) / buffer.sample_rate_hz;
        f.dominant_freq_hz = m.freq_hz;
        f.dominant_power_db = m.power_db;
        f.total_power_db = m.total_power_db;
        f.has_dominant = m.has_dominant;
    }
    return track;
}

std::vector<std::pair<double, double>> band_energy_profile(const AudioBuffer& buffer,
                                                           const WindowConfig& cfg,
                                                           double f_lo_hz, double f_hi_hz) {
    const double nyquist = buffer.sample_rate_hz / 2.0;
    if (!(f_lo_hz >= 0.0 && f_lo_hz < f_hi_hz && f_hi_hz <= nyquist)) {
        throw InvalidArgument("invalid energy band");
    }
    const FrameGrid g = frame_grid(buffer, cfg);
    const std::vector<double> w = hann_window(g.win);
    const double bin_hz = static_cast<double>(buffer.sample_rate_hz) / cfg.fft_size;
    const size_t k_lo = static_cast<size_t>(std::ceil(f_lo_hz / bin_hz));
    const size_t k_hi = std::min(static_cast<size_t>(std::floor(f_hi_hz / bin_hz)), cfg.fft_size / 2);

    std::vector<std::pair<double, double>> out;
    out.reserve(g.count);
    std::vector<double> frame(g.win);
    for (size_t i = 0; i < g.count; ++i) {
        const size_t start = i * g.hop;
        for (size_t j = 0; j < g.win; ++j) frame[j] = buffer.samples[start + j] * w[j];
        const auto spec = real_fft(frame, cfg.fft_size);
        double energy = 0.0;
        for (size_t k = k_lo; k <= k_hi && k < spec.size(); ++k) energy += std::norm(spec[k]);
        out.emplace_back(static_cast<double>(start) / buffer.sample_rate_hz, energy);
    }
    return out;
}

std::vector<std::pair<double, double>> mean_spectrum(const AudioBuffer& buffer,
                                                     const WindowConfig& cfg,
                                                     double t0_s, double t1_s) {
    if (!(t0_s >= 0.0 && t0_s < t1_s && t1_s <= buffer.duration_s() + 1e-9)) {
        throw InvalidArgument("empty or out-of-range time range");
    }
    const FrameGrid g = frame_grid(buffer, cfg);
    const std::vector<double> w = hann_window(g.win);

    std::vector<double> acc(cfg.fft_size / 2 + 1, 0.0);
    size_t n_windows = 0;
    std::vector<double> frame(g.win);
    for (size_t i = 0; i < g.count; ++i) {
        const size_t start = i * g.hop;
        const double t = static_cast<double>(start) / buffer.sample_rate_hz;
        if (t < t0_s || t >= t1_s) continue;
        for (size_t j = 0; j < g.win; ++j) frame[j] = buffer.samples[start + j] * w[j];
        const auto spec = real_fft(frame, cfg.fft_size);
        for (size_t k = 0; k < spec.size(); ++k) acc[k] += std::norm(spec[k]);
        ++n_windows;
    }
    if (n_windows == 0) throw InvalidArgument("time range contains no analysis windows");

    const double bin_hz = static_cast<double>(buffer.sample_rate_hz) / cfg.fft_size;
    std::vector<std::pair<double, double>> out(acc.size());
    for (size_t k = 0; k < acc.size(); ++k) {
        out[k] = {static_cast<double>(k) * bin_hz, acc[k] / static_cast<double>(n_windows)};
    }
    return out;
}

void export_spectrogram_csv(const AudioBuffer& buffer, const WindowConfig& cfg,
                            const std::string& path) {
    const FrameGrid g = frame_grid(buffer, cfg);
    const std::vector<double> w = hann_window(g.win);
    double wsum = 0.0;
    for (double v : w) wsum += v;

    const double bin_hz = static_cast<double>(buffer.sample_rate_hz) / cfg.fft_size;
    const size_t k_lo = std::max<size_t>(1, static_cast<size_t>(std::ceil(cfg.band_lo_hz / bin_hz)));
    const size_t k_hi = std::min(static_cast<size_t>(std::floor(cfg.band_hi_hz / bin_hz)), cfg.fft_size / 2);

    std::ofstream f(path, std::ios::trunc);
    if (!f) throw IoError("cannot open for write: " + path);
    f << "time_s,freq_hz,power_db\n";
    std::vector<double> frame(g.win);
    for (size_t i = 0; i < g.count; ++i) {
        const size_t start = i * g.hop;
        const double t = static_cast<double>(start) / buffer.sample_rate_hz;
        for (size_t j = 0; j < g.win; ++j) frame[j] = buffer.samples[start + j] * w[j];
        const auto spec = real_fft(frame, cfg.fft_size);
        for (size_t k = k_lo; k <= k_hi; ++k) {
            const double amp = 2.0 * std::abs(spec[k]) / wsum;
            const double db = amp > 0.0 ? std::max(kSilenceFloorDb, 20.0 * std::log10(amp))
                                        : kSilenceFloorDb;
            f << t << ',' << static_cast<double>(k) * bin_hz << ',' << db << '\n';
        }
    }
    if (!f) throw IoError("write failed: " + path);
}

} // namespace syncscan
