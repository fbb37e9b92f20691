#pragma once

#include "syncscan/audio_io.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace syncscan {

// Sliding-window analysis parameters. The 8192-point zero-padded FFT gives
// 44100/8192 ~ 5.38 Hz bins; parabolic peak interpolation refines below that.
struct WindowConfig {
    double window_ms = 25.0;
    double hop_ms = 10.0;
    size_t fft_size = 8192;
    double band_lo_hz = 500.0;
    double band_hi_hz = 5000.0;
};

// dB floor used wherever a log of zero would otherwise appear (silence).
inline constexpr double kSilenceFloorDb = -200.0;

// Frames whose in-band power is below this are marked as having no dominant
// frequency; detectors must treat them as non-matching.
inline constexpr double kNoDominantPowerDb = -90.0;

struct SpectralFrame {
    int index = 0;
    double start_time_s = 0.0;
    double dominant_freq_hz = 0.0;  // meaningful only when has_dominant
    double dominant_power_db = kSilenceFloorDb;
    double total_power_db = kSilenceFloorDb;
    bool has_dominant = false;
};

struct DominantTrack {
    std::vector<SpectralFrame> frames;
    WindowConfig config;
    double source_duration_s = 0.0;
};

// Single-window tone measurement: Hann window, zero-padded FFT, magnitude peak
// restricted to [band_lo, band_hi], three-point parabolic interpolation on
// log magnitude. Power convention: an amplitude-1.0 sine measures ~0 dB.
struct ToneMeasurement {
    double freq_hz = 0.0;
    double power_db = kSilenceFloorDb;
    double total_power_db = kSilenceFloorDb;
    bool has_dominant = false;
};
ToneMeasurement measure_tone(std::span<const double> samples, int sample_rate_hz,
                             size_t fft_size, double band_lo_hz, double band_hi_hz);

// Per-window dominant frequency/power over the whole buffer.
// Frame count = floor((duration - window) / hop) + 1.
DominantTrack dominant_track(const AudioBuffer& buffer, const WindowConfig& cfg = {});

// Per-window sum of squared FFT magnitudes over bins inside [f_lo, f_hi].
// Returns (window start time, energy) pairs.
std::vector<std::pair<double, double>> band_energy_profile(const AudioBuffer& buffer,
                                                           const WindowConfig& cfg,
                                                           double f_lo_hz, double f_hi_hz);

// Mean per-bin energy across all windows whose start lies in [t0, t1).
// Returns (bin frequency, mean energy) for bins DC..Nyquist.
std::vector<std::pair<double, double>> mean_spectrum(const AudioBuffer& buffer,
                                                     const WindowConfig& cfg,
                                                     double t0_s, double t1_s);

// CSV rows "time_s,freq_hz,power_db" for every window and every bin inside the
// search band.
void export_spectrogram_csv(const AudioBuffer& buffer, const WindowConfig& cfg,
                            const std::string& path);

// Window geometry shared by the track and the CSV export.
size_t window_sample_count(const WindowConfig& cfg, int sample_rate_hz);
size_t hop_sample_count(const WindowConfig& cfg, int sample_rate_hz);

} // namespace syncscan
