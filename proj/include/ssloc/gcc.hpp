#pragma once

#include <span>
#include <vector>

#include "ssloc/errors.hpp"
#include "ssloc/synth.hpp"

namespace ssloc {

enum class GccWeighting { none, phat };

struct GccConfig {
    GccWeighting weighting = GccWeighting::none;
    double max_lag_s = 1.25 * 0.18 / 345.0;
    bool parabolic = true;            // three-point sub-sample refinement
    double sample_rate_hz = 44100.0;
    double energy_floor_rms = 1e-12;  // below this a frame counts as silent

    void validate() const {
        if (!(max_lag_s > 0.0)) throw validation_error("gcc: max lag must be > 0");
        if (!(sample_rate_hz > 0.0)) throw validation_error("gcc: sample rate must be > 0");
    }
    int max_lag_samples() const {
        return static_cast<int>(std::ceil(max_lag_s * sample_rate_hz));
    }
};

/// Sampled cross-correlation over lags -max_lag..+max_lag (in samples).
/// values[i] corresponds to lag = i - max_lag_samples. A positive peak lag
/// means the second channel leads (the source sits toward the right mic).
struct CorrelationSlice {
    int max_lag;
    std::vector<double> values;

    double at(int lag) const { return values[static_cast<std::size_t>(lag + max_lag)]; }
};

/// FFT-based (generalized) cross-correlation of two equal-length frames.
CorrelationSlice cross_correlate(std::span<const double> frame1,
                                 std::span<const double> frame2, const GccConfig& cfg);

/// Direct time-domain evaluation, weighting = none only. Kept as the
/// independent oracle for the FFT path.
CorrelationSlice cross_correlate_direct(std::span<const double> frame1,
                                        std::span<const double> frame2,
                                        const GccConfig& cfg);

/// Delay of frame2 relative to frame1 in seconds: the lag maximizing the
/// correlation, ties broken toward the smallest |lag|, optionally refined by
/// a parabolic fit around the integer peak. Throws signal_absent when either
/// frame is below the energy floor.
double estimate_itd(std::span<const double> frame1, std::span<const double> frame2,
                    const GccConfig& cfg);

inline double itd_to_path_difference(double t_hat_s, double c0) {
    if (!(c0 > 0.0)) throw validation_error("itd_to_path_difference: c0 must be > 0");
    return t_hat_s * c0;
}

/// Runs per-frame GCC over a rendered channel pair and assembles the
/// path-difference series. Frames below the energy floor are flagged; if
/// every frame is silent the caller should report "no source" rather than a
/// high elevation.
struct SeriesFromAudio {
    ItdSeries series;
    int silent_frames = 0;
};
SeriesFromAudio itd_series_from_audio(const ChannelPair& audio, double omega_rad_s,
                                      double c0, const GccConfig& cfg);

}  // namespace ssloc
