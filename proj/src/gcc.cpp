#include "ssloc/gcc.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>

namespace ssloc {

namespace {

// FFTW's planner is not thread safe; execution on distinct plans is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftBuffers {
    std::vector<double> re1, re2, corr;
    std::vector<std::complex<double>> sp1, sp2;
};

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

double frame_rms(std::span<const double> f) {
    double acc = 0.0;
    for (double v : f) acc += v * v;
    return std::sqrt(acc / static_cast<double>(f.size()));
}

void check_frames(std::span<const double> f1, std::span<const double> f2,
                  const GccConfig& cfg) {
    cfg.validate();
    if (f1.size() != f2.size())
        throw validation_error("cross_correlate: frames must have equal length");
    const int max_lag = cfg.max_lag_samples();
    if (static_cast<int>(f1.size()) < 2 * max_lag)
        throw validation_error("cross_correlate: frames shorter than the lag window");
}

}  // namespace

CorrelationSlice cross_correlate(std::span<const double> frame1,
                                 std::span<const double> frame2, const GccConfig& cfg) {
    check_frames(frame1, frame2, cfg);
    const int max_lag = cfg.max_lag_samples();
    const std::size_t n = frame1.size();
    const std::size_t m = next_pow2(2 * n);
    const std::size_t spec = m / 2 + 1;

    FftBuffers b;
    b.re1.assign(m, 0.0);
    b.re2.assign(m, 0.0);
    b.corr.assign(m, 0.0);
    b.sp1.assign(spec, {});
    b.sp2.assign(spec, {});
    std::copy(frame1.begin(), frame1.end(), b.re1.begin());
    std::copy(frame2.begin(), frame2.end(), b.re2.begin());

    fftw_plan fwd1, fwd2, inv;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd1 = fftw_plan_dft_r2c_1d(static_cast<int>(m), b.re1.data(),
                                    reinterpret_cast<fftw_complex*>(b.sp1.data()),
                                    FFTW_ESTIMATE);
        fwd2 = fftw_plan_dft_r2c_1d(static_cast<int>(m), b.re2.data(),
                                    reinterpret_cast<fftw_complex*>(b.sp2.data()),
                                    FFTW_ESTIMATE);
        inv = fftw_plan_dft_c2r_1d(static_cast<int>(m),
                                   reinterpret_cast<fftw_complex*>(b.sp1.data()),
                                   b.corr.data(), FFTW_ESTIMATE);
    }
    fftw_execute(fwd1);
    fftw_execute(fwd2);

    // Cross-spectrum Y1 * conj(Y2); IFFT gives r[tau] = sum_t y1[t+tau] y2[t].
    for (std::size_t k = 0; k < spec; ++k) {
        std::complex<double> g = b.sp1[k] * std::conj(b.sp2[k]);
        if (cfg.weighting == GccWeighting::phat) {
            const double mag = std::abs(g);
            g = (mag > 1e-30) ? g / mag : std::complex<double>(0.0, 0.0);
        }
        b.sp1[k] = g;
    }
    fftw_execute(inv);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(fwd1);
        fftw_destroy_plan(fwd2);
        fftw_destroy_plan(inv);
    }

    CorrelationSlice slice;
    slice.max_lag = max_lag;
    slice.values.resize(2 * max_lag + 1);
    const double scale = 1.0 / static_cast<double>(m);  // FFTW's unnormalized c2r
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        const std::size_t idx = (lag >= 0) ? static_cast<std::size_t>(lag)
                                           : m - static_cast<std::size_t>(-lag);
        slice.values[static_cast<std::size_t>(lag + max_lag)] = b.corr[idx] * scale;
    }
    return slice;
}

CorrelationSlice cross_correlate_direct(std::span<const double> frame1,
                                        std::span<const double> frame2,
                                        const GccConfig& cfg) {
    check_frames(frame1, frame2, cfg);
    const int max_lag = cfg.max_lag_samples();
    const long n = static_cast<long>(frame1.size());

    CorrelationSlice slice;
    slice.max_lag = max_lag;
    slice.values.resize(2 * max_lag + 1);
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        double acc = 0.0;
        for (long t = 0; t < n; ++t) {
            const long u = t - lag;  // r[lag] = sum_t y1[t] y2[t - lag]
            if (u >= 0 && u < n) acc += frame1[t] * frame2[u];
        }
        slice.values[static_cast<std::size_t>(lag + max_lag)] = acc;
    }
    return slice;
}

double estimate_itd(std::span<const double> frame1, std::span<const double> frame2,
                    const GccConfig& cfg) {
    check_frames(frame1, frame2, cfg);
    if (frame_rms(frame1) <= cfg.energy_floor_rms || frame_rms(frame2) <= cfg.energy_floor_rms)
        throw signal_absent("estimate_itd: frame below the energy floor");

    const CorrelationSlice slice = cross_correlate(frame1, frame2, cfg);
    const int L = slice.max_lag;

    int best = 0;
    double best_val = slice.at(0);
    for (int lag = -L; lag <= L; ++lag) {
        const double v = slice.at(lag);
        // ties go to the smaller |lag|
        if (v > best_val ||
            (v == best_val && std::abs(lag) < std::abs(best))) {
            best_val = v;
            best = lag;
        }
    }

    double refined = best;
    if (cfg.parabolic && best > -L && best < L) {
        const double ym = slice.at(best - 1);
        const double y0 = slice.at(best);
        const double yp = slice.at(best + 1);
        const double denom = ym - 2.0 * y0 + yp;
        if (std::abs(denom) > 1e-300) {
            const double delta = 0.5 * (ym - yp) / denom;
            if (std::abs(delta) <= 1.0) refined += delta;
        }
    }
    return refined / cfg.sample_rate_hz;
}

SeriesFromAudio itd_series_from_audio(const ChannelPair& audio, double omega_rad_s,
                                      double c0, const GccConfig& cfg) {
    cfg.validate();
    if (!(c0 > 0.0)) throw validation_error("itd_series_from_audio: c0 must be > 0");
    if (audio.frame_poses.empty() ||
        audio.frame_edges.size() != audio.frame_poses.size() + 1)
        throw validation_error("itd_series_from_audio: malformed frame plan");

    const long frames = static_cast<long>(audio.frame_poses.size());
    std::vector<double> d(frames, 0.0);
    std::vector<char> silent(frames, 0);

#pragma omp parallel for schedule(dynamic)
    for (long f = 0; f < frames; ++f) {
        const std::size_t lo = audio.frame_edges[f];
        const std::size_t hi = audio.frame_edges[f + 1];
        std::span<const double> s1(audio.left.data() + lo, hi - lo);
        std::span<const double> s2(audio.right.data() + lo, hi - lo);
        try {
            d[f] = itd_to_path_difference(estimate_itd(s1, s2, cfg), c0);
        } catch (const signal_absent&) {
            silent[f] = 1;
        }
    }

    SeriesFromAudio out;
    out.series.kind = SeriesKind::orientation;
    out.series.omega_rad_s = omega_rad_s;
    out.series.baseline_m = audio.frame_poses.front().baseline_m;
    const double frame_len =
        static_cast<double>(audio.frame_edges.back() - audio.frame_edges.front()) /
        static_cast<double>(frames);
    out.series.sample_period_s = frame_len / audio.sample_rate_hz;
    out.series.samples.reserve(frames);
    for (long f = 0; f < frames; ++f) {
        out.silent_frames += silent[f];
        out.series.samples.push_back(
            {audio.frame_poses[f].beta_rad, audio.frame_poses[f].offset_m, d[f]});
    }
    return out;
}

}  // namespace ssloc
