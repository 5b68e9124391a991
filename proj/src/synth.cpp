#include "ssloc/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "ssloc/wav.hpp"

namespace ssloc {

void ItdSeries::validate() const {
    if (samples.empty()) throw validation_error("itd series: empty");
    if (!(sample_period_s > 0.0)) throw validation_error("itd series: bad sample period");
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (kind == SeriesKind::orientation && !(samples[i].beta_rad > samples[i - 1].beta_rad))
            throw validation_error("itd series: beta must be strictly increasing");
        if (kind == SeriesKind::distance && !(samples[i].offset_m > samples[i - 1].offset_m))
            throw validation_error("itd series: offset must be strictly increasing");
    }
}

ItdSeries ideal_itd_series(const SourceTruth& src, const RotationSchedule& schedule,
                           double baseline_m, double noise_sigma, std::uint64_t seed) {
    src.validate();
    schedule.validate();
    if (!(baseline_m > 0.0)) throw validation_error("ideal_itd_series: baseline must be > 0");
    if (noise_sigma < 0.0) throw validation_error("ideal_itd_series: noise sigma must be >= 0");

    const int n = schedule.sample_count();
    if (n < 1) throw validation_error("ideal_itd_series: empty schedule");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ItdSeries series;
    series.kind = SeriesKind::orientation;
    series.omega_rad_s = schedule.omega_rad_s;
    series.sample_period_s = schedule.sample_period_s();
    series.baseline_m = baseline_m;
    series.samples.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double beta = (k + 1) * schedule.cadence_rad;
        const double psi = psi_of(src.azimuth_rad, beta);
        double d = true_path_difference_3d(src.elevation_rad, psi, baseline_m);
        if (noise_sigma > 0.0) d += noise_sigma * gauss(rng);
        series.samples.push_back({beta, 0.0, d});
    }
    return series;
}

ItdSeries ideal_translation_series(const SourceTruth& src, const TranslationPlan& plan,
                                   double baseline_m, double facing_beta,
                                   double noise_sigma, std::uint64_t seed) {
    src.validate();
    plan.validate();
    if (!(baseline_m > 0.0))
        throw validation_error("ideal_translation_series: baseline must be > 0");
    if (noise_sigma < 0.0)
        throw validation_error("ideal_translation_series: noise sigma must be >= 0");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    ItdSeries series;
    series.kind = SeriesKind::distance;
    series.omega_rad_s = 0.0;
    series.sample_period_s = plan.step_period_s;
    series.baseline_m = baseline_m;
    series.samples.reserve(plan.steps);
    for (int k = 1; k <= plan.steps; ++k) {
        ArrayPose pose{facing_beta, k * plan.step_m, baseline_m};
        double d = path_difference_exact(src, pose);
        if (noise_sigma > 0.0) d += noise_sigma * gauss(rng);
        series.samples.push_back({facing_beta, pose.offset_m, d});
    }
    return series;
}

FramePlan rotation_frame_plan(const RotationSchedule& schedule, double baseline_m,
                              double sample_rate_hz) {
    schedule.validate();
    const int frames = schedule.sample_count();
    const double samples_per_frame = schedule.sample_period_s() * sample_rate_hz;

    FramePlan plan;
    plan.edges.resize(frames + 1);
    plan.poses.resize(frames);
    for (int f = 0; f <= frames; ++f)
        plan.edges[f] = static_cast<std::size_t>(std::llround(f * samples_per_frame));
    for (int f = 0; f < frames; ++f)
        plan.poses[f] = ArrayPose{(f + 0.5) * schedule.cadence_rad, 0.0, baseline_m};
    return plan;
}

std::vector<double> make_source_signal(const SignalConfig& cfg, std::size_t length) {
    std::vector<double> s(length);
    switch (cfg.source_kind) {
        case SourceKind::white_noise: {
            std::mt19937_64 rng(cfg.seed ^ 0x9e3779b97f4a7c15ull);
            std::normal_distribution<double> gauss(0.0, 1.0);
            for (auto& v : s) v = gauss(rng);
            break;
        }
        case SourceKind::tone: {
            const double w = kTwoPi * cfg.tone_hz / cfg.sample_rate_hz;
            for (std::size_t i = 0; i < length; ++i) s[i] = std::sin(w * i);
            break;
        }
        case SourceKind::speech_file: {
            std::vector<double> file = read_mono_audio(cfg.source_file);
            if (file.empty()) throw validation_error("source file is empty: " + cfg.source_file);
            for (std::size_t i = 0; i < length; ++i) s[i] = file[i % file.size()];
            break;
        }
    }
    return s;
}

namespace {

constexpr int kSincHalfTaps = 16;  // 32-tap windowed-sinc kernel

// Source sample at fractional index t, or 0 outside the signal.
inline double sample_at(const std::vector<double>& s, double t, bool sinc) {
    if (sinc) {
        const double fl = std::floor(t);
        const long base = static_cast<long>(fl);
        const double frac = t - fl;
        double acc = 0.0;
        for (int j = -kSincHalfTaps + 1; j <= kSincHalfTaps; ++j) {
            const long idx = base + j;
            if (idx < 0 || idx >= static_cast<long>(s.size())) continue;
            const double x = frac - j;
            double w;
            if (std::abs(x) < 1e-12) {
                w = 1.0;
            } else {
                const double px = kPi * x;
                // Hann window over the 32-tap support
                const double hann = 0.5 + 0.5 * std::cos(px / kSincHalfTaps);
                w = std::sin(px) / px * hann;
            }
            acc += s[idx] * w;
        }
        return acc;
    }
    const double fl = std::floor(t);
    const long i0 = static_cast<long>(fl);
    const double frac = t - fl;
    const double a = (i0 >= 0 && i0 < static_cast<long>(s.size())) ? s[i0] : 0.0;
    const double b =
        (i0 + 1 >= 0 && i0 + 1 < static_cast<long>(s.size())) ? s[i0 + 1] : 0.0;
    return a * (1.0 - frac) + b * frac;
}

struct RenderSetup {
    std::vector<ImageSource> images;
    std::vector<double> source;
    std::vector<double> noise_l, noise_r;
    std::size_t total;
    std::size_t preroll;
    Vec3 room_center;
};

RenderSetup prepare_render(const RoomConfig& room, const SourceTruth& src,
                           const std::vector<ArrayPose>& frame_poses,
                           const std::vector<std::size_t>& frame_edges,
                           const SignalConfig& sig) {
    room.validate();
    src.validate();
    sig.validate();
    if (frame_poses.empty() || frame_edges.size() != frame_poses.size() + 1)
        throw validation_error("synthesize_pair: frame plan and edges do not match");
    for (std::size_t f = 0; f + 1 < frame_edges.size(); ++f)
        if (frame_edges[f + 1] <= frame_edges[f])
            throw validation_error("synthesize_pair: frame edges must be increasing");

    RenderSetup setup;
    setup.room_center = room.center();
    Vec3 src_pos_room = src.position();
    for (int a = 0; a < 3; ++a) src_pos_room[a] += setup.room_center[a];
    setup.images = image_sources(room, src_pos_room, room.max_image_order);

    setup.total = frame_edges.back();

    // Pre-roll long enough that every image path is live at output t = 0.
    double max_delay = 0.0;
    for (const auto& img : setup.images) {
        for (const auto& pose : {frame_poses.front(), frame_poses.back()}) {
            for (const auto& mic : pose.mic_positions()) {
                Vec3 mic_room = mic;
                for (int a = 0; a < 3; ++a) mic_room[a] += setup.room_center[a];
                max_delay = std::max(max_delay,
                                     path_to(img, mic_room, room.sound_speed_mps).delay_s);
            }
        }
    }
    setup.preroll = static_cast<std::size_t>(std::ceil(max_delay * sig.sample_rate_hz)) + 64;

    setup.source = make_source_signal(sig, setup.total + setup.preroll);

    setup.noise_l.assign(setup.total, 0.0);
    setup.noise_r.assign(setup.total, 0.0);
    if (sig.sensor_noise_sigma > 0.0) {
        std::mt19937_64 rng(sig.seed ^ 0xd1b54a32d192ed03ull);
        std::normal_distribution<double> gauss(0.0, sig.sensor_noise_sigma);
        for (auto& v : setup.noise_l) v = gauss(rng);
        for (auto& v : setup.noise_r) v = gauss(rng);
    }
    return setup;
}

// Per-frame path table: constant gain and fractional delay per image/mic.
struct FramePaths {
    std::vector<PathContribution> left, right;
};

FramePaths frame_paths(const RenderSetup& setup, const RoomConfig& room,
                       const ArrayPose& pose) {
    FramePaths p;
    auto mics = pose.mic_positions();
    for (int m = 0; m < 2; ++m) {
        Vec3 mic_room = mics[m];
        for (int a = 0; a < 3; ++a) mic_room[a] += setup.room_center[a];
        auto& dst = (m == 0) ? p.left : p.right;
        dst.reserve(setup.images.size());
        for (const auto& img : setup.images)
            dst.push_back(path_to(img, mic_room, room.sound_speed_mps));
    }
    return p;
}

void render_frame(const RenderSetup& setup, const SignalConfig& sig,
                  const FramePaths& paths, std::size_t lo, std::size_t hi,
                  std::vector<double>& left, std::vector<double>& right) {
    const double fs = sig.sample_rate_hz;
    for (std::size_t t = lo; t < hi; ++t) {
        double yl = 0.0, yr = 0.0;
        for (const auto& c : paths.left)
            yl += c.gain * sample_at(setup.source,
                                     static_cast<double>(t + setup.preroll) - c.delay_s * fs,
                                     sig.sinc_interpolation);
        for (const auto& c : paths.right)
            yr += c.gain * sample_at(setup.source,
                                     static_cast<double>(t + setup.preroll) - c.delay_s * fs,
                                     sig.sinc_interpolation);
        left[t] = yl + setup.noise_l[t];
        right[t] = yr + setup.noise_r[t];
    }
}

}  // namespace

ChannelPair synthesize_pair(const RoomConfig& room, const SourceTruth& src,
                            const std::vector<ArrayPose>& frame_poses,
                            const std::vector<std::size_t>& frame_edges,
                            const SignalConfig& sig) {
    RenderSetup setup = prepare_render(room, src, frame_poses, frame_edges, sig);

    ChannelPair out;
    out.sample_rate_hz = sig.sample_rate_hz;
    out.left.assign(setup.total, 0.0);
    out.right.assign(setup.total, 0.0);
    out.frame_edges = frame_edges;
    out.frame_poses = frame_poses;

    const long frames = static_cast<long>(frame_poses.size());
#pragma omp parallel for schedule(dynamic)
    for (long f = 0; f < frames; ++f) {
        FramePaths paths = frame_paths(setup, room, frame_poses[f]);
        render_frame(setup, sig, paths, frame_edges[f], frame_edges[f + 1], out.left,
                     out.right);
    }
    return out;
}

ChannelPair synthesize_pair_reference(const RoomConfig& room, const SourceTruth& src,
                                      const std::vector<ArrayPose>& frame_poses,
                                      const std::vector<std::size_t>& frame_edges,
                                      const SignalConfig& sig) {
    RenderSetup setup = prepare_render(room, src, frame_poses, frame_edges, sig);

    ChannelPair out;
    out.sample_rate_hz = sig.sample_rate_hz;
    out.left.assign(setup.total, 0.0);
    out.right.assign(setup.total, 0.0);
    out.frame_edges = frame_edges;
    out.frame_poses = frame_poses;

    for (std::size_t f = 0; f < frame_poses.size(); ++f) {
        FramePaths paths = frame_paths(setup, room, frame_poses[f]);
        render_frame(setup, sig, paths, frame_edges[f], frame_edges[f + 1], out.left,
                     out.right);
    }
    return out;
}

}  // namespace ssloc
