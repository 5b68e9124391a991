#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssloc/room.hpp"
#include "ssloc/types.hpp"

namespace ssloc {

enum class SourceKind { white_noise, tone, speech_file };

struct SignalConfig {
    double sample_rate_hz = 44100.0;
    SourceKind source_kind = SourceKind::white_noise;
    std::string source_file;     // required for speech_file
    double tone_hz = 440.0;      // used for tone
    double sensor_noise_sigma = 0.0;  // additive white noise per channel, waveform units
    std::uint64_t seed = 1;
    bool sinc_interpolation = true;  // false = linear fractional delay

    void validate() const {
        if (!(sample_rate_hz > 0.0)) throw validation_error("signal: sample rate must be > 0");
        if (sensor_noise_sigma < 0.0) throw validation_error("signal: noise sigma must be >= 0");
        if (source_kind == SourceKind::tone && !(tone_hz > 0.0))
            throw validation_error("signal: tone frequency must be > 0");
    }
};

enum class SeriesKind { orientation, distance };

/// Time-stamped path-difference measurements with the array pose at each
/// sample. Orientation runs advance beta; distance runs advance offset.
struct ItdSeries {
    struct Sample {
        double beta_rad;
        double offset_m;
        double d_measured_m;
    };

    SeriesKind kind = SeriesKind::orientation;
    double omega_rad_s = kTwoPi / 5.0;
    double sample_period_s = 0.0;
    double baseline_m = 0.18;
    std::vector<Sample> samples;

    void validate() const;
};

/// Noisy path-difference samples straight from the measurement model,
/// bypassing audio synthesis: d_k = b cos(theta) sin(psi_k) + N(0, sigma^2),
/// one sample after every cadence step of rotation.
ItdSeries ideal_itd_series(const SourceTruth& src, const RotationSchedule& schedule,
                           double baseline_m, double noise_sigma, std::uint64_t seed);

/// Translation-phase counterpart. The array holds heading `facing_beta`
/// (set from the orientation estimate, or the truth for isolated distance
/// runs) and steps sideways; measurements come from exact geometry, so a
/// facing error shows up in the data as it would on the robot.
ItdSeries ideal_translation_series(const SourceTruth& src, const TranslationPlan& plan,
                                   double baseline_m, double facing_beta,
                                   double noise_sigma, std::uint64_t seed);

/// Two-channel synthesis output. Channel 0 = left mic, channel 1 = right.
struct ChannelPair {
    double sample_rate_hz;
    std::vector<double> left;
    std::vector<double> right;
    /// Frame boundaries (sample indices, size = frames + 1) matching the
    /// pose list used during rendering.
    std::vector<std::size_t> frame_edges;
    /// Pose of the array during each frame.
    std::vector<ArrayPose> frame_poses;
};

/// Renders both microphone channels for a sequence of frozen-pose frames:
/// the sum over image sources of the gain-scaled, fractionally delayed
/// source signal, plus per-channel sensor noise. Deterministic for a fixed
/// seed regardless of thread count.
ChannelPair synthesize_pair(const RoomConfig& room, const SourceTruth& src,
                            const std::vector<ArrayPose>& frame_poses,
                            const std::vector<std::size_t>& frame_edges,
                            const SignalConfig& sig);

/// Single-threaded rendering kept as the oracle for the parallel kernel.
ChannelPair synthesize_pair_reference(const RoomConfig& room, const SourceTruth& src,
                                      const std::vector<ArrayPose>& frame_poses,
                                      const std::vector<std::size_t>& frame_edges,
                                      const SignalConfig& sig);

/// Frame plan for an orientation run: one frame per cadence step, poses
/// frozen at each frame's midpoint rotation angle.
struct FramePlan {
    std::vector<ArrayPose> poses;
    std::vector<std::size_t> edges;
};
FramePlan rotation_frame_plan(const RotationSchedule& schedule, double baseline_m,
                              double sample_rate_hz);

/// Source waveform generator shared by the audio paths; length samples,
/// deterministic in (cfg, seed).
std::vector<double> make_source_signal(const SignalConfig& cfg, std::size_t length);

}  // namespace ssloc
