#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssloc/detectors.hpp"
#include "ssloc/ekf.hpp"
#include "ssloc/gcc.hpp"
#include "ssloc/room.hpp"
#include "ssloc/synth.hpp"

namespace ssloc {

enum class RunMode { ideal_itd, audio };

/// Everything a localization run needs, independent of where the numbers
/// came from (CLI config file or test code).
struct ExperimentSpec {
    RoomConfig room;
    RotationSchedule schedule;
    TranslationPlan translation;
    double baseline_m = 0.18;
    SignalConfig signal;
    GccConfig gcc;
    double ideal_noise_sigma_m = 0.01;     // rotation-phase measurement noise
    double distance_noise_sigma_m = 1e-4;  // translation-phase measurement noise
    EkfConfig ekf_2d;
    EkfConfig ekf_3d;
    EkfConfig ekf_distance;
    Thresholds thresholds;
    RunMode mode = RunMode::ideal_itd;
    std::uint64_t seed = 1;
    int distance_frame_samples = 4096;
    double convergence_gate_deg = 2.0;  // last-revolution azimuth spread allowed
                                        // before the distance phase may start

    ExperimentSpec();
    void validate() const;
};

enum class Branch { ninety_deg, curve_fit, full_3d };

const char* branch_name(Branch b);

struct LocalizationVerdict {
    Branch branch = Branch::full_3d;
    std::optional<double> azimuth_deg;  // empty when the 90-deg branch fires
    double elevation_deg = 0.0;
    std::optional<double> distance_m;

    struct Diagnostics {
        double rmse_deg = 0.0;
        double amplitude_peak_m = 0.0;
        double last_rev_azimuth_std_deg = 0.0;
        bool converged = false;
        bool curve_clamped = false;
        int silent_frames = 0;
        bool no_source = false;
        std::vector<double> azimuth_track_2d;    // radians, per sample
        std::vector<double> azimuth_track_3d;    // radians
        std::vector<double> elevation_track_3d;  // radians
    } diag;
};

/// Rotation-phase measurement series for one source, ideal or audio mode.
struct OrientationRun {
    ItdSeries series;
    int silent_frames = 0;
};
OrientationRun make_orientation_series(const ExperimentSpec& spec, const SourceTruth& truth,
                                       std::uint64_t seed);

/// The complete orientation decision: 90-deg test, then either the
/// curve-fit branch (2D/3D azimuth RMSE below threshold) or the plain 3D
/// estimate. `curve` may be null as long as the curve-fit branch never
/// fires.
LocalizationVerdict localize_orientation(const ExperimentSpec& spec, const ItdSeries& series,
                                         const RmseCalibrationCurve* curve,
                                         int silent_frames = 0);

/// Pose that points the array at the estimated source. With bypass enabled
/// an undefined azimuth (90-deg verdict) keeps beta = 0; at exactly 90 deg
/// elevation the translation measurement does not depend on heading.
ArrayPose face_source(const LocalizationVerdict& verdict, double baseline_m,
                      bool bypass_undefined = false);

enum class FacingPolicy {
    estimated,  // heading from the orientation verdict (full closed loop)
    truth       // heading from the true azimuth (isolated distance runs)
};

struct DistanceResult {
    double estimate_m = 0.0;
    /// Cumulative shift after which |error| stays inside the filter's
    /// 3-sigma envelope for the rest of the run (needs the truth; NaN when
    /// unknown).
    double band_entry_shift_m = 0.0;
    DistanceTrack track;
};

/// Translation phase: faces the source per the policy, generates the
/// translation series, and runs the distance filter. Refuses to start when
/// the orientation verdict failed its convergence gate.
DistanceResult localize_distance(const ExperimentSpec& spec, const LocalizationVerdict& verdict,
                                 const SourceTruth& truth, std::uint64_t seed,
                                 FacingPolicy policy = FacingPolicy::estimated);

// ---------------------------------------------------------------------------
// Batch experiment runner
// ---------------------------------------------------------------------------

struct ExperimentCell {
    std::string label;
    SourceTruth truth;
};

struct OrientationCellResult {
    std::string label;
    SourceTruth truth;
    bool ok = false;
    std::string error;
    Branch branch = Branch::full_3d;
    std::optional<double> est_azimuth_deg;
    double est_elevation_deg = 0.0;
    /// |last-revolution mean estimate - truth| (the table metric).
    std::optional<double> abs_azimuth_err_deg;
    double abs_elevation_err_deg = 0.0;
    /// Mean over all samples of the absolute wrapped error (the sweep
    /// metric, transient included).
    double time_avg_azimuth_err_deg = 0.0;
    double time_avg_elevation_err_deg = 0.0;
    double rmse_deg = 0.0;
    double amplitude_peak_m = 0.0;
};

struct DistanceCellResult {
    std::string label;
    SourceTruth truth;
    bool ok = false;
    std::string error;
    double est_distance_m = 0.0;
    double abs_err_m = 0.0;
    double band_entry_shift_m = 0.0;
};

/// Runs every cell with a per-cell seed derived from spec.seed and the cell
/// index; cells execute concurrently and results come back in input order.
std::vector<OrientationCellResult> run_orientation_suite(
    const ExperimentSpec& spec, const std::vector<ExperimentCell>& cells,
    const RmseCalibrationCurve* curve);

std::vector<DistanceCellResult> run_distance_suite(const ExperimentSpec& spec,
                                                   const std::vector<ExperimentCell>& cells,
                                                   FacingPolicy policy);

/// Per-elevation mean 2D-vs-3D azimuth RMSE over a grid of azimuths, the
/// calibration input for the curve fit. Elevations and azimuths in degrees.
std::vector<RmseSample> calibration_sweep(const ExperimentSpec& spec,
                                          const std::vector<double>& elevations_deg,
                                          const std::vector<double>& azimuths_deg);

/// Deterministic per-cell seed stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

/// The source grid of the reference experiment tables (20 rows, 1a..4b).
std::vector<ExperimentCell> reference_table_cells();

void write_orientation_summary_csv(const std::string& path,
                                   const std::vector<OrientationCellResult>& rows);
void write_distance_summary_csv(const std::string& path,
                                const std::vector<DistanceCellResult>& rows);

// Helpers shared with tests and the acceptance suite.
double circular_mean(const std::vector<double>& angles_rad, std::size_t from = 0);
double circular_std_deg(const std::vector<double>& angles_rad, std::size_t from = 0);
std::size_t last_revolution_start(const ItdSeries& series);
std::size_t rmse_window_start(const ItdSeries& series);
double time_avg_abs_angle_err_deg(const std::vector<double>& track_rad, double truth_rad);

}  // namespace ssloc
