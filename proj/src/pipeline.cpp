#include "ssloc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

namespace ssloc {

ExperimentSpec::ExperimentSpec()
    : ekf_2d(default_orientation_config_2d()),
      ekf_3d(default_orientation_config_3d()),
      ekf_distance(default_distance_config()) {}

void ExperimentSpec::validate() const {
    room.validate();
    schedule.validate();
    translation.validate();
    signal.validate();
    thresholds.validate();
    ekf_2d.validate();
    ekf_3d.validate();
    ekf_distance.validate();
    if (!(baseline_m > 0.0)) throw validation_error("spec: baseline must be > 0");
    if (ideal_noise_sigma_m < 0.0 || distance_noise_sigma_m < 0.0)
        throw validation_error("spec: noise sigmas must be >= 0");
    if (distance_frame_samples < 64)
        throw validation_error("spec: distance frame too short");
    if (gcc.max_lag_s * room.sound_speed_mps < baseline_m)
        throw validation_error("spec: gcc lag window must cover the baseline");
}

const char* branch_name(Branch b) {
    switch (b) {
        case Branch::ninety_deg: return "ninety_deg";
        case Branch::curve_fit: return "curve_fit";
        case Branch::full_3d: return "full_3d";
    }
    return "?";
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 over the pair; independent of thread scheduling
    std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

OrientationRun make_orientation_series(const ExperimentSpec& spec, const SourceTruth& truth,
                                       std::uint64_t seed) {
    spec.validate();
    truth.validate();
    OrientationRun run;
    if (spec.mode == RunMode::ideal_itd) {
        run.series =
            ideal_itd_series(truth, spec.schedule, spec.baseline_m, spec.ideal_noise_sigma_m, seed);
        return run;
    }
    FramePlan plan = rotation_frame_plan(spec.schedule, spec.baseline_m, spec.signal.sample_rate_hz);
    SignalConfig sig = spec.signal;
    sig.seed = seed;
    ChannelPair audio = synthesize_pair(spec.room, truth, plan.poses, plan.edges, sig);
    GccConfig gcc = spec.gcc;
    gcc.sample_rate_hz = sig.sample_rate_hz;
    SeriesFromAudio out =
        itd_series_from_audio(audio, spec.schedule.omega_rad_s, spec.room.sound_speed_mps, gcc);
    run.series = std::move(out.series);
    run.silent_frames = out.silent_frames;
    return run;
}

double circular_mean(const std::vector<double>& angles_rad, std::size_t from) {
    double s = 0.0, c = 0.0;
    for (std::size_t k = from; k < angles_rad.size(); ++k) {
        s += std::sin(angles_rad[k]);
        c += std::cos(angles_rad[k]);
    }
    return std::atan2(s, c);
}

double circular_std_deg(const std::vector<double>& angles_rad, std::size_t from) {
    const double mean = circular_mean(angles_rad, from);
    double acc = 0.0;
    std::size_t n = 0;
    for (std::size_t k = from; k < angles_rad.size(); ++k) {
        const double e = rad_to_deg(wrap_angle(angles_rad[k] - mean));
        acc += e * e;
        ++n;
    }
    return n ? std::sqrt(acc / static_cast<double>(n)) : 0.0;
}

std::size_t last_revolution_start(const ItdSeries& series) {
    const double beta_end = series.samples.back().beta_rad;
    std::size_t k = 0;
    while (k < series.samples.size() && series.samples[k].beta_rad <= beta_end - kTwoPi) ++k;
    return k;
}

std::size_t rmse_window_start(const ItdSeries& series) {
    // the transient revolution is excluded from the branch decision
    const double beta_end = series.samples.back().beta_rad;
    std::size_t k = 0;
    while (k < series.samples.size() &&
           series.samples[k].beta_rad <= beta_end - 2.0 * kTwoPi)
        ++k;
    return k;
}

double time_avg_abs_angle_err_deg(const std::vector<double>& track_rad, double truth_rad) {
    double acc = 0.0;
    for (double a : track_rad) acc += std::abs(rad_to_deg(wrap_angle(a - truth_rad)));
    return track_rad.empty() ? 0.0 : acc / static_cast<double>(track_rad.size());
}

namespace {

double fold_elevation_deg(double theta_rad) {
    // the measurement cannot tell +theta from -theta; report into [0, 90]
    double t = std::abs(rad_to_deg(wrap_angle(theta_rad)));
    if (t > 90.0) t = 180.0 - t;
    return t;
}

}  // namespace

LocalizationVerdict localize_orientation(const ExperimentSpec& spec, const ItdSeries& series,
                                         const RmseCalibrationCurve* curve,
                                         int silent_frames) {
    spec.validate();
    series.validate();

    LocalizationVerdict v;
    v.diag.silent_frames = silent_frames;
    if (silent_frames == static_cast<int>(series.samples.size())) {
        v.diag.no_source = true;
        throw signal_absent("localize_orientation: every frame is below the energy floor");
    }

    const DftAmplitudeSpectrum spectrum = itd_amplitude_spectrum(series);
    v.diag.amplitude_peak_m = amplitude_at_rotation(spectrum, series.omega_rad_s);
    const double threshold = spec.thresholds.d_threshold_for(series.baseline_m);

    if (v.diag.amplitude_peak_m < threshold) {
        v.branch = Branch::ninety_deg;
        v.elevation_deg = 90.0;
        v.azimuth_deg.reset();
        v.diag.converged = true;
        return v;
    }

    const StateModel m2 = make_model_2d(series.baseline_m);
    const StateModel m3 = make_model_3d(series.baseline_m);
    OrientationTrack t2 = run_orientation_filter(m2, spec.ekf_2d, series);
    OrientationTrack t3 = run_orientation_filter(m3, spec.ekf_3d, series);
    v.diag.azimuth_track_2d = t2.azimuth;
    v.diag.azimuth_track_3d = t3.azimuth;
    v.diag.elevation_track_3d = t3.elevation;

    const std::size_t w = rmse_window_start(series);
    std::vector<double> a2(t2.azimuth.begin() + w, t2.azimuth.end());
    std::vector<double> a3(t3.azimuth.begin() + w, t3.azimuth.end());
    v.diag.rmse_deg = azimuth_rmse(a2, a3);

    const std::size_t tail = last_revolution_start(series);
    if (v.diag.rmse_deg < spec.thresholds.rmse_threshold_deg) {
        if (!curve)
            throw validation_error(
                "localize_orientation: RMSE fell below the threshold but no calibration "
                "curve is loaded; run the calibrate command first");
        v.branch = Branch::curve_fit;
        const ElevationEstimate est = elevation_from_rmse(*curve, v.diag.rmse_deg);
        v.elevation_deg = std::clamp(est.elevation_deg, 0.0, 90.0);
        v.diag.curve_clamped = est.clamped;
        v.azimuth_deg = rad_to_deg(circular_mean(t2.azimuth, tail));
        v.diag.last_rev_azimuth_std_deg = circular_std_deg(t2.azimuth, tail);
    } else {
        v.branch = Branch::full_3d;
        v.azimuth_deg = rad_to_deg(circular_mean(t3.azimuth, tail));
        double acc = 0.0;
        for (std::size_t k = tail; k < t3.elevation.size(); ++k)
            acc += fold_elevation_deg(t3.elevation[k]);
        v.elevation_deg = acc / static_cast<double>(t3.elevation.size() - tail);
        v.diag.last_rev_azimuth_std_deg = circular_std_deg(t3.azimuth, tail);
    }
    v.diag.converged = v.diag.last_rev_azimuth_std_deg < spec.convergence_gate_deg;
    return v;
}

ArrayPose face_source(const LocalizationVerdict& verdict, double baseline_m,
                      bool bypass_undefined) {
    if (!verdict.azimuth_deg.has_value()) {
        if (!bypass_undefined)
            throw validation_error("face_source: azimuth undefined and bypass disabled");
        return ArrayPose{0.0, 0.0, baseline_m};
    }
    return ArrayPose{deg_to_rad(*verdict.azimuth_deg), 0.0, baseline_m};
}

namespace {

ItdSeries translation_series_audio(const ExperimentSpec& spec, const SourceTruth& truth,
                                   double facing_beta, std::uint64_t seed) {
    // one static frame per translation step
    const int frames = spec.translation.steps;
    std::vector<ArrayPose> poses(frames);
    std::vector<std::size_t> edges(frames + 1);
    for (int k = 0; k < frames; ++k)
        poses[k] = ArrayPose{facing_beta, (k + 1) * spec.translation.step_m, spec.baseline_m};
    for (int k = 0; k <= frames; ++k)
        edges[k] = static_cast<std::size_t>(k) * spec.distance_frame_samples;

    SignalConfig sig = spec.signal;
    sig.seed = seed;
    ChannelPair audio = synthesize_pair(spec.room, truth, poses, edges, sig);
    GccConfig gcc = spec.gcc;
    gcc.sample_rate_hz = sig.sample_rate_hz;
    SeriesFromAudio out = itd_series_from_audio(audio, 0.0, spec.room.sound_speed_mps, gcc);
    out.series.kind = SeriesKind::distance;
    out.series.sample_period_s = spec.translation.step_period_s;
    return std::move(out.series);
}

}  // namespace

DistanceResult localize_distance(const ExperimentSpec& spec, const LocalizationVerdict& verdict,
                                 const SourceTruth& truth, std::uint64_t seed,
                                 FacingPolicy policy) {
    spec.validate();
    truth.validate();
    if (!verdict.diag.converged)
        throw non_convergence(
            "localize_distance: orientation estimate did not pass the convergence gate");

    double facing_beta;
    if (policy == FacingPolicy::truth) {
        facing_beta = truth.azimuth_rad;
    } else {
        facing_beta =
            face_source(verdict, spec.baseline_m, verdict.branch == Branch::ninety_deg).beta_rad;
    }

    ItdSeries series;
    if (spec.mode == RunMode::ideal_itd) {
        series = ideal_translation_series(truth, spec.translation, spec.baseline_m, facing_beta,
                                          spec.distance_noise_sigma_m, seed);
    } else {
        series = translation_series_audio(spec, truth, facing_beta, seed);
    }

    DistanceResult result;
    result.track = run_distance_filter(spec.ekf_distance, series);
    result.estimate_m = result.track.estimate_m.back();

    result.band_entry_shift_m = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t k = 0; k < result.track.estimate_m.size(); ++k) {
        bool inside_from_here = true;
        for (std::size_t j = k; j < result.track.estimate_m.size(); ++j) {
            if (std::abs(result.track.estimate_m[j] - truth.distance_m) >
                result.track.three_sigma_m[j]) {
                inside_from_here = false;
                break;
            }
        }
        if (inside_from_here) {
            result.band_entry_shift_m = result.track.offset_m[k];
            break;
        }
    }
    return result;
}

std::vector<OrientationCellResult> run_orientation_suite(
    const ExperimentSpec& spec, const std::vector<ExperimentCell>& cells,
    const RmseCalibrationCurve* curve) {
    spec.validate();
    const long n = static_cast<long>(cells.size());
    std::vector<OrientationCellResult> results(n);

#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        OrientationCellResult& r = results[i];
        r.label = cells[i].label;
        r.truth = cells[i].truth;
        try {
            const std::uint64_t seed = derive_seed(spec.seed, static_cast<std::uint64_t>(i));
            OrientationRun run = make_orientation_series(spec, r.truth, seed);
            LocalizationVerdict v =
                localize_orientation(spec, run.series, curve, run.silent_frames);
            r.branch = v.branch;
            r.est_azimuth_deg = v.azimuth_deg;
            r.est_elevation_deg = v.elevation_deg;
            if (v.azimuth_deg)
                r.abs_azimuth_err_deg = std::abs(rad_to_deg(
                    wrap_angle(deg_to_rad(*v.azimuth_deg) - r.truth.azimuth_rad)));
            r.abs_elevation_err_deg =
                std::abs(v.elevation_deg - rad_to_deg(r.truth.elevation_rad));
            const auto& az_track = (v.branch == Branch::curve_fit)
                                       ? v.diag.azimuth_track_2d
                                       : v.diag.azimuth_track_3d;
            if (!az_track.empty())
                r.time_avg_azimuth_err_deg =
                    time_avg_abs_angle_err_deg(az_track, r.truth.azimuth_rad);
            if (!v.diag.elevation_track_3d.empty()) {
                double acc = 0.0;
                for (double th : v.diag.elevation_track_3d)
                    acc += std::abs(fold_elevation_deg(th) - rad_to_deg(r.truth.elevation_rad));
                r.time_avg_elevation_err_deg =
                    acc / static_cast<double>(v.diag.elevation_track_3d.size());
            }
            r.rmse_deg = v.diag.rmse_deg;
            r.amplitude_peak_m = v.diag.amplitude_peak_m;
            r.ok = true;
        } catch (const std::exception& e) {
            r.ok = false;
            r.error = e.what();
        }
    }
    return results;
}

std::vector<DistanceCellResult> run_distance_suite(const ExperimentSpec& spec,
                                                   const std::vector<ExperimentCell>& cells,
                                                   FacingPolicy policy) {
    spec.validate();
    const long n = static_cast<long>(cells.size());
    std::vector<DistanceCellResult> results(n);

#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        DistanceCellResult& r = results[i];
        r.label = cells[i].label;
        r.truth = cells[i].truth;
        try {
            const std::uint64_t seed =
                derive_seed(spec.seed ^ 0x5851f42d4c957f2dull, static_cast<std::uint64_t>(i));
            LocalizationVerdict stub;
            stub.azimuth_deg = rad_to_deg(r.truth.azimuth_rad);
            stub.elevation_deg = rad_to_deg(r.truth.elevation_rad);
            stub.diag.converged = true;
            DistanceResult d = localize_distance(spec, stub, r.truth, seed, policy);
            r.est_distance_m = d.estimate_m;
            r.abs_err_m = std::abs(d.estimate_m - r.truth.distance_m);
            r.band_entry_shift_m = d.band_entry_shift_m;
            r.ok = true;
        } catch (const std::exception& e) {
            r.ok = false;
            r.error = e.what();
        }
    }
    return results;
}

std::vector<RmseSample> calibration_sweep(const ExperimentSpec& spec,
                                          const std::vector<double>& elevations_deg,
                                          const std::vector<double>& azimuths_deg) {
    spec.validate();
    if (elevations_deg.empty() || azimuths_deg.empty())
        throw validation_error("calibration_sweep: empty grid");

    const long total = static_cast<long>(elevations_deg.size() * azimuths_deg.size());
    std::vector<double> rmse(total, 0.0);

#pragma omp parallel for schedule(dynamic)
    for (long idx = 0; idx < total; ++idx) {
        const std::size_t ie = static_cast<std::size_t>(idx) / azimuths_deg.size();
        const std::size_t ia = static_cast<std::size_t>(idx) % azimuths_deg.size();
        SourceTruth truth;
        truth.distance_m = 5.0;
        truth.elevation_rad = deg_to_rad(elevations_deg[ie]);
        truth.azimuth_rad = wrap_angle(deg_to_rad(azimuths_deg[ia]));
        const std::uint64_t seed =
            derive_seed(spec.seed ^ 0xa0761d6478bd642full, static_cast<std::uint64_t>(idx));
        OrientationRun run = make_orientation_series(spec, truth, seed);

        const StateModel m2 = make_model_2d(run.series.baseline_m);
        const StateModel m3 = make_model_3d(run.series.baseline_m);
        OrientationTrack t2 = run_orientation_filter(m2, spec.ekf_2d, run.series);
        OrientationTrack t3 = run_orientation_filter(m3, spec.ekf_3d, run.series);
        const std::size_t w = rmse_window_start(run.series);
        std::vector<double> a2(t2.azimuth.begin() + w, t2.azimuth.end());
        std::vector<double> a3(t3.azimuth.begin() + w, t3.azimuth.end());
        rmse[idx] = azimuth_rmse(a2, a3);
    }

    std::vector<RmseSample> samples;
    samples.reserve(elevations_deg.size());
    for (std::size_t ie = 0; ie < elevations_deg.size(); ++ie) {
        double acc = 0.0;
        for (std::size_t ia = 0; ia < azimuths_deg.size(); ++ia)
            acc += rmse[ie * azimuths_deg.size() + ia];
        samples.push_back({elevations_deg[ie], acc / static_cast<double>(azimuths_deg.size())});
    }
    return samples;
}

std::vector<ExperimentCell> reference_table_cells() {
    struct Row {
        const char* label;
        double D, phi_deg, theta_deg;
    };
    static const Row rows[] = {
        {"1a", 5, 0, 20},    {"1b", 5, 50, 20},   {"1c", 7, 90, 20},   {"1d", 7, 120, 20},
        {"1e", 3, 180, 20},  {"1f", 3, -40, 20},  {"1g", 10, -90, 20}, {"1h", 10, -140, 20},
        {"2a", 5, 0, 60},    {"2b", 5, 50, 60},   {"2c", 7, 90, 60},   {"2d", 7, 120, 60},
        {"2e", 3, 180, 60},  {"2f", 3, -40, 60},  {"2g", 10, -90, 60}, {"2h", 10, -140, 60},
        {"3a", 5, 50, 0},    {"3b", 7, -120, 4},  {"4a", 5, -40, 86},  {"4b", 7, 150, 89},
    };
    std::vector<ExperimentCell> cells;
    for (const auto& r : rows) {
        SourceTruth t;
        t.distance_m = r.D;
        t.azimuth_rad = wrap_angle(deg_to_rad(r.phi_deg));
        t.elevation_rad = deg_to_rad(r.theta_deg);
        cells.push_back({r.label, t});
    }
    return cells;
}

void write_orientation_summary_csv(const std::string& path,
                                   const std::vector<OrientationCellResult>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write summary CSV: " + path);
    f << "expt_no,act_distance_m,act_azimuth_deg,est_azimuth_deg,avg_abs_azimuth_err_deg,"
         "act_elevation_deg,est_elevation_deg,avg_abs_elevation_err_deg,branch,rmse_deg,"
         "amplitude_peak_m,status\n";
    f.precision(10);
    for (const auto& r : rows) {
        f << r.label << ',' << r.truth.distance_m << ',' << rad_to_deg(r.truth.azimuth_rad)
          << ',';
        if (r.est_azimuth_deg)
            f << *r.est_azimuth_deg << ',' << *r.abs_azimuth_err_deg << ',';
        else
            f << "undefined,undefined,";
        f << rad_to_deg(r.truth.elevation_rad) << ',' << r.est_elevation_deg << ','
          << r.abs_elevation_err_deg << ',' << branch_name(r.branch) << ',' << r.rmse_deg
          << ',' << r.amplitude_peak_m << ',' << (r.ok ? "ok" : r.error) << "\n";
    }
}

void write_distance_summary_csv(const std::string& path,
                                const std::vector<DistanceCellResult>& rows) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write summary CSV: " + path);
    f << "expt_no,act_azimuth_deg,act_elevation_deg,act_distance_m,est_distance_m,"
         "avg_abs_err_m,band_entry_shift_m,status\n";
    f.precision(10);
    for (const auto& r : rows) {
        f << r.label << ',' << rad_to_deg(r.truth.azimuth_rad) << ','
          << rad_to_deg(r.truth.elevation_rad) << ',' << r.truth.distance_m << ','
          << r.est_distance_m << ',' << r.abs_err_m << ',' << r.band_entry_shift_m << ','
          << (r.ok ? "ok" : r.error) << "\n";
    }
}

}  // namespace ssloc
