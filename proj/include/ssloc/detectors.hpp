#pragma once

#include <string>
#include <vector>

#include "ssloc/synth.hpp"

namespace ssloc {

/// One-sided DFT amplitude estimate of the recorded path-difference signal:
/// A_hat(w_j) = (2/N) * |X(w_j)|.
struct DftAmplitudeSpectrum {
    std::vector<double> omega_rad_s;
    std::vector<double> amplitude_m;
};

DftAmplitudeSpectrum itd_amplitude_spectrum(const ItdSeries& series);

/// Detection thresholds. d_threshold is quoted for a 0.18 m baseline and
/// scales proportionally with b.
struct Thresholds {
    double d_threshold_m = 0.017;
    double rmse_threshold_deg = 1.9;
    double reference_baseline_m = 0.18;

    void validate() const {
        if (!(d_threshold_m > 0.0) || !(rmse_threshold_deg > 0.0) ||
            !(reference_baseline_m > 0.0))
            throw validation_error("thresholds: values must be > 0");
    }
    double d_threshold_for(double baseline_m) const {
        return d_threshold_m * baseline_m / reference_baseline_m;
    }
};

/// True when the amplitude at the rotation frequency (nearest bin, searched
/// over a +-1 bin neighborhood) stays below the threshold: the path
/// difference is flat, so the source sits at 90 deg elevation.
bool detect_ninety_deg(const DftAmplitudeSpectrum& spectrum, double d_threshold_m,
                       double omega_rot_rad_s);

/// Peak amplitude near the rotation frequency, the quantity the detector
/// compares against the threshold.
double amplitude_at_rotation(const DftAmplitudeSpectrum& spectrum,
                             double omega_rot_rad_s);

/// RMS of the wrapped difference between two azimuth tracks, in degrees.
double azimuth_rmse(const std::vector<double>& track_a_rad,
                    const std::vector<double>& track_b_rad);

/// Least-squares polynomial mapping RMSE (deg) -> elevation (deg), fitted to
/// per-elevation mean RMSE samples gathered in the target environment.
struct RmseCalibrationCurve {
    std::vector<double> coefficients;  // ascending powers of rmse
    double domain_min_deg = 0.0;
    double domain_max_deg = 0.0;
    double residual_rms_deg = 0.0;
    bool monotone = true;

    double evaluate(double rmse_deg) const;
    /// Derivative of the polynomial, used for the per-query monotonicity
    /// check.
    double derivative(double rmse_deg) const;
};

struct RmseSample {
    double elevation_deg;
    double mean_rmse_deg;
};

RmseCalibrationCurve fit_rmse_curve(const std::vector<RmseSample>& samples, int degree);

struct ElevationEstimate {
    double elevation_deg;
    bool clamped;  // query fell outside the fit domain
};

/// Maps a measured RMSE through the calibration curve. Queries outside the
/// fit domain are clamped to its edge and flagged; a locally decreasing
/// curve at the query raises an error since the mapping is ambiguous there.
ElevationEstimate elevation_from_rmse(const RmseCalibrationCurve& curve, double rmse_deg);

void save_calibration_curve(const std::string& path, const RmseCalibrationCurve& curve);
RmseCalibrationCurve load_calibration_curve(const std::string& path);

}  // namespace ssloc
