#include "ssloc/detectors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ssloc/angles.hpp"

namespace ssloc {

DftAmplitudeSpectrum itd_amplitude_spectrum(const ItdSeries& series) {
    series.validate();
    const std::size_t n = series.samples.size();
    const double total_time = static_cast<double>(n) * series.sample_period_s;
    if (series.kind != SeriesKind::orientation || !(series.omega_rad_s > 0.0))
        throw validation_error("itd_amplitude_spectrum: needs a rotation series");
    if (total_time * series.omega_rad_s < kTwoPi - 1e-9)
        throw validation_error(
            "itd_amplitude_spectrum: need at least one full rotation of data");

    DftAmplitudeSpectrum spec;
    const std::size_t bins = n / 2 + 1;
    spec.omega_rad_s.resize(bins);
    spec.amplitude_m.resize(bins);
    for (std::size_t j = 0; j < bins; ++j) {
        double re = 0.0, im = 0.0;
        const double w = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double ph = w * static_cast<double>(k);
            re += series.samples[k].d_measured_m * std::cos(ph);
            im -= series.samples[k].d_measured_m * std::sin(ph);
        }
        spec.omega_rad_s[j] = kTwoPi * static_cast<double>(j) / total_time;
        spec.amplitude_m[j] = 2.0 / static_cast<double>(n) * std::hypot(re, im);
    }
    return spec;
}

double amplitude_at_rotation(const DftAmplitudeSpectrum& spectrum,
                             double omega_rot_rad_s) {
    if (spectrum.omega_rad_s.empty())
        throw validation_error("amplitude_at_rotation: empty spectrum");
    if (spectrum.omega_rad_s.back() < omega_rot_rad_s)
        throw validation_error("amplitude_at_rotation: spectrum does not cover omega");

    std::size_t nearest = 0;
    double best = std::abs(spectrum.omega_rad_s[0] - omega_rot_rad_s);
    for (std::size_t j = 1; j < spectrum.omega_rad_s.size(); ++j) {
        const double dj = std::abs(spectrum.omega_rad_s[j] - omega_rot_rad_s);
        if (dj < best) {
            best = dj;
            nearest = j;
        }
    }
    double peak = 0.0;
    for (std::size_t j = (nearest > 0 ? nearest - 1 : 0);
         j <= std::min(nearest + 1, spectrum.amplitude_m.size() - 1); ++j)
        peak = std::max(peak, spectrum.amplitude_m[j]);
    return peak;
}

bool detect_ninety_deg(const DftAmplitudeSpectrum& spectrum, double d_threshold_m,
                       double omega_rot_rad_s) {
    return amplitude_at_rotation(spectrum, omega_rot_rad_s) < d_threshold_m;
}

double azimuth_rmse(const std::vector<double>& track_a_rad,
                    const std::vector<double>& track_b_rad) {
    if (track_a_rad.size() != track_b_rad.size())
        throw validation_error("azimuth_rmse: track lengths differ");
    if (track_a_rad.empty()) throw validation_error("azimuth_rmse: empty tracks");
    double acc = 0.0;
    for (std::size_t k = 0; k < track_a_rad.size(); ++k) {
        const double e = rad_to_deg(wrap_angle(track_a_rad[k] - track_b_rad[k]));
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(track_a_rad.size()));
}

double RmseCalibrationCurve::evaluate(double rmse_deg) const {
    double acc = 0.0;
    for (std::size_t i = coefficients.size(); i-- > 0;)
        acc = acc * rmse_deg + coefficients[i];
    return acc;
}

double RmseCalibrationCurve::derivative(double rmse_deg) const {
    double acc = 0.0;
    for (std::size_t i = coefficients.size(); i-- > 1;)
        acc = acc * rmse_deg + coefficients[i] * static_cast<double>(i);
    return acc;
}

RmseCalibrationCurve fit_rmse_curve(const std::vector<RmseSample>& samples, int degree) {
    if (degree < 1) throw validation_error("fit_rmse_curve: degree must be >= 1");
    std::vector<double> xs;
    for (const auto& s : samples) xs.push_back(s.mean_rmse_deg);
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    if (static_cast<int>(xs.size()) < degree + 1)
        throw validation_error("fit_rmse_curve: not enough distinct samples for the degree");

    const int n = static_cast<int>(samples.size());
    Eigen::MatrixXd A(n, degree + 1);
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) {
        double p = 1.0;
        for (int j = 0; j <= degree; ++j) {
            A(i, j) = p;
            p *= samples[i].mean_rmse_deg;
        }
        y(i) = samples[i].elevation_deg;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.rank() < degree + 1)
        throw validation_error("fit_rmse_curve: rank-deficient fit");
    const Eigen::VectorXd c = svd.solve(y);

    RmseCalibrationCurve curve;
    curve.coefficients.assign(c.data(), c.data() + c.size());
    curve.domain_min_deg = xs.front();
    curve.domain_max_deg = xs.back();

    const Eigen::VectorXd r = A * c - y;
    curve.residual_rms_deg = std::sqrt(r.squaredNorm() / n);

    curve.monotone = true;
    for (int i = 0; i <= 256; ++i) {
        const double x = curve.domain_min_deg +
                         i * (curve.domain_max_deg - curve.domain_min_deg) / 256.0;
        if (curve.derivative(x) < 0.0) {
            curve.monotone = false;
            break;
        }
    }
    return curve;
}

ElevationEstimate elevation_from_rmse(const RmseCalibrationCurve& curve, double rmse_deg) {
    if (curve.coefficients.empty())
        throw validation_error("elevation_from_rmse: empty curve");
    bool clamped = false;
    double q = rmse_deg;
    if (q < curve.domain_min_deg) {
        q = curve.domain_min_deg;
        clamped = true;
    } else if (q > curve.domain_max_deg) {
        q = curve.domain_max_deg;
        clamped = true;
    }
    if (curve.derivative(q) < 0.0)
        throw validation_error(
            "elevation_from_rmse: curve decreases at the query; mapping is ambiguous");
    return {curve.evaluate(q), clamped};
}

void save_calibration_curve(const std::string& path, const RmseCalibrationCurve& curve) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write calibration curve: " + path);
    f.precision(17);
    f << "# rmse->elevation calibration curve (deg)\n";
    f << "degree " << curve.coefficients.size() - 1 << "\n";
    f << "coefficients";
    for (double c : curve.coefficients) f << ' ' << c;
    f << "\n";
    f << "domain_deg " << curve.domain_min_deg << ' ' << curve.domain_max_deg << "\n";
    f << "residual_rms_deg " << curve.residual_rms_deg << "\n";
    f << "monotone " << (curve.monotone ? 1 : 0) << "\n";
}

RmseCalibrationCurve load_calibration_curve(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw validation_error("cannot open calibration curve: " + path);
    RmseCalibrationCurve curve;
    std::string line;
    int degree = -1;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream is(line);
        std::string key;
        is >> key;
        if (key == "degree") {
            is >> degree;
        } else if (key == "coefficients") {
            double c;
            while (is >> c) curve.coefficients.push_back(c);
        } else if (key == "domain_deg") {
            is >> curve.domain_min_deg >> curve.domain_max_deg;
        } else if (key == "residual_rms_deg") {
            is >> curve.residual_rms_deg;
        } else if (key == "monotone") {
            int m;
            is >> m;
            curve.monotone = m != 0;
        } else {
            throw validation_error("calibration curve: unknown key '" + key + "'");
        }
    }
    if (degree < 0 || curve.coefficients.size() != static_cast<std::size_t>(degree) + 1)
        throw validation_error("calibration curve: malformed file " + path);
    return curve;
}

}  // namespace ssloc
