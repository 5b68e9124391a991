#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "ssloc/angles.hpp"
#include "ssloc/synth.hpp"

namespace ssloc {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Continuous-discrete filter parameters. Sigmas are standard deviations;
/// the filter squares them into Q and R.
struct EkfConfig {
    VectorXd process_sigma;   // per-state
    double sensor_sigma = 0.01;
    int substeps = 10;
    VectorXd initial_state;
    MatrixXd initial_covariance;

    void validate() const {
        if (substeps < 1) throw validation_error("ekf: substeps must be >= 1");
        if (!(sensor_sigma > 0.0)) throw validation_error("ekf: sensor sigma must be > 0");
        if (process_sigma.size() != initial_state.size() ||
            initial_covariance.rows() != initial_state.size() ||
            initial_covariance.cols() != initial_state.size())
            throw validation_error("ekf: dimension mismatch in config");
    }
};

/// One of the three measurement models. `u` is the known input at a given
/// step: the spin rate for the orientation models, the cumulative lateral
/// offset for the distance model.
struct StateModel {
    std::string name;
    int dim = 1;
    std::function<VectorXd(const VectorXd&, double u)> f;
    std::function<MatrixXd(const VectorXd&, double u)> f_jacobian;
    std::function<double(const VectorXd&, double u)> h;
    std::function<Eigen::RowVectorXd(const VectorXd&, double u)> h_jacobian;
};

/// State psi (kept unwrapped), measurement b*sin(psi); u = omega.
StateModel make_model_2d(double baseline_m);
/// State [theta, psi], measurement b*cos(theta)*sin(psi); u = omega.
StateModel make_model_3d(double baseline_m);
/// State D, measurement b*u/sqrt(u^2 + D^2); u = cumulative offset.
StateModel make_model_distance(double baseline_m);

/// Measurement Jacobian of the 3D model at x = [theta, psi]:
///   [-b sin(theta) sin(psi), b cos(theta) cos(psi)].
Eigen::RowVector2d model3d_jacobians(double theta, double psi, double b);

/// Measurement derivative of the distance model:
///   -b * delta_d * D / (delta_d^2 + D^2)^(3/2).
double modeldist_jacobian(double D, double delta_d, double b);

struct EkfStepRecord {
    double u;
    double measurement;
    double innovation;
    VectorXd state;
    VectorXd cov_diag;
};

struct EkfState {
    VectorXd x;
    MatrixXd P;
    std::vector<EkfStepRecord> history;
};

EkfState make_ekf_state(const EkfConfig& cfg);

/// One predict(xN substeps)+update cycle of the continuous-discrete EKF:
/// Euler propagation of state and covariance over dt, then the standard
/// gain/update with the scalar measurement. Throws numeric_error if the
/// state or covariance turns non-finite.
void ekf_step(EkfState& state, const StateModel& model, const EkfConfig& cfg,
              double measurement, double u, double dt);

/// Filter run over an orientation series. Produces per-sample azimuth
/// tracks (wrapped, radians) and, for the 3D model, the elevation track.
struct OrientationTrack {
    std::vector<double> azimuth;
    std::vector<double> elevation;  // empty for the 2D model
    EkfState final_state;
};
OrientationTrack run_orientation_filter(const StateModel& model, const EkfConfig& cfg,
                                        const ItdSeries& series);

/// Filter run over a distance series; returns the estimate trace and the
/// 3-sigma envelope from the filter covariance.
struct DistanceTrack {
    std::vector<double> offset_m;
    std::vector<double> estimate_m;
    std::vector<double> three_sigma_m;
    EkfState final_state;
};
DistanceTrack run_distance_filter(const EkfConfig& cfg, const ItdSeries& series);

/// Default configurations from the reference parameter set: orientation
/// sigma_v = sigma_w = 0.01, initial angles 5 deg, P0 = (10 deg)^2 per
/// state; distance sigma_v = 0.1, sigma_w = 0.001, D0 = 1 m, P0 = (5 m)^2.
EkfConfig default_orientation_config_2d();
EkfConfig default_orientation_config_3d();
EkfConfig default_distance_config();

/// Writes a per-step history CSV: step, beta_or_offset, measurement,
/// innovation, state..., cov_diag...
void write_history_csv(const std::string& path, const EkfState& state,
                       const std::string& input_label);

}  // namespace ssloc
