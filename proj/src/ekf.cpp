#include "ssloc/ekf.hpp"

#include <cmath>
#include <fstream>

namespace ssloc {

StateModel make_model_2d(double b) {
    StateModel m;
    m.name = "2d";
    m.dim = 1;
    m.f = [](const VectorXd&, double omega) {
        VectorXd dx(1);
        dx << -omega;
        return dx;
    };
    m.f_jacobian = [](const VectorXd&, double) { return MatrixXd::Zero(1, 1); };
    m.h = [b](const VectorXd& x, double) { return b * std::sin(x(0)); };
    m.h_jacobian = [b](const VectorXd& x, double) {
        Eigen::RowVectorXd c(1);
        c << b * std::cos(x(0));
        return c;
    };
    return m;
}

StateModel make_model_3d(double b) {
    StateModel m;
    m.name = "3d";
    m.dim = 2;
    m.f = [](const VectorXd&, double omega) {
        VectorXd dx(2);
        dx << 0.0, -omega;
        return dx;
    };
    m.f_jacobian = [](const VectorXd&, double) { return MatrixXd::Zero(2, 2); };
    m.h = [b](const VectorXd& x, double) {
        return b * std::cos(x(0)) * std::sin(x(1));
    };
    m.h_jacobian = [b](const VectorXd& x, double) {
        Eigen::RowVectorXd c = model3d_jacobians(x(0), x(1), b);
        return c;
    };
    return m;
}

StateModel make_model_distance(double b) {
    StateModel m;
    m.name = "distance";
    m.dim = 1;
    m.f = [](const VectorXd&, double) { return VectorXd::Zero(1); };
    m.f_jacobian = [](const VectorXd&, double) { return MatrixXd::Zero(1, 1); };
    m.h = [b](const VectorXd& x, double delta_d) {
        return b * delta_d / std::hypot(delta_d, x(0));
    };
    m.h_jacobian = [b](const VectorXd& x, double delta_d) {
        Eigen::RowVectorXd c(1);
        c << modeldist_jacobian(x(0), delta_d, b);
        return c;
    };
    return m;
}

Eigen::RowVector2d model3d_jacobians(double theta, double psi, double b) {
    if (!(b > 0.0)) throw validation_error("model3d_jacobians: baseline must be > 0");
    return {-b * std::sin(theta) * std::sin(psi), b * std::cos(theta) * std::cos(psi)};
}

double modeldist_jacobian(double D, double delta_d, double b) {
    const double s = delta_d * delta_d + D * D;
    return -b * delta_d * D / (s * std::sqrt(s));
}

EkfState make_ekf_state(const EkfConfig& cfg) {
    cfg.validate();
    EkfState st;
    st.x = cfg.initial_state;
    st.P = cfg.initial_covariance;
    return st;
}

void ekf_step(EkfState& state, const StateModel& model, const EkfConfig& cfg,
              double measurement, double u, double dt) {
    if (!std::isfinite(measurement))
        throw validation_error("ekf_step: non-finite measurement");
    const int n = model.dim;
    if (state.x.size() != n)
        throw validation_error("ekf_step: state/model dimension mismatch");

    const MatrixXd Q = cfg.process_sigma.array().square().matrix().asDiagonal();
    const double R = cfg.sensor_sigma * cfg.sensor_sigma;

    const double h_sub = dt / cfg.substeps;
    for (int i = 0; i < cfg.substeps; ++i) {
        const MatrixXd A = model.f_jacobian(state.x, u);
        state.x += h_sub * model.f(state.x, u);
        state.P += h_sub * (A * state.P + state.P * A.transpose() + Q);
    }

    const Eigen::RowVectorXd C = model.h_jacobian(state.x, u);
    const double s = R + (C * state.P * C.transpose())(0);
    const VectorXd K = state.P * C.transpose() / s;
    const double innovation = measurement - model.h(state.x, u);
    state.P = (MatrixXd::Identity(n, n) - K * C) * state.P;
    state.P = 0.5 * (state.P + state.P.transpose()).eval();
    state.x += K * innovation;

    if (!state.x.allFinite() || !state.P.allFinite())
        throw numeric_error("ekf_step: state or covariance turned non-finite");

    state.history.push_back({u, measurement, innovation, state.x, state.P.diagonal()});
}

OrientationTrack run_orientation_filter(const StateModel& model, const EkfConfig& cfg,
                                        const ItdSeries& series) {
    series.validate();
    if (series.kind != SeriesKind::orientation)
        throw validation_error("run_orientation_filter: series is not an orientation run");

    OrientationTrack track;
    track.azimuth.reserve(series.samples.size());
    if (model.dim == 2) track.elevation.reserve(series.samples.size());

    EkfState st = make_ekf_state(cfg);
    double prev_beta = 0.0;
    for (const auto& s : series.samples) {
        const double dt = (s.beta_rad - prev_beta) / series.omega_rad_s;
        prev_beta = s.beta_rad;
        ekf_step(st, model, cfg, s.d_measured_m, series.omega_rad_s, dt);
        const double psi_hat = (model.dim == 2) ? st.x(1) : st.x(0);
        track.azimuth.push_back(wrap_angle(psi_hat + s.beta_rad));
        if (model.dim == 2) track.elevation.push_back(st.x(0));
    }
    track.final_state = std::move(st);
    return track;
}

DistanceTrack run_distance_filter(const EkfConfig& cfg, const ItdSeries& series) {
    series.validate();
    if (series.kind != SeriesKind::distance)
        throw validation_error("run_distance_filter: series is not a distance run");

    const StateModel model = make_model_distance(series.baseline_m);
    DistanceTrack track;
    EkfState st = make_ekf_state(cfg);
    for (const auto& s : series.samples) {
        ekf_step(st, model, cfg, s.d_measured_m, s.offset_m, series.sample_period_s);
        // the source cannot sit on top of the robot
        if (st.x(0) < 1e-6) st.x(0) = 1e-6;
        track.offset_m.push_back(s.offset_m);
        track.estimate_m.push_back(st.x(0));
        track.three_sigma_m.push_back(3.0 * std::sqrt(std::max(0.0, st.P(0, 0))));
    }
    track.final_state = std::move(st);
    return track;
}

EkfConfig default_orientation_config_2d() {
    EkfConfig cfg;
    cfg.process_sigma = VectorXd::Constant(1, 0.01);
    cfg.sensor_sigma = 0.01;
    cfg.substeps = 10;
    cfg.initial_state = VectorXd::Constant(1, deg_to_rad(5.0));
    cfg.initial_covariance =
        MatrixXd::Identity(1, 1) * deg_to_rad(10.0) * deg_to_rad(10.0);
    return cfg;
}

EkfConfig default_orientation_config_3d() {
    EkfConfig cfg;
    cfg.process_sigma = VectorXd::Constant(2, 0.01);
    cfg.sensor_sigma = 0.01;
    cfg.substeps = 10;
    cfg.initial_state = VectorXd::Constant(2, deg_to_rad(5.0));
    cfg.initial_covariance =
        MatrixXd::Identity(2, 2) * deg_to_rad(10.0) * deg_to_rad(10.0);
    return cfg;
}

EkfConfig default_distance_config() {
    EkfConfig cfg;
    cfg.process_sigma = VectorXd::Constant(1, 0.1);
    cfg.sensor_sigma = 0.001;
    cfg.substeps = 10;
    cfg.initial_state = VectorXd::Constant(1, 1.0);
    cfg.initial_covariance = MatrixXd::Identity(1, 1) * 25.0;
    return cfg;
}

void write_history_csv(const std::string& path, const EkfState& state,
                       const std::string& input_label) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write history CSV: " + path);
    const int n = state.x.size();
    f << "step," << input_label << ",measurement_m,innovation_m";
    for (int i = 0; i < n; ++i) f << ",state_" << i;
    for (int i = 0; i < n; ++i) f << ",cov_diag_" << i;
    f << "\n";
    f.precision(12);
    for (std::size_t k = 0; k < state.history.size(); ++k) {
        const auto& r = state.history[k];
        f << k << ',' << r.u << ',' << r.measurement << ',' << r.innovation;
        for (int i = 0; i < n; ++i) f << ',' << r.state(i);
        for (int i = 0; i < n; ++i) f << ',' << r.cov_diag(i);
        f << "\n";
    }
}

}  // namespace ssloc
