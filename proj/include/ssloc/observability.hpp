#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "ssloc/ekf.hpp"

namespace ssloc {

/// Stacked gradients of successive Lie derivatives of the measurement,
/// evaluated numerically (nested central differences, step 1e-5). The first
/// row is the measurement Jacobian itself.
Eigen::MatrixXd lie_observability_matrix(const StateModel& model, const VectorXd& x,
                                         double u, int rows);

/// Closed form det of the 3D model's first-two-row observability block:
///   -b^2 * omega * sin(theta) * cos(theta).
double det_omega_3d(double theta, double psi, double b, double omega);

/// First two rows of the 3D observability matrix in closed form.
Eigen::Matrix2d omega_3d_rows(double theta, double psi, double b, double omega);

/// Rank of a matrix under the scale-free tolerance: singular values below
/// rel_tol * largest do not count.
int numeric_rank(const Eigen::MatrixXd& m, double rel_tol = 1e-8);

enum class SweepModel { model_2d, model_3d, azimuth_subsystem, elevation_subsystem, model_distance };

struct SweepGrid {
    // Orientation models sweep (theta, psi); the distance model reuses the
    // axes as (D, delta_d).
    double a_min = 0.0, a_max = kPi / 2.0;
    int a_steps = 31;
    double b_min = -kPi, b_max = kPi;
    int b_steps = 25;
};

struct SweepCell {
    double a, b;
    double smallest_sv, largest_sv;
    int rank;
    bool singular;
};

struct ObservabilityReport {
    SweepModel model;
    int state_dim;
    std::vector<SweepCell> cells;
    std::string summary;
};

/// Evaluates the analytic observability rows over a grid and flags
/// rank-deficient cells. Cells parallelize across threads.
ObservabilityReport singularity_sweep(SweepModel model, const SweepGrid& grid,
                                      double baseline_m, double omega_rad_s,
                                      double rel_tol = 1e-8);

void write_report_csv(const std::string& path, const ObservabilityReport& report);

}  // namespace ssloc
