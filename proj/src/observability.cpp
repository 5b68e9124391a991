#include "ssloc/observability.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace ssloc {

namespace {

constexpr double kDiffStep = 1e-5;

// Value of the n-th Lie derivative L_f^n h at x, built recursively from
// central differences of the previous one.
double lie_value(const StateModel& model, const VectorXd& x, double u, int n) {
    if (n == 0) return model.h(x, u);
    const int dim = model.dim;
    double acc = 0.0;
    const VectorXd fx = model.f(x, u);
    for (int i = 0; i < dim; ++i) {
        VectorXd xp = x, xm = x;
        xp(i) += kDiffStep;
        xm(i) -= kDiffStep;
        const double grad_i =
            (lie_value(model, xp, u, n - 1) - lie_value(model, xm, u, n - 1)) /
            (2.0 * kDiffStep);
        acc += grad_i * fx(i);
    }
    return acc;
}

}  // namespace

Eigen::MatrixXd lie_observability_matrix(const StateModel& model, const VectorXd& x,
                                         double u, int rows) {
    if (rows < model.dim)
        throw validation_error("lie_observability_matrix: need rows >= state dimension");
    if (!x.allFinite())
        throw validation_error("lie_observability_matrix: state must be finite");

    Eigen::MatrixXd omega(rows, model.dim);
    for (int r = 0; r < rows; ++r) {
        if (r == 0) {
            omega.row(0) = model.h_jacobian(x, u);
            continue;
        }
        for (int i = 0; i < model.dim; ++i) {
            VectorXd xp = x, xm = x;
            xp(i) += kDiffStep;
            xm(i) -= kDiffStep;
            omega(r, i) = (lie_value(model, xp, u, r) - lie_value(model, xm, u, r)) /
                          (2.0 * kDiffStep);
        }
    }
    return omega;
}

double det_omega_3d(double theta, double psi, double b, double omega) {
    (void)psi;
    return -b * b * omega * std::sin(theta) * std::cos(theta);
}

Eigen::Matrix2d omega_3d_rows(double theta, double psi, double b, double omega) {
    Eigen::Matrix2d m;
    m << -b * std::sin(theta) * std::sin(psi), b * std::cos(theta) * std::cos(psi),
        b * omega * std::sin(theta) * std::cos(psi),
        b * omega * std::cos(theta) * std::sin(psi);
    return m;
}

int numeric_rank(const Eigen::MatrixXd& m, double rel_tol) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return 0;
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > rel_tol * sv(0)) ++rank;
    return rank;
}

namespace {

// Analytic observability rows per model; two rows suffice everywhere the
// theorems make a claim.
Eigen::MatrixXd analytic_rows(SweepModel model, double a, double b_coord,
                              double baseline, double omega) {
    switch (model) {
        case SweepModel::model_2d: {
            // state psi = b_coord
            Eigen::MatrixXd m(2, 1);
            m << baseline * std::cos(b_coord), baseline * omega * std::sin(b_coord);
            return m;
        }
        case SweepModel::model_3d:
            return omega_3d_rows(a, b_coord, baseline, omega);
        case SweepModel::azimuth_subsystem: {
            // theta known (= a), state psi
            Eigen::MatrixXd m(2, 1);
            m << baseline * std::cos(a) * std::cos(b_coord),
                baseline * omega * std::cos(a) * std::sin(b_coord);
            return m;
        }
        case SweepModel::elevation_subsystem: {
            // psi known (= b_coord), state theta; theta does not move, so
            // every higher Lie row vanishes.
            Eigen::MatrixXd m(2, 1);
            m << -baseline * std::sin(a) * std::sin(b_coord), 0.0;
            return m;
        }
        case SweepModel::model_distance: {
            // a = D, b_coord = delta_d
            Eigen::MatrixXd m(1, 1);
            m << modeldist_jacobian(a, b_coord, baseline);
            return m;
        }
    }
    throw validation_error("singularity_sweep: unknown model");
}

}  // namespace

ObservabilityReport singularity_sweep(SweepModel model, const SweepGrid& grid,
                                      double baseline_m, double omega_rad_s,
                                      double rel_tol) {
    if (grid.a_steps < 1 || grid.b_steps < 1)
        throw validation_error("singularity_sweep: grid must have at least one cell");

    const int dim = (model == SweepModel::model_3d) ? 2 : 1;
    const long total = static_cast<long>(grid.a_steps) * grid.b_steps;

    ObservabilityReport report;
    report.model = model;
    report.state_dim = dim;
    report.cells.resize(total);

#pragma omp parallel for schedule(static)
    for (long idx = 0; idx < total; ++idx) {
        const int ia = static_cast<int>(idx) / grid.b_steps;
        const int ib = static_cast<int>(idx) % grid.b_steps;
        const double a = (grid.a_steps == 1)
                             ? grid.a_min
                             : grid.a_min + ia * (grid.a_max - grid.a_min) / (grid.a_steps - 1);
        const double b = (grid.b_steps == 1)
                             ? grid.b_min
                             : grid.b_min + ib * (grid.b_max - grid.b_min) / (grid.b_steps - 1);
        const Eigen::MatrixXd rows = analytic_rows(model, a, b, baseline_m, omega_rad_s);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(rows);
        const auto& sv = svd.singularValues();
        const double largest = sv(0);
        const double smallest = sv(sv.size() - 1);
        const int rank = numeric_rank(rows, rel_tol);
        report.cells[idx] = {a, b, smallest, largest, rank, rank < dim};
    }

    int singular_count = 0;
    for (const auto& c : report.cells) singular_count += c.singular ? 1 : 0;
    std::ostringstream os;
    os << "model=" << static_cast<int>(model) << " cells=" << total
       << " singular=" << singular_count;
    report.summary = os.str();
    return report;
}

void write_report_csv(const std::string& path, const ObservabilityReport& report) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write report CSV: " + path);
    const bool dist = report.model == SweepModel::model_distance;
    f << "# " << report.summary << "\n";
    f << (dist ? "distance_m,offset_m" : "theta_deg,psi_deg")
      << ",smallest_sv,largest_sv,rank,singular\n";
    f.precision(12);
    for (const auto& c : report.cells) {
        if (dist)
            f << c.a << ',' << c.b;
        else
            f << rad_to_deg(c.a) << ',' << rad_to_deg(c.b);
        f << ',' << c.smallest_sv << ',' << c.largest_sv << ',' << c.rank << ','
          << (c.singular ? 1 : 0) << "\n";
    }
}

}  // namespace ssloc
