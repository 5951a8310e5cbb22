#include "enki/moments.hpp"

#include "enki/error.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace enki {

namespace {

void check_state(const MomentState& s, const Vector& y, const StabilizationParams& p) {
    const Index d = s.m.size();
    if (s.c.rows() != d || s.c.cols() != d || y.size() != d || p.dim() != d) {
        throw DimensionError("moment system: m, C, y and sigma must share dimension " +
                             std::to_string(d));
    }
}

double spectral_norm(const Matrix& c) {
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(symmetrized(c), Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

MomentRates moment_rhs(const MomentState& state, const Vector& y,
                       const StabilizationParams& params) {
    check_state(state, y, params);
    const Vector gap = y - state.m;
    const Matrix inflated_c = params.apply_inflation(state.c);  // (1−α)ΣC
    MomentRates r;
    r.dm = state.c * gap + params.apply_inflation(Matrix(gap)).col(0);
    const Matrix dc = -2.0 * state.c * state.c - inflated_c - inflated_c.transpose();
    r.dc = symmetrized(dc);
    return r;
}

LinearizedRates linearized_rates(const StabilizationParams& params) {
    const Matrix weighted = (1.0 - params.alpha()) * params.sigma();
    return {-weighted, -2.0 * weighted};
}

MomentTrajectory integrate_moments(const MomentState& state0, const Vector& y,
                                   const StabilizationParams& params, const FlowConfig& cfg) {
    check_state(state0, y, params);
    const long n = cfg.steps();
    const double h = cfg.t_final / static_cast<double>(n);

    auto add = [](const MomentState& s, const MomentRates& r, double w) {
        return MomentState{s.m + w * r.dm, s.c + w * r.dc};
    };

    MomentTrajectory traj;
    MomentState s{state0.m, symmetrized(state0.c)};
    traj.push_back({0.0, s});
    for (long k = 1; k <= n; ++k) {
        const double t = static_cast<double>(k) * h;
        const MomentRates k1 = moment_rhs(s, y, params);
        const MomentRates k2 = moment_rhs(add(s, k1, 0.5 * h), y, params);
        const MomentRates k3 = moment_rhs(add(s, k2, 0.5 * h), y, params);
        const MomentRates k4 = moment_rhs(add(s, k3, h), y, params);
        s.m += (h / 6.0) * (k1.dm + 2.0 * k2.dm + 2.0 * k3.dm + k4.dm);
        s.c += (h / 6.0) * (k1.dc + 2.0 * k2.dc + 2.0 * k3.dc + k4.dc);
        s.c = symmetrized(s.c);

        std::ostringstream msg;
        msg.precision(17);
        if (!s.m.allFinite() || !s.c.allFinite()) {
            msg << "moment system diverged at t=" << t;
            throw DivergenceError(msg.str());
        }
        const Eigen::SelfAdjointEigenSolver<Matrix> eig(s.c, Eigen::EigenvaluesOnly);
        const double norm = eig.eigenvalues().cwiseAbs().maxCoeff();
        if (eig.eigenvalues().minCoeff() < -1e-8 * norm) {
            msg << "moment covariance lost positive semi-definiteness at t=" << t
                << " (min eigenvalue " << eig.eigenvalues().minCoeff() << ", norm " << norm << ")";
            throw DivergenceError(msg.str());
        }
        if (k % cfg.trace_stride == 0 || k == n) traj.push_back({t, s});
    }
    return traj;
}

csv::Table moment_table(const MomentTrajectory& trajectory) {
    csv::Table table;
    if (trajectory.empty()) return table;
    const Index d = trajectory.front().state.dim();
    table.header.push_back("t");
    for (Index i = 0; i < d; ++i) table.header.push_back("m_" + std::to_string(i));
    for (Index i = 0; i < d; ++i) {
        for (Index j = 0; j < d; ++j) {
            table.header.push_back("C_" + std::to_string(i) + "_" + std::to_string(j));
        }
    }
    table.header.push_back("c_norm");
    for (const auto& sample : trajectory) {
        std::vector<double> row{sample.t};
        for (Index i = 0; i < d; ++i) row.push_back(sample.state.m(i));
        for (Index i = 0; i < d; ++i) {
            for (Index j = 0; j < d; ++j) row.push_back(sample.state.c(i, j));
        }
        row.push_back(spectral_norm(sample.state.c));
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace enki
