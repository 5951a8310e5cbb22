#pragma once

// Mean-field moment system of the stabilized dynamics in the setting
// K = d, Γ = G = I:
//
//   dm/dt = C(y − m) + (1−α)Σ(y − m)
//   dC/dt = −2CC − (1−α)ΣC − (1−α)CΣ
//
// α = 1 gives the vanilla gradient-flow moments.

#include "enki/flow.hpp"
#include "enki/linalg.hpp"

#include <vector>

namespace enki {

struct MomentState {
    Vector m;
    Matrix c;

    [[nodiscard]] Index dim() const noexcept { return m.size(); }
    /// Second moment E = C + m mᵀ.
    [[nodiscard]] Matrix second_moment() const { return c + m * m.transpose(); }
};

struct MomentRates {
    Vector dm;
    Matrix dc;  // symmetrized
};

struct LinearizedRates {
    Matrix mean_rate;        // δm' = mean_rate · δm
    Matrix covariance_rate;  // δC' = covariance_rate · δC (for δC commuting with Σ)
};

struct MomentSample {
    double t = 0.0;
    MomentState state;
};

using MomentTrajectory = std::vector<MomentSample>;

[[nodiscard]] MomentRates moment_rhs(const MomentState& state, const Vector& y,
                                     const StabilizationParams& params);

/// Jacobian of moment_rhs at the target equilibrium (m, C) = (y, 0):
/// mean block −(1−α)Σ, covariance block δC ↦ −(1−α)(ΣδC + δCΣ), reported
/// as −2(1−α)Σ.
[[nodiscard]] LinearizedRates linearized_rates(const StabilizationParams& params);

/// Fixed-step RK4, sampled at t = 0, every trace_stride steps and at
/// t_final. C is re-symmetrized after every step; a minimum eigenvalue below
/// −1e-8·‖C‖ or non-finite state throws DivergenceError.
[[nodiscard]] MomentTrajectory integrate_moments(const MomentState& state0, const Vector& y,
                                                 const StabilizationParams& params,
                                                 const FlowConfig& cfg);

/// Trajectory table: t, m_0..m_{d−1}, C_0_0..C_{d−1}_{d−1} (row-major), c_norm.
[[nodiscard]] csv::Table moment_table(const MomentTrajectory& trajectory);

}  // namespace enki
