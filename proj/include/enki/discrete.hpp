#pragma once

// Discrete ensemble Kalman inversion:
//   u^{j,n+1} = u^{j,n} + C_G (D_G + Γ⁻¹/Δt)⁻¹ (y_j − G(u^{j,n}))

#include "enki/ensemble.hpp"
#include "enki/trace.hpp"

#include <cstdint>

namespace enki {

struct DiscreteConfig {
    double dt = 1.0;
    int max_iter = 100;
    double discrepancy_tau = 1.0;
    /// Add a fresh N(0, Γ⁻¹) draw to y for every member at every iteration.
    bool perturb_observations = false;
    std::uint64_t seed = 0;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

struct DiscreteResult {
    Ensemble ensemble;
    Trace trace;  // time column `iter`; point 0 is the initial ensemble
    int iterations = 0;
    bool discrepancy_reached = false;
};

/// One update of every member. The K×K system is factored once and reused
/// for all J right-hand sides; if the Cholesky factorization fails a jitter
/// of 1e-12·trace/K is added once before giving up with NumericalError.
/// `rng` is required when cfg.perturb_observations is set.
[[nodiscard]] Ensemble discrete_step(const Ensemble& ens, const Observation& obs,
                                     const ForwardModel& model, const DiscreteConfig& cfg,
                                     Rng* rng = nullptr, int iteration = 0);

/// Iterates discrete_step until cfg.max_iter steps have run or the
/// discrepancy ‖Γ^{1/2}(y − G(ū))‖ ≤ τ·√K holds after a step (absolute
/// 1e-10 for noise-free data).
[[nodiscard]] DiscreteResult run_discrete(const Ensemble& ens0, const Observation& obs,
                                          const ForwardModel& model, const DiscreteConfig& cfg);

/// The stopping quantity ‖Γ^{1/2}(y − G(ū))‖ and its threshold.
[[nodiscard]] double discrepancy(const Vector& mean, const Observation& obs,
                                 const ForwardModel& model);
[[nodiscard]] double discrepancy_threshold(const Observation& obs, double tau);

}  // namespace enki
