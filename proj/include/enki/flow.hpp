#pragma once

// Continuous-time ensemble dynamics and their fixed-step RK4 integrator.
//
//   vanilla:     du^j/dt = C_G(U) Γ (y − G(u^j))
//   stabilized:  du^j/dt = −C̃(U) ∇Φ(u^j) + β C̃(U)(u^j − ū),
//                C̃(U) = C(U) + (1−α)Σ,  ∇Φ(u) = GᵀΓ(Gu − y)
//
// Right-hand sides are returned as d×J matrices, column j being du^j/dt.

#include "enki/ensemble.hpp"
#include "enki/trace.hpp"

#include <functional>
#include <optional>

namespace enki {

class StabilizationParams {
public:
    /// Throws ConfigError unless sigma is symmetric (1e-12 relative) and
    /// positive definite.
    StabilizationParams(double alpha, double beta, Matrix sigma);

    /// α = 1, β = 0: reproduces the vanilla gradient flow.
    static StabilizationParams vanilla(Index d);
    /// α = 0, β = 0, Σ = I.
    static StabilizationParams inflated(Index d);

    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double beta() const noexcept { return beta_; }
    [[nodiscard]] const Matrix& sigma() const noexcept { return sigma_; }
    [[nodiscard]] Index dim() const noexcept { return sigma_.rows(); }
    /// (1−α)·Σ·x, O(d) per column when Σ is diagonal.
    [[nodiscard]] Matrix apply_inflation(const Matrix& x) const;

private:
    double alpha_;
    double beta_;
    Matrix sigma_;
    bool sigma_diagonal_ = false;
};

struct FlowConfig {
    double t_final = 1.0;
    double step = 1e-2;
    int trace_stride = 1;
    /// Vanilla flow with a linear model only: reject a step that raises
    /// Φ(ū) by more than 1e-10·(1+Φ), retry it as two half steps, then abort.
    bool monotonicity_guard = false;

    void validate() const;
    /// Number of RK4 steps; the step is shortened to t_final/steps so the
    /// horizon is hit exactly.
    [[nodiscard]] long steps() const;
};

enum class FlowKind { vanilla, stabilized };

struct FlowResult {
    Ensemble ensemble;
    Trace trace;
    long steps = 0;
    int guard_retries = 0;
};

/// Called at every trace point with (t, ensemble).
using FlowObserver = std::function<void(double, const Ensemble&)>;

[[nodiscard]] Matrix vanilla_rhs(const Ensemble& ens, const Observation& obs,
                                 const ForwardModel& model);

/// ConfigError if the model is not linear or dimensions disagree with params.
[[nodiscard]] Matrix stabilized_rhs(const Ensemble& ens, const Observation& obs,
                                    const ForwardModel& model, const StabilizationParams& params);

/// Classical RK4 with fixed step. Throws DivergenceError (with the time) on
/// non-finite state or when the monotonicity guard aborts.
[[nodiscard]] FlowResult integrate(FlowKind kind, const Ensemble& ens0, const Observation& obs,
                                   const ForwardModel& model,
                                   const std::optional<StabilizationParams>& params,
                                   const FlowConfig& cfg, const FlowObserver& observer = {});

}  // namespace enki
