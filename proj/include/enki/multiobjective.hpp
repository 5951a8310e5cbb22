#pragma once

// Weighted-sum scalarization of l competing inverse problems and Pareto
// tracing over the weight simplex.

#include "enki/ensemble.hpp"
#include "enki/flow.hpp"

#include <vector>

namespace enki {

/// Point of the closed simplex {λ ≥ 0, Σλ = 1}.
class WeightVector {
public:
    /// Throws ConfigError for negative entries or |Σλ − 1| > 1e-12.
    explicit WeightVector(Vector lambda);
    /// (t, 1 − t) for the two-objective parameterization.
    static WeightVector pair(double t);

    [[nodiscard]] const Vector& values() const noexcept { return lambda_; }
    [[nodiscard]] Index size() const noexcept { return lambda_.size(); }
    [[nodiscard]] double operator[](Index i) const { return lambda_(i); }

private:
    Vector lambda_;
};

struct MultiObjectiveProblem {
    std::vector<ForwardModel> models;
    std::vector<Vector> data;
    NoiseModel noise;

    /// l ≥ 2 and matching dimensions; throws DimensionError/ConfigError.
    void validate() const;
    [[nodiscard]] Index objectives() const noexcept { return static_cast<Index>(models.size()); }
    [[nodiscard]] Index state_dim() const { return models.front().input_dim(); }
    /// ‖Γ^{1/2}(y_i − G_i(u))‖ for every i.
    [[nodiscard]] Vector objective_values(const Vector& u) const;
};

struct ScalarizedProblem {
    ForwardModel model;
    Observation observation;
};

struct ParetoEntry {
    WeightVector lambda;
    Vector minimizer;
    Vector front_point;
    bool dominated = false;
    double taylor_error = 0.0;  // ‖m(λ_k) − m(λ_{k−1}) − Δλ·∇m(λ_{k−1})‖, 0 for the first
    double gradient_norm = 0.0; // ‖∇m(λ_k)‖ (NaN when not computed)
};

enum class GridKind { adaptive, uniform };

struct ParetoApproximation {
    std::vector<ParetoEntry> entries;
    double delta = 0.0;
    GridKind grid_kind = GridKind::uniform;

    /// lambda, u_0..u_{d−1}, G_1..G_l, dominated, taylor_error
    [[nodiscard]] csv::Table to_table() const;
};

struct WalkOptions {
    double delta = 5e-3;
    double max_step = 0.1;
    double min_step = 1e-4;
    double gradient_floor = 1e-12;
    double fd_step = 1e-3;
    /// Start each λ from the previous λ's final ensemble instead of ens0.
    bool warm_start = false;
};

/// G(·, λ) = Σ λ_i G_i and y = Σ λ_i y_i with the shared noise model. The
/// result is linear iff every component is.
[[nodiscard]] ScalarizedProblem weighted_model(const MultiObjectiveProblem& problem,
                                               const WeightVector& lambda);

/// Final ensemble mean of the vanilla flow on the weighted problem, the
/// m(λ, T) proxy for the scalarized minimizer. Errors are rethrown with λ.
[[nodiscard]] Vector solve_scalarized(const MultiObjectiveProblem& problem,
                                      const WeightVector& lambda, const Ensemble& ens0,
                                      const FlowConfig& cfg);

/// Finite-difference ∇_λ m(λ, T) in the (l−1)-parameter chart
/// λ_l = 1 − Σ_{i<l} λ_i. Central differences with step h, one-sided within
/// h of the simplex boundary. Every probe starts from ens0.
[[nodiscard]] Matrix gradient_m_lambda(const MultiObjectiveProblem& problem,
                                       const WeightVector& lambda, const Ensemble& ens0,
                                       const FlowConfig& cfg, double h);

/// Adaptive λ grid for l = 2 starting at λ = 0: the next step is
/// min(δ/(‖∇m‖ + ε), Δλ_max), clipped at 1. Throws NumericalError when the
/// step falls below Δλ_min.
[[nodiscard]] ParetoApproximation adaptive_walk(const MultiObjectiveProblem& problem,
                                                const Ensemble& ens0, const WalkOptions& opts,
                                                const FlowConfig& cfg);

/// λ_k = k/(n−1), l = 2. Sensitivities and Taylor errors are filled in as
/// for the adaptive walk.
[[nodiscard]] ParetoApproximation uniform_walk(const MultiObjectiveProblem& problem,
                                               const Ensemble& ens0, int n_points,
                                               const FlowConfig& cfg, bool warm_start = false);

/// Flags p dominated iff some q has q ≤ p componentwise with one strict
/// inequality (minimization). O(n log n) for two objectives.
[[nodiscard]] std::vector<bool> dominance_filter(const std::vector<Vector>& points);

/// The O(n²) pairwise definition, any number of objectives.
[[nodiscard]] std::vector<bool> dominance_filter_pairwise(const std::vector<Vector>& points);

}  // namespace enki
