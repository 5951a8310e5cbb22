#pragma once

// Benchmark forward models and noisy-data synthesis.

#include "enki/ensemble.hpp"
#include "enki/forward_model.hpp"

#include <cstdint>
#include <memory>
#include <utility>

namespace enki {

/// Three-point finite-difference discretization of −p″ + p = u on (0, π)
/// with p(0) = p(π) = 0, on the d interior nodes x_i = i·h, h = π/(d+1).
///
/// A = (1/h²)·tridiag(−1, 2, −1) + I is SPD; its Thomas factorization is
/// computed once and shared by every copy and every model built from it.
class EllipticProblem {
public:
    /// Throws ConfigError for d < 2.
    explicit EllipticProblem(Index d);

    [[nodiscard]] Index dim() const noexcept { return dim_; }
    [[nodiscard]] double mesh_width() const noexcept { return h_; }
    [[nodiscard]] Vector grid() const;

    /// Dense A (tests and diagnostics only).
    [[nodiscard]] Matrix system_matrix() const;
    /// A·p
    [[nodiscard]] Vector apply_operator(const Vector& p) const;
    /// A⁻¹·rhs via the cached factorization, O(d).
    [[nodiscard]] Vector solve(const Vector& rhs) const;
    /// Dense A⁻¹ assembled column by column.
    [[nodiscard]] Matrix inverse() const;

    /// Forward map u ↦ A⁻¹u (K = d). Linear and self-adjoint.
    [[nodiscard]] ForwardModel model() const;

private:
    struct Factorization;

    Index dim_;
    double h_;
    std::shared_ptr<const Factorization> factor_;
};

[[nodiscard]] ForwardModel build_elliptic(Index d);

/// The two Gaussian-bump objectives on R² (K = 1):
///   G₁(u) = 1 − exp(−|u − c|²),  G₂(u) = 1 − exp(−|u + c|²),  c = (1/√2, 1/√2).
[[nodiscard]] std::pair<ForwardModel, ForwardModel> deb_pair();

/// y = G(truth) + η with η_i ~ N(0, γ²) i.i.d. from a generator seeded with
/// `seed`. The noise model is Γ = γ⁻²·I, or Γ = I with noise_free set when γ = 0.
[[nodiscard]] Observation synthesize_observation(const ForwardModel& model, const Vector& truth,
                                                 double gamma, std::uint64_t seed);

/// Standard-normal or uniform initial ensembles drawn column by column.
[[nodiscard]] Ensemble sample_normal_ensemble(Index d, Index members, Rng& rng,
                                              double mean = 0.0, double stddev = 1.0);
[[nodiscard]] Ensemble sample_uniform_ensemble(Index d, Index members, Rng& rng, double lo,
                                               double hi);

}  // namespace enki
