#pragma once

// Ensemble containers and the statistics every solver variant consumes.
// All covariances use the 1/J normalization (no Bessel correction).

#include "enki/forward_model.hpp"
#include "enki/linalg.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace enki {

/// J particles in R^d stored as the columns of a d×J matrix.
class Ensemble {
public:
    Ensemble() = default;
    /// Throws DimensionError for an empty matrix, InputError for non-finite entries.
    explicit Ensemble(Matrix members);
    static Ensemble from_members(const std::vector<Vector>& members);

    [[nodiscard]] Index dim() const noexcept { return members_.rows(); }
    [[nodiscard]] Index size() const noexcept { return members_.cols(); }
    [[nodiscard]] const Matrix& members() const noexcept { return members_; }
    [[nodiscard]] Vector member(Index j) const { return members_.col(j); }

private:
    Matrix members_;
};

/// Forward evaluations G(u^j), one K-vector per member, as a K×J matrix.
class ResponseSet {
public:
    ResponseSet() = default;
    explicit ResponseSet(Matrix responses);
    static ResponseSet from_responses(const std::vector<Vector>& responses);

    [[nodiscard]] Index dim() const noexcept { return responses_.rows(); }
    [[nodiscard]] Index size() const noexcept { return responses_.cols(); }
    [[nodiscard]] const Matrix& responses() const noexcept { return responses_; }

private:
    Matrix responses_;
};

/// Observation-noise descriptor stored as the precision Γ (η ~ N(0, Γ⁻¹)).
///
/// Γ^{1/2} and Γ^{-1/2} are computed once at construction. The isotropic
/// case Γ = γ⁻²·I never forms a dense matrix.
class NoiseModel {
public:
    NoiseModel() = default;

    /// Γ = γ⁻²·I of size K. γ = 0 is the noise-free convention: Γ = I.
    static NoiseModel isotropic(Index k, double gamma);
    /// Arbitrary symmetric positive-definite precision.
    static NoiseModel from_precision(const Matrix& precision);

    [[nodiscard]] Index dim() const noexcept { return dim_; }
    [[nodiscard]] bool diagonal_fast_path() const noexcept { return isotropic_; }
    /// Noise standard deviation of the isotropic model (0 for noise-free).
    [[nodiscard]] double gamma() const noexcept { return gamma_; }

    [[nodiscard]] Matrix precision() const;
    [[nodiscard]] Matrix covariance() const;

    /// Γ^{1/2}·r, column-wise for matrices.
    [[nodiscard]] Matrix whiten(const Matrix& r) const;
    [[nodiscard]] Vector whiten(const Vector& r) const;
    /// Γ·r
    [[nodiscard]] Matrix apply_precision(const Matrix& r) const;
    [[nodiscard]] Vector apply_precision(const Vector& r) const;
    /// Γ^{-1/2}·z: maps standard normal draws to noise samples.
    [[nodiscard]] Vector color(const Vector& z) const;

private:
    Index dim_ = 0;
    bool isotropic_ = true;
    double gamma_ = 0.0;
    double scale_ = 1.0;  // γ⁻¹ on the fast path
    Matrix precision_;
    Matrix sqrt_precision_;
    Matrix sqrt_covariance_;
};

/// Measured data y with its noise model and synthesis metadata.
struct Observation {
    Vector y;
    NoiseModel noise;
    std::optional<Vector> truth;
    std::optional<std::uint64_t> seed;
    bool noise_free = false;

    Observation() = default;
    /// Throws DimensionError when y and the noise model disagree on K.
    Observation(Vector data, NoiseModel noise_model);

    [[nodiscard]] Index dim() const noexcept { return y.size(); }
};

struct Spread {
    double state = 0.0;     // max_j ‖u^j − ū‖
    double response = 0.0;  // max_j ‖Γ^{1/2}(G(u^j) − Ḡ)‖
};

enum class SpanKind { affine, linear };

[[nodiscard]] Vector ensemble_mean(const Ensemble& ens);
[[nodiscard]] Vector response_mean(const ResponseSet& resp);

/// C_G = (1/J) Σ (u^k − ū)(G(u^k) − Ḡ)ᵀ, d×K.
[[nodiscard]] Matrix cross_covariance(const Ensemble& ens, const ResponseSet& resp);
/// D_G = (1/J) Σ (G(u^k) − Ḡ)(G(u^k) − Ḡ)ᵀ, K×K.
[[nodiscard]] Matrix response_covariance(const ResponseSet& resp);
/// C(U) = (1/J) Σ (u^k − ū)(u^k − ū)ᵀ, d×d.
[[nodiscard]] Matrix state_covariance(const Ensemble& ens);

/// Φ(u) = ½‖Γ^{1/2}(y − G(u))‖².
[[nodiscard]] double misfit(const Vector& u, const Observation& obs, const ForwardModel& model);
/// Same, for an already evaluated G(u).
[[nodiscard]] double misfit_of_response(const Vector& response, const Observation& obs);

[[nodiscard]] Spread spread(const Ensemble& ens, const ResponseSet& resp, const NoiseModel& noise);

/// Largest relative distance of a member of `ens` from the span of `initial`.
/// Residual norm over member norm; 0/0 counts as 0.
[[nodiscard]] double subspace_distance(const Ensemble& ens, const Ensemble& initial,
                                       SpanKind kind = SpanKind::affine);

/// Evaluates the model at every member (parallel over members).
[[nodiscard]] ResponseSet evaluate(const ForwardModel& model, const Ensemble& ens);

}  // namespace enki
