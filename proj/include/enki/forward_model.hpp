#pragma once

#include "enki/linalg.hpp"

#include <functional>
#include <memory>
#include <string>

namespace enki {

/// A forward operator u ↦ G(u) from R^d to R^K.
///
/// Linear models additionally carry an adjoint (r ↦ Gᵀr) and can produce
/// their K×d matrix. The matrix may be materialized lazily (the elliptic
/// model only builds its dense inverse on request); the result is cached and
/// shared between copies. Evaluation is pure and reentrant.
class ForwardModel {
public:
    using ApplyFn = std::function<Vector(const Vector&)>;
    using MatrixFn = std::function<Matrix()>;

    ForwardModel() = default;

    /// Nonlinear (or matrix-free) model.
    ForwardModel(Index input_dim, Index output_dim, ApplyFn apply, std::string name = "model");

    /// Exactly linear model given by an explicit K×d matrix.
    static ForwardModel linear(Matrix g, std::string name = "linear");

    /// Linear model given matrix-free: apply, adjoint and a (possibly
    /// expensive) factory for the dense matrix.
    static ForwardModel linear_operator(Index input_dim, Index output_dim, ApplyFn apply,
                                        ApplyFn adjoint, MatrixFn materialize,
                                        std::string name = "linear");

    [[nodiscard]] Index input_dim() const noexcept { return input_dim_; }
    [[nodiscard]] Index output_dim() const noexcept { return output_dim_; }
    [[nodiscard]] const std::string& name() const noexcept { return name_; }
    [[nodiscard]] bool is_linear() const noexcept { return static_cast<bool>(adjoint_); }

    /// G(u). Throws InputError for a wrong-sized or non-finite u and
    /// ModelError when the evaluation fails or returns garbage.
    [[nodiscard]] Vector apply(const Vector& u) const;

    /// Gᵀr; linear models only.
    [[nodiscard]] Vector apply_adjoint(const Vector& r) const;

    /// The K×d matrix of a linear model; ConfigError otherwise.
    [[nodiscard]] const Matrix& linear_matrix() const;

private:
    struct MatrixCache;

    Index input_dim_ = 0;
    Index output_dim_ = 0;
    std::string name_;
    ApplyFn apply_;
    ApplyFn adjoint_;
    std::shared_ptr<MatrixCache> matrix_;
};

}  // namespace enki
