#pragma once

// Data-parallel building blocks shared by every solver.
//
// Each kernel has an OpenMP version (parallel over an independent output
// index) and a plain serial version in enki::kernels::reference used by the
// tests and the benchmark. Reductions over ensemble members always run in
// member order inside one thread, so results do not depend on the thread
// count.

#include "enki/forward_model.hpp"
#include "enki/linalg.hpp"

namespace enki::kernels {

/// Threads the parallel kernels will use (1 without OpenMP).
[[nodiscard]] int max_threads();

/// Row means of a d×J matrix: (1/J) Σ_j x_j.
[[nodiscard]] Vector column_mean(const Matrix& x);

/// x − x̄·1ᵀ
[[nodiscard]] Matrix centered(const Matrix& x);

/// (1/J) · devA · devBᵀ for centered d×J and K×J inputs.
[[nodiscard]] Matrix centered_product(const Matrix& dev_a, const Matrix& dev_b);

/// (1/J) · devA · devBᵀ · W. Small ensembles go through devBᵀ·W and never form
/// the d×K block; large ensembles of small states form it once.
[[nodiscard]] Matrix ensemble_apply(const Matrix& dev_a, const Matrix& dev_b, const Matrix& w);

/// Column j of the result is model.apply(u.col(j)).
[[nodiscard]] Matrix evaluate_columns(const ForwardModel& model, const Matrix& u);

/// Same, with the adjoint of a linear model.
[[nodiscard]] Matrix adjoint_columns(const ForwardModel& model, const Matrix& r);

namespace reference {

[[nodiscard]] Vector column_mean(const Matrix& x);
[[nodiscard]] Matrix centered(const Matrix& x);
[[nodiscard]] Matrix centered_product(const Matrix& dev_a, const Matrix& dev_b);
[[nodiscard]] Matrix ensemble_apply(const Matrix& dev_a, const Matrix& dev_b, const Matrix& w);
[[nodiscard]] Matrix evaluate_columns(const ForwardModel& model, const Matrix& u);

}  // namespace reference

}  // namespace enki::kernels
