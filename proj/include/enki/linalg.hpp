#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace enki {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Generator used for every seeded draw in the library.
using Rng = std::mt19937_64;

/// Identifier written to experiment metadata so runs can be traced to the
/// generator and the normal-deviate transform that produced their data.
inline constexpr const char* kRngAlgorithm = "mt19937_64+std::normal_distribution(libstdc++)";

[[nodiscard]] inline bool all_finite(const Eigen::Ref<const Matrix>& m) {
    return m.allFinite();
}

/// Symmetric part (A + Aᵀ)/2.
[[nodiscard]] inline Matrix symmetrized(const Matrix& a) {
    return 0.5 * (a + a.transpose());
}

}  // namespace enki
