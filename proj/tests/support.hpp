#pragma once

#include "enki/ensemble.hpp"
#include "enki/forward_model.hpp"
#include "enki/models.hpp"

namespace enki::test {

// Scalar instance G = Γ = 1, y = 1 used by the hand-checked oracles.
inline ForwardModel identity1() { return ForwardModel::linear(Matrix::Identity(1, 1), "identity"); }

inline Observation scalar_obs(double y) {
    return Observation(Vector::Constant(1, y), NoiseModel::isotropic(1, 1.0));
}

inline Ensemble scalar_ensemble(std::initializer_list<double> values) {
    Matrix m(1, static_cast<Index>(values.size()));
    Index j = 0;
    for (double v : values) m(0, j++) = v;
    return Ensemble(m);
}

inline Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> n01;
    Matrix m(rows, cols);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = n01(rng);
    return m;
}

}  // namespace enki::test
