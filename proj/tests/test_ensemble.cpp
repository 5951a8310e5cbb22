#include "support.hpp"

#include "enki/error.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace enki;
using enki::test::random_matrix;

TEST_CASE("ensemble construction rejects bad input") {
    CHECK_THROWS_AS(Ensemble(Matrix(0, 0)), DimensionError);
    Matrix m = Matrix::Zero(2, 3);
    m(1, 2) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(Ensemble{m}, InputError);
    CHECK_THROWS_AS(Ensemble::from_members({Vector::Zero(2), Vector::Zero(3)}), DimensionError);
}

TEST_CASE("hand-computed mean and covariances") {
    // members (1,2), (3,4), (5,0): mean (3,2), deviations (−2,0), (0,2), (2,−2)
    const Ensemble ens = Ensemble::from_members(
        {(Vector(2) << 1, 2).finished(), (Vector(2) << 3, 4).finished(),
         (Vector(2) << 5, 0).finished()});
    CHECK(ensemble_mean(ens).isApprox((Vector(2) << 3, 2).finished()));
    Matrix expected(2, 2);
    expected << 8, -4, -4, 8;
    expected /= 3.0;
    CHECK((state_covariance(ens) - expected).norm() < 1e-15);

    // G(u) = u₁ + u₂: responses 3, 7, 5
    const ResponseSet resp = ResponseSet::from_responses(
        {Vector::Constant(1, 3), Vector::Constant(1, 7), Vector::Constant(1, 5)});
    const Matrix cg = cross_covariance(ens, resp);
    // deviations in G: −2, 2, 0
    CHECK(cg(0, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(cg(1, 0) == doctest::Approx(4.0 / 3.0).epsilon(1e-15));
    CHECK(response_covariance(resp)(0, 0) == doctest::Approx(8.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("cross covariance of a linear model is C·Aᵀ") {
    const Matrix a = random_matrix(3, 4, 5);
    const Ensemble ens(random_matrix(4, 9, 6));
    const ResponseSet resp(a * ens.members());
    const Matrix c = state_covariance(ens);
    CHECK((cross_covariance(ens, resp) - c * a.transpose()).norm() < 1e-12);
    CHECK((response_covariance(resp) - a * c * a.transpose()).norm() < 1e-12);
}

TEST_CASE("statistics are translation invariant") {
    const Matrix u = random_matrix(3, 7, 8);
    const Vector shift = random_matrix(3, 1, 9).col(0) * 100.0;
    const Ensemble a(u);
    const Ensemble b(Matrix(u.colwise() + shift));
    CHECK((state_covariance(a) - state_covariance(b)).norm() < 1e-11);
    CHECK((ensemble_mean(b) - ensemble_mean(a) - shift).norm() < 1e-12);
}

TEST_CASE("shape mismatches are dimension errors") {
    const Ensemble ens(random_matrix(2, 4, 1));
    CHECK_THROWS_AS((void)cross_covariance(ens, ResponseSet(Matrix::Zero(1, 5))), DimensionError);
    CHECK_THROWS_AS(Observation(Vector::Zero(3), NoiseModel::isotropic(2, 1.0)), DimensionError);
}

TEST_CASE("noise model") {
    SUBCASE("isotropic precision is gamma^-2") {
        const NoiseModel n = NoiseModel::isotropic(3, 0.5);
        CHECK(n.diagonal_fast_path());
        CHECK((n.precision() - 4.0 * Matrix::Identity(3, 3)).norm() < 1e-15);
        CHECK((n.whiten(Vector(Vector::Ones(3))) - 2.0 * Vector::Ones(3)).norm() < 1e-15);
        CHECK((n.color(Vector(Vector::Ones(3))) - 0.5 * Vector::Ones(3)).norm() < 1e-15);
    }
    SUBCASE("gamma zero means identity weighting") {
        const NoiseModel n = NoiseModel::isotropic(2, 0.0);
        CHECK((n.precision() - Matrix::Identity(2, 2)).norm() == 0.0);
    }
    SUBCASE("dense precision square roots") {
        Matrix p(2, 2);
        p << 4, 1, 1, 3;
        const NoiseModel n = NoiseModel::from_precision(p);
        const Matrix w = n.whiten(Matrix(Matrix::Identity(2, 2)));
        CHECK((w.transpose() * w - p).norm() < 1e-12);
        CHECK((n.covariance() * p - Matrix::Identity(2, 2)).norm() < 1e-12);
        const Vector z = (Vector(2) << 0.3, -1.2).finished();
        CHECK((n.whiten(n.color(z)) - z).norm() < 1e-12);
    }
    SUBCASE("rejects indefinite or negative input") {
        Matrix p(2, 2);
        p << 1, 2, 2, 1;
        CHECK_THROWS_AS(NoiseModel::from_precision(p), ConfigError);
        CHECK_THROWS_AS(NoiseModel::isotropic(2, -1.0), ConfigError);
    }
}

TEST_CASE("misfit and spread") {
    const ForwardModel g = test::identity1();
    const Observation obs(Vector::Constant(1, 1.0), NoiseModel::isotropic(1, 0.5));
    // ½‖2·(1 − 3)‖² = 8
    CHECK(misfit(Vector::Constant(1, 3.0), obs, g) == doctest::Approx(8.0));
    const Ensemble ens = test::scalar_ensemble({0.0, 2.0, 4.0});
    const Spread s = spread(ens, evaluate(g, ens), obs.noise);
    CHECK(s.state == doctest::Approx(2.0));
    CHECK(s.response == doctest::Approx(4.0));
}

TEST_CASE("subspace distance") {
    Matrix init(3, 3);
    init << 0, 1, 2,
            0, 1, 2,
            1, 1, 1;
    const Ensemble e0(init);
    SUBCASE("members of the initial affine hull are at distance zero") {
        Matrix inside(3, 2);
        inside << 5, -3, 5, -3, 1, 1;
        CHECK(subspace_distance(Ensemble(inside), e0) < 1e-14);
    }
    SUBCASE("a member off the hull") {
        Matrix off(3, 1);
        off << 1, -1, 1;  // orthogonal to direction (1,1,0) from the offset (0,0,1)
        const double expected = std::sqrt(2.0) / std::sqrt(3.0);
        CHECK(subspace_distance(Ensemble(off), e0) == doctest::Approx(expected));
    }
    SUBCASE("linear span contains the offset direction") {
        Matrix pt(3, 1);
        pt << 0, 0, 2;
        CHECK(subspace_distance(Ensemble(pt), e0, SpanKind::linear) < 1e-14);
        CHECK(subspace_distance(Ensemble(pt), e0, SpanKind::affine) > 0.1);
    }
}
