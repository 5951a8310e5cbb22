#include "support.hpp"

#include "enki/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace enki;
using enki::test::random_matrix;

TEST_CASE("forward model contract") {
    const ForwardModel g = ForwardModel::linear(random_matrix(2, 3, 1), "A");
    CHECK(g.is_linear());
    CHECK_THROWS_AS((void)g.apply(Vector::Zero(2)), InputError);
    CHECK_THROWS_AS((void)g.apply(Vector::Constant(3, std::nan(""))), InputError);

    const ForwardModel nan_out(1, 1, [](const Vector&) { return Vector::Constant(1, std::nan("")); });
    CHECK_THROWS_AS((void)nan_out.apply(Vector::Zero(1)), ModelError);
    const ForwardModel wrong_size(1, 2, [](const Vector&) { return Vector::Zero(3); });
    CHECK_THROWS_AS((void)wrong_size.apply(Vector::Zero(1)), ModelError);
    CHECK_FALSE(nan_out.is_linear());
    CHECK_THROWS_AS((void)nan_out.linear_matrix(), ConfigError);
}

TEST_CASE("adjoint of an explicit matrix") {
    const Matrix a = random_matrix(4, 3, 2);
    const ForwardModel g = ForwardModel::linear(a);
    const Vector u = random_matrix(3, 1, 3).col(0);
    const Vector r = random_matrix(4, 1, 4).col(0);
    CHECK(r.dot(g.apply(u)) == doctest::Approx(g.apply_adjoint(r).dot(u)).epsilon(1e-13));
}

TEST_CASE("elliptic operator") {
    const EllipticProblem p(7);
    const double h = std::numbers::pi / 8.0;
    CHECK(p.mesh_width() == doctest::Approx(h));
    CHECK(p.grid()(0) == doctest::Approx(h));
    CHECK(p.grid()(6) == doctest::Approx(7 * h));

    const Matrix a = p.system_matrix();
    CHECK(a(0, 0) == doctest::Approx(2.0 / (h * h) + 1.0));
    CHECK(a(0, 1) == doctest::Approx(-1.0 / (h * h)));
    CHECK(a(0, 2) == 0.0);

    const Vector rhs = random_matrix(7, 1, 5).col(0);
    CHECK((a * p.solve(rhs) - rhs).norm() < 1e-12);
    CHECK((p.apply_operator(rhs) - a * rhs).norm() < 1e-12);
    CHECK((p.inverse() * a - Matrix::Identity(7, 7)).norm() < 1e-12);

    const ForwardModel g = p.model();
    CHECK(g.is_linear());
    CHECK((g.linear_matrix() - p.inverse()).norm() < 1e-14);
    CHECK((g.apply_adjoint(rhs) - g.apply(rhs)).norm() < 1e-14);
    CHECK_THROWS_AS(EllipticProblem(1), ConfigError);
}

TEST_CASE("elliptic solve converges at second order") {
    // −p″ + p = 2 sin x has p = sin x.
    auto error = [](Index d) {
        const EllipticProblem p(d);
        const Vector x = p.grid();
        const Vector exact = x.array().sin().matrix();
        return (p.solve(2.0 * exact) - exact).cwiseAbs().maxCoeff();
    };
    const double e1 = error(31);
    const double e2 = error(63);
    const double e3 = error(127);
    CHECK(std::log2(e1 / e2) == doctest::Approx(2.0).epsilon(0.02));
    CHECK(std::log2(e2 / e3) == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("Deb objectives") {
    const auto [g1, g2] = deb_pair();
    const double c = 1.0 / std::sqrt(2.0);
    const Vector at_c = Vector::Constant(2, c);
    CHECK(g1.apply(at_c)(0) == doctest::Approx(0.0));
    CHECK(g2.apply(at_c)(0) == doctest::Approx(1.0 - std::exp(-4.0)));
    CHECK(g1.apply(Vector::Zero(2))(0) == doctest::Approx(1.0 - std::exp(-1.0)));
    CHECK(g2.apply(-at_c)(0) == doctest::Approx(0.0));
    CHECK(g1.input_dim() == 2);
    CHECK(g1.output_dim() == 1);
}

TEST_CASE("observation synthesis is seeded") {
    const ForwardModel g = ForwardModel::linear(Matrix::Identity(50, 50));
    const Vector truth = Vector::LinSpaced(50, 0, 1);
    const Observation a = synthesize_observation(g, truth, 0.1, 42);
    const Observation b = synthesize_observation(g, truth, 0.1, 42);
    const Observation c = synthesize_observation(g, truth, 0.1, 43);
    CHECK(a.y == b.y);
    CHECK(a.y != c.y);
    CHECK(a.seed == std::optional<std::uint64_t>(42));
    CHECK(a.truth.has_value());
    const Vector noise = a.y - truth;
    const double sd = std::sqrt(noise.squaredNorm() / 50.0);
    CHECK(sd > 0.05);
    CHECK(sd < 0.15);
    CHECK((a.noise.precision() - 100.0 * Matrix::Identity(50, 50)).norm() < 1e-9);

    const Observation exact = synthesize_observation(g, truth, 0.0, 1);
    CHECK(exact.noise_free);
    CHECK(exact.y == truth);
}

TEST_CASE("initial ensembles") {
    Rng rng(3);
    const Ensemble u = sample_uniform_ensemble(2, 1000, rng, -2.0, 2.0);
    CHECK(u.members().minCoeff() >= -2.0);
    CHECK(u.members().maxCoeff() < 2.0);
    Rng a(9), b(9);
    CHECK(sample_normal_ensemble(3, 4, a).members() == sample_normal_ensemble(3, 4, b).members());
}
