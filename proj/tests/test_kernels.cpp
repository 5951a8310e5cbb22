#include "support.hpp"

#include "enki/error.hpp"
#include "enki/kernels.hpp"

#include <doctest.h>

#ifdef _OPENMP
#include <omp.h>
#endif

using namespace enki;
using enki::test::random_matrix;

namespace {

ForwardModel cubic(Index d) {
    return ForwardModel(d, d, [](const Vector& u) { return Vector(u.array().cube() + u.array()); },
                        "cubic");
}

// Runs f with the given thread count and restores the previous setting.
template <class F>
auto with_threads(int n, F f) {
#ifdef _OPENMP
    const int saved = omp_get_max_threads();
    omp_set_num_threads(n);
    auto out = f();
    omp_set_num_threads(saved);
    return out;
#else
    (void)n;
    return f();
#endif
}

}  // namespace

TEST_CASE("parallel kernels agree with the serial reference") {
    for (auto [d, k, j] : {std::tuple{3, 2, 5}, {64, 64, 20}, {1, 1, 5000}, {40, 3, 200}}) {
        CAPTURE(d);
        CAPTURE(j);
        const Matrix u = random_matrix(d, j, 100 + d);
        const Matrix g = random_matrix(k, j, 200 + d);
        const Matrix w = random_matrix(k, j, 300 + d);
        CHECK((kernels::column_mean(u) - kernels::reference::column_mean(u)).norm() < 1e-12);
        const Matrix du = kernels::centered(u);
        const Matrix dg = kernels::centered(g);
        CHECK((du - kernels::reference::centered(u)).norm() < 1e-12);
        CHECK((kernels::centered_product(du, dg) - kernels::reference::centered_product(du, dg))
                  .norm() < 1e-10);
        const Matrix fast = kernels::ensemble_apply(du, dg, w);
        const Matrix slow = kernels::reference::ensemble_apply(du, dg, w);
        CHECK((fast - slow).norm() <= 1e-10 * (1.0 + slow.norm()));
    }
}

TEST_CASE("ensemble_apply equals the explicit covariance product") {
    const Matrix du = kernels::centered(random_matrix(5, 30, 1));
    const Matrix dg = kernels::centered(random_matrix(4, 30, 2));
    const Matrix w = random_matrix(4, 30, 3);
    const Matrix explicit_product = (du * dg.transpose() / 30.0) * w;
    CHECK((kernels::ensemble_apply(du, dg, w) - explicit_product).norm() < 1e-12);
}

TEST_CASE("model evaluation matches the reference loop") {
    const Matrix u = random_matrix(6, 33, 7);
    const ForwardModel g = cubic(6);
    CHECK(kernels::evaluate_columns(g, u) == kernels::reference::evaluate_columns(g, u));
}

TEST_CASE("results do not depend on the thread count") {
    const Matrix u = random_matrix(50, 40, 11);
    const Matrix g = random_matrix(30, 40, 12);
    const Matrix w = random_matrix(30, 40, 13);
    auto run = [&] {
        const Matrix du = kernels::centered(u);
        const Matrix dg = kernels::centered(g);
        return std::tuple{kernels::column_mean(u), kernels::centered_product(du, dg),
                          kernels::ensemble_apply(du, dg, w)};
    };
    const auto one = with_threads(1, run);
    const auto four = with_threads(4, run);
    CHECK(std::get<0>(one) == std::get<0>(four));
    CHECK(std::get<1>(one) == std::get<1>(four));
    CHECK(std::get<2>(one) == std::get<2>(four));
}

TEST_CASE("exceptions inside the parallel loop reach the caller") {
    const ForwardModel bad(2, 1, [](const Vector& u) -> Vector {
        if (u(0) > 0.5) throw std::runtime_error("boom");
        return Vector::Zero(1);
    });
    Matrix u = Matrix::Zero(2, 16);
    u(0, 9) = 1.0;
    CHECK_THROWS_AS((void)kernels::evaluate_columns(bad, u), ModelError);
}

TEST_CASE("mismatched member counts") {
    CHECK_THROWS_AS((void)kernels::centered_product(Matrix::Zero(2, 3), Matrix::Zero(2, 4)),
                    DimensionError);
    CHECK_THROWS_AS(
        (void)kernels::ensemble_apply(Matrix::Zero(2, 3), Matrix::Zero(2, 3), Matrix::Zero(3, 3)),
        DimensionError);
}
