#include "support.hpp"

#include "enki/error.hpp"
#include "enki/moments.hpp"

#include <doctest.h>

#include <cmath>

using namespace enki;

namespace {

FlowConfig horizon(double t, double step, int stride) {
    FlowConfig c;
    c.t_final = t;
    c.step = step;
    c.trace_stride = stride;
    return c;
}

}  // namespace

TEST_CASE("vanilla covariance decays as 1/(1+2t)") {
    const MomentState s0{Vector::Zero(1), Matrix::Identity(1, 1)};
    const auto traj = integrate_moments(s0, Vector::Ones(1), StabilizationParams::vanilla(1),
                                        horizon(10.0, 1e-3, 1000));
    for (const auto& s : traj) {
        CHECK(std::abs(s.state.c(0, 0) - 1.0 / (1.0 + 2.0 * s.t)) < 1e-6);
        CHECK(std::abs(s.state.m(0) - (1.0 - 1.0 / std::sqrt(1.0 + 2.0 * s.t))) < 1e-6);
    }
    CHECK(traj.back().t == doctest::Approx(10.0));
}

TEST_CASE("right-hand side") {
    const StabilizationParams p(0.5, 0.0, 2.0 * Matrix::Identity(1, 1));
    const MomentState s{Vector::Constant(1, 0.0), Matrix::Constant(1, 1, 3.0)};
    const MomentRates r = moment_rhs(s, Vector::Ones(1), p);
    // dm = (C + (1−α)Σ)(y − m) = 4, dC = −2C² − 2(1−α)ΣC = −18 − 6
    CHECK(r.dm(0) == doctest::Approx(4.0));
    CHECK(r.dc(0, 0) == doctest::Approx(-24.0));

    const MomentState eq{Vector::Ones(1), Matrix::Zero(1, 1)};
    const MomentRates zero = moment_rhs(eq, Vector::Ones(1), p);
    CHECK(zero.dm.norm() == 0.0);
    CHECK(zero.dc.norm() == 0.0);
    CHECK_THROWS_AS((void)moment_rhs(eq, Vector::Ones(2), p), DimensionError);
}

TEST_CASE("covariance stays symmetric") {
    Matrix c(2, 2);
    c << 2, 0.5, 0.5, 1;
    Matrix sigma(2, 2);
    sigma << 1, 0.3, 0.3, 2;
    const auto traj = integrate_moments({Vector::Zero(2), c}, Vector::Ones(2),
                                        StabilizationParams(0.0, 0.0, sigma), horizon(1.0, 1e-2, 10));
    for (const auto& s : traj) CHECK((s.state.c - s.state.c.transpose()).norm() == 0.0);
}

TEST_CASE("linearized rates at the target") {
    const LinearizedRates r = linearized_rates(StabilizationParams(0.0, 0.0, Matrix::Identity(1, 1)));
    CHECK(r.mean_rate(0, 0) == doctest::Approx(-1.0));
    CHECK(r.covariance_rate(0, 0) == doctest::Approx(-2.0));
    const LinearizedRates v = linearized_rates(StabilizationParams::vanilla(2));
    CHECK(v.mean_rate.norm() == 0.0);
    CHECK(v.covariance_rate.norm() == 0.0);
}

TEST_CASE("measured decay near equilibrium matches the linearization") {
    const StabilizationParams p(0.0, 0.0, Matrix::Identity(1, 1));
    const MomentState s0{Vector::Constant(1, 1.0 + 1e-6), Matrix::Constant(1, 1, 1e-6)};
    const auto traj = integrate_moments(s0, Vector::Ones(1), p, horizon(3.0, 1e-3, 3000));
    const auto& a = traj.front();
    const auto& b = traj.back();
    const double mean_rate = std::log(std::abs(b.state.m(0) - 1.0) / 1e-6) / (b.t - a.t);
    const double cov_rate = std::log(b.state.c(0, 0) / 1e-6) / (b.t - a.t);
    const LinearizedRates lin = linearized_rates(p);
    CHECK(mean_rate == doctest::Approx(lin.mean_rate(0, 0)).epsilon(1e-3));
    CHECK(cov_rate == doctest::Approx(lin.covariance_rate(0, 0)).epsilon(1e-3));
}

TEST_CASE("trajectory table") {
    const auto traj = integrate_moments({Vector::Zero(2), Matrix::Identity(2, 2)}, Vector::Ones(2),
                                        StabilizationParams::inflated(2), horizon(0.5, 0.1, 1));
    const csv::Table t = moment_table(traj);
    CHECK(t.header == std::vector<std::string>{"t", "m_0", "m_1", "C_0_0", "C_0_1", "C_1_0",
                                               "C_1_1", "c_norm"});
    CHECK(t.rows.size() == traj.size());
}
