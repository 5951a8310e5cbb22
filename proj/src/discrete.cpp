#include "enki/discrete.hpp"

#include "enki/error.hpp"
#include "enki/kernels.hpp"

#include <cmath>
#include <string>

namespace enki {

void DiscreteConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be > 0");
    if (max_iter < 1) throw ConfigError("max_iter must be >= 1");
    if (!(discrepancy_tau >= 1.0)) throw ConfigError("discrepancy_tau must be >= 1");
}

Ensemble discrete_step(const Ensemble& ens, const Observation& obs, const ForwardModel& model,
                       const DiscreteConfig& cfg, Rng* rng, int iteration) {
    cfg.validate();
    if (model.output_dim() != obs.dim()) {
        throw DimensionError("model output dimension " + std::to_string(model.output_dim()) +
                             " differs from observation dimension " + std::to_string(obs.dim()));
    }
    const Index k = obs.dim();
    const Matrix responses = evaluate(model, ens).responses();
    const Matrix dev_u = kernels::centered(ens.members());
    const Matrix dev_g = kernels::centered(responses);
    const Matrix cg = kernels::centered_product(dev_u, dev_g);
    const Matrix dg = kernels::centered_product(dev_g, dev_g);

    Matrix system = dg + obs.noise.covariance() / cfg.dt;
    Eigen::LLT<Matrix> llt(system);
    if (llt.info() != Eigen::Success) {
        system.diagonal().array() += 1e-12 * system.trace() / static_cast<double>(k);
        llt.compute(system);
        if (llt.info() != Eigen::Success) {
            throw NumericalError("discrete EKI: gain system is not positive definite at iteration " +
                                 std::to_string(iteration));
        }
    }

    Matrix innovations = (-responses).colwise() + obs.y;
    if (cfg.perturb_observations) {
        if (rng == nullptr) throw ConfigError("perturbed observations need a random generator");
        std::normal_distribution<double> normal;
        Vector z(k);
        for (Index j = 0; j < innovations.cols(); ++j) {
            for (Index i = 0; i < k; ++i) z(i) = normal(*rng);
            innovations.col(j) += obs.noise.color(z);
        }
    }
    const Matrix weights = llt.solve(innovations);
    Matrix next = ens.members() + cg * weights;
    if (!next.allFinite()) {
        throw NumericalError("discrete EKI produced non-finite members at iteration " +
                             std::to_string(iteration));
    }
    return Ensemble(std::move(next));
}

double discrepancy(const Vector& mean, const Observation& obs, const ForwardModel& model) {
    return obs.noise.whiten(Vector(obs.y - model.apply(mean))).norm();
}

double discrepancy_threshold(const Observation& obs, double tau) {
    if (obs.noise_free) return 1e-10;
    return tau * std::sqrt(static_cast<double>(obs.dim()));
}

DiscreteResult run_discrete(const Ensemble& ens0, const Observation& obs, const ForwardModel& model,
                            const DiscreteConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    DiscreteResult result{ens0, {}, 0, false};
    result.trace.time_column = "iter";
    result.trace.points.push_back(measure(ens0, obs, model, 0.0));
    const double threshold = discrepancy_threshold(obs, cfg.discrepancy_tau);

    for (int n = 1; n <= cfg.max_iter; ++n) {
        result.ensemble = discrete_step(result.ensemble, obs, model, cfg, &rng, n);
        result.iterations = n;
        result.trace.points.push_back(measure(result.ensemble, obs, model, static_cast<double>(n)));
        if (discrepancy(ensemble_mean(result.ensemble), obs, model) <= threshold) {
            result.discrepancy_reached = true;
            break;
        }
    }
    return result;
}

}  // namespace enki
