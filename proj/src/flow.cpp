#include "enki/flow.hpp"

#include "enki/error.hpp"
#include "enki/kernels.hpp"

#include <cmath>
#include <sstream>
#include <string>

namespace enki {

StabilizationParams::StabilizationParams(double alpha, double beta, Matrix sigma)
    : alpha_(alpha), beta_(beta), sigma_(std::move(sigma)) {
    if (!std::isfinite(alpha_) || !std::isfinite(beta_)) {
        throw ConfigError("alpha and beta must be finite");
    }
    if (sigma_.rows() != sigma_.cols() || sigma_.rows() < 1) {
        throw ConfigError("sigma must be square and non-empty");
    }
    if (!sigma_.allFinite()) throw ConfigError("sigma has non-finite entries");
    const double norm = sigma_.cwiseAbs().maxCoeff();
    if ((sigma_ - sigma_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * norm) {
        throw ConfigError("sigma is not symmetric");
    }
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(sigma_, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success || eig.eigenvalues().minCoeff() <= 0.0) {
        throw ConfigError("sigma is not positive definite");
    }
    const Matrix off = sigma_ - Matrix(sigma_.diagonal().asDiagonal());
    sigma_diagonal_ = off.cwiseAbs().maxCoeff() == 0.0;
}

StabilizationParams StabilizationParams::vanilla(Index d) {
    return {1.0, 0.0, Matrix::Identity(d, d)};
}

StabilizationParams StabilizationParams::inflated(Index d) {
    return {0.0, 0.0, Matrix::Identity(d, d)};
}

Matrix StabilizationParams::apply_inflation(const Matrix& x) const {
    const double w = 1.0 - alpha_;
    if (sigma_diagonal_) return (w * sigma_.diagonal()).asDiagonal() * x;
    return w * (sigma_ * x);
}

void FlowConfig::validate() const {
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw ConfigError("t_final must be > 0");
    if (!(step > 0.0) || !std::isfinite(step)) throw ConfigError("step must be > 0");
    if (trace_stride < 1) throw ConfigError("trace_stride must be >= 1");
}

long FlowConfig::steps() const {
    validate();
    const double n = std::ceil(t_final / step - 1e-9);
    return std::max(1L, static_cast<long>(n));
}

namespace {

void check_dims(Index d, const Observation& obs, const ForwardModel& model) {
    if (model.input_dim() != d) {
        throw DimensionError("model '" + model.name() + "' expects dimension " +
                             std::to_string(model.input_dim()) + ", ensemble has " +
                             std::to_string(d));
    }
    if (model.output_dim() != obs.dim()) {
        throw DimensionError("model output dimension differs from observation dimension");
    }
}

Matrix vanilla_rhs_raw(const Matrix& u, const Observation& obs, const ForwardModel& model) {
    const Matrix g = kernels::evaluate_columns(model, u);
    const Matrix weighted = obs.noise.apply_precision(Matrix((-g).colwise() + obs.y));
    return kernels::ensemble_apply(kernels::centered(u), kernels::centered(g), weighted);
}

Matrix stabilized_rhs_raw(const Matrix& u, const Observation& obs, const ForwardModel& model,
                          const StabilizationParams& params) {
    const Matrix residual = kernels::evaluate_columns(model, u).colwise() - obs.y;
    const Matrix grad = kernels::adjoint_columns(model, obs.noise.apply_precision(residual));
    const Matrix dev = kernels::centered(u);
    Matrix v = -grad;
    if (params.beta() != 0.0) v += params.beta() * dev;
    Matrix out = kernels::ensemble_apply(dev, dev, v);
    if (params.alpha() != 1.0) out += params.apply_inflation(v);
    return out;
}

void check_stabilized(Index d, const Observation& obs, const ForwardModel& model,
                      const StabilizationParams& params) {
    if (!model.is_linear()) {
        throw ConfigError("stabilized dynamics require a linear model; '" + model.name() +
                          "' is not linear");
    }
    check_dims(d, obs, model);
    if (params.dim() != d) throw DimensionError("sigma dimension differs from state dimension");
}

double mean_misfit(const Matrix& u, const Observation& obs, const ForwardModel& model) {
    return misfit(kernels::column_mean(u), obs, model);
}

}  // namespace

Matrix vanilla_rhs(const Ensemble& ens, const Observation& obs, const ForwardModel& model) {
    check_dims(ens.dim(), obs, model);
    return vanilla_rhs_raw(ens.members(), obs, model);
}

Matrix stabilized_rhs(const Ensemble& ens, const Observation& obs, const ForwardModel& model,
                      const StabilizationParams& params) {
    check_stabilized(ens.dim(), obs, model, params);
    return stabilized_rhs_raw(ens.members(), obs, model, params);
}

FlowResult integrate(FlowKind kind, const Ensemble& ens0, const Observation& obs,
                     const ForwardModel& model, const std::optional<StabilizationParams>& params,
                     const FlowConfig& cfg, const FlowObserver& observer) {
    cfg.validate();
    const Index d = ens0.dim();
    std::optional<StabilizationParams> stab;
    if (kind == FlowKind::stabilized) {
        stab = params ? *params : StabilizationParams::inflated(d);
        check_stabilized(d, obs, model, *stab);
    } else {
        check_dims(d, obs, model);
    }

    auto rhs = [&](const Matrix& u) -> Matrix {
        return kind == FlowKind::vanilla ? vanilla_rhs_raw(u, obs, model)
                                         : stabilized_rhs_raw(u, obs, model, *stab);
    };
    auto rk4 = [&](const Matrix& u, double h) -> Matrix {
        const Matrix k1 = rhs(u);
        const Matrix k2 = rhs(u + (0.5 * h) * k1);
        const Matrix k3 = rhs(u + (0.5 * h) * k2);
        const Matrix k4 = rhs(u + h * k3);
        return u + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };

    const long n = cfg.steps();
    const double h = cfg.t_final / static_cast<double>(n);
    const bool guard = cfg.monotonicity_guard && kind == FlowKind::vanilla && model.is_linear();

    FlowResult result{ens0, {}, n, 0};
    result.trace.time_column = "t";
    auto record = [&](double t, const Ensemble& e) {
        result.trace.points.push_back(measure(e, obs, model, t));
        if (observer) observer(t, e);
    };
    record(0.0, ens0);

    Matrix u = ens0.members();
    double phi = guard ? mean_misfit(u, obs, model) : 0.0;
    for (long s = 1; s <= n; ++s) {
        const double t = static_cast<double>(s) * h;
        Matrix next;
        try {
            next = rk4(u, h);
            if (!next.allFinite()) throw InputError("non-finite state");
            if (guard) {
                double phi_next = mean_misfit(next, obs, model);
                if (phi_next - phi > 1e-10 * (1.0 + phi)) {
                    ++result.guard_retries;
                    next = rk4(rk4(u, 0.5 * h), 0.5 * h);
                    if (!next.allFinite()) throw InputError("non-finite state");
                    phi_next = mean_misfit(next, obs, model);
                    if (phi_next - phi > 1e-10 * (1.0 + phi)) {
                        std::ostringstream msg;
                        msg.precision(17);
                        msg << "monotonicity guard: misfit of the mean rose from " << phi << " to "
                            << phi_next << " at t=" << t << " (step " << h << ", halved once)";
                        throw DivergenceError(msg.str());
                    }
                }
                phi = phi_next;
            }
        } catch (const InputError& e) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "flow diverged at t=" << t << ": " << e.what();
            throw DivergenceError(msg.str());
        }
        u = std::move(next);
        if (s % cfg.trace_stride == 0 || s == n) record(t, Ensemble(u));
    }
    result.ensemble = Ensemble(std::move(u));
    return result;
}

}  // namespace enki
