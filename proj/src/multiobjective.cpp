#include "enki/multiobjective.hpp"

#include "enki/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

namespace enki {

// ---------------------------------------------------------------------------
// WeightVector / problem

WeightVector::WeightVector(Vector lambda) : lambda_(std::move(lambda)) {
    if (lambda_.size() < 1) throw ConfigError("weight vector is empty");
    if (!lambda_.allFinite() || lambda_.minCoeff() < 0.0) {
        throw ConfigError("weights must be finite and non-negative");
    }
    if (std::abs(lambda_.sum() - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "weights must sum to 1, got " << lambda_.sum();
        throw ConfigError(msg.str());
    }
}

WeightVector WeightVector::pair(double t) {
    Vector v(2);
    v << t, 1.0 - t;
    return WeightVector(std::move(v));
}

void MultiObjectiveProblem::validate() const {
    if (models.size() < 2) throw ConfigError("multi-objective problem needs at least two models");
    if (data.size() != models.size()) {
        throw DimensionError("need one data vector per model");
    }
    const Index d = models.front().input_dim();
    const Index k = models.front().output_dim();
    for (std::size_t i = 0; i < models.size(); ++i) {
        if (models[i].input_dim() != d || models[i].output_dim() != k) {
            throw DimensionError("model " + std::to_string(i) + " has incompatible dimensions");
        }
        if (data[i].size() != k) throw DimensionError("data " + std::to_string(i) + " has wrong length");
    }
    if (noise.dim() != k) throw DimensionError("noise model dimension differs from K");
}

Vector MultiObjectiveProblem::objective_values(const Vector& u) const {
    Vector out(objectives());
    for (Index i = 0; i < objectives(); ++i) {
        const auto ui = static_cast<std::size_t>(i);
        out(i) = noise.whiten(Vector(data[ui] - models[ui].apply(u))).norm();
    }
    return out;
}

ScalarizedProblem weighted_model(const MultiObjectiveProblem& problem, const WeightVector& lambda) {
    problem.validate();
    if (lambda.size() != problem.objectives()) {
        throw DimensionError("weight vector has " + std::to_string(lambda.size()) +
                             " entries for " + std::to_string(problem.objectives()) + " models");
    }
    const Vector w = lambda.values();
    const auto models = problem.models;
    Vector y = Vector::Zero(problem.data.front().size());
    for (std::size_t i = 0; i < models.size(); ++i) y += w(static_cast<Index>(i)) * problem.data[i];

    const bool linear = std::all_of(models.begin(), models.end(),
                                    [](const ForwardModel& m) { return m.is_linear(); });
    const Index d = models.front().input_dim();
    const Index k = models.front().output_dim();
    auto apply = [models, w, k](const Vector& u) {
        Vector out = Vector::Zero(k);
        for (std::size_t i = 0; i < models.size(); ++i) {
            const double wi = w(static_cast<Index>(i));
            if (wi != 0.0) out += wi * models[i].apply(u);
        }
        return out;
    };

    ForwardModel model;
    if (linear) {
        auto adjoint = [models, w, d](const Vector& r) {
            Vector out = Vector::Zero(d);
            for (std::size_t i = 0; i < models.size(); ++i) {
                const double wi = w(static_cast<Index>(i));
                if (wi != 0.0) out += wi * models[i].apply_adjoint(r);
            }
            return out;
        };
        auto materialize = [models, w, d, k] {
            Matrix g = Matrix::Zero(k, d);
            for (std::size_t i = 0; i < models.size(); ++i) {
                g += w(static_cast<Index>(i)) * models[i].linear_matrix();
            }
            return g;
        };
        model = ForwardModel::linear_operator(d, k, apply, adjoint, materialize, "weighted");
    } else {
        model = ForwardModel(d, k, apply, "weighted");
    }
    return {std::move(model), Observation(std::move(y), problem.noise)};
}

// ---------------------------------------------------------------------------
// Scalarized solves and sensitivities

namespace {

std::string describe(const WeightVector& lambda) {
    std::ostringstream s;
    s.precision(17);
    s << "lambda=(";
    for (Index i = 0; i < lambda.size(); ++i) s << (i ? ", " : "") << lambda[i];
    s << ")";
    return s.str();
}

Ensemble solve_ensemble(const MultiObjectiveProblem& problem, const WeightVector& lambda,
                        const Ensemble& ens0, const FlowConfig& cfg) {
    const ScalarizedProblem sp = weighted_model(problem, lambda);
    try {
        return integrate(FlowKind::vanilla, ens0, sp.observation, sp.model, std::nullopt, cfg)
            .ensemble;
    } catch (const DivergenceError& e) {
        throw DivergenceError(describe(lambda) + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(describe(lambda) + ": " + e.what());
    }
}

// λ from the first l−1 coordinates; nullopt when outside the simplex.
std::optional<WeightVector> from_chart(const Vector& theta) {
    const Index l = theta.size() + 1;
    Vector v(l);
    v.head(l - 1) = theta;
    v(l - 1) = 1.0 - theta.sum();
    // Snap roundoff at the boundary.
    for (Index i = 0; i < l; ++i) {
        if (v(i) < 0.0 && v(i) > -1e-14) v(i) = 0.0;
    }
    if (v.minCoeff() < 0.0) return std::nullopt;
    v(l - 1) = 1.0 - v.head(l - 1).sum();
    if (v(l - 1) < 0.0) v(l - 1) = 0.0;
    try {
        return WeightVector(v);
    } catch (const ConfigError&) {
        return std::nullopt;
    }
}

Vector chart(const WeightVector& lambda) {
    return lambda.values().head(lambda.size() - 1);
}

Matrix gradient_from(const MultiObjectiveProblem& problem, const WeightVector& lambda,
                     const Vector& center_m, const Ensemble& ens0, const FlowConfig& cfg,
                     double h) {
    const Vector theta = chart(lambda);
    Matrix grad(problem.state_dim(), theta.size());
    for (Index i = 0; i < theta.size(); ++i) {
        Vector plus = theta;
        Vector minus = theta;
        plus(i) += h;
        minus(i) -= h;
        const auto lp = from_chart(plus);
        const auto lm = from_chart(minus);
        if (lp && lm) {
            grad.col(i) = (ensemble_mean(solve_ensemble(problem, *lp, ens0, cfg)) -
                           ensemble_mean(solve_ensemble(problem, *lm, ens0, cfg))) /
                          (2.0 * h);
        } else if (lp) {
            grad.col(i) = (ensemble_mean(solve_ensemble(problem, *lp, ens0, cfg)) - center_m) / h;
        } else if (lm) {
            grad.col(i) = (center_m - ensemble_mean(solve_ensemble(problem, *lm, ens0, cfg))) / h;
        } else {
            throw ConfigError("finite-difference step " + std::to_string(h) +
                              " leaves the simplex in both directions at " + describe(lambda));
        }
    }
    return grad;
}

void flag_dominated(ParetoApproximation& approx) {
    std::vector<Vector> points;
    points.reserve(approx.entries.size());
    for (const auto& e : approx.entries) points.push_back(e.front_point);
    const auto flags = dominance_filter(points);
    for (std::size_t i = 0; i < flags.size(); ++i) approx.entries[i].dominated = flags[i];
}

}  // namespace

Vector solve_scalarized(const MultiObjectiveProblem& problem, const WeightVector& lambda,
                        const Ensemble& ens0, const FlowConfig& cfg) {
    return ensemble_mean(solve_ensemble(problem, lambda, ens0, cfg));
}

Matrix gradient_m_lambda(const MultiObjectiveProblem& problem, const WeightVector& lambda,
                         const Ensemble& ens0, const FlowConfig& cfg, double h) {
    if (!(h > 0.0)) throw ConfigError("finite-difference step must be > 0");
    const Vector center = solve_scalarized(problem, lambda, ens0, cfg);
    return gradient_from(problem, lambda, center, ens0, cfg, h);
}

// ---------------------------------------------------------------------------
// Walks

namespace {

// Shared per-λ pipeline: solve, sensitivity, Taylor check against the
// previous point's linear prediction.
struct WalkState {
    const MultiObjectiveProblem& problem;
    const FlowConfig& cfg;
    double fd_step;
    bool warm_start;
    Ensemble start;
    std::optional<Vector> prev_m;
    std::optional<Vector> prev_theta;
    Matrix prev_grad;

    Matrix visit(const WeightVector& lambda, ParetoApproximation& out) {
        const Ensemble final_ens = solve_ensemble(problem, lambda, start, cfg);
        const Vector m = ensemble_mean(final_ens);
        const Matrix grad = gradient_from(problem, lambda, m, start, cfg, fd_step);
        const Vector theta = chart(lambda);

        ParetoEntry entry{lambda, m, problem.objective_values(m), false, 0.0, grad.norm()};
        if (prev_m) entry.taylor_error = (m - *prev_m - prev_grad * (theta - *prev_theta)).norm();
        out.entries.push_back(std::move(entry));

        prev_m = m;
        prev_theta = theta;
        prev_grad = grad;
        if (warm_start) start = final_ens;
        return grad;
    }
};

}  // namespace

ParetoApproximation adaptive_walk(const MultiObjectiveProblem& problem, const Ensemble& ens0,
                                  const WalkOptions& opts, const FlowConfig& cfg) {
    problem.validate();
    if (problem.objectives() != 2) {
        throw ConfigError("adaptive walk supports exactly two objectives");
    }
    if (!(opts.delta > 0.0)) throw ConfigError("delta must be > 0");
    if (!(opts.min_step > 0.0) || !(opts.max_step >= opts.min_step) || opts.max_step > 1.0) {
        throw ConfigError("need 0 < min_step <= max_step <= 1");
    }

    ParetoApproximation approx;
    approx.delta = opts.delta;
    approx.grid_kind = GridKind::adaptive;
    WalkState state{problem, cfg, opts.fd_step, opts.warm_start, ens0, {}, {}, {}};

    double t = 0.0;
    while (true) {
        const Matrix grad = state.visit(WeightVector::pair(t), approx);
        if (t >= 1.0) break;
        const double gnorm = grad.norm();
        const double step = std::min(opts.delta / (gnorm + opts.gradient_floor), opts.max_step);
        if (step < opts.min_step) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "adaptive walk: step " << step << " below minimum " << opts.min_step
                << " at lambda=" << t << " (|grad m|=" << gnorm << ")";
            throw NumericalError(msg.str());
        }
        double next = t + step;
        if (next >= 1.0 - 1e-12) next = 1.0;
        t = next;
    }
    flag_dominated(approx);
    return approx;
}

ParetoApproximation uniform_walk(const MultiObjectiveProblem& problem, const Ensemble& ens0,
                                 int n_points, const FlowConfig& cfg, bool warm_start) {
    problem.validate();
    if (n_points < 2) throw ConfigError("uniform walk needs n_points >= 2");
    if (problem.objectives() != 2) {
        throw ConfigError("uniform walk is parameterized for two objectives");
    }
    ParetoApproximation approx;
    approx.grid_kind = GridKind::uniform;
    WalkState state{problem, cfg, WalkOptions{}.fd_step, warm_start, ens0, {}, {}, {}};
    for (int k = 0; k < n_points; ++k) {
        const double t = static_cast<double>(k) / static_cast<double>(n_points - 1);
        state.visit(WeightVector::pair(t), approx);
    }
    flag_dominated(approx);
    return approx;
}

csv::Table ParetoApproximation::to_table() const {
    csv::Table table;
    if (entries.empty()) {
        table.header = {"lambda", "dominated", "taylor_error"};
        return table;
    }
    const Index l = entries.front().lambda.size();
    const Index d = entries.front().minimizer.size();
    if (l == 2) {
        table.header.push_back("lambda");
    } else {
        for (Index i = 0; i < l - 1; ++i) table.header.push_back("lambda_" + std::to_string(i + 1));
    }
    for (Index i = 0; i < d; ++i) table.header.push_back("u_" + std::to_string(i + 1));
    for (Index i = 0; i < l; ++i) table.header.push_back("G_" + std::to_string(i + 1));
    table.header.push_back("dominated");
    table.header.push_back("taylor_error");
    for (const auto& e : entries) {
        std::vector<double> row;
        for (Index i = 0; i < l - 1; ++i) row.push_back(e.lambda[i]);
        for (Index i = 0; i < d; ++i) row.push_back(e.minimizer(i));
        for (Index i = 0; i < l; ++i) row.push_back(e.front_point(i));
        row.push_back(e.dominated ? 1.0 : 0.0);
        row.push_back(e.taylor_error);
        table.rows.push_back(std::move(row));
    }
    return table;
}

// ---------------------------------------------------------------------------
// Dominance

std::vector<bool> dominance_filter_pairwise(const std::vector<Vector>& points) {
    const std::size_t n = points.size();
    std::vector<bool> dominated(n, false);
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n && !dominated[p]; ++q) {
            if (q == p) continue;
            const bool weakly = (points[q].array() <= points[p].array()).all();
            const bool strictly = (points[q].array() < points[p].array()).any();
            dominated[p] = weakly && strictly;
        }
    }
    return dominated;
}

std::vector<bool> dominance_filter(const std::vector<Vector>& points) {
    if (points.empty()) return {};
    const Index l = points.front().size();
    for (const auto& p : points) {
        if (p.size() != l) throw DimensionError("dominance_filter: points differ in length");
    }
    if (l != 2) return dominance_filter_pairwise(points);

    // Lexicographic sweep. A point is dominated iff some lexicographically
    // smaller, distinct point has a second objective that is not larger.
    const std::size_t n = points.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (points[a](0) != points[b](0)) return points[a](0) < points[b](0);
        return points[a](1) < points[b](1);
    });
    std::vector<bool> dominated(n, false);
    double best_second = std::numeric_limits<double>::infinity();
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        const Vector& head = points[order[i]];
        while (j < n && points[order[j]](0) == head(0) && points[order[j]](1) == head(1)) ++j;
        const bool dom = best_second <= head(1);
        for (std::size_t k = i; k < j; ++k) dominated[order[k]] = dom;
        best_second = std::min(best_second, head(1));
        i = j;
    }
    return dominated;
}

}  // namespace enki
