#include "enki/trace.hpp"

#include "enki/error.hpp"

#include <limits>

namespace enki {

csv::Table Trace::to_table() const {
    csv::Table t;
    t.header = {time_column, "misfit_mean", "residual_truth", "spread_state", "spread_response"};
    t.rows.reserve(points.size());
    for (const auto& p : points) {
        t.rows.push_back({p.time, p.misfit_mean, p.residual_truth, p.spread_state, p.spread_response});
    }
    return t;
}

Trace Trace::from_table(const csv::Table& table) {
    if (table.header.size() != 5 || table.header[1] != "misfit_mean") {
        throw InputError("not a trace table");
    }
    Trace trace;
    trace.time_column = table.header[0];
    for (const auto& r : table.rows) trace.points.push_back({r[0], r[1], r[2], r[3], r[4]});
    return trace;
}

double relative_residual(const Vector& mean, const Observation& obs) {
    if (!obs.truth) throw ConfigError("observation carries no truth; residual undefined");
    const double norm = obs.truth->norm();
    const double diff = (mean - *obs.truth).norm();
    return norm > 0.0 ? diff / norm : diff;
}

TracePoint measure(const Ensemble& ens, const Observation& obs, const ForwardModel& model,
                   double time) {
    TracePoint p;
    p.time = time;
    const Vector mean = ensemble_mean(ens);
    p.misfit_mean = misfit(mean, obs, model);
    p.residual_truth =
        obs.truth ? relative_residual(mean, obs) : std::numeric_limits<double>::quiet_NaN();
    const Spread s = spread(ens, evaluate(model, ens), obs.noise);
    p.spread_state = s.state;
    p.spread_response = s.response;
    return p;
}

}  // namespace enki
