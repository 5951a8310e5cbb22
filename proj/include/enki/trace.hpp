#pragma once

#include "enki/csv.hpp"
#include "enki/ensemble.hpp"

#include <string>
#include <vector>

namespace enki {

/// Diagnostics of one ensemble state. `time` is the iteration index for the
/// discrete method and t for the flows.
struct TracePoint {
    double time = 0.0;
    double misfit_mean = 0.0;     // Φ(ū)
    double residual_truth = 0.0;  // ‖ū − u†‖/‖u†‖, NaN without truth
    double spread_state = 0.0;
    double spread_response = 0.0;
};

/// Ordered diagnostics with CSV export/import. The first column is named
/// `iter` for discrete traces and `t` for flow traces.
struct Trace {
    std::string time_column = "t";
    std::vector<TracePoint> points;

    [[nodiscard]] csv::Table to_table() const;
    [[nodiscard]] static Trace from_table(const csv::Table& table);
};

/// Evaluates every diagnostic for `ens` (one model call per member plus one
/// at the mean).
[[nodiscard]] TracePoint measure(const Ensemble& ens, const Observation& obs,
                                 const ForwardModel& model, double time);

/// ‖ū − u†‖/‖u†‖; ConfigError when the observation carries no truth.
[[nodiscard]] double relative_residual(const Vector& mean, const Observation& obs);

}  // namespace enki
