#pragma once

// Experiment runner: builds the problem named in an ExperimentConfig, runs
// the requested solvers and writes CSV traces, metadata and a summary.

#include "enki/config.hpp"
#include "enki/ensemble.hpp"
#include "enki/models.hpp"
#include "enki/multiobjective.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace enki {

inline constexpr const char* kLibraryVersion = "0.1.0";

struct ReportBundle {
    std::filesystem::path output_dir;
    std::vector<std::filesystem::path> files;
    /// Scalar metrics, also written to summary.txt.
    std::map<std::string, double> summary;
};

struct ReconstructionMetrics {
    double misfit = 0.0;    // Φ(ū)
    double residual = 0.0;  // ‖ū − u†‖/‖u†‖
    double spread = 0.0;    // max_j ‖u^j − ū‖
};

/// Non-dominated points of a dense grid over [lo, hi]², in control and
/// objective space.
struct ReferenceFront {
    std::vector<Vector> controls;
    std::vector<Vector> objectives;
};

/// The elliptic inversion instance of a config: truth sin(8x) on the grid,
/// data synthesized with the config seed, prior ensemble from seed + 1.
struct EllipticSetup {
    EllipticProblem problem;
    ForwardModel model;
    Observation observation;
    Ensemble initial;
};
[[nodiscard]] EllipticSetup elliptic_setup(const ExperimentConfig& cfg);

/// Runs the experiment; throws ValidationError for a bad config and
/// enki::Error (with the experiment name prepended) for runtime failures.
[[nodiscard]] ReportBundle run_experiment(const ExperimentConfig& cfg);

/// Fraction of reference points whose nearest non-dominated front point is
/// within `radius` in objective space. 0 when no front point survives.
[[nodiscard]] double front_coverage(const ParetoApproximation& front,
                                    const std::vector<Vector>& reference, double radius = 0.05);

/// ConfigError when the observation carries no truth.
[[nodiscard]] ReconstructionMetrics reconstruction_metrics(const Ensemble& final_ensemble,
                                                           const Observation& obs,
                                                           const ForwardModel& model);

[[nodiscard]] MultiObjectiveProblem deb_problem();
[[nodiscard]] ReferenceFront deb_reference_front(int grid = 400, double lo = -2.0, double hi = 2.0);

/// Least-squares slope of log(value) against log(t) over points with
/// t in [t_lo, t_hi] and value > 0.
[[nodiscard]] double loglog_slope(const std::vector<double>& t, const std::vector<double>& value,
                                  double t_lo, double t_hi);

/// Ensemble drawn from the config's prior and seed.
[[nodiscard]] Ensemble initial_ensemble(const ExperimentConfig& cfg, Rng& rng);

}  // namespace enki
