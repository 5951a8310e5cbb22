#pragma once

// Flat `key = value` experiment configuration (UTF-8, '#' starts a comment).

#include "enki/error.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace enki {

/// Config rejected; `fields()` lists every offending key.
class ValidationError : public ConfigError {
public:
    ValidationError(std::vector<std::string> fields, const std::string& detail);
    [[nodiscard]] const std::vector<std::string>& fields() const noexcept { return fields_; }

private:
    std::vector<std::string> fields_;
};

enum class ExperimentKind { elliptic_inversion, deb_pareto, collapse_rate, moment_consistency };
enum class Variant { discrete, vanilla_flow, stabilized_flow };
enum class Prior { normal, uniform };

[[nodiscard]] const char* to_string(ExperimentKind kind);
[[nodiscard]] const char* to_string(Variant variant);
[[nodiscard]] const char* to_string(Prior prior);
[[nodiscard]] std::vector<std::string> experiment_names();

struct ExperimentConfig {
    ExperimentKind experiment = ExperimentKind::elliptic_inversion;
    std::vector<Variant> variants;
    long members = 20;      // J
    long dim = 256;         // d (= K for the elliptic model)
    double gamma = 0.01;    // observation noise standard deviation
    double dt = 1.0;        // discrete EKI step
    int max_iter = 100;
    double tau = 1.0;       // discrepancy factor
    double step = 2e-4;     // RK4 step
    double t_final = 10.0;
    int trace_stride = 10;
    bool monotonicity_guard = false;
    double alpha = 0.0;
    double beta = 0.0;
    double sigma = 1.0;     // Σ = sigma·I
    double delta = 5e-3;
    int n_points = 22;
    bool warm_start = false;
    double target = 1.0;    // y of the scalar experiments
    Prior prior = Prior::normal;
    double prior_lo = -2.0;
    double prior_hi = 2.0;
    std::uint64_t seed = 1;
    std::filesystem::path output_dir = "enki-out";

    /// Defaults for one experiment (the values used in the reference runs).
    [[nodiscard]] static ExperimentConfig defaults(ExperimentKind kind);

    /// Throws ValidationError naming every field outside its range.
    void validate() const;

    /// Every field, in a fixed order, formatted as it would be parsed back.
    [[nodiscard]] std::vector<std::pair<std::string, std::string>> echo() const;
};

/// Parses config text; unknown keys, malformed values and failed validation
/// all raise ValidationError.
[[nodiscard]] ExperimentConfig parse_config(const std::string& text);
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace enki
