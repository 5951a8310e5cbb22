#include "enki/error.hpp"
#include "enki/harness.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace enki;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "enki-harness-test" / name;
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("log-log slope of an exact power law") {
    std::vector<double> t, v;
    for (int i = 1; i <= 50; ++i) {
        t.push_back(i);
        v.push_back(3.0 * std::pow(i, -0.75));
    }
    CHECK(loglog_slope(t, v, 1.0, 50.0) == doctest::Approx(-0.75).epsilon(1e-12));
    CHECK(loglog_slope(t, v, 10.0, 20.0) == doctest::Approx(-0.75).epsilon(1e-12));
    CHECK_THROWS_AS((void)loglog_slope(t, v, 100.0, 200.0), NumericalError);
}

TEST_CASE("front coverage") {
    ParetoApproximation front;
    auto entry = [](double a, double b, bool dominated) {
        ParetoEntry e{WeightVector::pair(0.5), Vector::Zero(2), (Vector(2) << a, b).finished(),
                      dominated, 0.0, 0.0};
        return e;
    };
    front.entries = {entry(0, 1, false), entry(1, 0, false), entry(0.5, 0.5, true)};
    const std::vector<Vector> ref = {(Vector(2) << 0, 1.01).finished(),
                                     (Vector(2) << 0.5, 0.5).finished(),
                                     (Vector(2) << 1.03, 0).finished(),
                                     (Vector(2) << 0.8, 0.2).finished()};
    // the dominated entry does not count
    CHECK(front_coverage(front, ref) == doctest::Approx(0.5));
    CHECK(front_coverage(front, ref, 0.75) == doctest::Approx(1.0));
    CHECK_THROWS_AS((void)front_coverage(front, {}), ConfigError);
}

TEST_CASE("Deb reference front lies on the segment between the bump centres") {
    const ReferenceFront ref = deb_reference_front(101);
    REQUIRE(ref.controls.size() > 10);
    for (const auto& u : ref.controls) {
        CHECK(std::abs(u(0) - u(1)) < 0.06);
        CHECK(std::abs(u(0)) <= 1.0 / std::sqrt(2.0) + 0.05);
    }
}

TEST_CASE("reconstruction metrics need a truth") {
    const Ensemble e(Matrix::Ones(1, 2));
    const Observation obs(Vector::Ones(1), NoiseModel::isotropic(1, 1.0));
    CHECK_THROWS_AS((void)reconstruction_metrics(e, obs, ForwardModel::linear(Matrix::Ones(1, 1))),
                    ConfigError);
}

TEST_CASE("small elliptic run writes every artifact") {
    auto cfg = ExperimentConfig::defaults(ExperimentKind::elliptic_inversion);
    cfg.dim = 16;
    cfg.gamma = 0.1;
    cfg.t_final = 0.5;
    cfg.step = 1e-3;
    cfg.trace_stride = 50;
    cfg.max_iter = 5;
    cfg.variants = {Variant::discrete, Variant::vanilla_flow, Variant::stabilized_flow};
    cfg.output_dir = scratch("elliptic");
    const ReportBundle b = run_experiment(cfg);
    for (const char* f : {"metadata.txt", "summary.txt", "trace_discrete.csv",
                          "trace_vanilla_flow.csv", "trace_stabilized_flow.csv",
                          "reconstruction.csv"}) {
        CAPTURE(f);
        CHECK(fs::exists(cfg.output_dir / f));
    }
    const csv::Table recon = csv::read_table(cfg.output_dir / "reconstruction.csv");
    CHECK(recon.rows.size() == 16);
    CHECK(recon.header.size() == 9);
    CHECK(b.summary.count("stabilized_flow.time_to_vanilla_misfit") == 1);
    CHECK(b.summary.at("vanilla_flow.max_subspace_distance") < 1e-10);
    const std::string meta = slurp(cfg.output_dir / "metadata.txt");
    CHECK(meta.find("rng_algorithm = ") != std::string::npos);
    CHECK(meta.find(std::string("library_version = ") + kLibraryVersion) != std::string::npos);
}

TEST_CASE("scalar runs are byte-for-byte reproducible") {
    auto cfg = ExperimentConfig::defaults(ExperimentKind::moment_consistency);
    cfg.members = 400;
    cfg.t_final = 1.0;
    cfg.output_dir = scratch("moments-a");
    const ReportBundle a = run_experiment(cfg);
    cfg.output_dir = scratch("moments-b");
    const ReportBundle b = run_experiment(cfg);
    REQUIRE(a.files.size() == b.files.size());
    for (std::size_t i = 0; i < a.files.size(); ++i) {
        if (a.files[i].filename() == "metadata.txt") continue;  // records output_dir
        CHECK(slurp(a.files[i]) == slurp(b.files[i]));
    }
    CHECK(a.summary.at("max_mean_deviation") < a.summary.at("tolerance"));
}

TEST_CASE("small Pareto run") {
    auto cfg = ExperimentConfig::defaults(ExperimentKind::deb_pareto);
    cfg.t_final = 1.0;
    cfg.step = 0.05;
    cfg.delta = 0.2;
    cfg.n_points = 4;
    cfg.output_dir = scratch("deb");
    const ReportBundle b = run_experiment(cfg);
    CHECK(b.summary.at("uniform.points") == 4.0);
    CHECK(b.summary.at("adaptive.max_step_times_gradient") <= 0.2 + 1e-12);
    CHECK(fs::exists(cfg.output_dir / "pareto_adaptive.csv"));
    CHECK(fs::exists(cfg.output_dir / "reference_front.csv"));
}

TEST_CASE("invalid configs are rejected before any output") {
    auto cfg = ExperimentConfig::defaults(ExperimentKind::collapse_rate);
    cfg.members = 1;
    cfg.output_dir = scratch("never");
    CHECK_THROWS_AS((void)run_experiment(cfg), ValidationError);
    CHECK_FALSE(fs::exists(cfg.output_dir));
}
