#include "enki/harness.hpp"

#include "enki/csv.hpp"
#include "enki/discrete.hpp"
#include "enki/error.hpp"
#include "enki/flow.hpp"
#include "enki/models.hpp"
#include "enki/moments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

namespace enki {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Metrics

double front_coverage(const ParetoApproximation& front, const std::vector<Vector>& reference,
                      double radius) {
    if (reference.empty()) throw ConfigError("front_coverage: reference set is empty");
    std::vector<const Vector*> points;
    for (const auto& e : front.entries) {
        if (!e.dominated) points.push_back(&e.front_point);
    }
    if (points.empty()) return 0.0;
    std::size_t covered = 0;
    for (const auto& r : reference) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vector* p : points) best = std::min(best, (*p - r).norm());
        if (best <= radius) ++covered;
    }
    return static_cast<double>(covered) / static_cast<double>(reference.size());
}

ReconstructionMetrics reconstruction_metrics(const Ensemble& final_ensemble, const Observation& obs,
                                             const ForwardModel& model) {
    if (!obs.truth) throw ConfigError("reconstruction metrics need an observation with truth");
    const Vector mean = ensemble_mean(final_ensemble);
    ReconstructionMetrics m;
    m.misfit = misfit(mean, obs, model);
    m.residual = relative_residual(mean, obs);
    m.spread = (final_ensemble.members().colwise() - mean).colwise().norm().maxCoeff();
    return m;
}

MultiObjectiveProblem deb_problem() {
    auto [g1, g2] = deb_pair();
    MultiObjectiveProblem p;
    p.models = {g1, g2};
    p.data = {Vector::Zero(1), Vector::Zero(1)};
    p.noise = NoiseModel::isotropic(1, 0.0);
    return p;
}

ReferenceFront deb_reference_front(int grid, double lo, double hi) {
    const MultiObjectiveProblem problem = deb_problem();
    std::vector<Vector> controls;
    std::vector<Vector> objectives;
    controls.reserve(static_cast<std::size_t>(grid) * grid);
    objectives.reserve(controls.capacity());
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            Vector u(2);
            u << lo + (hi - lo) * i / (grid - 1), lo + (hi - lo) * j / (grid - 1);
            objectives.push_back(problem.objective_values(u));
            controls.push_back(std::move(u));
        }
    }
    const auto dominated = dominance_filter(objectives);
    ReferenceFront front;
    for (std::size_t k = 0; k < controls.size(); ++k) {
        if (dominated[k]) continue;
        front.controls.push_back(controls[k]);
        front.objectives.push_back(objectives[k]);
    }
    return front;
}

double loglog_slope(const std::vector<double>& t, const std::vector<double>& value, double t_lo,
                    double t_hi) {
    if (t.size() != value.size()) throw DimensionError("loglog_slope: length mismatch");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_lo || t[i] > t_hi || !(value[i] > 0.0)) continue;
        const double x = std::log(t[i]);
        const double y = std::log(value[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++n;
    }
    if (n < 2) throw NumericalError("loglog_slope: fewer than two usable points");
    const double nn = static_cast<double>(n);
    return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
}

Ensemble initial_ensemble(const ExperimentConfig& cfg, Rng& rng) {
    if (cfg.prior == Prior::uniform) {
        return sample_uniform_ensemble(cfg.dim, cfg.members, rng, cfg.prior_lo, cfg.prior_hi);
    }
    return sample_normal_ensemble(cfg.dim, cfg.members, rng);
}

// ---------------------------------------------------------------------------
// Experiments

namespace {

std::uint64_t noise_seed(const ExperimentConfig& cfg) { return cfg.seed; }
std::uint64_t ensemble_seed(const ExperimentConfig& cfg) { return cfg.seed + 1; }

}  // namespace

EllipticSetup elliptic_setup(const ExperimentConfig& cfg) {
    EllipticProblem problem(cfg.dim);
    ForwardModel model = problem.model();
    const Vector truth = (8.0 * problem.grid().array()).sin().matrix();
    Observation obs = synthesize_observation(model, truth, cfg.gamma, noise_seed(cfg));
    Rng rng(ensemble_seed(cfg));
    Ensemble ens0 = initial_ensemble(cfg, rng);
    return {std::move(problem), std::move(model), std::move(obs), std::move(ens0)};
}

namespace {

class Writer {
public:
    explicit Writer(ReportBundle& bundle) : bundle_(bundle) {}

    void table(const std::string& name, const csv::Table& t) {
        const fs::path p = bundle_.output_dir / name;
        csv::write_table(p, t);
        bundle_.files.push_back(p);
    }

    void key_values(const std::string& name,
                    const std::vector<std::pair<std::string, std::string>>& kv) {
        const fs::path p = bundle_.output_dir / name;
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open '" + p.string() + "' for writing");
        for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
        if (!out) throw Error("write to '" + p.string() + "' failed");
        bundle_.files.push_back(p);
    }

private:
    ReportBundle& bundle_;
};

StabilizationParams stabilization(const ExperimentConfig& cfg) {
    return {cfg.alpha, cfg.beta, cfg.sigma * Matrix::Identity(cfg.dim, cfg.dim)};
}

FlowConfig flow_config(const ExperimentConfig& cfg) {
    FlowConfig f;
    f.t_final = cfg.t_final;
    f.step = cfg.step;
    f.trace_stride = cfg.trace_stride;
    f.monotonicity_guard = cfg.monotonicity_guard;
    return f;
}

void run_elliptic(const ExperimentConfig& cfg, ReportBundle& bundle, Writer& out) {
    const EllipticSetup setup = elliptic_setup(cfg);
    const ForwardModel& model = setup.model;
    const Observation& obs = setup.observation;
    const Ensemble& ens0 = setup.initial;
    const Vector x = setup.problem.grid();
    const Vector& truth = *obs.truth;

    csv::Table recon;
    recon.header = {"x", "truth", "y"};
    recon.rows.resize(static_cast<std::size_t>(cfg.dim));
    for (Index i = 0; i < cfg.dim; ++i) {
        recon.rows[static_cast<std::size_t>(i)] = {x(i), truth(i), obs.y(i)};
    }

    std::map<Variant, Trace> traces;
    for (Variant v : cfg.variants) {
        const std::string name = to_string(v);
        Ensemble final_ens;
        double max_subspace = 0.0;
        auto track = [&](double, const Ensemble& e) {
            max_subspace = std::max(max_subspace, subspace_distance(e, ens0));
        };
        if (v == Variant::discrete) {
            DiscreteConfig dc;
            dc.dt = cfg.dt;
            dc.max_iter = cfg.max_iter;
            dc.discrepancy_tau = cfg.tau;
            dc.seed = cfg.seed;
            DiscreteResult r = run_discrete(ens0, obs, model, dc);
            final_ens = r.ensemble;
            track(0.0, r.ensemble);
            bundle.summary[name + ".iterations"] = r.iterations;
            traces[v] = std::move(r.trace);
        } else if (v == Variant::vanilla_flow) {
            FlowResult r = integrate(FlowKind::vanilla, ens0, obs, model, std::nullopt,
                                     flow_config(cfg), track);
            final_ens = r.ensemble;
            bundle.summary[name + ".guard_retries"] = r.guard_retries;
            traces[v] = std::move(r.trace);
        } else {
            FlowResult r = integrate(FlowKind::stabilized, ens0, obs, model, stabilization(cfg),
                                     flow_config(cfg));
            final_ens = r.ensemble;
            traces[v] = std::move(r.trace);
        }
        out.table("trace_" + name + ".csv", traces[v].to_table());

        const ReconstructionMetrics m = reconstruction_metrics(final_ens, obs, model);
        bundle.summary[name + ".misfit"] = m.misfit;
        bundle.summary[name + ".residual"] = m.residual;
        bundle.summary[name + ".spread"] = m.spread;
        if (v == Variant::vanilla_flow) bundle.summary[name + ".max_subspace_distance"] = max_subspace;
        if (v == Variant::discrete) bundle.summary[name + ".final_subspace_distance"] = max_subspace;

        const Vector mean = ensemble_mean(final_ens);
        const Vector response = model.apply(mean);
        recon.header.push_back("mean_" + name);
        recon.header.push_back("response_" + name);
        for (Index i = 0; i < cfg.dim; ++i) {
            recon.rows[static_cast<std::size_t>(i)].push_back(mean(i));
            recon.rows[static_cast<std::size_t>(i)].push_back(response(i));
        }
    }
    out.table("reconstruction.csv", recon);

    if (traces.count(Variant::vanilla_flow) && traces.count(Variant::stabilized_flow)) {
        const double target = traces[Variant::vanilla_flow].points.back().misfit_mean;
        double reached = std::numeric_limits<double>::quiet_NaN();
        for (const auto& p : traces[Variant::stabilized_flow].points) {
            if (p.misfit_mean <= target) {
                reached = p.time;
                break;
            }
        }
        bundle.summary["stabilized_flow.time_to_vanilla_misfit"] = reached;
    }
}

void run_deb(const ExperimentConfig& cfg, ReportBundle& bundle, Writer& out) {
    const MultiObjectiveProblem problem = deb_problem();
    Rng rng(ensemble_seed(cfg));
    const Ensemble ens0 = initial_ensemble(cfg, rng);
    const FlowConfig fc = flow_config(cfg);

    WalkOptions opts;
    opts.delta = cfg.delta;
    opts.warm_start = cfg.warm_start;
    const ParetoApproximation adaptive = adaptive_walk(problem, ens0, opts, fc);
    const ParetoApproximation uniform = uniform_walk(problem, ens0, cfg.n_points, fc, cfg.warm_start);
    out.table("pareto_adaptive.csv", adaptive.to_table());
    out.table("pareto_uniform.csv", uniform.to_table());

    const ReferenceFront ref = deb_reference_front(400, cfg.prior_lo, cfg.prior_hi);
    csv::Table rt;
    rt.header = {"u_1", "u_2", "G_1", "G_2"};
    for (std::size_t i = 0; i < ref.controls.size(); ++i) {
        rt.rows.push_back({ref.controls[i](0), ref.controls[i](1), ref.objectives[i](0),
                           ref.objectives[i](1)});
    }
    out.table("reference_front.csv", rt);

    auto set_distance = [&](const ParetoApproximation& a) {
        double worst = 0.0;
        for (const auto& e : a.entries) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : ref.controls) best = std::min(best, (e.minimizer - c).norm());
            worst = std::max(worst, best);
        }
        return worst;
    };
    auto summarize = [&](const std::string& name, const ParetoApproximation& a) {
        bundle.summary[name + ".points"] = static_cast<double>(a.entries.size());
        bundle.summary[name + ".coverage"] = front_coverage(a, ref.objectives);
        bundle.summary[name + ".max_set_distance"] = set_distance(a);
        double worst_taylor = 0.0;
        double worst_step = 0.0;
        for (std::size_t k = 0; k < a.entries.size(); ++k) {
            worst_taylor = std::max(worst_taylor, a.entries[k].taylor_error);
            if (k + 1 < a.entries.size()) {
                const double dl = a.entries[k + 1].lambda[0] - a.entries[k].lambda[0];
                worst_step = std::max(worst_step, std::abs(dl) * a.entries[k].gradient_norm);
            }
        }
        bundle.summary[name + ".max_taylor_error"] = worst_taylor;
        bundle.summary[name + ".max_step_times_gradient"] = worst_step;
    };
    summarize("adaptive", adaptive);
    summarize("uniform", uniform);
}

Observation scalar_observation(const ExperimentConfig& cfg) {
    return Observation(Vector::Constant(1, cfg.target), NoiseModel::isotropic(1, cfg.gamma));
}

void run_collapse(const ExperimentConfig& cfg, ReportBundle& bundle, Writer& out) {
    const ForwardModel model = ForwardModel::linear(Matrix::Identity(1, 1), "identity");
    const Observation obs = scalar_observation(cfg);
    Rng rng(ensemble_seed(cfg));
    const Ensemble ens0 = initial_ensemble(cfg, rng);
    const FlowResult r =
        integrate(FlowKind::vanilla, ens0, obs, model, std::nullopt, flow_config(cfg));
    out.table("trace_vanilla_flow.csv", r.trace.to_table());

    std::vector<double> t, e, e2, c;
    for (const auto& p : r.trace.points) {
        t.push_back(p.time);
        e.push_back(p.spread_response);
        e2.push_back(p.spread_response * p.spread_response);
        c.push_back(p.spread_state);
    }
    const double hi = std::min(100.0, cfg.t_final);
    bundle.summary["slope.spread_response"] = loglog_slope(t, e, 1.0, hi);
    bundle.summary["slope.spread_response_squared"] = loglog_slope(t, e2, 1.0, hi);
    bundle.summary["slope.spread_state"] = loglog_slope(t, c, 1.0, hi);
}

void run_moment_consistency(const ExperimentConfig& cfg, ReportBundle& bundle, Writer& out) {
    const ForwardModel model = ForwardModel::linear(Matrix::Identity(1, 1), "identity");
    const Observation obs = scalar_observation(cfg);
    Rng rng(ensemble_seed(cfg));
    const Ensemble ens0 = initial_ensemble(cfg, rng);

    csv::Table particles;
    particles.header = {"t", "mean", "covariance"};
    const FlowConfig fc = flow_config(cfg);
    const FlowResult r = integrate(FlowKind::vanilla, ens0, obs, model, std::nullopt, fc,
                                   [&](double t, const Ensemble& e) {
                                       particles.rows.push_back(
                                           {t, ensemble_mean(e)(0), state_covariance(e)(0, 0)});
                                   });
    out.table("particle_moments.csv", particles);

    MomentState s0;
    if (cfg.prior == Prior::uniform) {
        const double w = cfg.prior_hi - cfg.prior_lo;
        s0 = {Vector::Constant(1, 0.5 * (cfg.prior_lo + cfg.prior_hi)),
              Matrix::Constant(1, 1, w * w / 12.0)};
    } else {
        s0 = {Vector::Zero(1), Matrix::Identity(1, 1)};
    }
    const MomentTrajectory traj = integrate_moments(s0, obs.y, StabilizationParams::vanilla(1), fc);
    out.table("moments.csv", moment_table(traj));

    double dm = 0.0, dc = 0.0;
    for (double probe : {0.5, 1.0, 2.0}) {
        if (probe > cfg.t_final + 1e-12) continue;
        auto near = [probe](double t) { return std::abs(t - probe) < 1e-9; };
        const auto pit = std::find_if(particles.rows.begin(), particles.rows.end(),
                                      [&](const auto& row) { return near(row[0]); });
        const auto mit = std::find_if(traj.begin(), traj.end(),
                                      [&](const MomentSample& s) { return near(s.t); });
        if (pit == particles.rows.end() || mit == traj.end()) continue;
        dm = std::max(dm, std::abs((*pit)[1] - mit->state.m(0)));
        dc = std::max(dc, std::abs((*pit)[2] - mit->state.c(0, 0)));
    }
    bundle.summary["max_mean_deviation"] = dm;
    bundle.summary["max_covariance_deviation"] = dc;
    bundle.summary["tolerance"] = 5.0 / std::sqrt(static_cast<double>(cfg.members));
    (void)r;
}

}  // namespace

ReportBundle run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ReportBundle bundle;
    bundle.output_dir = cfg.output_dir;
    fs::create_directories(bundle.output_dir);
    Writer out(bundle);

    auto meta = cfg.echo();
    meta.emplace_back("noise_seed", std::to_string(noise_seed(cfg)));
    meta.emplace_back("ensemble_seed", std::to_string(ensemble_seed(cfg)));
    meta.emplace_back("rng_algorithm", kRngAlgorithm);
    meta.emplace_back("library_version", kLibraryVersion);
    out.key_values("metadata.txt", meta);

    try {
        switch (cfg.experiment) {
            case ExperimentKind::elliptic_inversion: run_elliptic(cfg, bundle, out); break;
            case ExperimentKind::deb_pareto: run_deb(cfg, bundle, out); break;
            case ExperimentKind::collapse_rate: run_collapse(cfg, bundle, out); break;
            case ExperimentKind::moment_consistency: run_moment_consistency(cfg, bundle, out); break;
        }
    } catch (const ValidationError&) {
        throw;
    } catch (const Error& e) {
        throw Error(std::string(to_string(cfg.experiment)) + ": " + e.what());
    }

    std::vector<std::pair<std::string, std::string>> summary;
    for (const auto& [k, v] : bundle.summary) summary.emplace_back(k, csv::format_number(v));
    out.key_values("summary.txt", summary);
    return bundle;
}

}  // namespace enki
