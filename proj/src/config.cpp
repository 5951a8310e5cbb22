#include "enki/config.hpp"

#include "enki/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace enki {

ValidationError::ValidationError(std::vector<std::string> fields, const std::string& detail)
    : ConfigError(detail), fields_(std::move(fields)) {}

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::elliptic_inversion: return "elliptic_inversion";
        case ExperimentKind::deb_pareto: return "deb_pareto";
        case ExperimentKind::collapse_rate: return "collapse_rate";
        case ExperimentKind::moment_consistency: return "moment_consistency";
    }
    return "unknown";
}

const char* to_string(Variant variant) {
    switch (variant) {
        case Variant::discrete: return "discrete";
        case Variant::vanilla_flow: return "vanilla_flow";
        case Variant::stabilized_flow: return "stabilized_flow";
    }
    return "unknown";
}

const char* to_string(Prior prior) {
    return prior == Prior::normal ? "normal" : "uniform";
}

std::vector<std::string> experiment_names() {
    return {"elliptic_inversion", "deb_pareto", "collapse_rate", "moment_consistency"};
}

ExperimentConfig ExperimentConfig::defaults(ExperimentKind kind) {
    ExperimentConfig c;
    c.experiment = kind;
    switch (kind) {
        case ExperimentKind::elliptic_inversion:
            c.variants = {Variant::vanilla_flow, Variant::stabilized_flow};
            c.members = 20;
            c.dim = 256;
            c.gamma = 0.01;
            c.step = 2e-4;
            c.t_final = 10.0;
            c.trace_stride = 10;
            c.alpha = 0.0;
            c.beta = 0.0;
            c.prior = Prior::normal;
            break;
        case ExperimentKind::deb_pareto:
            c.variants = {Variant::vanilla_flow};
            c.members = 25;
            c.dim = 2;
            c.gamma = 0.0;
            c.step = 1e-2;
            c.t_final = 10.0;
            c.trace_stride = 100;
            c.delta = 5e-3;
            c.n_points = 22;
            c.prior = Prior::uniform;
            c.prior_lo = -2.0;
            c.prior_hi = 2.0;
            break;
        case ExperimentKind::collapse_rate:
            c.variants = {Variant::vanilla_flow};
            c.members = 20;
            c.dim = 1;
            c.gamma = 1.0;
            c.step = 1e-2;
            c.t_final = 100.0;
            c.trace_stride = 10;
            c.target = 1.0;
            c.prior = Prior::normal;
            break;
        case ExperimentKind::moment_consistency:
            c.variants = {Variant::vanilla_flow};
            c.members = 10000;
            c.dim = 1;
            c.gamma = 1.0;
            c.step = 1e-3;
            c.t_final = 2.0;
            c.trace_stride = 50;
            c.alpha = 1.0;
            c.target = 1.0;
            c.prior = Prior::normal;
            break;
    }
    return c;
}

void ExperimentConfig::validate() const {
    std::vector<std::string> bad;
    std::ostringstream why;
    auto fail = [&](const char* field, const std::string& msg) {
        bad.emplace_back(field);
        why << (bad.size() > 1 ? "; " : "") << field << ": " << msg;
    };
    if (variants.empty()) fail("variant", "at least one variant required");
    if (members < 1) fail("J", "must be >= 1");
    if (dim < 1) fail("d", "must be >= 1");
    if (!(gamma >= 0.0) || !std::isfinite(gamma)) fail("gamma", "must be finite and >= 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) fail("dt", "must be > 0");
    if (max_iter < 1) fail("max_iter", "must be >= 1");
    if (!(tau >= 1.0)) fail("tau", "must be >= 1");
    if (!(step > 0.0) || !std::isfinite(step)) fail("step", "must be > 0");
    if (!(t_final > 0.0) || !std::isfinite(t_final)) fail("t_final", "must be > 0");
    if (trace_stride < 1) fail("trace_stride", "must be >= 1");
    if (!std::isfinite(alpha)) fail("alpha", "must be finite");
    if (!std::isfinite(beta)) fail("beta", "must be finite");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) fail("sigma", "must be > 0");
    if (!(delta > 0.0)) fail("delta", "must be > 0");
    if (n_points < 2) fail("n_points", "must be >= 2");
    if (!std::isfinite(target)) fail("target", "must be finite");
    if (!(prior_lo < prior_hi)) fail("prior_lo", "must be < prior_hi");

    switch (experiment) {
        case ExperimentKind::elliptic_inversion:
            if (dim < 2) fail("d", "elliptic problem needs d >= 2");
            if (gamma <= 0.0) fail("gamma", "elliptic inversion needs gamma > 0");
            break;
        case ExperimentKind::deb_pareto:
            if (dim != 2) fail("d", "Deb problem is two-dimensional");
            for (Variant v : variants) {
                if (v != Variant::vanilla_flow) fail("variant", "Pareto tracing uses vanilla_flow");
            }
            break;
        case ExperimentKind::collapse_rate:
        case ExperimentKind::moment_consistency:
            if (dim != 1) fail("d", "scalar experiment needs d = 1");
            if (members < 2) fail("J", "needs at least two members");
            for (Variant v : variants) {
                if (v != Variant::vanilla_flow) fail("variant", "scalar experiment uses vanilla_flow");
            }
            if (experiment == ExperimentKind::moment_consistency && gamma != 1.0) {
                fail("gamma", "the moment equations assume unit noise; set gamma = 1");
            }
            break;
    }
    if (!bad.empty()) throw ValidationError(std::move(bad), "invalid config: " + why.str());
}

std::vector<std::pair<std::string, std::string>> ExperimentConfig::echo() const {
    std::string vs;
    for (std::size_t i = 0; i < variants.size(); ++i) {
        vs += (i ? "," : "") + std::string(to_string(variants[i]));
    }
    auto num = [](double v) { return csv::format_number(v); };
    return {
        {"experiment", to_string(experiment)},
        {"variant", vs},
        {"J", std::to_string(members)},
        {"d", std::to_string(dim)},
        {"gamma", num(gamma)},
        {"dt", num(dt)},
        {"max_iter", std::to_string(max_iter)},
        {"tau", num(tau)},
        {"step", num(step)},
        {"t_final", num(t_final)},
        {"trace_stride", std::to_string(trace_stride)},
        {"monotonicity_guard", monotonicity_guard ? "true" : "false"},
        {"alpha", num(alpha)},
        {"beta", num(beta)},
        {"sigma", num(sigma)},
        {"delta", num(delta)},
        {"n_points", std::to_string(n_points)},
        {"warm_start", warm_start ? "true" : "false"},
        {"target", num(target)},
        {"prior", to_string(prior)},
        {"prior_lo", num(prior_lo)},
        {"prior_hi", num(prior_hi)},
        {"seed", std::to_string(seed)},
        {"output_dir", output_dir.string()},
    };
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
bool parse_integer(const std::string& text, T& out) {
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

bool parse_real(const std::string& text, double& out) {
    try {
        out = csv::parse_number(text);
        return std::isfinite(out);
    } catch (const Error&) {
        return false;
    }
}

bool parse_bool(const std::string& text, bool& out) {
    if (text == "true" || text == "1" || text == "yes" || text == "on") {
        out = true;
        return true;
    }
    if (text == "false" || text == "0" || text == "no" || text == "off") {
        out = false;
        return true;
    }
    return false;
}

bool parse_experiment(const std::string& text, ExperimentKind& out) {
    for (ExperimentKind k : {ExperimentKind::elliptic_inversion, ExperimentKind::deb_pareto,
                             ExperimentKind::collapse_rate, ExperimentKind::moment_consistency}) {
        if (text == to_string(k)) {
            out = k;
            return true;
        }
    }
    return false;
}

bool parse_variants(const std::string& text, std::vector<Variant>& out) {
    out.clear();
    std::istringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        bool found = false;
        for (Variant v : {Variant::discrete, Variant::vanilla_flow, Variant::stabilized_flow}) {
            if (item == to_string(v)) {
                out.push_back(v);
                found = true;
            }
        }
        if (!found) return false;
    }
    return !out.empty();
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> entries;
    std::vector<std::string> bad;
    std::ostringstream why;
    auto fail = [&](const std::string& field, const std::string& msg) {
        bad.push_back(field);
        why << (bad.size() > 1 ? "; " : "") << field << ": " << msg;
    };

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            fail("line " + std::to_string(line_no), "expected 'key = value'");
            continue;
        }
        entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }

    ExperimentKind kind{};
    bool have_kind = false;
    for (const auto& [k, v] : entries) {
        if (k != "experiment") continue;
        if (parse_experiment(v, kind)) {
            have_kind = true;
        } else {
            fail("experiment", "unknown experiment '" + v + "'");
        }
    }
    if (!have_kind) {
        if (bad.empty()) fail("experiment", "missing");
        throw ValidationError(std::move(bad), "invalid config: " + why.str());
    }

    ExperimentConfig cfg = ExperimentConfig::defaults(kind);
    using Setter = std::function<bool(const std::string&)>;
    const std::map<std::string, Setter> setters = {
        {"experiment", [](const std::string&) { return true; }},
        {"variant", [&](const std::string& v) { return parse_variants(v, cfg.variants); }},
        {"J", [&](const std::string& v) { return parse_integer(v, cfg.members); }},
        {"d", [&](const std::string& v) { return parse_integer(v, cfg.dim); }},
        {"gamma", [&](const std::string& v) { return parse_real(v, cfg.gamma); }},
        {"dt", [&](const std::string& v) { return parse_real(v, cfg.dt); }},
        {"max_iter", [&](const std::string& v) { return parse_integer(v, cfg.max_iter); }},
        {"tau", [&](const std::string& v) { return parse_real(v, cfg.tau); }},
        {"step", [&](const std::string& v) { return parse_real(v, cfg.step); }},
        {"t_final", [&](const std::string& v) { return parse_real(v, cfg.t_final); }},
        {"trace_stride", [&](const std::string& v) { return parse_integer(v, cfg.trace_stride); }},
        {"monotonicity_guard", [&](const std::string& v) { return parse_bool(v, cfg.monotonicity_guard); }},
        {"alpha", [&](const std::string& v) { return parse_real(v, cfg.alpha); }},
        {"beta", [&](const std::string& v) { return parse_real(v, cfg.beta); }},
        {"sigma", [&](const std::string& v) { return parse_real(v, cfg.sigma); }},
        {"delta", [&](const std::string& v) { return parse_real(v, cfg.delta); }},
        {"n_points", [&](const std::string& v) { return parse_integer(v, cfg.n_points); }},
        {"warm_start", [&](const std::string& v) { return parse_bool(v, cfg.warm_start); }},
        {"target", [&](const std::string& v) { return parse_real(v, cfg.target); }},
        {"prior", [&](const std::string& v) {
             if (v == "normal") cfg.prior = Prior::normal;
             else if (v == "uniform") cfg.prior = Prior::uniform;
             else return false;
             return true;
         }},
        {"prior_lo", [&](const std::string& v) { return parse_real(v, cfg.prior_lo); }},
        {"prior_hi", [&](const std::string& v) { return parse_real(v, cfg.prior_hi); }},
        {"seed", [&](const std::string& v) { return parse_integer(v, cfg.seed); }},
        {"output_dir", [&](const std::string& v) {
             cfg.output_dir = v;
             return !v.empty();
         }},
    };

    for (const auto& [k, v] : entries) {
        const auto it = setters.find(k);
        if (it == setters.end()) {
            fail(k, "unknown key");
        } else if (!it->second(v)) {
            fail(k, "cannot parse '" + v + "'");
        }
    }
    if (!bad.empty()) throw ValidationError(std::move(bad), "invalid config: " + why.str());
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError({"path"}, "cannot read config '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace enki
