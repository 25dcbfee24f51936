#include "config.hpp"

#include <cmath>
#include <set>

#include "deepritz/errors.hpp"

namespace deepritz::cli {

namespace {

using nlohmann::json;

// Typed access to a parsed document. Every key read is remembered so that
// leftover (unknown) keys can be reported.
class Reader {
public:
    explicit Reader(const TomlDocument& doc) : doc_(doc) {}

    const json* find(const std::string& path) {
        seen_.insert(path);
        const json* node = &doc_.root;
        std::size_t start = 0;
        while (true) {
            const std::size_t dot = path.find('.', start);
            const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            if (!node->is_object() || !node->contains(key)) return nullptr;
            node = &(*node)[key];
            if (dot == std::string::npos) return node;
            seen_.insert(path.substr(0, dot));
            start = dot + 1;
        }
    }

    [[noreturn]] void fail(const std::string& path, const std::string& what) const {
        const std::size_t line = doc_.line_of(path);
        throw ConfigError("config field '" + path + "'" + (line ? " (line " + std::to_string(line) + ")" : "") +
                          ": " + what);
    }

    const json& require(const std::string& path) {
        const json* v = find(path);
        if (!v) throw ConfigError("missing required field '" + path + "'");
        return *v;
    }

    double number(const std::string& path, const json& v) const {
        if (!v.is_number()) fail(path, "expected a number");
        return v.get<double>();
    }
    long long integer(const std::string& path, const json& v) const {
        if (!v.is_number_integer()) fail(path, "expected an integer");
        return v.get<long long>();
    }
    std::size_t count(const std::string& path, const json& v) const {
        const long long n = integer(path, v);
        if (n < 0) fail(path, "expected a nonnegative integer");
        return static_cast<std::size_t>(n);
    }
    std::string string(const std::string& path, const json& v) const {
        if (!v.is_string()) fail(path, "expected a string");
        return v.get<std::string>();
    }
    bool boolean(const std::string& path, const json& v) const {
        if (!v.is_boolean()) fail(path, "expected true or false");
        return v.get<bool>();
    }
    std::vector<double> numbers(const std::string& path, const json& v) const {
        if (!v.is_array()) fail(path, "expected an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) out.push_back(number(path, e));
        return out;
    }
    std::vector<int> integers(const std::string& path, const json& v) const {
        if (!v.is_array()) fail(path, "expected an array of integers");
        std::vector<int> out;
        for (const auto& e : v) out.push_back(static_cast<int>(integer(path, e)));
        return out;
    }

    // Optional fields overwrite `out` when present.
    void get(const std::string& path, double& out) {
        if (const json* v = find(path)) out = number(path, *v);
    }
    void get(const std::string& path, std::size_t& out) {
        if (const json* v = find(path)) out = count(path, *v);
    }
    void get(const std::string& path, std::string& out) {
        if (const json* v = find(path)) out = string(path, *v);
    }
    void get(const std::string& path, bool& out) {
        if (const json* v = find(path)) out = boolean(path, *v);
    }
    void get(const std::string& path, std::vector<double>& out) {
        if (const json* v = find(path)) out = numbers(path, *v);
    }
    void get(const std::string& path, std::vector<int>& out) {
        if (const json* v = find(path)) out = integers(path, *v);
    }

    void reject_unknown() const { walk(doc_.root, ""); }

private:
    void walk(const json& node, const std::string& prefix) const {
        for (const auto& [key, value] : node.items()) {
            const std::string path = prefix.empty() ? key : prefix + "." + key;
            if (!seen_.contains(path)) fail(path, "unknown field");
            if (value.is_object()) walk(value, path);
        }
    }

    const TomlDocument& doc_;
    std::set<std::string> seen_;
};

Preset parse_preset(const std::string& name) {
    if (name == "poisson_disk") return Preset::PoissonDisk;
    if (name == "plaplace_disk") return Preset::PLaplaceDisk;
    if (name == "phase_field") return Preset::PhaseField;
    if (name == "uniform_square") return Preset::UniformSquare;
    if (name == "custom") return Preset::Custom;
    throw ConfigError("config field 'preset': unknown preset '" + name +
                      "' (expected poisson_disk, plaplace_disk, phase_field, uniform_square or custom)");
}

void apply_preset_defaults(ExperimentConfig& c) {
    c.output_dir = std::string(to_string(c.preset));
    c.optim.batch_interior = 256;
    c.optim.batch_boundary = 256;
    switch (c.preset) {
        case Preset::PoissonDisk:
        case Preset::Custom:
            break;
        case Preset::PLaplaceDisk:
            c.arch.activation = Activation::ReLU;
            break;
        case Preset::PhaseField:
            c.problem.domain = "square";
            c.problem.energy = "phase_field";
            c.problem.rhs = "two_balls";
            c.problem.lambda = 0.0;
            c.optim.batch_interior = 512;
            break;
        case Preset::UniformSquare: {
            c.problem.domain = "unit_square";
            c.problem.rhs = "fourier";
            c.modes = {{1, 1}, {1, 2}, {2, 1}, {2, 2}, {1, 3}};
            SweepSettings s;
            s.widths = {4, 8, 16};
            s.hidden_layers = 2;
            s.activation = "gelu";
            s.lambda_scale = 5.0;
            s.restarts = 1;
            c.sweep = s;
            break;
        }
    }
}

}  // namespace

std::string_view to_string(Preset p) {
    switch (p) {
        case Preset::PoissonDisk: return "poisson_disk";
        case Preset::PLaplaceDisk: return "plaplace_disk";
        case Preset::PhaseField: return "phase_field";
        case Preset::UniformSquare: return "uniform_square";
        case Preset::Custom: return "custom";
    }
    return "unknown";
}

Domain ExperimentConfig::domain() const {
    const auto& d = problem.domain;
    if (d == "unit_disk") return Domain::unit_disk();
    if (d == "unit_square") return Domain::unit_square();
    if (d == "square") {
        if (problem.center.size() != 2) throw ConfigError("config field 'problem.center': expected two numbers");
        return Domain::square(problem.center[0], problem.center[1], problem.side);
    }
    if (d == "interval") {
        if (problem.interval.size() != 2) throw ConfigError("config field 'problem.interval': expected two numbers");
        return Domain::interval(problem.interval[0], problem.interval[1]);
    }
    throw ConfigError("config field 'problem.domain': unknown domain '" + d +
                      "' (expected unit_disk, unit_square, square or interval)");
}

EnergySpec ExperimentConfig::energy() const {
    if (problem.energy == "p_dirichlet") return EnergySpec::p_dirichlet(problem.p);
    if (problem.energy == "phase_field") return EnergySpec::phase_field(problem.epsilon);
    throw ConfigError("config field 'problem.energy': unknown energy '" + problem.energy +
                      "' (expected p_dirichlet or phase_field)");
}

Rhs ExperimentConfig::rhs() const {
    if (problem.rhs == "constant") return ConstantRhs{problem.rhs_value};
    if (problem.rhs == "two_balls") {
        if (!(problem.radius > 0.0)) throw ConfigError("config field 'problem.radius': must be positive");
        return TwoBallsRhs{problem.radius};
    }
    if (problem.rhs == "fourier") {
        if (problem.fourier_mode.size() != 2) {
            throw ConfigError("config field 'problem.fourier_mode': expected two integers");
        }
        return FourierModeRhs{problem.fourier_mode[0], problem.fourier_mode[1], problem.fourier_amplitude};
    }
    throw ConfigError("config field 'problem.rhs': unknown right-hand side '" + problem.rhs +
                      "' (expected constant, two_balls or fourier)");
}

PenalizedProblem ExperimentConfig::problem_spec() const {
    PenalizedProblem p;
    p.energy = energy();
    p.rhs = rhs();
    p.lambda = problem.lambda;
    p.penalty_exponent = problem.penalty_exponent;
    p.domain = domain();
    return p;
}

ProblemFamily ExperimentConfig::family() const {
    ProblemFamily f;
    f.energy = energy();
    f.rhs = rhs();
    f.domain = domain();
    f.penalty_exponent = problem.penalty_exponent;
    return f;
}

std::optional<ExactSolution> ExperimentConfig::reference() const {
    if (preset == Preset::PoissonDisk || preset == Preset::PLaplaceDisk) {
        return ExactSolution::p_laplace_radial(problem.p, 2);
    }
    // Custom problems that coincide with a closed-form case.
    const bool unit_forcing = problem.energy == "p_dirichlet" && problem.rhs == "constant" && problem.rhs_value == 1.0;
    if (preset == Preset::Custom && unit_forcing) {
        if (problem.domain == "unit_disk") return ExactSolution::p_laplace_radial(problem.p, 2);
        if (problem.domain == "interval" && problem.p == 2.0 && problem.interval == std::vector<double>{0.0, 1.0}) {
            return ExactSolution::poisson_1d();
        }
    }
    return std::nullopt;
}

SweepConfig ExperimentConfig::sweep_config() const {
    if (!sweep) throw ConfigError("config has no [sweep] table");
    SweepConfig s;
    s.ansatz.widths = sweep->widths;
    s.ansatz.hidden_layers = sweep->hidden_layers;
    s.ansatz.activation = parse_activation(sweep->activation);
    s.lambdas = sweep->lambdas;
    s.deltas = sweep->deltas;
    s.optim = optim;
    s.restarts = sweep->restarts;
    s.threads = sweep->threads;
    return s;
}

ExperimentConfig parse_config(const TomlDocument& doc) {
    Reader r(doc);
    ExperimentConfig c;

    const long long version = r.integer("schema_version", r.require("schema_version"));
    if (version != kSchemaVersion) {
        r.fail("schema_version", "unsupported version " + std::to_string(version) + " (this build reads " +
                                     std::to_string(kSchemaVersion) + ")");
    }
    c.preset = parse_preset(r.string("preset", r.require("preset")));
    apply_preset_defaults(c);
    const long long seed = r.integer("seed", r.require("seed"));
    if (seed < 0) r.fail("seed", "expected a nonnegative integer");
    c.seed = static_cast<std::uint64_t>(seed);
    r.get("output_dir", c.output_dir);

    auto& p = c.problem;
    switch (c.preset) {
        case Preset::PLaplaceDisk:
            p.p = r.number("problem.p", r.require("problem.p"));
            break;
        case Preset::PhaseField:
            p.epsilon = r.number("problem.epsilon", r.require("problem.epsilon"));
            p.radius = r.number("problem.radius", r.require("problem.radius"));
            break;
        case Preset::Custom:
            p.domain = r.string("problem.domain", r.require("problem.domain"));
            p.energy = r.string("problem.energy", r.require("problem.energy"));
            p.rhs = r.string("problem.rhs", r.require("problem.rhs"));
            p.lambda = r.number("problem.lambda", r.require("problem.lambda"));
            break;
        default:
            break;
    }
    r.find("problem");
    r.get("problem.domain", p.domain);
    r.get("problem.center", p.center);
    r.get("problem.side", p.side);
    r.get("problem.interval", p.interval);
    r.get("problem.energy", p.energy);
    r.get("problem.p", p.p);
    r.get("problem.epsilon", p.epsilon);
    r.get("problem.rhs", p.rhs);
    r.get("problem.rhs_value", p.rhs_value);
    r.get("problem.radius", p.radius);
    r.get("problem.fourier_mode", p.fourier_mode);
    r.get("problem.fourier_amplitude", p.fourier_amplitude);
    r.get("problem.lambda", p.lambda);
    r.get("problem.penalty_exponent", p.penalty_exponent);
    if (c.preset == Preset::PoissonDisk && p.p != 2.0) {
        r.fail("problem.p", "poisson_disk fixes p = 2 (use plaplace_disk)");
    }

    r.find("network");
    r.get("network.widths", c.arch.hidden_widths);
    std::string activation(to_string(c.arch.activation));
    r.get("network.activation", activation);
    try {
        c.arch.activation = parse_activation(activation);
    } catch (const ConfigError& e) {
        r.fail("network.activation", e.what());
    }

    auto& o = c.optim;
    r.require("optim");
    std::string algorithm(to_string(o.algorithm));
    r.get("optim.algorithm", algorithm);
    try {
        o.algorithm = parse_algorithm(algorithm);
    } catch (const ConfigError& e) {
        r.fail("optim.algorithm", e.what());
    }
    o.step_size = r.number("optim.step_size", r.require("optim.step_size"));
    o.max_steps = r.count("optim.max_steps", r.require("optim.max_steps"));
    r.get("optim.final_step_size", o.final_step_size);
    r.get("optim.adam_beta1", o.adam_betas.first);
    r.get("optim.adam_beta2", o.adam_betas.second);
    r.get("optim.adam_eps", o.adam_eps);
    r.get("optim.batch_interior", o.batch_interior);
    r.get("optim.batch_boundary", o.batch_boundary);
    r.get("optim.eval_interior", o.eval_interior);
    r.get("optim.eval_boundary", o.eval_boundary);
    std::size_t eval_seed = o.eval_seed;
    r.get("optim.eval_seed", eval_seed);
    o.eval_seed = eval_seed;
    r.get("optim.checkpoint_every", o.checkpoint_every);
    r.get("optim.tolerance", o.tolerance);

    if (r.find("sweep")) {
        SweepSettings s = c.sweep.value_or(SweepSettings{});
        if (s.widths.empty()) {
            s.widths = r.integers("sweep.widths", r.require("sweep.widths"));
        } else {
            r.get("sweep.widths", s.widths);
        }
        if (const json* v = r.find("sweep.hidden_layers")) {
            s.hidden_layers = static_cast<int>(r.integer("sweep.hidden_layers", *v));
        }
        r.get("sweep.activation", s.activation);
        r.get("sweep.lambda_scale", s.lambda_scale);
        s.lambdas.clear();
        s.deltas.clear();
        for (int w : s.widths) {
            s.lambdas.push_back(s.lambda_scale * w);
            s.deltas.push_back(w > 0 ? 1.0 / w : 0.0);
        }
        r.get("sweep.lambdas", s.lambdas);
        r.get("sweep.deltas", s.deltas);
        r.get("sweep.restarts", s.restarts);
        r.get("sweep.threads", s.threads);
        c.sweep = s;
    } else if (c.sweep) {
        // Preset sweep without overrides: derive the default schedules.
        for (int w : c.sweep->widths) {
            c.sweep->lambdas.push_back(c.sweep->lambda_scale * w);
            c.sweep->deltas.push_back(1.0 / w);
        }
    }

    if (c.preset == Preset::UniformSquare) {
        if (const json* v = r.find("uniform.modes")) {
            if (!v->is_array()) r.fail("uniform.modes", "expected an array of [k, m] pairs");
            c.modes.clear();
            for (const auto& m : *v) {
                const auto km = r.integers("uniform.modes", m);
                if (km.size() != 2 || km[0] < 1 || km[1] < 1) {
                    r.fail("uniform.modes", "each mode must be a pair of positive integers");
                }
                c.modes.emplace_back(km[0], km[1]);
            }
        }
        r.find("uniform");
        r.get("uniform.norm", c.fourier_norm);
        r.get("uniform.normalize", c.normalize);
        if (c.normalize != "solution" && c.normalize != "forcing") {
            r.fail("uniform.normalize", "expected 'solution' or 'forcing'");
        }
    }

    r.find("output");
    r.get("output.plots", c.plots);
    r.get("output.heatmap", c.heatmap);

    r.reject_unknown();

    // Semantic validation through the library types.
    c.arch.input_dim = c.domain().dim();
    c.arch.validate();
    c.problem_spec().validate();
    c.optim.validate();
    if (c.sweep) c.sweep_config().validate();
    if (c.preset == Preset::UniformSquare && c.modes.empty()) r.fail("uniform.modes", "needs at least one mode");
    return c;
}

ExperimentConfig load_config(const std::string& path) { return parse_config(load_toml(path)); }

nlohmann::json to_json(const ExperimentConfig& c) {
    json j;
    j["schema_version"] = c.schema_version;
    j["preset"] = std::string(to_string(c.preset));
    j["seed"] = c.seed;
    j["output_dir"] = c.output_dir;

    const auto& p = c.problem;
    json& pr = j["problem"];
    pr["domain"] = p.domain;
    if (p.domain == "square") {
        pr["center"] = p.center;
        pr["side"] = p.side;
    }
    if (p.domain == "interval") pr["interval"] = p.interval;
    pr["energy"] = p.energy;
    if (p.energy == "p_dirichlet") pr["p"] = p.p;
    if (p.energy == "phase_field") pr["epsilon"] = p.epsilon;
    pr["rhs"] = p.rhs;
    if (p.rhs == "constant") pr["rhs_value"] = p.rhs_value;
    if (p.rhs == "two_balls") pr["radius"] = p.radius;
    if (p.rhs == "fourier") {
        pr["fourier_mode"] = p.fourier_mode;
        pr["fourier_amplitude"] = p.fourier_amplitude;
    }
    pr["lambda"] = p.lambda;
    pr["penalty_exponent"] = p.penalty_exponent;

    j["network"]["widths"] = c.arch.hidden_widths;
    j["network"]["activation"] = std::string(to_string(c.arch.activation));

    const auto& o = c.optim;
    json& op = j["optim"];
    op["algorithm"] = std::string(to_string(o.algorithm));
    op["step_size"] = o.step_size;
    op["final_step_size"] = o.final_step_size;
    op["adam_beta1"] = o.adam_betas.first;
    op["adam_beta2"] = o.adam_betas.second;
    op["adam_eps"] = o.adam_eps;
    op["max_steps"] = o.max_steps;
    op["batch_interior"] = o.batch_interior;
    op["batch_boundary"] = o.batch_boundary;
    op["eval_interior"] = o.eval_interior;
    op["eval_boundary"] = o.eval_boundary;
    op["eval_seed"] = o.eval_seed;
    op["checkpoint_every"] = o.checkpoint_every;
    op["tolerance"] = o.tolerance;

    if (c.sweep) {
        json& s = j["sweep"];
        s["widths"] = c.sweep->widths;
        if (c.sweep->hidden_layers) s["hidden_layers"] = *c.sweep->hidden_layers;
        s["activation"] = c.sweep->activation;
        s["lambdas"] = c.sweep->lambdas;
        s["deltas"] = c.sweep->deltas;
        s["restarts"] = c.sweep->restarts;
        s["threads"] = c.sweep->threads;
    }
    if (c.preset == Preset::UniformSquare) {
        json modes = json::array();
        for (const auto& [k, m] : c.modes) modes.push_back({k, m});
        j["uniform"]["modes"] = modes;
        j["uniform"]["norm"] = c.fourier_norm;
        j["uniform"]["normalize"] = c.normalize;
    }
    j["output"]["plots"] = c.plots;
    j["output"]["heatmap"] = c.heatmap;
    return j;
}

}  // namespace deepritz::cli
