#include "experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "deepritz/errors.hpp"
#include "svg.hpp"

namespace deepritz::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g17(double v) {
    if (std::isnan(v)) return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, std::size_t line) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size()) throw ParseError("invalid number '" + s + "'", line);
    return v;
}

std::uint64_t parse_uint(const std::string& s, std::size_t line) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (s.empty() || s[0] == '-' || end != s.c_str() + s.size()) {
        throw ParseError("invalid integer '" + s + "'", line);
    }
    return v;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << text;
    if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

SweepCell single_cell(const ExperimentConfig& c) {
    SweepCell cell;
    const PenalizedProblem problem = c.problem_spec();
    cell.record = train(problem, c.arch, c.optim, c.seed, c.reference());
    cell.width = c.arch.hidden_widths.empty() ? 0 : c.arch.hidden_widths.front();
    cell.lambda = problem.lambda;
    cell.delta = c.optim.tolerance;
    cell.seed = c.seed;
    cell.certificate.restart_objectives = {cell.record.metrics.objective};
    cell.certificate.best = cell.certificate.returned = cell.record.metrics.objective;
    cell.certificate.delta = cell.delta;
    cell.certificate.certified = cell.certificate.primary_within_delta = true;
    return cell;
}

json summary_json(const ExperimentConfig& c, const ExperimentResult& r) {
    json s;
    s["preset"] = std::string(to_string(c.preset));
    s["cells"] = json::array();
    for (const auto& cell : r.cells) {
        const auto& m = cell.record.metrics;
        s["cells"].push_back({
            {"n", cell.n},
            {"width", cell.width},
            {"lambda", cell.lambda},
            {"rhs", cell.rhs_index},
            {"objective", m.objective},
            {"energy", m.energy},
            {"boundary_L2", m.boundary_l2},
            {"err_L2", optional_number(m.err_l2)},
            {"rel_err_L2", optional_number(m.rel_err_l2)},
            {"err_W1p", optional_number(m.err_w1p)},
            {"certified", cell.certificate.certified},
            {"restart_objectives", cell.certificate.restart_objectives},
        });
    }
    if (!r.cells.empty()) {
        const auto& m = r.cells.back().record.metrics;
        s["final"] = {{"objective", m.objective},
                      {"boundary_L2", m.boundary_l2},
                      {"err_L2", optional_number(m.err_l2)},
                      {"rel_err_L2", optional_number(m.rel_err_l2)},
                      {"err_W1p", optional_number(m.err_w1p)}};
    }
    if (!r.sup_errors.empty()) s["sup_errors"] = r.sup_errors;
    return s;
}

// All files are written here, on the calling thread, in a fixed order.
void write_outputs(const ExperimentConfig& c, const fs::path& out, const ExperimentResult& r,
                   const std::string& started, double seconds, const std::string& failure) {
    fs::create_directories(out / "networks");
    std::vector<RecordRow> rows;
    for (const auto& cell : r.cells) rows.push_back(to_row(cell));
    write_records(out / "records.csv", rows);
    write_file(out / "summary.json", summary_json(c, r).dump(2) + "\n");
    write_file(out / "config.toml", to_toml(to_json(c)));

    json meta;
    meta["started_at"] = started;
    meta["finished_at"] = utc_now();
    meta["wall_time_seconds"] = seconds;
    meta["cell_wall_times"] = json::array();
    for (const auto& cell : r.cells) meta["cell_wall_times"].push_back(cell.record.wall_time);
    meta["rng"] = {{"engine", "mt19937_64"},
                   {"seed_splitting", "splitmix64"},
                   {"root_seed", c.seed},
                   {"eval_seed", c.optim.eval_seed}};
    meta["status"] = failure.empty() ? "ok" : "failed";
    if (!failure.empty()) meta["error"] = failure;
    meta["config"] = to_json(c);
    write_file(out / "metadata.json", meta.dump(2) + "\n");

    for (const auto& cell : r.cells) {
        save_network(cell.record.net, (out / "networks" / ("cell_" + std::to_string(cell.index) + ".json")).string());
    }
    if (c.plots) plot_records(rows, out);
    const Domain domain = c.domain();
    if (c.heatmap && domain.dim() == 2 && !r.cells.empty()) {
        const auto& last = r.cells.back();
        write_file(out / "heatmap.svg",
                   render_heatmap(last.record.net, domain, 200, "trained solution, cell " + std::to_string(last.index)));
    }
}

}  // namespace

RecordRow to_row(const SweepCell& cell) {
    const auto& m = cell.record.metrics;
    RecordRow r;
    r.n = cell.n;
    r.width = cell.width;
    r.lambda = cell.lambda;
    r.delta = cell.delta;
    r.seed = cell.seed;
    r.objective = m.objective;
    r.energy = m.energy;
    r.penalty = m.penalty;
    r.boundary_l2 = m.boundary_l2;
    r.err_l2 = m.err_l2.value_or(std::numeric_limits<double>::quiet_NaN());
    r.err_w1p = m.err_w1p.value_or(std::numeric_limits<double>::quiet_NaN());
    r.steps = cell.record.steps;
    r.rhs = cell.rhs_index;
    return r;
}

void write_records(const fs::path& path, const std::vector<RecordRow>& rows) {
    std::string text;
    for (std::size_t i = 0; i < kRecordColumns.size(); ++i) text += (i ? "," : "") + kRecordColumns[i];
    text += "\n";
    for (const auto& r : rows) {
        text += std::to_string(r.n) + "," + std::to_string(r.width) + "," + g17(r.lambda) + "," + g17(r.delta) + "," +
                std::to_string(r.seed) + "," + g17(r.objective) + "," + g17(r.energy) + "," + g17(r.penalty) + "," +
                g17(r.boundary_l2) + "," + g17(r.err_l2) + "," + g17(r.err_w1p) + "," + std::to_string(r.steps) +
                "," + std::to_string(r.rhs) + "\n";
    }
    write_file(path, text);
}

std::vector<RecordRow> read_records(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path.string() + "'");
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) throw ParseError("empty records file", 1);
    std::vector<std::string> header;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) header.push_back(cell);
    }
    if (header != kRecordColumns) throw ParseError("unexpected records.csv header", 1);
    std::vector<RecordRow> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != kRecordColumns.size()) {
            throw ParseError("expected " + std::to_string(kRecordColumns.size()) + " fields, found " +
                                 std::to_string(f.size()),
                             line_no);
        }
        RecordRow r;
        r.n = parse_uint(f[0], line_no);
        r.width = static_cast<int>(parse_uint(f[1], line_no));
        r.lambda = parse_double(f[2], line_no);
        r.delta = parse_double(f[3], line_no);
        r.seed = parse_uint(f[4], line_no);
        r.objective = parse_double(f[5], line_no);
        r.energy = parse_double(f[6], line_no);
        r.penalty = parse_double(f[7], line_no);
        r.boundary_l2 = parse_double(f[8], line_no);
        r.err_l2 = parse_double(f[9], line_no);
        r.err_w1p = parse_double(f[10], line_no);
        r.steps = parse_uint(f[11], line_no);
        r.rhs = parse_uint(f[12], line_no);
        rows.push_back(r);
    }
    return rows;
}

fs::path resolve_output_dir(const std::string& dir) {
    const fs::path p(dir);
    if (p.is_absolute()) return p;
    if (const char* root = std::getenv(kOutputRootEnv); root && *root) return fs::path(root) / p;
    return p;
}

ExperimentResult run_experiment(const ExperimentConfig& c, const fs::path& out, std::ostream& log) {
    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };

    ExperimentResult result;
    log << "preset " << to_string(c.preset) << ", output " << out.string() << "\n";
    try {
        if (c.preset == Preset::UniformSquare) {
            const auto cases = fourier_family(c.modes, c.fourier_norm,
                                              c.normalize == "forcing" ? FourierNorm::Forcing : FourierNorm::Solution);
            UniformSweepResult u = uniform_sweep(c.sweep_config(), c.family(), cases, c.seed);
            result.cells = std::move(u.cells);
            result.sup_errors = std::move(u.sup_errors);
        } else if (c.sweep) {
            result.cells = gamma_sweep(c.sweep_config(), c.family(), c.reference(), c.seed);
        } else {
            result.cells.push_back(single_cell(c));
        }
    } catch (const SweepAborted& e) {
        result.cells = e.partial();
        log << "error: " << e.what() << "\n";
        write_outputs(c, out, result, started, elapsed(), e.what());
        throw;
    } catch (const DivergenceError& e) {
        write_outputs(c, out, result, started, elapsed(), e.what());
        throw;
    }
    for (const auto& cell : result.cells) {
        const auto& m = cell.record.metrics;
        log << "cell " << cell.index << ": width " << cell.width << ", lambda " << cell.lambda << ", objective "
            << m.objective << ", boundary L2 " << m.boundary_l2;
        if (m.err_l2) log << ", L2 error " << *m.err_l2;
        log << "\n";
    }
    write_outputs(c, out, result, started, elapsed(), "");
    return result;
}

std::vector<fs::path> plot_records(const std::vector<RecordRow>& rows, const fs::path& out_dir) {
    std::vector<fs::path> written;
    if (rows.empty()) return written;
    fs::create_directories(out_dir);

    // Error against n: one series per right-hand side plus their supremum.
    std::size_t n_rhs = 0;
    for (const auto& r : rows) n_rhs = std::max(n_rhs, r.rhs + 1);
    bool have_errors = false;
    for (const auto& r : rows) have_errors = have_errors || std::isfinite(r.err_l2);
    if (have_errors) {
        LinePlot p;
        p.title = "L2 error against n";
        p.x_label = "n (ansatz index)";
        p.y_label = "L2 error";
        p.log_y = true;
        for (std::size_t f = 0; f < n_rhs; ++f) {
            Series s;
            s.label = n_rhs > 1 ? "rhs " + std::to_string(f) : "error";
            for (const auto& r : rows) {
                if (r.rhs != f) continue;
                s.x.push_back(static_cast<double>(r.n));
                s.y.push_back(r.err_l2);
            }
            p.series.push_back(std::move(s));
        }
        if (n_rhs > 1) {
            Series sup;
            sup.label = "sup over rhs";
            for (const auto& r : rows) {
                const double x = static_cast<double>(r.n);
                if (sup.x.empty() || sup.x.back() != x) {
                    sup.x.push_back(x);
                    sup.y.push_back(r.err_l2);
                } else {
                    sup.y.back() = std::max(sup.y.back(), r.err_l2);
                }
            }
            p.series.push_back(std::move(sup));
        }
        write_file(out_dir / "error_vs_n.svg", render_line_plot(p));
        written.push_back(out_dir / "error_vs_n.svg");
    }

    LinePlot b;
    b.title = "boundary norm against penalty";
    b.x_label = "lambda";
    b.y_label = "||u||_L2(boundary)";
    b.log_x = true;
    b.log_y = true;
    for (std::size_t f = 0; f < n_rhs; ++f) {
        Series s;
        s.label = n_rhs > 1 ? "rhs " + std::to_string(f) : "boundary L2";
        for (const auto& r : rows) {
            if (r.rhs != f) continue;
            s.x.push_back(r.lambda);
            s.y.push_back(r.boundary_l2);
        }
        b.series.push_back(std::move(s));
    }
    write_file(out_dir / "boundary_vs_lambda.svg", render_line_plot(b));
    written.push_back(out_dir / "boundary_vs_lambda.svg");
    return written;
}

}  // namespace deepritz::cli
