#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "config.hpp"
#include "deepritz/acceptance.hpp"
#include "deepritz/cpwl.hpp"
#include "deepritz/errors.hpp"
#include "experiment.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using namespace deepritz;

namespace {

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

int cmd_run(const std::string& config_path, const std::string& output_override) {
    const cli::ExperimentConfig config = cli::load_config(config_path);
    const fs::path out = cli::resolve_output_dir(output_override.empty() ? config.output_dir : output_override);
    cli::run_experiment(config, out, std::cout);
    std::cout << "wrote " << (out / "records.csv").string() << "\n";
    return 0;
}

int cmd_verify(bool fast, const std::vector<std::string>& only, double constant_scale, bool list) {
    if (list) {
        for (const auto& c : acceptance::criteria()) {
            std::printf("%-4s %s%s\n", c.id.c_str(), c.title.c_str(), c.training ? " [training]" : "");
        }
        return 0;
    }
    acceptance::Options options;
    options.fast = fast;
    options.only = only;
    options.constant_scale = constant_scale;
    options.on_result = [](const acceptance::CriterionResult& r) {
        std::printf("%s\n", acceptance::format_line(r).c_str());
        std::fflush(stdout);
    };
    const auto results = acceptance::run_all(options);
    std::vector<std::string> failed;
    for (const auto& r : results) {
        if (!r.passed) failed.push_back(r.id);
    }
    if (failed.empty()) {
        std::printf("all %zu criteria passed\n", results.size());
        return 0;
    }
    std::string list_text;
    for (const auto& id : failed) list_text += (list_text.empty() ? "" : ", ") + id;
    std::printf("%zu of %zu criteria failed: %s\n", failed.size(), results.size(), list_text.c_str());
    return kExitFailure;
}

// Two columns (x, value); a non-numeric first line is taken as a header.
Cpwl1D read_breakpoints(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read '" + path + "'");
    std::vector<double> xs, vs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("expected 'x,value'", line_no);
        const std::string a = line.substr(0, comma), b = line.substr(comma + 1);
        char* end_a = nullptr;
        char* end_b = nullptr;
        const double x = std::strtod(a.c_str(), &end_a);
        const double v = std::strtod(b.c_str(), &end_b);
        const bool numeric = end_a != a.c_str() && *end_a == '\0' && end_b != b.c_str() && *end_b == '\0';
        if (!numeric) {
            if (xs.empty() && line_no == 1) continue;
            throw ParseError("invalid number in '" + line + "'", line_no);
        }
        xs.push_back(x);
        vs.push_back(v);
    }
    return Cpwl1D(std::move(xs), std::move(vs));
}

int cmd_convert(const std::string& input, const std::string& output) {
    const Cpwl1D c = read_breakpoints(input);
    const Network net = cpwl_to_relu_1d(c);
    double worst = 0.0;
    for (double x : c.breakpoints()) worst = std::max(worst, std::abs(net(std::span<const double>(&x, 1)) - c(x)));
    save_network(net, output);
    std::printf("%zu breakpoints -> ReLU network with %zu hidden units; max deviation at breakpoints %.3g\n",
                c.size(), static_cast<std::size_t>(net.arch().hidden_widths.front()), worst);
    std::printf("wrote %s\n", output.c_str());
    return 0;
}

Domain parse_domain(const std::string& name) {
    if (name == "unit_disk") return Domain::unit_disk();
    if (name == "unit_square") return Domain::unit_square();
    if (name == "square") return Domain::square(0.0, 0.0, 2.0);
    throw ConfigError("unknown heatmap domain '" + name + "' (expected unit_disk, unit_square or square)");
}

int cmd_plot(const std::string& records, const std::string& out_dir, const std::string& network,
             const std::string& domain) {
    const auto rows = cli::read_records(records);
    const fs::path dir = out_dir.empty() ? fs::path(records).parent_path() : fs::path(out_dir);
    auto written = cli::plot_records(rows, dir.empty() ? fs::path(".") : dir);
    if (!network.empty()) {
        const Network net = load_network(network);
        const fs::path path = (dir.empty() ? fs::path(".") : dir) / "heatmap.svg";
        std::ofstream(path) << cli::render_heatmap(net, parse_domain(domain), 200, fs::path(network).filename().string());
        written.push_back(path);
    }
    for (const auto& p : written) std::printf("wrote %s\n", p.string().c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Deep Ritz solver for p-Dirichlet and phase-field energies with boundary penalties."};
    app.require_subcommand(1);
    app.footer(std::string("Environment:\n  ") + cli::kOutputRootEnv +
               "  prefix for relative output directories (run)");

    std::string config_path, output_override;
    auto* run = app.add_subcommand("run", "Run the experiment described by a TOML config");
    run->add_option("config", config_path, "Experiment config (TOML)")->required()->check(CLI::ExistingFile);
    run->add_option("-o,--output", output_override, "Output directory (overrides output_dir in the config)");

    bool fast = false, list = false;
    std::vector<std::string> only;
    double constant_scale = 1.0;
    auto* verify = app.add_subcommand("verify", "Run the acceptance criteria and print PASS/FAIL per criterion");
    verify->add_flag("--fast", fast, "Skip criteria that train networks");
    verify->add_option("--only", only, "Run only these criterion ids (e.g. A1 A5)")->delimiter(',');
    verify->add_option("--constant-scale", constant_scale,
                       "Multiply the p-Laplace reference constant (mutation check; the weak-form criterion must fail)");
    verify->add_flag("--list", list, "List criterion ids and exit");

    std::string cpwl_input, cpwl_output = "network.json";
    auto* convert = app.add_subcommand("convert-cpwl", "Convert 1D breakpoints (CSV x,value) to an exact ReLU network");
    convert->add_option("breakpoints", cpwl_input, "CSV file with columns x,value")->required()->check(CLI::ExistingFile);
    convert->add_option("-o,--output", cpwl_output, "Output network JSON")->capture_default_str();

    std::string records, plot_dir, plot_network, plot_domain = "unit_disk";
    auto* plot = app.add_subcommand("plot", "Write SVG plots for a records.csv");
    plot->add_option("records", records, "records.csv written by run")->required()->check(CLI::ExistingFile);
    plot->add_option("-o,--output", plot_dir, "Directory for the SVG files (default: next to records.csv)");
    plot->add_option("--network", plot_network, "Also draw a 200x200 heatmap of this network JSON");
    plot->add_option("--domain", plot_domain, "Heatmap domain: unit_disk, unit_square or square (side 2)")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(config_path, output_override);
        if (*verify) return cmd_verify(fast, only, constant_scale, list);
        if (*convert) return cmd_convert(cpwl_input, cpwl_output);
        if (*plot) return cmd_plot(records, plot_dir, plot_network, plot_domain);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "error: %s%s\n", *run ? (config_path + ": ").c_str() : "", e.what());
        return kExitConfig;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitFailure;
    }
    return 0;
}
