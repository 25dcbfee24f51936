#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "config.hpp"
#include "deepritz/errors.hpp"
#include "experiment.hpp"
#include "svg.hpp"
#include "toml.hpp"

using namespace deepritz;
using namespace deepritz::cli;
namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("deepritz_test_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

constexpr const char* kSmallRun = R"(
schema_version = 1
preset = "custom"
seed = 3

[problem]
domain = "interval"
energy = "p_dirichlet"
p = 2.0
rhs = "constant"
lambda = 50.0

[network]
widths = [6, 6]
activation = "tanh"

[optim]
step_size = 1e-2
max_steps = 120
batch_interior = 32
eval_interior = 500
checkpoint_every = 40

[output]
plots = false
)";

}  // namespace

TEST_CASE("TOML subset parses tables, arrays and scalars") {
    const auto doc = parse_toml(R"(
# comment
a = 1_000
b = -2.5e-3
"quoted key" = 'lit\eral'
[t]
flag = true
list = [
  [1, 2],   # trailing comment
  [3, 4],
]
s = "tab\there"
[t.sub]
x = inf
)");
    const auto& j = doc.root;
    CHECK(j["a"] == 1000);
    CHECK(j["b"].get<double>() == -2.5e-3);
    CHECK(j["quoted key"] == "lit\\eral");
    CHECK(j["t"]["flag"] == true);
    CHECK(j["t"]["list"][1][0] == 3);
    CHECK(j["t"]["s"] == "tab\there");
    CHECK(std::isinf(j["t"]["sub"]["x"].get<double>()));
    CHECK(doc.line_of("t.flag") == 7);
}

TEST_CASE("TOML errors carry line and column") {
    auto error_at = [](const std::string& text) -> std::pair<std::size_t, std::size_t> {
        try {
            parse_toml(text);
        } catch (const ParseError& e) {
            return {e.line(), e.column()};
        }
        return {0, 0};
    };
    CHECK(error_at("a = 1\nb = \n").first == 2);
    CHECK(error_at("a = 1\na = 2\n").first == 2);
    CHECK(error_at("[t]\nx = 1\n[t]\n").first == 3);
    CHECK(error_at("x = 1 2\n") == std::pair<std::size_t, std::size_t>{1, 7});
    CHECK(error_at("x = {a = 1}\n").first == 1);
    CHECK(error_at("x = \"open\n").first == 1);
}

TEST_CASE("to_toml round trips") {
    nlohmann::json j;
    j["seed"] = 7;
    j["name"] = "a \"b\"";
    j["t"]["x"] = 0.1;
    j["t"]["whole"] = 2.0;
    j["t"]["v"] = {1.5, 2.0};
    j["t"]["pairs"] = {{1, 2}, {3, 4}};
    j["u"]["on"] = false;
    const auto back = parse_toml(to_toml(j)).root;
    CHECK(back == j);
    CHECK(back["t"]["whole"].is_number_float());
}

TEST_CASE("config reports missing and unknown fields") {
    auto message = [](const std::string& text) {
        try {
            parse_config(parse_toml(text));
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(message("preset = \"poisson_disk\"\nseed = 0\n[optim]\nstep_size = 1e-3\nmax_steps = 1\n")
              .find("'schema_version'") != std::string::npos);
    CHECK(message("schema_version = 1\npreset = \"plaplace_disk\"\nseed = 0\n[optim]\nstep_size = 1e-3\nmax_steps = 1\n")
              .find("missing required field 'problem.p'") != std::string::npos);
    CHECK(message("schema_version = 1\npreset = \"poisson_disk\"\nseed = 0\n[optim]\nstep_size = 1e-3\n")
              .find("'optim.max_steps'") != std::string::npos);
    const std::string unknown =
        message("schema_version = 1\npreset = \"poisson_disk\"\nseed = 0\n[optim]\nstep_size = 1e-3\nmax_steps = 1\n"
                "stepsize = 2\n");
    CHECK(unknown.find("'optim.stepsize'") != std::string::npos);
    CHECK(unknown.find("line 7") != std::string::npos);
    CHECK(message("schema_version = 2\npreset = \"poisson_disk\"\nseed = 0\n[optim]\nstep_size = 1e-3\nmax_steps = 1\n")
              .find("schema_version") != std::string::npos);
    CHECK(message("schema_version = 1\npreset = \"poisson_disk\"\nseed = 0\n[optim]\nstep_size = -1.0\nmax_steps = 1\n") !=
          "");
}

TEST_CASE("presets fill in their defaults") {
    const auto c = parse_config(parse_toml(
        "schema_version = 1\npreset = \"uniform_square\"\nseed = 8\n[optim]\nstep_size = 1e-2\nmax_steps = 10\n"));
    REQUIRE(c.sweep.has_value());
    CHECK(c.sweep->widths == std::vector<int>{4, 8, 16});
    CHECK(c.sweep->lambdas == std::vector<double>{20.0, 40.0, 80.0});
    CHECK(c.sweep->deltas == std::vector<double>{0.25, 0.125, 0.0625});
    CHECK(c.modes.size() == 5);
    CHECK(c.normalize == "solution");
    CHECK(c.domain().dim() == 2);

    const auto pf = parse_config(parse_toml("schema_version = 1\npreset = \"phase_field\"\nseed = 0\n"
                                            "[problem]\nepsilon = 0.01\nradius = 0.1\n"
                                            "[optim]\nstep_size = 1e-3\nmax_steps = 10\n"));
    CHECK(pf.problem.energy == "phase_field");
    CHECK(pf.problem.lambda == 0.0);
    CHECK_FALSE(pf.reference().has_value());

    const auto disk = parse_config(parse_toml(
        "schema_version = 1\npreset = \"poisson_disk\"\nseed = 0\n[optim]\nstep_size = 1e-3\nmax_steps = 10\n"));
    CHECK(disk.reference().has_value());
    CHECK(disk.problem.lambda == 250.0);
}

TEST_CASE("resolved config survives a TOML round trip") {
    const auto c = parse_config(parse_toml(kSmallRun));
    const auto j = to_json(c);
    const auto again = parse_config(parse_toml(to_toml(j)));
    CHECK(to_json(again) == j);
}

TEST_CASE("records round trip") {
    RecordRow a;
    a.n = 1;
    a.width = 8;
    a.lambda = 80.0;
    a.delta = 0.125;
    a.seed = 12345678901234567ULL;
    a.objective = -0.1;
    a.energy = 1.0 / 3.0;
    a.penalty = 1e-9;
    a.boundary_l2 = 0.01;
    a.err_l2 = std::nan("");
    a.err_w1p = 2.5;
    a.steps = 100;
    a.rhs = 2;
    const fs::path dir = fresh_dir("records");
    fs::create_directories(dir);
    write_records(dir / "records.csv", {a});
    const std::string text = read_file(dir / "records.csv");
    CHECK(text.rfind("n,width,lambda,delta,seed,objective,energy,penalty,boundary_L2,err_L2,err_W1p,steps,rhs\n", 0) ==
          0);
    const auto rows = read_records(dir / "records.csv");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].seed == a.seed);
    CHECK(rows[0].energy == a.energy);
    CHECK(std::isnan(rows[0].err_l2));
    CHECK(rows[0].rhs == 2);

    std::ofstream(dir / "bad.csv") << "n,width\n1,2\n";
    CHECK_THROWS_AS(read_records(dir / "bad.csv"), ParseError);
}

TEST_CASE("runs are reproducible and the echoed config reproduces them") {
    const auto config = parse_config(parse_toml(kSmallRun));
    std::ostringstream log;
    const fs::path a = fresh_dir("run_a"), b = fresh_dir("run_b"), c = fresh_dir("run_c");
    run_experiment(config, a, log);
    run_experiment(config, b, log);
    CHECK(read_file(a / "records.csv") == read_file(b / "records.csv"));

    const auto echoed = load_config((a / "config.toml").string());
    run_experiment(echoed, c, log);
    CHECK(read_file(a / "records.csv") == read_file(c / "records.csv"));

    for (const char* name : {"summary.json", "metadata.json", "networks/cell_0.json"}) {
        CHECK(fs::exists(a / name));
    }
    const auto meta = nlohmann::json::parse(read_file(a / "metadata.json"));
    CHECK(meta.contains("config"));
    CHECK(meta["config"] == to_json(config));
}

TEST_CASE("output root comes from the environment") {
    ::setenv(kOutputRootEnv, "/tmp/root_for_test", 1);
    CHECK(resolve_output_dir("runs/x") == fs::path("/tmp/root_for_test/runs/x"));
    CHECK(resolve_output_dir("/abs/x") == fs::path("/abs/x"));
    ::unsetenv(kOutputRootEnv);
    CHECK(resolve_output_dir("runs/x") == fs::path("runs/x"));
}

TEST_CASE("svg output is well formed") {
    LinePlot plot;
    plot.title = "errors";
    plot.log_y = true;
    plot.series.push_back({"a", {1, 2, 3}, {1.0, 0.5, std::nan("")}});
    const std::string svg = render_line_plot(plot);
    CHECK(svg.rfind("<svg", 0) == 0);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.find("nan") == std::string::npos);

    const Network net(Architecture{2, {3}, Activation::Tanh});
    const std::string heat = render_heatmap(net, Domain::unit_disk(), 20);
    CHECK(heat.find("</svg>") != std::string::npos);
}
