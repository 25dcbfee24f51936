#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "deepritz/solver.hpp"
#include "toml.hpp"

namespace deepritz::cli {

inline constexpr int kSchemaVersion = 1;

enum class Preset { PoissonDisk, PLaplaceDisk, PhaseField, UniformSquare, Custom };

std::string_view to_string(Preset p);

struct ProblemSettings {
    std::string domain = "unit_disk";  ///< unit_disk | unit_square | square | interval
    std::vector<double> center{0.0, 0.0};  ///< square only
    double side = 2.0;                      ///< square only
    std::vector<double> interval{0.0, 1.0}; ///< interval only
    std::string energy = "p_dirichlet";     ///< p_dirichlet | phase_field
    double p = 2.0;
    double epsilon = 0.01;
    std::string rhs = "constant";  ///< constant | two_balls | fourier
    double rhs_value = 1.0;
    double radius = 0.4;
    std::vector<int> fourier_mode{1, 1};
    double fourier_amplitude = 1.0;
    double lambda = 250.0;
    double penalty_exponent = 2.0;
};

struct SweepSettings {
    std::vector<int> widths;
    std::optional<int> hidden_layers;
    std::string activation = "relu";
    std::vector<double> lambdas;
    std::vector<double> deltas;
    double lambda_scale = 10.0;  ///< lambdas default to lambda_scale * width
    std::size_t restarts = 5;
    std::size_t threads = 1;
};

struct ExperimentConfig {
    int schema_version = kSchemaVersion;
    Preset preset = Preset::PoissonDisk;
    std::uint64_t seed = 0;
    std::string output_dir;
    ProblemSettings problem;
    Architecture arch{2, {16, 16, 16}, Activation::Tanh};
    OptimConfig optim;
    std::optional<SweepSettings> sweep;
    std::vector<std::pair<int, int>> modes;  ///< uniform_square
    double fourier_norm = 1.0;               ///< uniform_square
    std::string normalize = "solution";      ///< uniform_square: solution | forcing
    bool plots = true;
    bool heatmap = true;

    Domain domain() const;
    EnergySpec energy() const;
    Rhs rhs() const;
    PenalizedProblem problem_spec() const;
    ProblemFamily family() const;
    /// Closed-form minimiser where one exists (poisson_disk, plaplace_disk).
    std::optional<ExactSolution> reference() const;
    SweepConfig sweep_config() const;
};

/// Builds a config from a parsed document: preset defaults first, then the
/// document's values. Throws ConfigError naming the offending field (and its
/// line) for missing required fields, wrong types and unknown keys.
ExperimentConfig parse_config(const TomlDocument& doc);
ExperimentConfig load_config(const std::string& path);

/// Fully resolved config in the file schema; parse_config(to_json(c))
/// reproduces c.
nlohmann::json to_json(const ExperimentConfig& config);

}  // namespace deepritz::cli
