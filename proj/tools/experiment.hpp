#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace deepritz::cli {

/// Environment variable that, when set, is prepended to relative output
/// directories.
inline constexpr const char* kOutputRootEnv = "DEEPRITZ_OUTPUT_ROOT";

/// Column order of records.csv. Never reorder; append new columns at the end.
inline const std::vector<std::string> kRecordColumns{
    "n",       "width",   "lambda",      "delta",  "seed",    "objective", "energy",
    "penalty", "boundary_L2", "err_L2", "err_W1p", "steps",   "rhs",
};

/// One records.csv row. Missing error norms are NaN.
struct RecordRow {
    std::size_t n = 0;
    int width = 0;
    double lambda = 0.0;
    double delta = 0.0;
    std::uint64_t seed = 0;
    double objective = 0.0;
    double energy = 0.0;
    double penalty = 0.0;
    double boundary_l2 = 0.0;
    double err_l2 = 0.0;
    double err_w1p = 0.0;
    std::size_t steps = 0;
    std::size_t rhs = 0;
};

RecordRow to_row(const SweepCell& cell);
void write_records(const std::filesystem::path& path, const std::vector<RecordRow>& rows);
/// Throws ParseError (with line) on a malformed file.
std::vector<RecordRow> read_records(const std::filesystem::path& path);

/// Relative directories are placed under $DEEPRITZ_OUTPUT_ROOT when set.
std::filesystem::path resolve_output_dir(const std::string& dir);

struct ExperimentResult {
    std::vector<SweepCell> cells;
    std::vector<double> sup_errors;  ///< uniform_square only
};

/// Runs the experiment described by `config` and writes records.csv,
/// summary.json, metadata.json, config.toml, networks/ and plots into `out`.
/// On a failing sweep cell the completed cells are still written before the
/// error is rethrown.
ExperimentResult run_experiment(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log);

/// Line plots of records.csv (error against n, boundary norm against lambda)
/// written next to `out_dir`. Returns the files written.
std::vector<std::filesystem::path> plot_records(const std::vector<RecordRow>& rows,
                                                const std::filesystem::path& out_dir);

}  // namespace deepritz::cli
