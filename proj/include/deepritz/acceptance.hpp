#pragma once

#include <functional>
#include <string>
#include <vector>

namespace deepritz::acceptance {

struct CriterionResult {
    std::string id;
    std::string title;
    bool passed = false;
    bool training = false;  ///< needs network training (skipped by --fast)
    std::string detail;
    double seconds = 0.0;
};

struct Options {
    bool fast = false;
    /// Multiplies the radial p-Laplace constant used as reference. Values
    /// other than 1 must make the weak-form criterion fail.
    double constant_scale = 1.0;
    /// Criterion ids to run; empty means all.
    std::vector<std::string> only;
    /// Called after each criterion finishes.
    std::function<void(const CriterionResult&)> on_result;
};

struct CriterionInfo {
    std::string id;
    std::string title;
    bool training;
};

/// Criteria in execution order.
const std::vector<CriterionInfo>& criteria();

/// Runs one criterion by id. Throws ConfigError for an unknown id.
CriterionResult run_criterion(const std::string& id, const Options& options);

/// Runs the selected criteria in order. Exceptions inside a criterion are
/// reported as failures.
std::vector<CriterionResult> run_all(const Options& options);

/// "PASS A1  title  (12.3 s)  detail"
std::string format_line(const CriterionResult& r);

}  // namespace deepritz::acceptance
