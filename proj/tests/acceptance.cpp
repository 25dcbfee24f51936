// Runs every acceptance criterion and prints one PASS/FAIL line each.
// Optional arguments: criterion ids to run a subset, --fast to skip training.
#include <cstdio>
#include <string>

#include "deepritz/acceptance.hpp"

int main(int argc, char** argv) {
    deepritz::acceptance::Options options;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--fast") {
            options.fast = true;
        } else {
            options.only.push_back(arg);
        }
    }
    options.on_result = [](const deepritz::acceptance::CriterionResult& r) {
        std::printf("%s\n", deepritz::acceptance::format_line(r).c_str());
        std::fflush(stdout);
    };
    int failed = 0;
    for (const auto& r : deepritz::acceptance::run_all(options)) failed += r.passed ? 0 : 1;
    std::printf("%d criteria failed\n", failed);
    return failed == 0 ? 0 : 1;
}
