#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gridcascade::cli {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_input = 2, exit_abnormal = 3 };

struct CommonArgs {
    std::string case_path;
    std::string cyber = "none";
    std::optional<std::string> coords;        // power bus coordinates
    std::optional<std::string> cyber_coords;  // cyber node coordinates
    double alpha = 1.2;
    double floor_mva = 5.0;
    double tol = 1e-8;
    bool no_taps = false;
};

struct RunArgs {
    CommonArgs common;
    std::vector<int> attack_buses;     // case bus numbers
    std::vector<int> attack_branches;  // 0-based branch rows
    int random_buses = 0;
    int random_branches = 0;
    std::uint64_t seed = 1;
    std::optional<std::string> snapshots;
};

struct SweepArgs {
    CommonArgs common;
    std::string target = "buses";
    int k_min = 0;
    int k_max = 10;
    int runs = 100;
    std::uint64_t seed = 1;
    std::optional<std::string> out;
    int threads = 0;  // 0 = hardware concurrency
};

/// One cascade; prints the summary JSON to `out`.
int cmd_run(const RunArgs& args, std::ostream& out);

/// Monte-Carlo sweep; CSV goes to `args.out` or to `out`.
int cmd_sweep(const SweepArgs& args, std::ostream& out);

/// Parses the command line and dispatches. Errors are reported on stderr and
/// mapped to the exit codes above.
int main(int argc, char** argv);

}  // namespace gridcascade::cli
