#pragma once

#include "spread/model_io.hpp"
#include "spread/reproduce.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace spread {

/// Exit codes shared by every command.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failure = 1;
inline constexpr int invalid = 2;
inline constexpr int parse = 3;
inline constexpr int math = 4;
inline constexpr int resource = 5;
inline constexpr int usage = 64;
} // namespace exit_code

struct RunConfig {
    std::uint64_t seed = 42;
    std::size_t trials = 300;
    int generations = 8;
    std::string window = "const:1";
    /// prefix for PREFIX_ratios.csv etc.; empty prints ratios to stdout
    std::string out;
    bool full = false;
    unsigned threads = 0;
};

struct SimulationTables {
    CsvTable ratios;
    std::optional<CsvTable> counts;
    std::optional<CsvTable> wdiag;
    std::optional<CsvTable> trials;
    /// closed-form or theoretical rate per explicit type
    std::vector<double> theory;
};

/// Runs the simulate pipeline in-process: Monte Carlo for random models,
/// expansion and projection for topological ones.
SimulationTables simulate_tables(const ModelSpec& spec, const RunConfig& cfg);

int cmd_validate(const std::string& file, std::ostream& out, std::ostream& err);
int cmd_rate(const std::string& file, const std::optional<std::string>& target, bool json, std::ostream& out,
             std::ostream& err);
int cmd_simulate(const std::string& file, const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_reproduce(const std::string& id, const ReproduceOptions& opts, bool json, std::ostream& out, std::ostream& err);

/// Full command line (argv[0] included); returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace spread
