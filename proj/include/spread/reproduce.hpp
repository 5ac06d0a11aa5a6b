#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace spread {

/// One expected-vs-actual comparison. Reference checks are reported but never
/// fail the run.
struct Check {
    std::string label;
    double expected = 0.0;
    double actual = 0.0;
    double tol = 0.0;
    bool reference = false;

    double delta() const;
    bool pass() const;
};

struct ReproduceReport {
    std::string id;
    std::vector<Check> checks;
    std::vector<std::string> notes;

    bool pass() const;
};

struct ReproduceOptions {
    std::uint64_t seed = 42;
    std::size_t trials = 300;
    unsigned threads = 0;
};

/// Example ids accepted by reproduce().
const std::vector<std::string>& example_ids();

/// Runs the pipeline of a built-in example and compares against stored
/// values. Throws OutOfRangeError for an unknown id.
ReproduceReport reproduce(std::string_view id, const ReproduceOptions& opts = {});

} // namespace spread
