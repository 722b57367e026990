#pragma once

// Closed-form identity suites run by `tmhf validate`.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace tmhf {

struct SuiteResult {
    std::string name;
    std::size_t samples = 0;
    double max_error = 0.0;
    double tolerance = 0.0;
    bool passed = true;
    std::string note;
};

struct ValidationReport {
    std::vector<SuiteResult> suites;
    bool passed() const;
};

struct ValidationOptions {
    std::uint64_t seed = 1;
    /// Multiplies the quadratic-differential norm constant inside the decay
    /// suite. Anything but 1 is a negative control and should fail.
    double kappa_scale = 1.0;
};

ValidationReport validate(const ValidationOptions& options = {});

void print_report(std::ostream& out, const ValidationReport& report);

}  // namespace tmhf
