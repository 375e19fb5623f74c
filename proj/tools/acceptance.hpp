#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace bsl::acceptance {

struct Criterion {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct Options {
    std::uint64_t seed = 0;
    std::vector<int> only;  // empty runs every criterion
};

// Runs the acceptance criteria in order, printing one line per criterion to
// os as soon as it finishes.
std::vector<Criterion> run_all(const Options& opt, std::ostream& os);

std::string format_line(const Criterion& c);

// least squares y = a + b x
struct LineFit {
    double intercept = 0.0, slope = 0.0, r2 = 0.0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bsl::acceptance
