#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ploewner::cli {

/// Grid of frequencies in rad/s.
struct OmegaGrid {
    double min = 1e-2;
    double max = 1e4;
    std::size_t count = 400;
    bool log_spacing = true;
};

struct RunConfig {
    double eps = 1e-7;
    double eps_cond = 1e6;
    bool explicit_partition = false;
    OmegaGrid omega_grid;
    std::vector<double> param_grid; // expanded from a list or --uniform
    unsigned threads = 1;
};

std::vector<double> linspace(double lo, double hi, std::size_t count);
std::vector<double> logspace(double lo, double hi, std::size_t count);
std::vector<double> expand(const OmegaGrid& grid);

/// Entry point shared by the executable and the tests. Returns the process
/// exit code: 0 success, 1 evaluation failure or violated bound, 2 bad input.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ploewner::cli
