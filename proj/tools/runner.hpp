#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bsl/bargmann.hpp"
#include "bsl/spectral.hpp"

namespace bsl::cli {

enum ExitCode { kOk = 0, kConfigError = 1, kToleranceFailure = 2, kConvergenceFailure = 3 };

struct SpectrumTask {
    int count = 5;
    double tol = 1e-10;
    int n_start = 64;
    int n_cap = 4096;
};

struct PseudospecTask {
    GridRect rect{0.0, 0.4, -0.05, 0.35};
    int nx = 200, ny = 200;
    std::optional<double> c;  // scan for an isolating c when absent
    double c_min = 0.0, c_max = 1.0;
    int c_steps = 40;
    int n_max = 256;
    SigmaMethod method = SigmaMethod::Auto;
};

struct BirkhoffTask {
    int degree = 6;
};

struct MoserTask {
    int K = 3;
    int D = -1;  // default deg(g) + 2(K+1)
    std::optional<MonomialSymbol> g;  // defaults to the non-quadratic part of the symbol
    std::vector<cplx> mu{0.0, 1.0};
};

struct ActionTask {
    cplx d = 1.0;
    cplx energy = 0.3;
    int winding = 1;
};

struct Tolerances {
    double spectrum_relative = 1e-6;
    double moser_residual = 1e-12;
    double action = 1e-8;
};

struct ExperimentConfig {
    std::optional<MonomialSymbol> symbol;
    std::vector<double> hbar;
    std::vector<std::string> tasks;
    std::filesystem::path output_dir = "bsl_out";
    std::uint64_t seed = 0;
    SpectrumTask spectrum;
    PseudospecTask pseudospec;
    BirkhoffTask birkhoff;
    MoserTask moser;
    ActionTask action;
    Tolerances tolerances;
};

// Throws Error(ConfigError / ParseError). Relative symbol paths resolve
// against base_dir.
ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = ".");

// Reads a symbol from a file when the argument names one, otherwise parses
// the text itself (JSON or a built-in shorthand).
MonomialSymbol load_symbol(const std::string& file_or_text);

struct Artifact {
    std::string path;  // relative to output_dir
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunResult {
    int exit_code = kOk;
    std::vector<Artifact> artifacts;
    std::vector<std::string> messages;
};

// Executes the requested tasks and writes manifest.json into output_dir.
RunResult run(const ExperimentConfig& cfg, std::ostream& log);

std::string sha256_file(const std::filesystem::path& p);

}  // namespace bsl::cli
