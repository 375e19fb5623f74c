#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>

#include "acceptance.hpp"
#include "bsl/io.hpp"
#include "bsl/spectral.hpp"
#include "runner.hpp"

namespace {

using namespace bsl;
using bsl::cli::ExitCode;

std::vector<double> split_numbers(const std::string& s, std::size_t want, const std::string& flag) {
    std::vector<double> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            v.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorKind::ConfigError, flag + " expects " + std::to_string(want) + " comma-separated numbers");
        }
    }
    if (v.size() != want)
        throw Error(ErrorKind::ConfigError, flag + " expects " + std::to_string(want) + " comma-separated numbers");
    return v;
}

cplx parse_complex(const std::string& s, const std::string& flag) {
    if (s.find(',') == std::string::npos) return split_numbers(s, 1, flag)[0];
    const auto v = split_numbers(s, 2, flag);
    return {v[0], v[1]};
}

void write_or_print(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + path);
    out << content;
}

int exit_for(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::NoConvergence:
        case ErrorKind::NewtonDiverged:
        case ErrorKind::InversionFailed:
        case ErrorKind::QuadratureFailed:
            return cli::kConvergenceFailure;
        case ErrorKind::UnmatchedEigenvalue:
            return cli::kToleranceFailure;
        default:
            return cli::kConfigError;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bsl: Toeplitz operators on the Bargmann space, spectra and normal forms"};
    app.require_subcommand(1);

    std::string symbol, out, config_path, out_dir;
    double hbar = 0.1;
    int count = 5, n_start = 64, n_cap = 4096;
    double tol = 1e-10;

    auto* spectrum = app.add_subcommand("spectrum", "smallest-modulus eigenvalues with adaptive truncation");
    spectrum->add_option("--symbol", symbol, "symbol file or inline text")->required();
    spectrum->add_option("--hbar", hbar, "semiclassical parameter")->required();
    spectrum->add_option("--count", count, "number of eigenvalues");
    spectrum->add_option("--tol", tol, "convergence tolerance");
    spectrum->add_option("--n-start", n_start, "initial truncation");
    spectrum->add_option("--n-cap", n_cap, "largest truncation");
    spectrum->add_option("--out", out, "CSV output (stdout when omitted)");

    std::string rect_s = "0,0.4,-0.05,0.35", res_s = "200,200", method_s = "auto";
    std::optional<double> c_opt;
    int n_max = 256;
    auto* pseudo = app.add_subcommand("pseudospec", "smallest singular value grid and c-mask");
    pseudo->add_option("--symbol", symbol, "symbol file or inline text")->required();
    pseudo->add_option("--hbar", hbar, "semiclassical parameter")->required();
    pseudo->add_option("--rect", rect_s, "x0,x1,y0,y1");
    pseudo->add_option("--res", res_s, "NX,NY");
    pseudo->add_option("--c", c_opt, "mask exponent (scanned when omitted)");
    pseudo->add_option("--n-max", n_max, "basis truncation");
    pseudo->add_option("--method", method_s, "auto, dense or banded");
    pseudo->add_option("--out", out, "CSV output (stdout when omitted)");

    std::string d_s = "1", e_s = "0.3";
    int winding = 1;
    auto* action = app.add_subcommand("action", "action integral over the harmonic energy loop");
    action->add_option("--d", d_s, "RE,IM");
    action->add_option("--energy", e_s, "RE,IM");
    action->add_option("--winding", winding, "winding number");

    auto* nform = app.add_subcommand("normal-form", "quadratic normal form data as JSON");
    nform->add_option("--symbol", symbol, "symbol file or inline text")->required();
    nform->add_option("--hbar", hbar, "hbar for the listed exact spectrum");
    nform->add_option("--out", out, "output directory");

    int degree = 6;
    auto* birk = app.add_subcommand("birkhoff", "classical Birkhoff normal form");
    birk->add_option("--symbol", symbol, "symbol file or inline text")->required();
    birk->add_option("--degree", degree, "truncation degree");
    birk->add_option("--out", out, "output directory");

    int K = 3;
    auto* moser = app.add_subcommand("moser", "Moser normal form for mu = identity");
    moser->add_option("--g", symbol, "perturbation symbol file or inline text")->required();
    moser->add_option("--K", K, "hbar order");
    moser->add_option("--out", out, "output directory");

    std::uint64_t seed = 0;
    std::vector<int> only;
    auto* verify = app.add_subcommand("verify", "run the acceptance suite");
    verify->add_option("--seed", seed, "seed for the randomized corpora");
    verify->add_option("--only", only, "criterion ids");

    auto* run = app.add_subcommand("run", "run an experiment config");
    run->add_option("config", config_path, "config JSON")->required();
    run->add_option("--out-dir", out_dir, "overrides output_dir");
    run->add_option("--seed", seed, "overrides seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (spectrum->parsed()) {
            const auto sym = cli::load_symbol(symbol);
            const auto r = eigen_spectrum(sym, PlanckParameter(hbar), count, tol, n_start, n_cap);
            std::ostringstream csv;
            write_eigenvalues_csv(csv, r.eigenvalues);
            write_or_print(out, csv.str());
            std::cerr << "n_max " << r.n_max_used << ", gap " << format_double(r.convergence_gap) << '\n';
            return r.converged ? cli::kOk : cli::kConvergenceFailure;
        }
        if (pseudo->parsed()) {
            const auto sym = cli::load_symbol(symbol);
            const auto rv = split_numbers(rect_s, 4, "--rect");
            const auto nv = split_numbers(res_s, 2, "--res");
            const auto M = assemble_toeplitz(sym, PlanckParameter(hbar), BasisTruncation{n_max});
            SigmaMethod m = SigmaMethod::Auto;
            if (method_s == "dense")
                m = SigmaMethod::Dense;
            else if (method_s == "banded")
                m = SigmaMethod::Banded;
            else if (method_s != "auto")
                throw Error(ErrorKind::ConfigError, "--method must be auto, dense or banded");
            const auto field = resolvent_grid(M, {rv[0], rv[1], rv[2], rv[3]}, static_cast<int>(nv[0]),
                                              static_cast<int>(nv[1]), m);
            const auto ev = dense_eigenvalues(M.entries);
            double c = 0.0;
            if (c_opt) {
                c = *c_opt;
            } else {
                const auto scan = scan_isolating_c(field, hbar, ev, 0.0, 1.0, 40);
                c = scan.found ? 0.5 * (scan.c_lo + scan.c_hi) : 0.0;
                std::cerr << (scan.found ? "isolating c range [" + format_double(scan.c_lo) + ", " +
                                               format_double(scan.c_hi) + "]"
                                         : std::string("no isolating c found"))
                          << '\n';
            }
            const auto mask = analytic_pseudospectrum(field, c, hbar, ev);
            std::ostringstream csv;
            csv << "re(\xce\xbb),im(\xce\xbb),sigma_min,mask\n";
            for (int iy = 0; iy < field.ny; ++iy)
                for (int ix = 0; ix < field.nx; ++ix) {
                    const cplx l = field.lambda(ix, iy);
                    csv << format_double(l.real()) << ',' << format_double(l.imag()) << ','
                        << format_double(field.at(ix, iy)) << ',' << static_cast<int>(mask.mask[iy * field.nx + ix])
                        << '\n';
                }
            write_or_print(out, csv.str());
            std::cerr << "c " << format_double(c) << ", components " << mask.components << '\n';
            return cli::kOk;
        }
        if (action->parsed()) {
            const cplx d = parse_complex(d_s, "--d"), E = parse_complex(e_s, "--energy");
            const cplx num = action_integral(d, E, winding);
            const cplx closed = 2.0 * kPi * E * static_cast<double>(winding) / d;
            std::cout << format_double(num.real()) << ',' << format_double(num.imag()) << '\n';
            std::cerr << "closed form " << format_double(closed.real()) << ',' << format_double(closed.imag())
                      << ", error " << format_double(std::abs(num - closed)) << '\n';
            return std::abs(num - closed) <= 1e-8 ? cli::kOk : cli::kToleranceFailure;
        }
        if (nform->parsed() || birk->parsed() || moser->parsed()) {
            cli::ExperimentConfig cfg;
            cfg.output_dir = out.empty() ? std::filesystem::path(".") : std::filesystem::path(out);
            cfg.hbar = {hbar};
            if (nform->parsed()) {
                cfg.symbol = cli::load_symbol(symbol);
                cfg.tasks = {"normal-form"};
            } else if (birk->parsed()) {
                cfg.symbol = cli::load_symbol(symbol);
                cfg.birkhoff.degree = degree;
                cfg.tasks = {"birkhoff"};
            } else {
                cfg.moser.g = cli::load_symbol(symbol);
                cfg.moser.K = K;
                cfg.tasks = {"moser"};
            }
            return cli::run(cfg, std::cerr).exit_code;
        }
        if (verify->parsed()) {
            acceptance::Options opt;
            opt.seed = seed;
            opt.only = only;
            const auto res = acceptance::run_all(opt, std::cout);
            int failed = 0;
            for (const auto& c : res) failed += c.passed ? 0 : 1;
            std::cout << (res.size() - failed) << "/" << res.size() << " criteria passed" << std::endl;
            return failed == 0 ? cli::kOk : cli::kToleranceFailure;
        }
        if (run->parsed()) {
            const std::filesystem::path cp(config_path);
            auto cfg = cli::parse_config(read_text_file(config_path), cp.parent_path().empty() ? "." : cp.parent_path());
            if (!out_dir.empty()) cfg.output_dir = out_dir;
            if (run->count("--seed")) cfg.seed = seed;
            return cli::run(cfg, std::cerr).exit_code;
        }
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return exit_for(e);
    } catch (const std::exception& e) {
        std::cerr << e.what() << '\n';
        return cli::kConfigError;
    }
    return cli::kOk;
}
