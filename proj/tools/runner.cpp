#include "runner.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "acceptance.hpp"
#include "bsl/io.hpp"
#include "bsl/quadratic.hpp"
#include "bsl/symbols.hpp"

namespace bsl::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kTaskOrder{"normal-form", "birkhoff", "moser", "spectrum", "pseudospec", "action",
                                          "verify"};

[[noreturn]] void config_fail(const std::string& what) { throw Error(ErrorKind::ConfigError, what); }

cplx complex_from(const json& j, const std::string& field) {
    if (j.is_number()) return j.get<double>();
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    config_fail("\"" + field + "\" must be a number or [re, im]");
}

template <class T>
T get_as(const json& obj, const std::string& key, const std::string& where, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        config_fail("\"" + where + "." + key + "\" has the wrong type");
    }
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) config_fail("\"" + where + "\" must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) config_fail("unknown key \"" + it.key() + "\" in " + where);
}

MonomialSymbol symbol_from_config(const json& j, const fs::path& base) {
    if (j.is_string()) return parse_symbol(j.get<std::string>());
    if (j.is_object() && j.size() == 1 && j.contains("file")) {
        fs::path p = j["file"].get<std::string>();
        if (p.is_relative()) p = base / p;
        return parse_symbol(read_text_file(p.string()));
    }
    return parse_symbol(j.dump());
}

std::string json_dump(const json& j) { return j.dump(2) + "\n"; }

json cjson(cplx z) { return json::array({z.real(), z.imag()}); }

json mat_json(const Mat2c& m) {
    return json::array({json::array({cjson(m[0][0]), cjson(m[0][1])}), json::array({cjson(m[1][0]), cjson(m[1][1])})});
}

int severity(const Error& e) {
    switch (e.kind()) {
        case ErrorKind::NoConvergence:
        case ErrorKind::NewtonDiverged:
        case ErrorKind::InversionFailed:
        case ErrorKind::QuadratureFailed:
            return kConvergenceFailure;
        case ErrorKind::UnmatchedEigenvalue:
            return kToleranceFailure;
        default:
            return kConfigError;
    }
}

bool is_homogeneous_quadratic(const MonomialSymbol& s) {
    if (s.empty()) return false;
    for (const auto& [k, v] : s.terms())
        if (k.first + k.second != 2 && v != cplx(0.0)) return false;
    return true;
}

ComplexQuadraticForm quadratic_part(const MonomialSymbol& s) {
    return ComplexQuadraticForm::from_z_coefficients(s.coeff(2, 0), s.coeff(0, 2), s.coeff(1, 1));
}

class Writer {
public:
    Writer(const fs::path& dir, RunResult& res) : dir_(dir), res_(res) {}
    void write(const std::string& name, const std::string& content) {
        const fs::path p = dir_ / name;
        std::ofstream out(p, std::ios::binary);
        if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + p.string());
        out << content;
        out.close();
        Artifact a;
        a.path = name;
        a.sha256 = sha256_file(p);
        a.bytes = fs::file_size(p);
        res_.artifacts.push_back(a);
    }

private:
    fs::path dir_;
    RunResult& res_;
};

std::string suffix(const ExperimentConfig& cfg, std::size_t i) {
    return cfg.hbar.size() == 1 ? std::string() : "_h" + std::to_string(i);
}

}  // namespace

std::string sha256_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot read " + p.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 14];
    while (in) {
        in.read(buf, sizeof(buf));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    return os.str();
}

MonomialSymbol load_symbol(const std::string& file_or_text) {
    std::error_code ec;
    if (fs::is_regular_file(file_or_text, ec)) return parse_symbol(read_text_file(file_or_text));
    return parse_symbol(file_or_text);
}

ExperimentConfig parse_config(const std::string& text, const fs::path& base) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        std::size_t line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw Error(ErrorKind::ParseError,
                    "config line " + std::to_string(line) + ", column " + std::to_string(col) + ": malformed JSON");
    }
    check_keys(j,
               {"symbol", "hbar", "tasks", "output_dir", "seed", "spectrum", "pseudospec", "birkhoff", "moser", "action",
                "tolerances"},
               "config");
    ExperimentConfig cfg;
    if (j.contains("symbol")) cfg.symbol = symbol_from_config(j["symbol"], base);
    if (j.contains("hbar")) {
        const json& h = j["hbar"];
        if (h.is_number())
            cfg.hbar.push_back(h.get<double>());
        else if (h.is_array())
            for (const auto& v : h) {
                if (!v.is_number()) config_fail("\"hbar\" entries must be numbers");
                cfg.hbar.push_back(v.get<double>());
            }
        else
            config_fail("\"hbar\" must be a number or a list");
    }
    for (double h : cfg.hbar)
        if (!(h > 0.0 && h <= 1.0)) config_fail("hbar values must lie in (0, 1]");
    if (j.contains("tasks")) {
        if (!j["tasks"].is_array()) config_fail("\"tasks\" must be a list");
        for (const auto& t : j["tasks"]) {
            if (!t.is_string()) config_fail("task names must be strings");
            const std::string name = t.get<std::string>();
            if (std::find(kTaskOrder.begin(), kTaskOrder.end(), name) == kTaskOrder.end())
                config_fail("unknown task \"" + name + "\"");
            cfg.tasks.push_back(name);
        }
    }
    if (cfg.tasks.empty()) config_fail("no tasks requested");
    if (j.contains("output_dir")) {
        fs::path p = get_as<std::string>(j, "output_dir", "config", "");
        cfg.output_dir = p.is_relative() ? base / p : p;
    }
    cfg.seed = get_as<std::uint64_t>(j, "seed", "config", 0);

    if (j.contains("spectrum")) {
        const json& s = j["spectrum"];
        check_keys(s, {"count", "tol", "n_start", "n_cap"}, "spectrum");
        cfg.spectrum.count = get_as<int>(s, "count", "spectrum", cfg.spectrum.count);
        cfg.spectrum.tol = get_as<double>(s, "tol", "spectrum", cfg.spectrum.tol);
        cfg.spectrum.n_start = get_as<int>(s, "n_start", "spectrum", cfg.spectrum.n_start);
        cfg.spectrum.n_cap = get_as<int>(s, "n_cap", "spectrum", cfg.spectrum.n_cap);
        if (cfg.spectrum.count < 1 || cfg.spectrum.n_start < 1 || cfg.spectrum.n_cap < cfg.spectrum.n_start)
            config_fail("invalid spectrum settings");
    }
    if (j.contains("pseudospec")) {
        const json& p = j["pseudospec"];
        check_keys(p, {"rect", "res", "c", "c_range", "n_max", "method"}, "pseudospec");
        auto& ps = cfg.pseudospec;
        if (p.contains("rect")) {
            const auto r = get_as<std::vector<double>>(p, "rect", "pseudospec", {});
            if (r.size() != 4 || !(r[1] > r[0]) || !(r[3] > r[2])) config_fail("\"pseudospec.rect\" must be [x0,x1,y0,y1]");
            ps.rect = {r[0], r[1], r[2], r[3]};
        }
        if (p.contains("res")) {
            const auto r = get_as<std::vector<int>>(p, "res", "pseudospec", {});
            if (r.size() != 2 || r[0] < 2 || r[1] < 2) config_fail("\"pseudospec.res\" must be [nx,ny], each >= 2");
            ps.nx = r[0];
            ps.ny = r[1];
        }
        if (p.contains("c")) ps.c = get_as<double>(p, "c", "pseudospec", 0.0);
        if (p.contains("c_range")) {
            const auto r = get_as<std::vector<double>>(p, "c_range", "pseudospec", {});
            if (r.size() != 3 || r[2] < 1 || !(r[1] >= r[0])) config_fail("\"pseudospec.c_range\" must be [min,max,steps]");
            ps.c_min = r[0];
            ps.c_max = r[1];
            ps.c_steps = static_cast<int>(r[2]);
        }
        ps.n_max = get_as<int>(p, "n_max", "pseudospec", ps.n_max);
        if (ps.n_max < 2) config_fail("\"pseudospec.n_max\" must be >= 2");
        const std::string m = get_as<std::string>(p, "method", "pseudospec", "auto");
        if (m == "auto")
            ps.method = SigmaMethod::Auto;
        else if (m == "dense")
            ps.method = SigmaMethod::Dense;
        else if (m == "banded")
            ps.method = SigmaMethod::Banded;
        else
            config_fail("\"pseudospec.method\" must be auto, dense or banded");
    }
    if (j.contains("birkhoff")) {
        check_keys(j["birkhoff"], {"degree"}, "birkhoff");
        cfg.birkhoff.degree = get_as<int>(j["birkhoff"], "degree", "birkhoff", cfg.birkhoff.degree);
        if (cfg.birkhoff.degree < 2) config_fail("\"birkhoff.degree\" must be >= 2");
    }
    if (j.contains("moser")) {
        const json& m = j["moser"];
        check_keys(m, {"K", "D", "g", "mu"}, "moser");
        cfg.moser.K = get_as<int>(m, "K", "moser", cfg.moser.K);
        cfg.moser.D = get_as<int>(m, "D", "moser", cfg.moser.D);
        if (m.contains("g")) cfg.moser.g = symbol_from_config(m["g"], base);
        if (m.contains("mu")) {
            if (!m["mu"].is_array()) config_fail("\"moser.mu\" must be a list of coefficients");
            cfg.moser.mu.clear();
            for (const auto& v : m["mu"]) cfg.moser.mu.push_back(complex_from(v, "moser.mu"));
        }
        if (cfg.moser.K < 0) config_fail("\"moser.K\" must be >= 0");
    }
    if (j.contains("action")) {
        const json& a = j["action"];
        check_keys(a, {"d", "energy", "winding"}, "action");
        if (a.contains("d")) cfg.action.d = complex_from(a["d"], "action.d");
        if (a.contains("energy")) cfg.action.energy = complex_from(a["energy"], "action.energy");
        cfg.action.winding = get_as<int>(a, "winding", "action", cfg.action.winding);
    }
    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        check_keys(t, {"spectrum_relative", "moser_residual", "action"}, "tolerances");
        cfg.tolerances.spectrum_relative = get_as<double>(t, "spectrum_relative", "tolerances", cfg.tolerances.spectrum_relative);
        cfg.tolerances.moser_residual = get_as<double>(t, "moser_residual", "tolerances", cfg.tolerances.moser_residual);
        cfg.tolerances.action = get_as<double>(t, "action", "tolerances", cfg.tolerances.action);
    }

    const std::set<std::string> need_symbol{"spectrum", "pseudospec", "normal-form", "birkhoff"};
    const std::set<std::string> need_hbar{"spectrum", "pseudospec"};
    for (const auto& t : cfg.tasks) {
        if (need_symbol.count(t) && !cfg.symbol) config_fail("task \"" + t + "\" needs a symbol");
        if (t == "moser" && !cfg.symbol && !cfg.moser.g) config_fail("task \"moser\" needs a symbol or moser.g");
        if (need_hbar.count(t) && cfg.hbar.empty()) config_fail("task \"" + t + "\" needs hbar");
    }
    return cfg;
}

RunResult run(const ExperimentConfig& cfg, std::ostream& log) {
    RunResult res;
    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) throw Error(ErrorKind::ConfigError, "cannot create " + cfg.output_dir.string());
    Writer out(cfg.output_dir, res);
    auto raise = [&](int code) { res.exit_code = std::max(res.exit_code, code); };
    auto note = [&](const std::string& m) {
        res.messages.push_back(m);
        log << m << '\n';
    };

    for (const auto& task : kTaskOrder) {
        if (std::find(cfg.tasks.begin(), cfg.tasks.end(), task) == cfg.tasks.end()) continue;
        try {
            if (task == "normal-form") {
                const auto Q = quadratic_part(*cfg.symbol);
                const auto ell = ellipticity_check(Q);
                if (!ell.elliptic) throw Error(ErrorKind::NonEllipticHessian, "quadratic part is not elliptic");
                const auto nf = reduce_quadratic(Q);
                json j;
                j["a"] = cjson(Q.a);
                j["b"] = cjson(Q.b);
                j["c"] = cjson(Q.c);
                j["delta"] = cjson(nf.delta);
                j["zeta"] = cjson(nf.zeta);
                j["d0"] = cjson(nf.d0);
                j["harmonic_coefficient"] = cjson(nf.harmonic_coefficient);
                j["trace"] = cjson(Q.tr());
                j["kappa1"] = mat_json(nf.kappa1);
                j["kappa2"] = mat_json(nf.kappa2);
                j["kappa3"] = mat_json(nf.kappa3);
                j["kappa"] = mat_json(nf.kappa);
                j["kappa_zv"] = mat_json(nf.kappa_zv);
                for (double h : cfg.hbar) {
                    json lev = json::array();
                    for (cplx z : exact_quadratic_spectrum(Q, h, 10)) lev.push_back(cjson(z));
                    j["exact_spectrum"].push_back({{"hbar", h}, {"eigenvalues", lev}});
                }
                out.write("normal_form.json", json_dump(j));
                note("normal-form: d0 = " + format_double(nf.d0.real()) + " + " + format_double(nf.d0.imag()) + "i");
            } else if (task == "birkhoff") {
                const int D = cfg.birkhoff.degree;
                const auto B = birkhoff_normal_form(TaylorTable2D::from_symbol(*cfg.symbol, std::max(D, cfg.symbol->degree())), D);
                json j;
                j["degree"] = D;
                j["harmonic_coefficient"] = cjson(B.harmonic_coefficient);
                for (cplx m : B.mu0) j["mu0"].push_back(cjson(m));
                j["linear_map"] = mat_json(B.linear_map);
                j["generators"] = json::array();
                for (const auto& g : B.generators) j["generators"].push_back(json::parse(symbol_to_json(g.to_symbol())));
                out.write("birkhoff.json", json_dump(j));
                note("birkhoff: " + std::to_string(B.generators.size()) + " generators");
            } else if (task == "moser") {
                MonomialSymbol g;
                if (cfg.moser.g) {
                    g = *cfg.moser.g;
                } else {
                    for (const auto& [k, v] : cfg.symbol->terms())
                        if (k.first + k.second != 2) g.add(k.first, k.second, v);
                }
                const int K = cfg.moser.K;
                const int D = cfg.moser.D > 0 ? cfg.moser.D : std::max(g.degree(), 2) + 2 * (K + 1);
                const auto mu = FormalSymbol::from_table(TaylorTable2D::radial(cfg.moser.mu, D), K + 1);
                const auto gs = FormalSymbol::from_table(TaylorTable2D::from_symbol(g, D), K + 1);
                const auto m = moser_normal_form(mu, gs, K);
                double worst = 0.0;
                for (int k = 0; k <= m.residual.order(); ++k)
                    for (int a = 0; a <= D; ++a)
                        for (int b = 0; a + b + 2 * k <= D; ++b) worst = std::max(worst, std::abs(m.residual[k].at(a, b)));
                json j;
                j["K"] = K;
                j["D"] = D;
                j["a"] = json::parse(formal_symbol_to_json(m.a));
                j["r"] = json::parse(formal_symbol_to_json(m.r));
                j["max_residual"] = worst;
                out.write("moser.json", json_dump(j));
                note("moser: max residual " + format_double(worst));
                if (!(worst <= cfg.tolerances.moser_residual * (1.0 + g.degree()))) raise(kToleranceFailure);
            } else if (task == "spectrum") {
                json summary = json::array();
                for (std::size_t i = 0; i < cfg.hbar.size(); ++i) {
                    const double h = cfg.hbar[i];
                    const auto s = eigen_spectrum(*cfg.symbol, h, cfg.spectrum.count, cfg.spectrum.tol,
                                                  cfg.spectrum.n_start, cfg.spectrum.n_cap);
                    std::ostringstream csv;
                    write_eigenvalues_csv(csv, s.eigenvalues);
                    out.write("eig" + suffix(cfg, i) + ".csv", csv.str());
                    json e{{"hbar", h}, {"n_max_used", s.n_max_used}, {"convergence_gap", s.convergence_gap},
                           {"converged", s.converged}};
                    if (!s.converged) raise(kConvergenceFailure);
                    if (is_homogeneous_quadratic(*cfg.symbol) && ellipticity_check(quadratic_part(*cfg.symbol)).elliptic) {
                        const auto ex = exact_quadratic_spectrum(quadratic_part(*cfg.symbol), h, cfg.spectrum.count);
                        double worst = 0.0;
                        for (std::size_t k = 0; k < s.eigenvalues.size() && k < ex.size(); ++k)
                            worst = std::max(worst, std::abs(s.eigenvalues[k] - ex[k]) / std::abs(ex[k]));
                        e["max_relative_error"] = worst;
                        if (!(worst <= cfg.tolerances.spectrum_relative)) raise(kToleranceFailure);
                    }
                    summary.push_back(e);
                    note("spectrum: hbar " + format_double(h) + ", n_max " + std::to_string(s.n_max_used));
                }
                out.write("spectrum.json", json_dump(summary));
            } else if (task == "pseudospec") {
                const auto& ps = cfg.pseudospec;
                json summary = json::array();
                for (std::size_t i = 0; i < cfg.hbar.size(); ++i) {
                    const double h = cfg.hbar[i];
                    const auto M = assemble_toeplitz(*cfg.symbol, PlanckParameter(h), BasisTruncation{ps.n_max});
                    const auto field = resolvent_grid(M, ps.rect, ps.nx, ps.ny, ps.method);
                    const auto ev = dense_eigenvalues(M.entries);
                    json e{{"hbar", h}, {"n_max", ps.n_max}};
                    double c = 0.0;
                    if (ps.c) {
                        c = *ps.c;
                    } else {
                        const auto scan = scan_isolating_c(field, h, ev, ps.c_min, ps.c_max, ps.c_steps);
                        e["isolating_c_found"] = scan.found;
                        e["isolating_c_range"] = {scan.c_lo, scan.c_hi};
                        c = scan.found ? 0.5 * (scan.c_lo + scan.c_hi) : ps.c_min;
                    }
                    const auto mask = analytic_pseudospectrum(field, c, h, ev);
                    std::ostringstream csv;
                    csv << "re(\xce\xbb),im(\xce\xbb),sigma_min,mask\n";
                    for (int iy = 0; iy < field.ny; ++iy)
                        for (int ix = 0; ix < field.nx; ++ix) {
                            const cplx l = field.lambda(ix, iy);
                            csv << format_double(l.real()) << ',' << format_double(l.imag()) << ','
                                << format_double(field.at(ix, iy)) << ',' << static_cast<int>(mask.mask[iy * field.nx + ix])
                                << '\n';
                        }
                    out.write("field" + suffix(cfg, i) + ".csv", csv.str());
                    e["c"] = c;
                    e["components"] = mask.components;
                    e["eigenvalues_per_component"] = mask.eigen_count;
                    e["isolating"] = mask.isolating();
                    summary.push_back(e);
                    note("pseudospec: hbar " + format_double(h) + ", c " + format_double(c) + ", " +
                         std::to_string(mask.components) + " components");
                }
                out.write("pseudospec.json", json_dump(summary));
            } else if (task == "action") {
                const auto& a = cfg.action;
                const cplx num = action_integral(a.d, a.energy, a.winding);
                const cplx closed = 2.0 * kPi * a.energy * static_cast<double>(a.winding) / a.d;
                json j{{"numeric", cjson(num)}, {"closed_form", cjson(closed)}, {"error", std::abs(num - closed)}};
                out.write("action.json", json_dump(j));
                note("action: " + format_double(num.real()) + " + " + format_double(num.imag()) + "i");
                if (!(std::abs(num - closed) <= cfg.tolerances.action)) raise(kToleranceFailure);
            } else if (task == "verify") {
                std::ostringstream lines;
                acceptance::Options opt;
                opt.seed = cfg.seed;
                const auto crit = acceptance::run_all(opt, lines);
                out.write("acceptance.txt", lines.str());
                log << lines.str();
                for (const auto& c : crit)
                    if (!c.passed) raise(kToleranceFailure);
            }
        } catch (const Error& e) {
            note(task + ": " + e.what());
            raise(severity(e));
        }
    }

    json manifest;
    manifest["seed"] = cfg.seed;
    manifest["tasks"] = cfg.tasks;
    manifest["exit_code"] = res.exit_code;
    manifest["artifacts"] = json::array();
    for (const auto& a : res.artifacts)
        manifest["artifacts"].push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
    std::ofstream mf(cfg.output_dir / "manifest.json", std::ios::binary);
    mf << json_dump(manifest);
    return res;
}

}  // namespace bsl::cli
