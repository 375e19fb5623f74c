#include "bsl/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <ostream>
#include <sstream>

namespace bsl {

using nlohmann::json;

std::string format_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    std::string s(buf, res.ptr);
    if (std::isfinite(x) && s.find_first_of(".e") == std::string::npos) s += ".0";
    return s;
}

namespace {

std::string strip(const std::string& s) {
    std::string out;
    for (char ch : s)
        if (!std::isspace(static_cast<unsigned char>(ch))) out += ch;
    return out;
}

[[noreturn]] void parse_fail(const std::string& text, std::size_t byte, const std::string& what) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what);
}

std::size_t locate(const std::string& text, const std::string& key) {
    const auto p = text.find("\"" + key + "\"");
    return p == std::string::npos ? 0 : p;
}

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        parse_fail(text, e.byte > 0 ? e.byte - 1 : 0, "malformed JSON");
    }
}

MonomialSymbol symbol_from_json(const json& j, const std::string& text) {
    if (!j.is_object()) parse_fail(text, 0, "symbol must be a JSON object");
    MonomialSymbol s;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const std::size_t at = locate(text, key);
        const auto comma = key.find(',');
        int a = -1, b = -1;
        if (comma != std::string::npos) {
            const char* k = key.data();
            auto r1 = std::from_chars(k, k + comma, a);
            auto r2 = std::from_chars(k + comma + 1, k + key.size(), b);
            if (r1.ec != std::errc() || r1.ptr != k + comma || r2.ec != std::errc() || r2.ptr != k + key.size())
                a = b = -1;
        }
        if (a < 0 || b < 0) parse_fail(text, at, "key \"" + key + "\" is not \"alpha,beta\" with nonnegative integers");
        const json& v = it.value();
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            parse_fail(text, at, "value of \"" + key + "\" must be [re, im]");
        s.add(a, b, cplx(v[0].get<double>(), v[1].get<double>()));
    }
    return s;
}

json symbol_json(const MonomialSymbol& s) {
    json j = json::object();
    for (const auto& [k, v] : s.terms())
        j[std::to_string(k.first) + "," + std::to_string(k.second)] = json::array({v.real(), v.imag()});
    return j;
}

}  // namespace

MonomialSymbol parse_symbol(const std::string& text) {
    const std::string t = strip(text);
    if (t == "p^2+q^2") return MonomialSymbol{{{1, 1}, 2.0}};
    if (t == "|z|^2" || t == "z*zbar") return MonomialSymbol{{{1, 1}, 1.0}};
    if (t.empty() || t.front() != '{') parse_fail(text, 0, "expected a JSON object or a built-in shorthand");
    return symbol_from_json(parse_json(text), text);
}

std::string symbol_to_json(const MonomialSymbol& s) { return symbol_json(s).dump(); }

FormalSymbol parse_formal_symbol(const std::string& text) {
    const json j = parse_json(text);
    if (!j.is_object() || !j.contains("K") || !j.contains("D") || !j.contains("terms"))
        parse_fail(text, 0, "formal symbol needs \"K\", \"D\" and \"terms\"");
    if (!j["K"].is_number_integer() || !j["D"].is_number_integer() || !j["terms"].is_array())
        parse_fail(text, 0, "\"K\" and \"D\" must be integers and \"terms\" an array");
    const int K = j["K"].get<int>(), D = j["D"].get<int>();
    if (K < 0 || D < 0) parse_fail(text, locate(text, "K"), "negative K or D");
    if (static_cast<int>(j["terms"].size()) > K + 1) parse_fail(text, locate(text, "terms"), "more than K+1 terms");
    FormalSymbol f(K, D);
    for (std::size_t k = 0; k < j["terms"].size(); ++k) {
        const MonomialSymbol s = symbol_from_json(j["terms"][k], text);
        if (s.degree() > D) parse_fail(text, locate(text, "terms"), "term exceeds degree D");
        f[static_cast<int>(k)] = TaylorTable2D::from_symbol(s, D);
    }
    return f;
}

std::string formal_symbol_to_json(const FormalSymbol& f) {
    json j;
    j["K"] = f.order();
    j["D"] = f.degree();
    j["terms"] = json::array();
    for (const auto& t : f.terms()) j["terms"].push_back(symbol_json(t.to_symbol()));
    return j.dump();
}

void write_matrix_csv(std::ostream& os, const MatrixXc& M) {
    os << "row,col,re,im\n";
    for (Eigen::Index r = 0; r < M.rows(); ++r)
        for (Eigen::Index c = 0; c < M.cols(); ++c) {
            const cplx v = M(r, c);
            if (v == cplx(0.0)) continue;
            os << r << ',' << c << ',' << format_double(v.real()) << ',' << format_double(v.imag()) << '\n';
        }
}

void write_eigenvalues_csv(std::ostream& os, const std::vector<cplx>& ev) {
    for (cplx z : ev) os << format_double(z.real()) << ',' << format_double(z.imag()) << '\n';
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace bsl
