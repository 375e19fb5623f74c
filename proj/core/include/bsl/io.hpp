#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bsl/bargmann.hpp"
#include "bsl/symbols.hpp"

namespace bsl {

// Shortest decimal string that parses back to the same double; integral
// values keep a trailing ".0".
std::string format_double(double x);

// JSON map {"alpha,beta": [re, im]} or one of the built-in shorthands
// "p^2+q^2", "|z|^2", "z*zbar". Throws ParseError with line and column.
MonomialSymbol parse_symbol(const std::string& text);
std::string symbol_to_json(const MonomialSymbol& s);

FormalSymbol parse_formal_symbol(const std::string& text);
std::string formal_symbol_to_json(const FormalSymbol& f);

// header "row,col,re,im", then one line per stored entry (zeros skipped)
void write_matrix_csv(std::ostream& os, const MatrixXc& M);
// "re,im" per eigenvalue
void write_eigenvalues_csv(std::ostream& os, const std::vector<cplx>& ev);

std::string read_text_file(const std::string& path);

}  // namespace bsl
