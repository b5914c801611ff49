#ifndef SNCRES_POLY_IO_HPP
#define SNCRES_POLY_IO_HPP

#include <string>
#include <vector>

#include "sncres/poly.hpp"

namespace sncres {

// Text grammar: variables are identifiers ([A-Za-z_][A-Za-z0-9_']*), '^' for
// powers, '*' optional between a coefficient and a variable, rationals as
// "a/b". Parentheses and unary minus are accepted. parse(print(p)) == p.
Poly parse_poly(const std::vector<std::string>& vars, const std::string& text);

std::string print_poly(const Poly& p);

std::string print_point(const Point& p);
Point parse_point(const std::string& text, std::size_t expect_dim);

} // namespace sncres

#endif
