#include "sncres/poly_io.hpp"
#include "sncres/errors.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace sncres {

namespace {

struct Parser {
    const std::vector<std::string>& vars;
    const std::string& s;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        std::ostringstream os;
        os << "parse error at byte " << pos << ": " << what;
        throw input_error(os.str());
    }

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool eof() { skip_ws(); return pos >= s.size(); }

    char peek() { skip_ws(); return pos < s.size() ? s[pos] : '\0'; }

    bool accept(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) { ++pos; return true; }
        return false;
    }

    static bool ident_start(char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }
    static bool ident_cont(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
    }

    std::string read_ident() {
        skip_ws();
        std::size_t start = pos;
        if (pos >= s.size() || !ident_start(s[pos])) fail("expected identifier");
        ++pos;
        while (pos < s.size() && ident_cont(s[pos])) ++pos;
        return s.substr(start, pos - start);
    }

    Int read_integer() {
        skip_ws();
        std::size_t start = pos;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        if (pos == start) fail("expected integer");
        return Int(s.substr(start, pos - start));
    }

    Rat read_rational() {
        Int num = read_integer();
        if (accept('/')) {
            Int den = read_integer();
            if (den == 0) fail("zero denominator");
            Rat r(num, den);
            r.canonicalize();
            return r;
        }
        return Rat(num);
    }

    long read_exponent() {
        Int e = read_integer();
        if (e < 0 || e > 100000) fail("exponent out of range");
        return e.get_si();
    }

    Poly parse_expr() {
        bool neg = false;
        if (accept('-')) neg = true;
        else accept('+');
        Poly acc = parse_term();
        if (neg) acc = -acc;
        for (;;) {
            char c = peek();
            if (c == '+') { ++pos; acc = acc + parse_term(); }
            else if (c == '-') { ++pos; acc = acc - parse_term(); }
            else break;
        }
        return acc;
    }

    Poly parse_term() {
        Poly acc = parse_factor();
        for (;;) {
            char c = peek();
            if (c == '*') { ++pos; acc = acc * parse_factor(); continue; }
            // optional '*': a factor can start right after the previous one
            if (ident_start(c) || c == '(' || std::isdigit(static_cast<unsigned char>(c))) {
                acc = acc * parse_factor();
                continue;
            }
            break;
        }
        return acc;
    }

    Poly parse_factor() {
        char c = peek();
        Poly base(vars);
        if (c == '(') {
            ++pos;
            base = parse_expr();
            if (!accept(')')) fail("expected ')'");
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            base = Poly::constant(vars, read_rational());
        } else if (ident_start(c)) {
            std::string name = read_ident();
            if (std::find(vars.begin(), vars.end(), name) == vars.end()) {
                pos -= name.size();
                fail("unknown variable '" + name + "'");
            }
            base = Poly::variable(vars, name);
        } else {
            fail("expected factor");
        }
        if (accept('^')) {
            long e = read_exponent();
            base = base.pow(static_cast<unsigned long>(e));
        }
        return base;
    }
};

} // namespace

Poly parse_poly(const std::vector<std::string>& vars, const std::string& text) {
    Parser p{vars, text};
    if (p.eof()) throw input_error("parse error at byte 0: empty polynomial");
    Poly out = p.parse_expr();
    if (!p.eof()) p.fail("trailing input");
    return out;
}

std::string print_poly(const Poly& p) {
    if (p.is_zero()) return "0";
    // grevlex-descending canonical ordering
    std::vector<std::pair<Exponents, Rat>> ts(p.terms().begin(), p.terms().end());
    MonoOrder ord = MonoOrder::Grevlex();
    std::sort(ts.begin(), ts.end(), [&](const auto& a, const auto& b) {
        return ord.less(b.first, a.first);
    });
    std::ostringstream os;
    bool first = true;
    for (const auto& [e, c] : ts) {
        Rat a = c;
        if (first) {
            if (sgn(a) < 0) { os << "-"; a = -a; }
        } else {
            os << (sgn(a) < 0 ? " - " : " + ");
            if (sgn(a) < 0) a = -a;
        }
        first = false;
        bool any_var = std::any_of(e.begin(), e.end(), [](int k) { return k != 0; });
        bool wrote_coeff = false;
        if (!any_var || a != 1) {
            os << a.get_str();
            wrote_coeff = true;
        }
        if (any_var) {
            bool first_var = !wrote_coeff;
            for (std::size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                if (!first_var) os << "*";
                first_var = false;
                os << p.vars()[i];
                if (e[i] != 1) os << "^" << e[i];
            }
        }
    }
    return os.str();
}

std::string print_point(const Point& p) {
    std::ostringstream os;
    os << "(";
    for (std::size_t i = 0; i < p.coords.size(); ++i) {
        if (i) os << ", ";
        os << p.coords[i].get_str();
    }
    os << ")";
    return os.str();
}

Point parse_point(const std::string& text, std::size_t expect_dim) {
    std::vector<Rat> coords;
    std::size_t pos = 0;
    auto skip = [&] {
        while (pos < text.size() && (std::isspace(static_cast<unsigned char>(text[pos])) ||
                                     text[pos] == '(' || text[pos] == ')' || text[pos] == ','))
            ++pos;
    };
    skip();
    while (pos < text.size()) {
        std::size_t start = pos;
        while (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) ||
                                     text[pos] == '-' || text[pos] == '/'))
            ++pos;
        if (pos == start) throw input_error("parse error at byte " + std::to_string(pos) + ": bad point");
        Rat r(text.substr(start, pos - start));
        r.canonicalize();
        coords.push_back(r);
        skip();
    }
    if (coords.size() != expect_dim)
        throw input_error("point has " + std::to_string(coords.size()) + " coordinates, expected " +
                          std::to_string(expect_dim));
    return Point(std::move(coords));
}

} // namespace sncres
