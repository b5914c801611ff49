#ifndef SNCRES_POLY_HPP
#define SNCRES_POLY_HPP

#include <map>
#include <string>
#include <vector>
#include <limits>
#include <initializer_list>

#include "sncres/rational.hpp"

namespace sncres {

// Exponent vector; length always equals the ambient variable count.
using Exponents = std::vector<int>;

// Sentinel for the order of the zero polynomial.
inline constexpr long kOrderInfinity = std::numeric_limits<long>::max();

struct MonoOrder {
    enum Kind { grevlex, lex };
    Kind kind = grevlex;

    static MonoOrder Grevlex() { return MonoOrder{grevlex}; }
    static MonoOrder Lex() { return MonoOrder{lex}; }

    // strict "a comes before b" (a is the smaller monomial)
    bool less(const Exponents& a, const Exponents& b) const;
};

struct Point {
    std::vector<Rat> coords;

    Point() = default;
    explicit Point(std::vector<Rat> c) : coords(std::move(c)) {}
    static Point origin(std::size_t dim) { return Point(std::vector<Rat>(dim, Rat(0))); }
    std::size_t dim() const { return coords.size(); }
    bool operator==(const Point& o) const { return coords == o.coords; }
};

// Sparse multivariate polynomial over Q with a fixed ordered variable list.
// Terms are stored in a canonical map (lexicographic on exponent vectors), so
// equality is structural; no zero coefficients are ever kept.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<std::string> vars) : vars_(std::move(vars)) {}

    static Poly zero(const std::vector<std::string>& vars) { return Poly(vars); }
    static Poly constant(const std::vector<std::string>& vars, const Rat& c);
    static Poly variable(const std::vector<std::string>& vars, const std::string& name);
    static Poly monomial(const std::vector<std::string>& vars, Exponents e, const Rat& c);

    const std::vector<std::string>& vars() const { return vars_; }
    const std::map<Exponents, Rat>& terms() const { return terms_; }
    std::size_t nvars() const { return vars_.size(); }
    std::size_t nterms() const { return terms_.size(); }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    // nonzero constant
    bool is_unit() const { return is_constant() && !is_zero(); }
    Rat constant_value() const; // requires is_constant()

    int var_index(const std::string& name) const; // -1 if absent
    // true if the polynomial actually involves vars()[i]
    bool uses_var(std::size_t i) const;

    void add_term(const Exponents& e, const Rat& c);

    Poly operator-() const;
    Poly operator+(const Poly& o) const;
    Poly operator-(const Poly& o) const;
    Poly operator*(const Poly& o) const;
    Poly& operator+=(const Poly& o) { *this = *this + o; return *this; }
    Poly& operator-=(const Poly& o) { *this = *this - o; return *this; }
    Poly& operator*=(const Poly& o) { *this = *this * o; return *this; }
    Poly scaled(const Rat& c) const;
    Poly pow(unsigned long e) const;

    bool operator==(const Poly& o) const { return vars_ == o.vars_ && terms_ == o.terms_; }
    bool operator!=(const Poly& o) const { return !(*this == o); }

    // Formal partial derivative; throws input_error on an unknown variable name.
    Poly derivative(const std::string& var) const;
    Poly derivative(std::size_t var_idx) const;

    Rat evaluate(const Point& p) const;

    // Substitute vars()[i] |-> images[i]; images share one target variable set.
    Poly substitute(const std::vector<Poly>& images) const;

    // Re-express on a variable list that contains all used variables.
    Poly on_vars(const std::vector<std::string>& new_vars) const;

    // p(x + c): recentre at the given point.
    Poly translate(const Point& p) const;

    long total_degree() const; // -1 for the zero polynomial
    long degree_in(std::size_t var_idx) const;

    // Least total degree of a term of the expansion around pt (kOrderInfinity for 0).
    long order_at_point(const Point& pt) const;

    // Min over terms of the summed exponents of the given variables: the generic
    // vanishing order along the subspace where those variables are all zero.
    long order_along(const std::vector<std::size_t>& var_idxs) const;

    // Homogeneous part of the given total degree.
    Poly homogeneous_part(long deg) const;

    // Leading term with respect to a monomial order; polynomial must be nonzero.
    std::pair<Exponents, Rat> lead(const MonoOrder& ord) const;

    // Multiply every exponent vector's entry check, divide by a monomial if possible.
    bool divisible_by_var(std::size_t var_idx) const;
    Poly divided_by_var(std::size_t var_idx) const; // requires divisibility

    // Content/sign normalization: integer-primitive with positive grevlex lead.
    Poly normalized() const;
    Rat lead_coeff_grevlex() const;

private:
    std::vector<std::string> vars_;
    std::map<Exponents, Rat> terms_;

    void check_same_vars(const Poly& o) const;
};

// Exact division: returns true and sets q when g | f in Q[vars]. f, g on the
// same variable list, g nonzero.
bool try_divide(const Poly& f, const Poly& g, Poly& q);
Poly exact_divide(const Poly& f, const Poly& g); // throws internal_error if not exact

// Multivariate gcd over Q (primitive PRS); result is normalized().
Poly poly_gcd(const Poly& a, const Poly& b);

// Product of the distinct irreducible factors, via gcd with the partials.
Poly squarefree_part(const Poly& p);

// p = const * prod A_k^k with the A_k squarefree and pairwise coprime;
// returns [A_1, A_2, ...] (normalized, possibly constant-1 entries).
std::vector<Poly> squarefree_decomposition(const Poly& p);

} // namespace sncres

#endif
