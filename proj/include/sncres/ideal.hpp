#ifndef SNCRES_IDEAL_HPP
#define SNCRES_IDEAL_HPP

#include <vector>

#include "sncres/poly.hpp"

namespace sncres {

// S-polynomial reduction budget. Groebner computations fail loudly with a
// resource_error instead of hanging once the budget is spent.
struct GbBudget {
    long limit = 100000;
    long used = 0;

    void charge(long n = 1);
};

// Finitely generated ideal: generators on a common variable list, zero
// generators dropped. An empty generator list denotes the zero ideal.
class Ideal {
public:
    Ideal() = default;
    explicit Ideal(std::vector<Poly> gens);

    const std::vector<std::string>& vars() const { return vars_; }
    const std::vector<Poly>& gens() const { return gens_; }
    bool is_zero_ideal() const { return gens_.empty(); }

    bool operator==(const Ideal& o) const { return vars_ == o.vars_ && gens_ == o.gens_; }

private:
    std::vector<std::string> vars_;
    std::vector<Poly> gens_;
};

// Canonical normal form of f against G (full tail reduction).
Poly normal_form(const Poly& f, const std::vector<Poly>& G, const MonoOrder& ord, GbBudget& budget);

// Reduced Groebner basis (monic, auto-reduced, deterministically sorted).
std::vector<Poly> groebner_basis(const std::vector<Poly>& gens, const MonoOrder& ord, GbBudget& budget);
Ideal groebner_basis(const Ideal& I, const MonoOrder& ord, GbBudget& budget);

bool is_unit_ideal(const std::vector<Poly>& gens, GbBudget& budget);

bool ideal_member(const Poly& f, const Ideal& I, GbBudget& budget);

// Radical membership via the auxiliary-variable trick: 1 in I + (1 - t f).
bool radical_member(const Poly& f, const Ideal& I, GbBudget& budget);

// Ideal generated by f and all of its first partials; its zero set is the
// singular locus of the hypersurface (f = 0) together with nothing else.
Ideal jacobian_ideal(const Poly& f);

// Generators of the image of I under dropping the given variables: lex
// elimination. Output polynomials live on the remaining variables.
std::vector<Poly> eliminate_vars(const std::vector<Poly>& gens,
                                 const std::vector<std::string>& drop,
                                 GbBudget& budget);

} // namespace sncres

#endif
