#include "sncres/ideal.hpp"
#include "sncres/errors.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace sncres {

void GbBudget::charge(long n) {
    used += n;
    if (limit > 0 && used > limit)
        throw resource_error("Groebner step budget exceeded (limit " + std::to_string(limit) + ")");
}

Ideal::Ideal(std::vector<Poly> gens) {
    if (gens.empty()) throw input_error("ideal needs at least one generator");
    vars_ = gens.front().vars();
    for (auto& g : gens) {
        if (g.vars() != vars_) throw input_error("ideal generators on different variable sets");
        if (!g.is_zero()) gens_.push_back(std::move(g));
    }
}

Poly normal_form(const Poly& f, const std::vector<Poly>& G, const MonoOrder& ord, GbBudget& budget) {
    Poly rem(f.vars());
    Poly work = f;
    while (!work.is_zero()) {
        auto [we, wc] = work.lead(ord);
        bool divided = false;
        for (const auto& g : G) {
            if (g.is_zero()) continue;
            auto [ge, gc] = g.lead(ord);
            Exponents d(we.size());
            bool ok = true;
            for (std::size_t i = 0; i < we.size(); ++i) {
                d[i] = we[i] - ge[i];
                if (d[i] < 0) { ok = false; break; }
            }
            if (!ok) continue;
            budget.charge(0); // reductions inside one NF are not S-steps
            Poly m = Poly::monomial(f.vars(), d, wc / gc);
            work = work - m * g;
            divided = true;
            break;
        }
        if (!divided) {
            Poly m = Poly::monomial(f.vars(), we, wc);
            rem = rem + m;
            work = work - m;
        }
    }
    return rem;
}

namespace {

Exponents exp_lcm(const Exponents& a, const Exponents& b) {
    Exponents l(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) l[i] = std::max(a[i], b[i]);
    return l;
}

bool exp_disjoint(const Exponents& a, const Exponents& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > 0 && b[i] > 0) return false;
    return true;
}

Poly s_poly(const Poly& f, const Poly& g, const MonoOrder& ord) {
    auto [fe, fc] = f.lead(ord);
    auto [ge, gc] = g.lead(ord);
    Exponents l = exp_lcm(fe, ge);
    Exponents mf(l.size()), mg(l.size());
    for (std::size_t i = 0; i < l.size(); ++i) {
        mf[i] = l[i] - fe[i];
        mg[i] = l[i] - ge[i];
    }
    return Poly::monomial(f.vars(), mf, Rat(1) / fc) * f -
           Poly::monomial(g.vars(), mg, Rat(1) / gc) * g;
}

struct PairKey {
    long deg;
    Exponents lcm;
    std::size_t i, j;
    bool operator<(const PairKey& o) const {
        if (deg != o.deg) return deg < o.deg;
        if (lcm != o.lcm) return lcm < o.lcm;
        if (i != o.i) return i < o.i;
        return j < o.j;
    }
};

} // namespace

std::vector<Poly> groebner_basis(const std::vector<Poly>& gens, const MonoOrder& ord, GbBudget& budget) {
    std::vector<Poly> G;
    for (const auto& g : gens)
        if (!g.is_zero()) G.push_back(g.normalized());
    if (G.empty()) return G;

    auto key_of = [&](std::size_t i, std::size_t j) {
        auto le = exp_lcm(G[i].lead(ord).first, G[j].lead(ord).first);
        long d = 0;
        for (int k : le) d += k;
        return PairKey{d, le, i, j};
    };

    std::set<PairKey> pairs;
    for (std::size_t i = 0; i < G.size(); ++i)
        for (std::size_t j = i + 1; j < G.size(); ++j)
            pairs.insert(key_of(i, j));

    while (!pairs.empty()) {
        PairKey k = *pairs.begin();
        pairs.erase(pairs.begin());
        const Poly& f = G[k.i];
        const Poly& g = G[k.j];
        if (exp_disjoint(f.lead(ord).first, g.lead(ord).first)) continue; // coprime-lead criterion
        budget.charge();
        Poly r = normal_form(s_poly(f, g, ord), G, ord, budget);
        if (r.is_zero()) continue;
        G.push_back(r.normalized());
        std::size_t n = G.size() - 1;
        for (std::size_t i = 0; i < n; ++i) pairs.insert(key_of(i, n));
    }

    // minimalize: drop generators whose lead is divisible by another lead
    std::vector<Poly> min_basis;
    for (std::size_t i = 0; i < G.size(); ++i) {
        auto [ei, ci] = G[i].lead(ord);
        bool redundant = false;
        for (std::size_t j = 0; j < G.size(); ++j) {
            if (i == j) continue;
            auto [ej, cj] = G[j].lead(ord);
            bool divides = true;
            for (std::size_t t = 0; t < ei.size(); ++t)
                if (ej[t] > ei[t]) { divides = false; break; }
            if (divides) {
                // tie-break so exactly one of two equal leads survives
                if (ej != ei || j < i) { redundant = true; break; }
            }
        }
        if (!redundant) min_basis.push_back(G[i]);
    }

    // full auto-reduction and monic normalization
    std::vector<Poly> reduced;
    for (std::size_t i = 0; i < min_basis.size(); ++i) {
        std::vector<Poly> others;
        for (std::size_t j = 0; j < min_basis.size(); ++j)
            if (j != i) others.push_back(min_basis[j]);
        Poly r = normal_form(min_basis[i], others, ord, budget);
        if (r.is_zero()) continue;
        reduced.push_back(r.scaled(Rat(1) / r.lead(ord).second));
    }
    std::sort(reduced.begin(), reduced.end(), [&](const Poly& a, const Poly& b) {
        return ord.less(a.lead(ord).first, b.lead(ord).first);
    });
    return reduced;
}

Ideal groebner_basis(const Ideal& I, const MonoOrder& ord, GbBudget& budget) {
    auto g = groebner_basis(I.gens(), ord, budget);
    if (g.empty()) g.push_back(Poly::zero(I.vars()));
    return Ideal(std::move(g));
}

bool is_unit_ideal(const std::vector<Poly>& gens, GbBudget& budget) {
    for (const auto& g : gens)
        if (g.is_unit()) return true;
    auto gb = groebner_basis(gens, MonoOrder::Grevlex(), budget);
    for (const auto& g : gb)
        if (g.is_unit()) return true;
    return false;
}

bool ideal_member(const Poly& f, const Ideal& I, GbBudget& budget) {
    if (f.vars() != I.vars()) throw input_error("ideal_member: variable-set mismatch");
    if (f.is_zero()) return true;
    if (I.is_zero_ideal()) return false;
    auto gb = groebner_basis(I.gens(), MonoOrder::Grevlex(), budget);
    return normal_form(f, gb, MonoOrder::Grevlex(), budget).is_zero();
}

bool radical_member(const Poly& f, const Ideal& I, GbBudget& budget) {
    if (f.vars() != I.vars()) throw input_error("radical_member: variable-set mismatch");
    if (f.is_zero()) return true;
    if (I.is_zero_ideal()) return false;
    // fresh auxiliary variable
    std::string t = "t#";
    std::vector<std::string> ext = I.vars();
    ext.push_back(t);
    std::vector<Poly> gens;
    for (const auto& g : I.gens()) gens.push_back(g.on_vars(ext));
    Poly one = Poly::constant(ext, 1);
    gens.push_back(one - Poly::variable(ext, t) * f.on_vars(ext));
    return is_unit_ideal(gens, budget);
}

Ideal jacobian_ideal(const Poly& f) {
    std::vector<Poly> gens;
    gens.push_back(f);
    for (std::size_t v = 0; v < f.nvars(); ++v) gens.push_back(f.derivative(v));
    bool all_zero = true;
    for (const auto& g : gens)
        if (!g.is_zero()) all_zero = false;
    if (all_zero) return Ideal({Poly::zero(f.vars())});
    return Ideal(std::move(gens));
}

std::vector<Poly> eliminate_vars(const std::vector<Poly>& gens,
                                 const std::vector<std::string>& drop,
                                 GbBudget& budget) {
    if (gens.empty()) return {};
    const auto& vars = gens.front().vars();
    std::vector<std::string> reordered = drop; // eliminated block first for lex
    std::vector<std::string> keep;
    for (const auto& v : vars) {
        if (std::find(drop.begin(), drop.end(), v) == drop.end()) {
            reordered.push_back(v);
            keep.push_back(v);
        }
    }
    std::vector<Poly> lifted;
    for (const auto& g : gens) lifted.push_back(g.on_vars(reordered));
    auto gb = groebner_basis(lifted, MonoOrder::Lex(), budget);
    std::vector<Poly> out;
    for (const auto& g : gb) {
        bool free = true;
        for (std::size_t i = 0; i < drop.size(); ++i)
            if (g.uses_var(i)) { free = false; break; }
        if (free) out.push_back(g.on_vars(keep));
    }
    return out;
}

} // namespace sncres
