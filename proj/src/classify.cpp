#include "sncres/classify.hpp"
#include "sncres/errors.hpp"
#include "sncres/poly_io.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace sncres {

std::string point_class_name(const PointClass& c) {
    switch (c.kind) {
        case PointClassKind::Smooth: return "Smooth";
        case PointClassKind::SncMult: return "SncMult(" + std::to_string(c.param) + ")";
        case PointClassKind::NcDoubleNotSnc: return "NcDoubleNotSnc";
        case PointClassKind::Pinch: return "Pinch";
        case PointClassKind::SemiSncModel: return "SemiSncModel(" + std::to_string(c.param) + ")";
        case PointClassKind::Outside: return "Outside";
        case PointClassKind::Unclassified: return "Unclassified";
    }
    return "Unclassified";
}

std::size_t matrix_rank(std::vector<std::vector<Rat>> m) {
    if (m.empty()) return 0;
    std::size_t rows = m.size(), cols = m[0].size();
    std::size_t rank = 0;
    for (std::size_t c = 0; c < cols && rank < rows; ++c) {
        std::size_t pivot = rank;
        while (pivot < rows && m[pivot][c] == 0) ++pivot;
        if (pivot == rows) continue;
        std::swap(m[rank], m[pivot]);
        for (std::size_t r = 0; r < rows; ++r) {
            if (r == rank || m[r][c] == 0) continue;
            Rat factor = m[r][c] / m[rank][c];
            for (std::size_t k = c; k < cols; ++k) m[r][k] -= factor * m[rank][k];
        }
        ++rank;
    }
    return rank;
}

std::vector<Rat> gradient_at(const Poly& f, const Point& pt) {
    std::vector<Rat> g;
    g.reserve(f.nvars());
    for (std::size_t v = 0; v < f.nvars(); ++v) g.push_back(f.derivative(v).evaluate(pt));
    return g;
}

namespace {

bool is_zero_vec(const std::vector<Rat>& v) {
    return std::all_of(v.begin(), v.end(), [](const Rat& r) { return r == 0; });
}

// shared snc test: each vanishing polynomial smooth at pt, gradients jointly
// independent, pairwise gcds not vanishing at pt
bool snc_at_impl(const std::vector<Poly>& polys, const Point& pt) {
    std::vector<std::size_t> through;
    for (std::size_t i = 0; i < polys.size(); ++i)
        if (!polys[i].is_unit() && polys[i].evaluate(pt) == 0) through.push_back(i);
    std::vector<std::vector<Rat>> grads;
    for (std::size_t i : through) {
        auto g = gradient_at(polys[i], pt);
        if (is_zero_vec(g)) return false; // singular component
        grads.push_back(std::move(g));
    }
    if (grads.size() > pt.dim()) return false;
    if (matrix_rank(grads) != grads.size()) return false;
    for (std::size_t a = 0; a < through.size(); ++a) {
        for (std::size_t b = a + 1; b < through.size(); ++b) {
            Poly g = poly_gcd(polys[through[a]], polys[through[b]]);
            if (!g.is_constant() && g.evaluate(pt) == 0) return false; // shared component
        }
    }
    return true;
}

} // namespace

bool is_snc_at(const std::vector<std::pair<Poly, Rat>>& components, const Point& pt) {
    std::vector<Poly> polys;
    for (const auto& [f, c] : components) {
        if (f.is_zero()) throw input_error("is_snc_at: zero component polynomial");
        polys.push_back(f);
    }
    for (std::size_t a = 0; a < polys.size(); ++a)
        for (std::size_t b = a + 1; b < polys.size(); ++b)
            if (polys[a].normalized() == polys[b].normalized())
                throw input_error("is_snc_at: repeated component polynomials");
    return snc_at_impl(polys, pt);
}

bool is_snc_tuple_at(const std::vector<Poly>& ideal_gens, const std::vector<Poly>& e_supports,
                     const Point& pt) {
    std::vector<Poly> polys;
    for (const auto& f : ideal_gens) {
        if (f.is_zero()) throw input_error("is_snc_tuple_at: non-principal (zero) ideal");
        polys.push_back(f);
    }
    for (const auto& e : e_supports) polys.push_back(e);
    return snc_at_impl(polys, pt);
}

bool is_snc_tuple_at(const PairState& s, const Point& pt) {
    std::vector<Poly> es;
    for (const auto& c : s.E) es.push_back(c.support);
    return is_snc_tuple_at(s.ideals, es, pt);
}

NonSncLocus non_snc_locus(const std::vector<Poly>& ideal_gens, const std::vector<Poly>& e_supports) {
    std::vector<Poly> polys;
    for (const auto& f : ideal_gens) {
        if (f.is_zero()) throw input_error("non_snc_locus: non-principal (zero) ideal");
        if (!f.is_unit()) polys.push_back(f);
    }
    for (const auto& e : e_supports)
        if (!e.is_unit() && !e.is_zero()) polys.push_back(e);

    NonSncLocus out;
    if (polys.empty()) return out;
    const std::size_t n = polys.front().nvars();

    // (1) per-component singular loci
    for (const auto& f : polys) out.components.push_back(jacobian_ideal(f));

    // (2) tangency loci: all members of a subset vanish and their gradients are
    // dependent; rank < k is expressed by the vanishing of the k x k minors
    const std::size_t total = polys.size();
    for (std::size_t mask = 1; mask < (1u << total); ++mask) {
        std::vector<std::size_t> sel;
        for (std::size_t i = 0; i < total; ++i)
            if (mask & (1u << i)) sel.push_back(i);
        const std::size_t k = sel.size();
        if (k < 2) continue;
        if (k > n + 1) continue;
        std::vector<Poly> gens;
        for (std::size_t i : sel) gens.push_back(polys[i]);
        if (k <= n) {
            // k x k minors of the k x n Jacobian
            std::vector<std::vector<Poly>> jac;
            for (std::size_t i : sel) {
                std::vector<Poly> row;
                for (std::size_t v = 0; v < n; ++v) row.push_back(polys[i].derivative(v));
                jac.push_back(std::move(row));
            }
            std::vector<std::size_t> cols(k);
            // iterate column subsets of size k
            std::vector<std::size_t> idx(k);
            for (std::size_t i = 0; i < k; ++i) idx[i] = i;
            auto det = [&](const std::vector<std::size_t>& cs) {
                // Laplace expansion; k <= n is tiny here
                std::vector<std::vector<Poly>> sub(k, std::vector<Poly>());
                for (std::size_t r = 0; r < k; ++r)
                    for (std::size_t c : cs) sub[r].push_back(jac[r][c]);
                // recursive determinant
                std::function<Poly(std::vector<std::vector<Poly>>&)> go =
                    [&](std::vector<std::vector<Poly>>& mm) -> Poly {
                    std::size_t sz = mm.size();
                    if (sz == 1) return mm[0][0];
                    Poly acc = Poly::zero(polys.front().vars());
                    for (std::size_t c = 0; c < sz; ++c) {
                        std::vector<std::vector<Poly>> minor;
                        for (std::size_t r = 1; r < sz; ++r) {
                            std::vector<Poly> row;
                            for (std::size_t cc = 0; cc < sz; ++cc)
                                if (cc != c) row.push_back(mm[r][cc]);
                            minor.push_back(std::move(row));
                        }
                        Poly term = mm[0][c] * go(minor);
                        if (c % 2) acc = acc - term;
                        else acc = acc + term;
                    }
                    return acc;
                };
                return go(sub);
            };
            bool more = k <= n;
            while (more) {
                std::vector<std::size_t> cs(idx.begin(), idx.end());
                gens.push_back(det(cs));
                // next combination
                long i = static_cast<long>(k) - 1;
                while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - k + static_cast<std::size_t>(i)) --i;
                if (i < 0) more = false;
                else {
                    ++idx[static_cast<std::size_t>(i)];
                    for (std::size_t j = static_cast<std::size_t>(i) + 1; j < k; ++j)
                        idx[j] = idx[j - 1] + 1;
                }
            }
        }
        // for k == n+1 the common vanishing alone is already non-snc
        out.components.push_back(Ideal(std::move(gens)));
    }

    // (3) shared-component loci
    for (std::size_t a = 0; a < polys.size(); ++a) {
        for (std::size_t b = a + 1; b < polys.size(); ++b) {
            Poly g = poly_gcd(polys[a], polys[b]);
            if (!g.is_constant()) out.components.push_back(Ideal({g}));
        }
    }
    return out;
}

NonSncLocus non_snc_locus(const PairState& s) {
    std::vector<Poly> es;
    for (const auto& c : s.E) es.push_back(c.support);
    return non_snc_locus(s.ideals, es);
}

bool NonSncLocus::is_empty(GbBudget& budget) const {
    for (const auto& I : components)
        if (!is_unit_ideal(I.gens(), budget)) return false;
    return true;
}

std::vector<std::size_t> NonSncLocus::proper_components(GbBudget& budget) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < components.size(); ++i)
        if (!is_unit_ideal(components[i].gens(), budget)) out.push_back(i);
    return out;
}

namespace {

// split t = A u^2 + B uv + C v^2 where every term of t has (u,v)-degree >= 2
void quadratic_split(const Poly& t, std::size_t u, std::size_t v, Poly& A, Poly& B, Poly& C) {
    A = Poly::zero(t.vars());
    B = Poly::zero(t.vars());
    C = Poly::zero(t.vars());
    for (const auto& [e, c] : t.terms()) {
        Exponents r = e;
        if (e[u] >= 2) {
            r[u] -= 2;
            A.add_term(r, c);
        } else if (e[u] == 1) {
            r[u] -= 1;
            r[v] -= 1;
            if (r[v] < 0) throw internal_error("quadratic_split: bad pair");
            B.add_term(r, c);
        } else {
            r[v] -= 2;
            if (r[v] < 0) throw internal_error("quadratic_split: bad pair");
            C.add_term(r, c);
        }
    }
}

// disc = rational square times a polynomial square?  (squareness in the local
// ring at a point where disc does not vanish)
bool is_poly_square_times_rat_square(const Poly& disc, std::string& why_not) {
    Poly n = disc.normalized();
    auto dec = squarefree_decomposition(n);
    Poly square_free_odd = Poly::constant(disc.vars(), 1);
    Poly rebuilt = Poly::constant(disc.vars(), 1);
    for (std::size_t k = 0; k < dec.size(); ++k) {
        rebuilt = rebuilt * dec[k].pow(static_cast<unsigned long>(k + 1));
        if ((k + 1) % 2 == 1) square_free_odd = square_free_odd * dec[k];
    }
    if (!square_free_odd.is_unit()) {
        why_not = "squarefree part " + print_poly(square_free_odd) + " is not a square in the local ring";
        return false;
    }
    // leftover rational constant disc / rebuilt
    Poly qp;
    if (!try_divide(disc, rebuilt, qp) || !qp.is_constant())
        throw internal_error("squarefree decomposition did not rebuild the discriminant");
    Rat c = qp.constant_value();
    Rat root;
    if (!rat_sqrt(c, root)) {
        why_not = "constant factor " + rat_str(c) + " is not a rational square";
        return false;
    }
    return true;
}

} // namespace

PointClass classify_double_point(const Poly& f, const Point& pt) {
    if (f.order_at_point(pt) != 2)
        throw input_error("classify_double_point: order at the point is not 2");
    Poly t = f.translate(pt);
    const std::size_t n = t.nvars();

    // distinguished coordinate pair: all terms of degree >= 2 in (u, v)
    std::optional<std::pair<std::size_t, std::size_t>> pair;
    for (std::size_t u = 0; u < n && !pair; ++u)
        for (std::size_t v = u + 1; v < n && !pair; ++v)
            if (t.order_along({u, v}) >= 2) pair = {u, v};
    if (!pair) {
        PointClass out;
        out.kind = PointClassKind::Unclassified;
        out.witness = "no coordinate pair carries the full multiplicity-2 normal form";
        return out;
    }
    auto [u, v] = *pair;
    Poly A, B, C;
    quadratic_split(t, u, v, A, B, C);
    Point origin = Point::origin(n);
    Rat a0 = A.evaluate(origin), b0 = B.evaluate(origin), c0 = C.evaluate(origin);
    Rat disc0 = b0 * b0 - 4 * a0 * c0;
    Poly disc = B * B - A * C.scaled(4);

    if (disc0 != 0) {
        // nc double point; snc iff the discriminant is a square in the local ring
        std::string why;
        if (is_poly_square_times_rat_square(disc, why)) {
            PointClass out;
            out.kind = PointClassKind::SncMult;
            out.param = 2;
            out.witness = "double point with square discriminant " + print_poly(disc) +
                          " in pair (" + t.vars()[u] + ", " + t.vars()[v] + ")";
            return out;
        }
        PointClass out;
        out.kind = PointClassKind::NcDoubleNotSnc;
        out.witness = "unit discriminant " + print_poly(disc) + ": " + why;
        return out;
    }

    // degenerate quadratic: pinch-point test. Normalize so the u^2 coefficient
    // is a unit at the point.
    if (a0 == 0 && c0 != 0) {
        std::swap(u, v);
        std::swap(A, C);
        std::swap(a0, c0);
    }
    if (a0 == 0) {
        // the degree-2 part of t would vanish, contradicting order 2
        throw internal_error("classify_double_point: degenerate quadratic part");
    }
    // 4A f = (2Au + Bv)^2 + s v^2 with s = 4AC - B^2
    Poly s = A * C.scaled(4) - B * B;
    if (s.is_zero()) {
        PointClass out;
        out.kind = PointClassKind::Unclassified;
        out.witness = "quadratic part is a perfect square with zero residual (non-reduced branch)";
        return out;
    }
    Poly lin = s.homogeneous_part(1);
    bool independent = false;
    for (std::size_t w = 0; w < n; ++w) {
        if (w == u || w == v) continue;
        if (lin.uses_var(w)) independent = true;
    }
    if (independent) {
        PointClass out;
        out.kind = PointClassKind::Pinch;
        out.witness = "residual " + print_poly(s) + " has linear term independent of (" +
                      t.vars()[u] + ", " + t.vars()[v] + ")";
        return out;
    }
    PointClass out;
    out.kind = PointClassKind::Unclassified;
    out.witness = "degenerate double point: residual " + print_poly(s) +
                  " has no independent linear term";
    return out;
}

PointClass classify_point(const std::vector<std::pair<Poly, Rat>>& components, const Point& pt) {
    std::vector<std::size_t> through;
    for (std::size_t i = 0; i < components.size(); ++i) {
        if (components[i].first.is_zero()) throw input_error("classify_point: zero component");
        if (components[i].first.evaluate(pt) == 0) through.push_back(i);
    }
    if (through.empty()) {
        PointClass out;
        out.kind = PointClassKind::Outside;
        return out;
    }
    auto gradient_witness = [&] {
        std::string w;
        for (std::size_t i : through) {
            auto g = gradient_at(components[i].first, pt);
            w += "grad(" + print_poly(components[i].first) + ") = (";
            for (std::size_t k = 0; k < g.size(); ++k) {
                if (k) w += ", ";
                w += rat_str(g[k]);
            }
            w += ") ";
        }
        return w;
    };
    if (is_snc_at(components, pt)) {
        // count local branches: a reducible smooth component still counts once
        PointClass out;
        if (through.size() == 1 && components[through[0]].first.order_at_point(pt) == 1) {
            out.kind = PointClassKind::Smooth;
            out.witness = "single smooth component: " + gradient_witness();
            return out;
        }
        out.kind = PointClassKind::SncMult;
        out.param = static_cast<int>(through.size());
        out.witness = "independent gradients: " + gradient_witness();
        return out;
    }
    if (through.size() == 1) {
        const Poly& f = components[through[0]].first;
        if (f.order_at_point(pt) == 2) return classify_double_point(f, pt);
    }
    PointClass out;
    out.kind = PointClassKind::Unclassified;
    out.witness = "outside the listed local models";
    return out;
}

PointClass classify_semi_snc(const std::vector<std::string>& ambient_vars,
                             const std::vector<std::size_t>& X_branches,
                             const std::vector<SemiDivisorPart>& D,
                             const Point& pt) {
    if (pt.dim() != ambient_vars.size())
        throw input_error("classify_semi_snc: point dimension mismatch");
    if (X_branches.empty()) throw input_error("classify_semi_snc: X has no branches");
    for (const auto& d : D) {
        if (d.coord >= ambient_vars.size()) throw input_error("classify_semi_snc: bad divisor coordinate");
        if (std::find(X_branches.begin(), X_branches.end(), d.coord) != X_branches.end())
            throw input_error("classify_semi_snc: I_X and I_D overlap on " + ambient_vars[d.coord]);
        if (d.branch && std::find(X_branches.begin(), X_branches.end(), *d.branch) == X_branches.end())
            throw input_error("classify_semi_snc: divisor restricted to a non-branch coordinate");
    }
    std::vector<std::size_t> branches_through;
    for (std::size_t b : X_branches)
        if (pt.coords[b] == 0) branches_through.push_back(b);
    if (branches_through.empty()) {
        PointClass out;
        out.kind = PointClassKind::Outside;
        out.witness = "point not on X";
        return out;
    }
    // per divisor coordinate through the point: the coefficient on each branch
    std::vector<std::size_t> dcoords;
    for (const auto& d : D) {
        if (pt.coords[d.coord] != 0) continue;
        if (std::find(dcoords.begin(), dcoords.end(), d.coord) == dcoords.end())
            dcoords.push_back(d.coord);
    }
    for (std::size_t c : dcoords) {
        std::vector<Rat> per_branch;
        for (std::size_t b : branches_through) {
            Rat acc = 0;
            for (const auto& d : D) {
                if (d.coord != c) continue;
                if (!d.branch || *d.branch == b) acc += d.coeff;
            }
            per_branch.push_back(acc);
        }
        for (std::size_t i = 1; i < per_branch.size(); ++i) {
            if (per_branch[i] != per_branch[0]) {
                PointClass out;
                out.kind = PointClassKind::Unclassified;
                out.witness = "divisor (" + ambient_vars[c] + "=0) carries unequal coefficients " +
                              rat_str(per_branch[0]) + " vs " + rat_str(per_branch[i]) +
                              " on two X-branches: not R-Cartier, not semi-snc";
                return out;
            }
        }
    }
    if (branches_through.size() > 3) {
        PointClass out;
        out.kind = PointClassKind::Unclassified;
        out.witness = "more than three branches through the point";
        return out;
    }
    PointClass out;
    out.kind = PointClassKind::SemiSncModel;
    out.param = static_cast<int>(branches_through.size());
    out.witness = std::to_string(branches_through.size()) + " X-branches, " +
                  std::to_string(dcoords.size()) + " divisor coordinates through the point";
    return out;
}

std::string tau_class_name(TauClass c) {
    switch (c) {
        case TauClass::invariant: return "invariant";
        case TauClass::anti_square_descends: return "anti-symmetric-square-descends";
        case TauClass::neither: return "neither";
    }
    return "neither";
}

TauClass tau_invariant_divisor_test(const Poly& f, const std::string& deck_var,
                                    const std::string& conductor_var) {
    int d = f.var_index(deck_var);
    int c = f.var_index(conductor_var);
    if (d < 0 || c < 0)
        throw input_error("tau test: variables outside the expected chart");
    std::size_t dv = static_cast<std::size_t>(d), cv = static_cast<std::size_t>(c);
    Poly even(f.vars()), odd(f.vars());
    for (const auto& [e, coef] : f.terms()) {
        if (e[cv] != 0) continue; // working modulo the conductor
        if (e[dv] % 2 == 0) even.add_term(e, coef);
        else odd.add_term(e, coef);
    }
    if (odd.is_zero()) return TauClass::invariant; // includes f = 0 mod conductor
    if (even.is_zero()) return TauClass::anti_square_descends;
    return TauClass::neither;
}

} // namespace sncres
