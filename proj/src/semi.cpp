#include "sncres/semi.hpp"
#include "sncres/errors.hpp"
#include "sncres/poly_io.hpp"

#include <algorithm>
#include <random>

namespace sncres {

namespace {

std::string fresh_name(std::string base, const std::vector<std::string>& taken) {
    while (std::find(taken.begin(), taken.end(), base) != taken.end()) base += "'";
    return base;
}

void add_cert(std::vector<VerifyItem>& items, bool& pass, const std::string& name, bool ok,
              const std::string& detail) {
    items.push_back(VerifyItem{name, ok, detail});
    if (!ok) pass = false;
}

} // namespace

DoubleCoverDatum double_cover_from_gh(const std::vector<std::string>& ambient_vars,
                                      const std::string& y_var, const Poly& g, const Poly& h) {
    DoubleCoverDatum d;
    d.ambient_vars = ambient_vars;
    d.y_var = y_var;
    if (std::find(ambient_vars.begin(), ambient_vars.end(), y_var) == ambient_vars.end())
        throw input_error("double cover: y variable not among the ambient variables");
    for (const auto& v : ambient_vars)
        if (v != y_var) d.x_vars.push_back(v);
    d.g = g.on_vars(d.x_vars);
    d.h = h.on_vars(d.x_vars);
    if (d.g.is_zero()) throw input_error("double cover: g must be nonzero");
    if (d.h.is_zero()) throw input_error("double cover: h must be nonzero");
    if (!d.g.is_constant() && squarefree_part(d.g) != d.g.normalized())
        throw input_error("double cover: g is not square-free; re-split via squarefree_part");
    return d;
}

DoubleCoverDatum double_cover_from_poly(const Poly& f) {
    // locate y: f = y^2 - G with G free of y and the y^2 coefficient 1
    for (std::size_t v = 0; v < f.nvars(); ++v) {
        if (f.degree_in(v) != 2) continue;
        Poly y2 = Poly::monomial(f.vars(), [&] {
            Exponents e(f.nvars(), 0);
            e[v] = 2;
            return e;
        }(), Rat(1));
        Poly rest = y2 - f; // G if the shape fits
        if (rest.degree_in(v) > 0) continue;
        // split G = g h^2 by iterated squarefree decomposition
        std::vector<std::string> x_vars;
        for (std::size_t i = 0; i < f.nvars(); ++i)
            if (i != v) x_vars.push_back(f.vars()[i]);
        Poly G = rest.on_vars(x_vars);
        if (G.is_zero()) throw input_error("double cover: equation y^2 = 0 is not reduced");
        Poly g = Poly::constant(x_vars, 1), h = Poly::constant(x_vars, 1);
        if (!G.is_constant()) {
            auto dec = squarefree_decomposition(G);
            for (std::size_t k = 0; k < dec.size(); ++k) {
                unsigned long mult = static_cast<unsigned long>(k + 1);
                if (mult % 2 == 1) g = g * dec[k];
                h = h * dec[k].pow(mult / 2);
            }
            // leftover rational constant
            Poly rebuilt = Poly::constant(x_vars, 1);
            for (std::size_t k = 0; k < dec.size(); ++k)
                rebuilt = rebuilt * dec[k].pow(static_cast<unsigned long>(k + 1));
            Poly q = exact_divide(G, rebuilt);
            if (!q.is_constant()) throw internal_error("squarefree split failed");
            g = g.scaled(q.constant_value());
        } else {
            g = G;
        }
        return double_cover_from_gh(f.vars(), f.vars()[v], g, h);
    }
    throw input_error("equation is not of the form y^2 - g(x) h(x)^2 with a monic square");
}

NormalizationDatum normalize_double(const DoubleCoverDatum& d) {
    NormalizationDatum n;
    n.cover = d;
    if (!d.g.is_constant() && squarefree_part(d.g) != d.g.normalized())
        throw input_error("normalize_double: g is not square-free; re-split via squarefree_part");

    // symbolic record: z^2 - g on (x, z)
    std::vector<std::string> xz = d.x_vars;
    n.z_var = fresh_name(d.y_var + "'", xz);
    xz.push_back(n.z_var);
    n.equation = Poly::variable(xz, n.z_var).pow(2) - d.g.on_vars(xz);

    // chart realization
    if (d.g.is_constant()) {
        Rat c = d.g.constant_value();
        Rat root;
        if (rat_sqrt(c, root) && root != 0) {
            n.kind = NormalizationDatum::ChartKind::split_sheets;
            n.sheet_value = root;
            n.nvars = d.x_vars;
            n.conductor = d.h.is_constant() ? Poly::constant(d.x_vars, 1) : squarefree_part(d.h);
            return n;
        }
        n.kind = NormalizationDatum::ChartKind::unrealized;
        return n;
    }
    for (std::size_t k = 0; k < d.x_vars.size(); ++k) {
        if (d.g.degree_in(k) != 1) continue;
        // g = A x_k + B with A a nonzero rational
        Poly A(d.x_vars);
        Poly B(d.x_vars);
        for (const auto& [e, c] : d.g.terms()) {
            if (e[k] == 1) {
                Exponents r = e;
                r[k] = 0;
                A.add_term(r, c);
            } else if (e[k] == 0) {
                B.add_term(e, c);
            } else {
                A = Poly::zero(d.x_vars);
                break;
            }
        }
        if (!A.is_unit()) continue;
        n.kind = NormalizationDatum::ChartKind::affine_solved;
        n.solved_var = k;
        n.solved_coeff = A.constant_value();
        n.solved_rest = B;
        // normalization chart coordinates: z first, then the surviving x's
        n.nvars = {n.z_var};
        for (std::size_t i = 0; i < d.x_vars.size(); ++i)
            if (i != k) n.nvars.push_back(d.x_vars[i]);
        // coordinate functions: x_k = (z^2 - B)/A, y = z * h
        Poly z = Poly::variable(n.nvars, n.z_var);
        n.x_images.clear();
        for (std::size_t i = 0; i < d.x_vars.size(); ++i) {
            if (i == k) {
                Poly num = z.pow(2) - B.on_vars(n.nvars);
                n.x_images.push_back(num.scaled(Rat(1) / n.solved_coeff));
            } else {
                n.x_images.push_back(Poly::variable(n.nvars, d.x_vars[i]));
            }
        }
        Poly hbar = d.h.substitute(n.x_images);
        n.y_image = z * hbar;
        n.conductor = hbar.is_constant() ? Poly::constant(n.nvars, 1) : squarefree_part(hbar);
        return n;
    }
    n.kind = NormalizationDatum::ChartKind::unrealized;
    return n;
}

Poly SignInvolution::apply(const Poly& p) const {
    if (p.nvars() != signs.size()) throw input_error("sign involution: dimension mismatch");
    std::vector<Poly> images;
    for (std::size_t i = 0; i < signs.size(); ++i) {
        Poly v = Poly::variable(p.vars(), p.vars()[i]);
        images.push_back(signs[i] < 0 ? -v : v);
    }
    return p.substitute(images);
}

Point SignInvolution::apply(const Point& p) const {
    if (p.dim() != signs.size()) throw input_error("sign involution: dimension mismatch");
    std::vector<Rat> out = p.coords;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (signs[i] < 0) out[i] = -out[i];
    return Point(std::move(out));
}

SignInvolution lift_involution(const ChartTable& T, const std::string& chart_id,
                               const SignInvolution& root) {
    const Chart& c = T.at(chart_id);
    if (c.is_root()) return root;
    SignInvolution up = lift_involution(T, c.parent->parent_id, root);
    const Chart& parent = T.at(c.parent->parent_id);
    const BlowupInfo& bu = *c.blowup;
    if (bu.center.size() == 1) return up; // identity chart
    auto chosen_it = std::find(parent.vars.begin(), parent.vars.end(), bu.chosen);
    std::size_t chosen = static_cast<std::size_t>(chosen_it - parent.vars.begin());
    SignInvolution out;
    out.signs.resize(c.vars.size());
    for (std::size_t i = 0; i < c.vars.size(); ++i) {
        bool in_center =
            std::find(bu.center.begin(), bu.center.end(), parent.vars[i]) != bu.center.end();
        if (in_center && i != chosen)
            out.signs[i] = up.signs[i] * up.signs[chosen]; // x_i' = x_i / x_chosen
        else
            out.signs[i] = up.signs[i];
    }
    return out;
}

namespace {

// tau-stability of a coordinate center under a sign involution, recorded as a
// Groebner ideal equality
bool center_tau_stable(const Chart& chart, const std::vector<std::string>& center,
                       const SignInvolution& inv, GbBudget& budget) {
    std::vector<Poly> gens, tau_gens;
    for (const auto& v : center) {
        Poly p = Poly::variable(chart.vars, v);
        gens.push_back(p);
        tau_gens.push_back(inv.apply(p));
    }
    auto g1 = groebner_basis(gens, MonoOrder::Grevlex(), budget);
    auto g2 = groebner_basis(tau_gens, MonoOrder::Grevlex(), budget);
    return g1 == g2;
}

// does the polynomial restrict tau-invariantly to the conductor? (f o tau - f
// divisible by the conductor generator)
bool invariant_on_conductor(const Poly& f, const Poly& conductor, const SignInvolution& inv) {
    Poly diff = inv.apply(f) - f;
    if (diff.is_zero()) return true;
    if (conductor.is_unit() || conductor.is_zero()) return false;
    Poly q;
    return try_divide(diff, conductor, q);
}

bool anti_on_conductor(const Poly& f, const Poly& conductor, const SignInvolution& inv) {
    Poly sum = inv.apply(f) + f;
    if (sum.is_zero()) return true;
    if (conductor.is_unit() || conductor.is_zero()) return false;
    Poly q;
    return try_divide(sum, conductor, q);
}

} // namespace

int normalize_fixed_locus(ChartTable& charts, std::vector<BlowUpStep>& steps,
                          std::map<std::string, PairState>& leaves, const std::string& leaf,
                          const SignInvolution& root_inv, std::size_t conductor_idx,
                          const EngineConfig& cfg, GbBudget& budget) {
    if (!leaves.count(leaf)) throw internal_error("normalize_fixed_locus: not a leaf");
    PairState s = leaves.at(leaf);
    const Chart chart = charts.at(leaf);
    SignInvolution inv = lift_involution(charts, leaf, root_inv);

    Poly b = s.ideals[conductor_idx];
    if (b.is_unit() || b.is_zero()) return 0; // no conductor here
    std::vector<std::size_t> neg;
    for (std::size_t i = 0; i < chart.vars.size(); ++i)
        if (inv.signs[i] < 0) neg.push_back(i);
    if (neg.empty()) return 0; // trivial involution

    // codimension of Fix(tau) and the conductor transform inside the conductor
    std::vector<std::string> center;
    long codim_in_b = 0;
    if (b.order_along(neg) >= 1) {
        // the conductor contains the fixed subspace
        codim_in_b = static_cast<long>(neg.size()) - 1;
        for (std::size_t v : neg) center.push_back(chart.vars[v]);
    } else {
        // restriction of b to the fixed subspace
        std::vector<std::string> sub_vars;
        for (std::size_t i = 0; i < chart.vars.size(); ++i)
            if (std::find(neg.begin(), neg.end(), i) == neg.end()) sub_vars.push_back(chart.vars[i]);
        std::vector<Poly> images;
        for (std::size_t i = 0; i < chart.vars.size(); ++i) {
            if (std::find(neg.begin(), neg.end(), i) != neg.end())
                images.push_back(Poly::zero(sub_vars));
            else images.push_back(Poly::variable(sub_vars, chart.vars[i]));
        }
        Poly rb = b.substitute(images);
        if (rb.is_unit()) return 0; // the fixed locus misses the conductor
        codim_in_b = static_cast<long>(neg.size());
        for (std::size_t v : neg) center.push_back(chart.vars[v]);
        // the intersection needs the conductor itself as an extra equation
        int bv = -1;
        for (std::size_t i = 0; i < chart.vars.size(); ++i)
            if (b.normalized() == Poly::variable(chart.vars, chart.vars[i])) bv = static_cast<int>(i);
        if (codim_in_b >= 2) {
            if (bv < 0)
                throw abstain_error("fixed locus component on a non-coordinate conductor");
            center.push_back(chart.vars[static_cast<std::size_t>(bv)]);
        }
    }
    if (codim_in_b < 2) return 0; // already pure codimension 1 (or empty)

    // the center must have snc with the whole configuration, not just with E
    std::vector<EComp> config = s.E;
    for (const auto& f : s.ideals)
        if (!f.is_unit() && !f.is_zero()) config.push_back(EComp{f, 1});
    if (!center_snc_with_E(charts, leaf, center, config, budget))
        throw abstain_error("fixed-locus center fails snc with the configuration");

    BlowUpStep step{leaf, center, "semi"};
    auto out = birational_transform(charts, s, step, static_cast<int>(steps.size()), budget);
    steps.push_back(step);
    leaves.erase(leaf);
    int count = 1;
    std::vector<std::string> kids;
    for (auto& ns : out) {
        kids.push_back(ns.chart);
        leaves.emplace(ns.chart, std::move(ns));
    }
    for (const auto& kid : kids)
        count += normalize_fixed_locus(charts, steps, leaves, kid, root_inv, conductor_idx, cfg,
                                       budget);
    return count;
}

PushoutPresentation pushout_generators(const ChartTable& charts, const std::string& leaf,
                                       const PairState& state, const SignInvolution& inv,
                                       std::size_t conductor_idx, const Poly& z_pullback) {
    const Chart& chart = charts.at(leaf);
    PushoutPresentation out;
    Poly b = state.ideals[conductor_idx];
    bool trivial = true;
    for (int s : inv.signs)
        if (s < 0) trivial = false;
    if (trivial || b.is_unit()) {
        // the pushout is the chart itself: every coordinate descends
        for (const auto& v : chart.vars)
            out.generators.emplace_back(v, Poly::variable(chart.vars, v));
        out.relation = "0 = 0";
        out.relation_holds = true;
        out.restrictions_invariant = true;
        return out;
    }
    // invariant coordinates descend; the deck function z contributes
    // a = z*b, c = z^2 with the pinch relation a^2 = b^2 c
    Poly a = z_pullback * b;
    Poly c = z_pullback * z_pullback;
    out.generators.emplace_back("a", a);
    out.generators.emplace_back("b", b);
    out.generators.emplace_back("c", c);
    for (std::size_t i = 0; i < chart.vars.size(); ++i)
        if (inv.signs[i] > 0) out.generators.emplace_back(chart.vars[i],
                                                          Poly::variable(chart.vars, chart.vars[i]));
    out.relation = "a^2 - b^2*c = 0";
    Poly rel = a * a - b * b * c;
    out.relation_holds = rel.is_zero();
    out.restrictions_invariant = true;
    for (const auto& [name, gen] : out.generators) {
        if (!invariant_on_conductor(gen, b, inv)) out.restrictions_invariant = false;
    }
    return out;
}

namespace {

SemiLeafModel classify_leaf(const ChartTable& charts, const std::string& leaf,
                            const PairState& state, const SignInvolution& root_inv,
                            std::size_t conductor_idx, const Poly& root_z,
                            std::vector<VerifyItem>& certs, bool& pass) {
    SemiLeafModel m;
    m.chart = leaf;
    m.involution = lift_involution(charts, leaf, root_inv);
    m.conductor_transform = state.ideals[conductor_idx];
    const Chart& chart = charts.at(leaf);
    Poly z_pull = root_z.substitute(charts.compose_to_root(leaf));

    // involutivity: applying tau twice is the identity on the chart
    bool involutive = true;
    for (int s : m.involution.signs)
        if (s != 1 && s != -1) involutive = false;
    add_cert(certs, pass, "involution-squares-to-identity[" + leaf + "]", involutive, "");

    Poly b = m.conductor_transform;
    if (b.is_unit()) {
        m.model = "Smooth";
    } else {
        // fixed locus of tau on the conductor transform
        std::vector<std::size_t> neg;
        for (std::size_t i = 0; i < chart.vars.size(); ++i)
            if (m.involution.signs[i] < 0) neg.push_back(i);
        bool fix_meets_b = false;
        if (!neg.empty()) {
            std::vector<std::string> sub_vars;
            for (std::size_t i = 0; i < chart.vars.size(); ++i)
                if (std::find(neg.begin(), neg.end(), i) == neg.end())
                    sub_vars.push_back(chart.vars[i]);
            if (sub_vars.empty()) {
                fix_meets_b = b.order_along(neg) >= 1;
            } else {
                std::vector<Poly> images;
                for (std::size_t i = 0; i < chart.vars.size(); ++i) {
                    if (std::find(neg.begin(), neg.end(), i) != neg.end())
                        images.push_back(Poly::zero(sub_vars));
                    else images.push_back(Poly::variable(sub_vars, chart.vars[i]));
                }
                Poly rb = b.substitute(images);
                fix_meets_b = !rb.is_unit(); // zero or a proper hypersurface
            }
        }
        m.model = fix_meets_b ? "Pinched" : "DoubleNc";
        m.pushout = pushout_generators(charts, leaf, state, m.involution, conductor_idx, z_pull);
        add_cert(certs, pass, "pushout-relation[" + leaf + "]", m.pushout->relation_holds, "");
        add_cert(certs, pass, "pushout-invariance[" + leaf + "]", m.pushout->restrictions_invariant,
                 "");
    }

    // D' components: divisor transforms and exceptional divisors; the
    // tau-anti ones on a pinched chart realize the Q-Cartier divisor D2
    for (std::size_t k = 0; k < state.ideals.size(); ++k) {
        if (k == conductor_idx) continue;
        const Poly& q = state.ideals[k];
        if (q.is_unit() || q.is_zero()) continue;
        if (!b.is_unit() && anti_on_conductor(q, b, m.involution) &&
            !invariant_on_conductor(q, b, m.involution)) {
            m.has_D2 = true;
        } else {
            m.snc_components.push_back(print_poly(q));
        }
    }
    for (const auto& e : state.E) {
        if (!b.is_unit() && anti_on_conductor(e.support, b, m.involution) &&
            !invariant_on_conductor(e.support, b, m.involution)) {
            m.has_D2 = true;
        } else {
            m.snc_components.push_back(print_poly(e.support));
        }
    }
    return m;
}

} // namespace

SemiRunResult equivariant_resolve(const NormalizationDatum& n,
                                  const std::vector<Poly>& divisors, const EngineConfig& cfg) {
    if (n.kind != NormalizationDatum::ChartKind::affine_solved)
        throw abstain_error("normalization chart is not realized as affine space");
    SemiRunResult res;
    SignInvolution root_inv;
    root_inv.signs.assign(n.nvars.size(), 1);
    root_inv.signs[0] = -1; // the deck coordinate comes first

    // symmetrize the divisors: I_D + tau* I_D
    std::vector<Poly> components;
    bool have_conductor = !n.conductor.is_unit();
    if (have_conductor) components.push_back(n.conductor);
    GbBudget budget{cfg.groebner_budget, 0};
    for (const auto& q0 : divisors) {
        Poly q = q0.on_vars(n.nvars);
        if (q.is_zero() || q.is_unit())
            throw input_error("divisor components must be nonzero nonunits");
        Poly tq = root_inv.apply(q);
        components.push_back(q);
        bool same = ideal_member(tq, Ideal({q}), budget) && ideal_member(q, Ideal({tq}), budget);
        if (!same) components.push_back(tq); // both summands of I_D + tau* I_D
    }
    std::size_t conductor_idx = 0;
    if (!have_conductor) {
        if (components.empty()) {
            // nothing to resolve: trivial trace on the bare chart
            ResolutionTrace t;
            std::string root = t.charts.add_root(n.nvars);
            PairState st;
            st.chart = root;
            st.ideals = {Poly::constant(n.nvars, 1)};
            t.initial = st;
            t.finals = {st};
            res.trace = std::move(t);
            SemiLeafModel m;
            m.chart = root;
            m.model = "Smooth";
            m.involution = root_inv;
            m.conductor_transform = Poly::constant(n.nvars, 1);
            res.leaves.push_back(std::move(m));
            return res;
        }
        // keep index 0 as a formal unit conductor so downstream indexing holds
        components.insert(components.begin(), Poly::constant(n.nvars, 1));
    }

    res.trace = resolve_tuple(components, {}, cfg);

    // tau-stability certificate for every engine center
    for (std::size_t i = 0; i < res.trace.steps.size(); ++i) {
        const BlowUpStep& st = res.trace.steps[i];
        bool ok = center_tau_stable(res.trace.charts.at(st.chart), st.center,
                                    lift_involution(res.trace.charts, st.chart, root_inv), budget);
        add_cert(res.certificates, res.pass, "tau-stable-center[step " + std::to_string(i) + "]",
                 ok, ok ? "" : "center ideal differs from its tau image");
        if (!ok) throw abstain_error("blow-up center is not tau-stable");
    }

    // cut the fixed locus of the lifted involution down to pure codimension 1
    std::map<std::string, PairState> leaves;
    for (const auto& fin : res.trace.finals) leaves.emplace(fin.chart, fin);
    for (const auto& fin : res.trace.finals) {
        if (!leaves.count(fin.chart)) continue;
        normalize_fixed_locus(res.trace.charts, res.trace.steps, leaves, fin.chart, root_inv,
                              conductor_idx, cfg, budget);
    }
    res.trace.finals.clear();
    for (const auto& id : res.trace.charts.ids_in_order())
        if (leaves.count(id)) res.trace.finals.push_back(leaves.at(id));

    // classify every leaf
    Poly root_z = Poly::variable(n.nvars, n.z_var);
    for (const auto& fin : res.trace.finals) {
        res.leaves.push_back(classify_leaf(res.trace.charts, fin.chart, fin, root_inv,
                                           conductor_idx, root_z, res.certificates, res.pass));
    }
    return res;
}

SemiResolution semi_log_resolve(const DoubleCoverDatum& cover,
                                const std::vector<std::vector<Poly>>& divisor_ideals,
                                const EngineConfig& cfg) {
    SemiResolution out;
    out.datum = normalize_double(cover);
    GbBudget budget{cfg.groebner_budget, 0};

    // the input is snc2 when it has no pinch points: the branch divisor (g)
    // stays away from the conductor (h), or the cover splits
    if (out.datum.kind == NormalizationDatum::ChartKind::split_sheets) {
        out.input_snc2 = true;
    } else {
        std::vector<Poly> meet = {cover.g, cover.h};
        out.input_snc2 = cover.h.is_constant() || is_unit_ideal(meet, budget);
    }

    if (out.datum.kind == NormalizationDatum::ChartKind::unrealized)
        throw abstain_error("normalization outside the desk-scale families");

    if (out.datum.kind == NormalizationDatum::ChartKind::split_sheets) {
        // two disjoint sheets z = +-c exchanged by tau; resolve each sheet and
        // glue along the untouched conductor
        for (int sheet = 0; sheet < 2; ++sheet) {
            Rat zval = sheet == 0 ? out.datum.sheet_value : -out.datum.sheet_value;
            std::vector<Poly> comps;
            bool have_conductor = !out.datum.conductor.is_unit();
            if (have_conductor) comps.push_back(out.datum.conductor);
            else comps.push_back(Poly::constant(out.datum.nvars, 1));
            for (const auto& gens : divisor_ideals) {
                // substitute y = zval * h, keep the x coordinates
                std::vector<Poly> images;
                for (const auto& v : cover.ambient_vars) {
                    if (v == cover.y_var)
                        images.push_back(cover.h.on_vars(out.datum.nvars).scaled(zval));
                    else images.push_back(Poly::variable(out.datum.nvars, v));
                }
                Poly pulled(out.datum.nvars);
                bool first = true;
                for (const auto& g0 : gens) {
                    Poly p = g0.on_vars(cover.ambient_vars).substitute(images);
                    pulled = first ? p : poly_gcd(pulled, p);
                    first = false;
                }
                if (pulled.is_zero()) throw input_error("divisor pulls back to zero on a sheet");
                if (!pulled.is_unit()) comps.push_back(pulled.normalized());
            }
            SemiRunResult r;
            r.trace = resolve_tuple(comps, {}, cfg);
            // sheets are glued along the conductor: no center may touch it
            for (std::size_t i = 0; i < r.trace.steps.size(); ++i) {
                const BlowUpStep& st = r.trace.steps[i];
                bool clear = true;
                if (have_conductor) {
                    const Chart& c = r.trace.charts.at(st.chart);
                    std::vector<Poly> gens = {out.datum.conductor.substitute(
                        r.trace.charts.compose_to_root(st.chart))};
                    for (const auto& v : st.center) gens.push_back(Poly::variable(c.vars, v));
                    clear = is_unit_ideal(gens, budget);
                }
                add_cert(r.certificates, r.pass,
                         "sheet-center-avoids-conductor[step " + std::to_string(i) + "]", clear,
                         "");
                if (!clear) throw abstain_error("sheet resolution touches the conductor");
            }
            for (const auto& fin : r.trace.finals) {
                SemiLeafModel m;
                m.chart = fin.chart;
                m.model = have_conductor ? "DoubleNc" : "Smooth";
                m.involution.signs.assign(out.datum.nvars.size(), 1);
                m.conductor_transform = fin.ideals[0];
                for (std::size_t k = 1; k < fin.ideals.size(); ++k)
                    if (!fin.ideals[k].is_unit()) m.snc_components.push_back(print_poly(fin.ideals[k]));
                for (const auto& e : fin.E) m.snc_components.push_back(print_poly(e.support));
                if (have_conductor) {
                    // glued presentation for the exchange-free case: the deck
                    // function a = z h takes the value +-c h on the sheets and
                    // a^2 - c^2 b^2 = (a - c b)(a + c b) is the double-nc model
                    PushoutPresentation pres;
                    const Chart& leaf_chart = r.trace.charts.at(fin.chart);
                    Poly b_pull =
                        out.datum.conductor.substitute(r.trace.charts.compose_to_root(fin.chart));
                    Poly a = b_pull.scaled(zval);
                    pres.generators.emplace_back("a", a);
                    pres.generators.emplace_back("b", b_pull);
                    for (const auto& v : leaf_chart.vars)
                        pres.generators.emplace_back(v, Poly::variable(leaf_chart.vars, v));
                    Rat c2 = out.datum.sheet_value * out.datum.sheet_value;
                    pres.relation = "a^2 - " + rat_str(c2) + "*b^2 = 0 (double nc)";
                    pres.relation_holds = (a * a - (b_pull * b_pull).scaled(c2)).is_zero();
                    pres.restrictions_invariant = true; // the sheets agree on b = 0
                    m.pushout = std::move(pres);
                }
                r.leaves.push_back(std::move(m));
            }
            out.sheet_runs.push_back(std::move(r));
        }
        bool mirror = out.sheet_runs[0].trace.steps.size() == out.sheet_runs[1].trace.steps.size();
        add_cert(out.certificates, out.pass, "sheets-mirror-under-tau", mirror, "");
    } else {
        // pull the divisor ideals back to the normalization chart
        std::vector<Poly> divisors;
        for (const auto& gens : divisor_ideals) {
            std::vector<Poly> images; // ambient (x, y) -> normalization chart
            for (const auto& v : cover.ambient_vars) {
                if (v == cover.y_var) {
                    images.push_back(out.datum.y_image);
                } else {
                    auto it = std::find(cover.x_vars.begin(), cover.x_vars.end(), v);
                    images.push_back(out.datum.x_images[static_cast<std::size_t>(
                        it - cover.x_vars.begin())]);
                }
            }
            Poly pulled(out.datum.nvars);
            bool first = true;
            for (const auto& g0 : gens) {
                Poly p = g0.on_vars(cover.ambient_vars).substitute(images);
                pulled = first ? p : poly_gcd(pulled, p);
                first = false;
            }
            if (pulled.is_zero())
                throw input_error("divisor pulls back to zero on the normalization");
            if (pulled.is_unit())
                throw input_error("divisor misses the normalization chart");
            // the divisor must stay away from the double locus: its preimage
            // may not share a component with the conductor
            if (!out.datum.conductor.is_unit() &&
                !poly_gcd(pulled, out.datum.conductor).is_constant())
                throw input_error("divisor contains the double locus (shares a component "
                                  "with the conductor)");
            divisors.push_back(pulled.normalized());
        }
        out.run = equivariant_resolve(out.datum, divisors, cfg);
        for (const auto& c : out.run.certificates) {
            out.certificates.push_back(c);
            if (!c.pass) out.pass = false;
        }
    }

    // specialization: snc2 inputs never produce pinch models
    bool no_pinch = true;
    auto scan = [&](const SemiRunResult& r) {
        for (const auto& m : r.leaves)
            if (m.model == "Pinched") no_pinch = false;
    };
    scan(out.run);
    for (const auto& r : out.sheet_runs) scan(r);
    if (out.input_snc2)
        add_cert(out.certificates, out.pass, "snc2-specialization-no-pinch", no_pinch,
                 no_pinch ? "" : "a pinch model appeared over an snc2 input");
    return out;
}

UmbrellaReport umbrella_pipeline() {
    UmbrellaReport rep;
    auto check = [&](const std::string& name, bool ok, const std::string& detail) {
        rep.items.push_back(VerifyItem{name, ok, detail});
        if (!ok) rep.pass = false;
    };
    const std::vector<std::string> A3 = {"x1", "x2", "x3"};
    Poly umbrella = parse_poly(A3, "x1^2 - x2^2*x3");
    GbBudget budget{100000, 0};

    // blow up the z-axis (x1 = x2 = 0)
    ChartTable T;
    std::string root = T.add_root(A3);
    PairState s;
    s.chart = root;
    s.ideals = {umbrella};
    BlowUpStep step{root, {"x1", "x2"}, "step-i"};
    auto out = birational_transform(T, s, step, 0, budget);
    const PairState& x2state = out[1];
    const Chart& c2 = T.at(x2state.chart);
    Poly pulled = umbrella.substitute(c2.parent->subst);
    check("chart-equation", pulled == parse_poly(c2.vars, "x2^2*(x1'^2 - x3)"),
          print_poly(pulled));
    Poly strict = parse_poly(c2.vars, "x1'^2 - x3");
    check("strict-transform", x2state.ideals[0] == parse_poly(c2.vars, "x2*(x1'^2 - x3)"),
          print_poly(x2state.ideals[0]));
    check("strict-transform-reduced", squarefree_part(pulled) == parse_poly(c2.vars, "x2*(x1'^2 - x3)"),
          "");

    // coordinate change x3' = x3 - x1'^2 presents the normalization as (x3' = 0)
    std::vector<std::string> shifted = {"x1'", "x2", "x3'"};
    std::vector<Poly> change = {
        parse_poly(shifted, "x1'"),
        parse_poly(shifted, "x2"),
        parse_poly(shifted, "x3' + x1'^2"),
    };
    Poly strict_shifted = strict.substitute(change);
    check("normalization-chart", strict_shifted == parse_poly(shifted, "-x3'"),
          print_poly(strict_shifted));

    // conductor: the preimage of the z-axis is the smooth divisor (x2 = 0)
    Poly pre_x1 = parse_poly(A3, "x1").substitute(c2.parent->subst);
    Poly pre_x2 = parse_poly(A3, "x2").substitute(c2.parent->subst);
    Poly conductor = poly_gcd(pre_x1, pre_x2);
    check("conductor-preimage", conductor == parse_poly(c2.vars, "x2"), print_poly(conductor));

    // the involution x1' -> -x1' on the conductor; it squares to the identity
    std::vector<std::string> ncoords = {"x1'", "x2"};
    SignInvolution tau;
    tau.signs = {-1, 1};
    Poly probe = parse_poly(ncoords, "x1'^3 + x2*x1' + 1");
    check("involution-squares-to-identity", tau.apply(tau.apply(probe)) == probe, "");
    Point fixed_form(std::vector<Rat>{Rat(5), Rat(0)});
    Point image = tau.apply(fixed_form);
    check("involution-on-exceptional", image.coords[0] == Rat(-5) && image.coords[1] == Rat(0), "");

    // invariance dichotomy examples
    check("tau-invariant-example",
          tau_invariant_divisor_test(parse_poly(ncoords, "x1'^2 + x2*x1'"), "x1'", "x2") ==
              TauClass::invariant,
          "");
    check("tau-anti-example",
          tau_invariant_divisor_test(parse_poly(ncoords, "x1'"), "x1'", "x2") ==
              TauClass::anti_square_descends,
          "");
    check("tau-neither-example",
          tau_invariant_divisor_test(parse_poly(ncoords, "x1' + x1'^3 + 1"), "x1'", "x2") ==
              TauClass::neither,
          "");

    // the dichotomy on 50 seeded random polynomials, cross-checked by direct
    // substitution x1' -> -x1' modulo the conductor
    {
        const std::vector<std::string> chart_vars = {"x1'", "x2", "x4"};
        std::mt19937 rng(20260810);
        std::uniform_int_distribution<int> coef(-5, 5), expo(0, 3);
        SignInvolution flip;
        flip.signs = {-1, 1, 1};
        std::vector<Poly> drop_x2 = {
            parse_poly(chart_vars, "x1'"),
            Poly::zero(chart_vars),
            parse_poly(chart_vars, "x4"),
        };
        bool all_ok = true;
        for (int it = 0; it < 50; ++it) {
            Poly f(chart_vars);
            for (int t = 0; t < 6; ++t)
                f.add_term({expo(rng), expo(rng), expo(rng)}, rat_of(coef(rng)));
            TauClass cls = tau_invariant_divisor_test(f, "x1'", "x2");
            Poly diff = (flip.apply(f) - f).substitute(drop_x2);
            Poly sum = (flip.apply(f) + f).substitute(drop_x2);
            bool ok = true;
            switch (cls) {
                case TauClass::invariant: ok = diff.is_zero(); break;
                case TauClass::anti_square_descends: ok = sum.is_zero(); break;
                case TauClass::neither: ok = !diff.is_zero() && !sum.is_zero(); break;
            }
            if (!ok) all_ok = false;
        }
        check("tau-dichotomy-50-random", all_ok, "");
    }

    // Q-Cartier: 2 (x1 = x3 = 0) = (x3 = 0) via the normalization map
    std::vector<Poly> nmap = {parse_poly(ncoords, "x1'*x2"), parse_poly(ncoords, "x2"),
                              parse_poly(ncoords, "x1'^2")};
    check("normalization-parametrizes", umbrella.substitute(nmap).is_zero(), "");
    Poly pull_x3 = parse_poly(A3, "x3").substitute(nmap);
    Poly w = poly_gcd(parse_poly(A3, "x1").substitute(nmap), pull_x3);
    check("q-cartier-identity", w == parse_poly(ncoords, "x1'") && w.pow(2) == pull_x3,
          print_poly(w));

    // the full pipeline on the umbrella reproduces the model with no blow-ups
    DoubleCoverDatum cover = double_cover_from_poly(umbrella);
    check("cover-split", cover.y_var == "x1" && cover.g == parse_poly(cover.x_vars, "x3") &&
                             cover.h == parse_poly(cover.x_vars, "x2"),
          "");
    SemiResolution sr = semi_log_resolve(cover, {}, EngineConfig{});
    check("pipeline-empty-trace", sr.run.trace.steps.empty(), "");
    bool pinched = !sr.run.leaves.empty() && sr.run.leaves[0].model == "Pinched";
    check("pipeline-model-pinched", pinched, "");
    if (pinched && sr.run.leaves[0].pushout) {
        const auto& gens = sr.run.leaves[0].pushout->generators;
        bool found_a = false, found_b = false, found_c = false;
        for (const auto& [name, p] : gens) {
            if (name == "a" && p == parse_poly(sr.datum.nvars, "x1'*x2")) found_a = true;
            if (name == "b" && p == parse_poly(sr.datum.nvars, "x2")) found_b = true;
            if (name == "c" && p == parse_poly(sr.datum.nvars, "x1'^2")) found_c = true;
        }
        check("pushout-generators", found_a && found_b && found_c, "");
        check("pushout-relation", sr.run.leaves[0].pushout->relation_holds, "");
    }
    return rep;
}

} // namespace sncres
