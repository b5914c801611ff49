#include "sncres/engine.hpp"
#include "sncres/errors.hpp"
#include "sncres/poly_io.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace sncres {

std::vector<Poly> partials_below_order(const Poly& f, int k) {
    // breadth-first: order-0 partial is f itself
    std::vector<Poly> out = {f};
    std::vector<Poly> frontier = {f};
    for (int ord = 1; ord < k; ++ord) {
        std::vector<Poly> next;
        for (const auto& g : frontier) {
            for (std::size_t v = 0; v < f.nvars(); ++v) {
                Poly d = g.derivative(v);
                if (d.is_zero()) continue;
                if (std::find(next.begin(), next.end(), d) == next.end()) next.push_back(d);
            }
        }
        for (const auto& d : next)
            if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
        frontier = std::move(next);
        if (frontier.empty()) break;
    }
    return out;
}

std::vector<Poly> divisor_image_downstairs(const ChartTable& T, const std::string& chart_id,
                                           const std::string& var, GbBudget& budget) {
    const Chart& c = T.at(chart_id);
    if (std::find(c.vars.begin(), c.vars.end(), var) == c.vars.end())
        throw input_error("divisor_image_downstairs: unknown variable " + var);
    const std::vector<std::string>& root_vars = T.at(T.root()).vars;
    std::vector<std::string> combined;
    for (std::size_t i = 0; i < root_vars.size(); ++i) combined.push_back("r#" + std::to_string(i));
    for (const auto& w : c.vars) combined.push_back(w);
    auto to_root = T.compose_to_root(chart_id);
    std::vector<Poly> gens;
    for (std::size_t i = 0; i < root_vars.size(); ++i) {
        Poly g = Poly::variable(combined, "r#" + std::to_string(i)) - to_root[i].on_vars(combined);
        gens.push_back(g);
    }
    gens.push_back(Poly::variable(combined, var));
    auto image = eliminate_vars(gens, c.vars, budget);
    std::vector<Poly> out;
    for (const auto& g : image) {
        // rename r#i back to the root variable names
        std::vector<Poly> renames;
        for (std::size_t i = 0; i < root_vars.size(); ++i)
            renames.push_back(Poly::variable(root_vars, root_vars[i]));
        out.push_back(g.substitute(renames));
    }
    return out;
}

std::vector<std::vector<std::string>> coordinate_subspace_decomposition(
    const Ideal& J, const std::vector<std::string>& vars, GbBudget& budget) {
    const std::size_t n = vars.size();
    // minimal variable subsets C with V(C) inside V(J): every generator must
    // vanish identically once the C-variables are set to zero
    std::vector<std::vector<std::size_t>> found;
    for (std::size_t size = 1; size <= n; ++size) {
        std::vector<std::size_t> idx(size);
        for (std::size_t i = 0; i < size; ++i) idx[i] = i;
        bool more = true;
        while (more) {
            bool superset = false;
            for (const auto& c : found) {
                if (std::includes(idx.begin(), idx.end(), c.begin(), c.end())) {
                    superset = true;
                    break;
                }
            }
            if (!superset) {
                bool ok = true;
                for (const auto& g : J.gens()) {
                    if (g.order_along(idx) < 1) { ok = false; break; }
                }
                if (ok) found.push_back(idx);
            }
            // next combination
            long i = static_cast<long>(size) - 1;
            while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - size + static_cast<std::size_t>(i)) --i;
            if (i < 0) more = false;
            else {
                ++idx[static_cast<std::size_t>(i)];
                for (std::size_t j2 = static_cast<std::size_t>(i) + 1; j2 < size; ++j2)
                    idx[j2] = idx[j2 - 1] + 1;
            }
        }
    }
    if (found.empty())
        throw abstain_error("required center is not a coordinate subspace in this chart");

    // completeness: V(J) must equal the union of the found subspaces, i.e.
    // every transversal monomial of the intersection ideal lies in rad(J)
    std::vector<Exponents> mons = {Exponents(n, 0)};
    for (const auto& c : found) {
        std::vector<Exponents> next;
        for (const auto& m : mons) {
            for (std::size_t v : c) {
                Exponents e = m;
                e[v] = 1;
                next.push_back(e);
            }
        }
        // minimize: drop monomials divisible by another
        std::vector<Exponents> min_set;
        for (const auto& a : next) {
            bool dominated = false;
            for (const auto& b : next) {
                if (a == b) continue;
                bool div = true;
                for (std::size_t v = 0; v < n; ++v)
                    if (b[v] > a[v]) { div = false; break; }
                if (div && !(b == a)) { dominated = true; break; }
            }
            if (!dominated && std::find(min_set.begin(), min_set.end(), a) == min_set.end())
                min_set.push_back(a);
        }
        mons = std::move(min_set);
    }
    if (!J.gens().empty()) {
        const auto& jvars = J.gens().front().vars();
        Ideal JJ = J;
        for (const auto& m : mons) {
            Poly mono = Poly::monomial(jvars, m, Rat(1));
            if (!radical_member(mono, JJ, budget))
                throw abstain_error("non-snc stratum is not a union of coordinate subspaces");
        }
    }
    std::vector<std::vector<std::string>> out;
    for (const auto& c : found) {
        std::vector<std::string> names;
        for (std::size_t v : c) names.push_back(vars[v]);
        out.push_back(std::move(names));
    }
    return out;
}

namespace {

struct Ctx {
    const EngineConfig& cfg;
    GbBudget budget;
    long blowups = 0;
};

struct Run {
    Ctx& ctx;
    ChartTable charts;
    std::vector<BlowUpStep> steps;
    std::vector<StepCertificate> certs;
    std::map<std::string, PairState> leaves;
    PairState initial;
    std::vector<Ideal> initial_nsl; // proper components of the input non-snc locus
};

std::vector<Poly> e_supports(const PairState& s) {
    std::vector<Poly> out;
    for (const auto& c : s.E) out.push_back(c.support);
    return out;
}

NonSncLocus sub_tuple_nsl(const PairState& s, std::size_t from) {
    std::vector<Poly> ideals(s.ideals.begin() + static_cast<long>(std::min(from, s.ideals.size())),
                             s.ideals.end());
    return non_snc_locus(ideals, e_supports(s));
}

bool vanishes_on_center(const Ideal& J, const Chart& c, const std::vector<std::string>& center) {
    auto idx = center_indices(c, center);
    for (const auto& g : J.gens())
        if (g.order_along(idx) < 1) return false;
    return true;
}

std::vector<std::string> leaves_under(const Run& run, const std::string& base) {
    std::vector<std::string> out;
    for (const auto& id : run.charts.ids_in_order()) {
        if (!run.leaves.count(id)) continue;
        // walk ancestry
        std::string cur = id;
        bool under = false;
        for (;;) {
            if (cur == base) { under = true; break; }
            const Chart& c = run.charts.at(cur);
            if (c.is_root()) break;
            cur = c.parent->parent_id;
        }
        if (under) out.push_back(id);
    }
    return out;
}

std::vector<std::string> apply_step(Run& run, const std::string& chart_id,
                                    std::vector<std::string> center,
                                    const std::string& justification, std::size_t active_j) {
    if (++run.ctx.blowups > run.ctx.cfg.max_blowups)
        throw resource_error("max_blowups exceeded (" + std::to_string(run.ctx.cfg.max_blowups) + ")");
    PairState s = run.leaves.at(chart_id);
    const Chart& chart = run.charts.at(chart_id);
    // canonical center ordering: the chart's variable order
    std::sort(center.begin(), center.end(), [&](const std::string& a, const std::string& b) {
        auto ia = std::find(chart.vars.begin(), chart.vars.end(), a);
        auto ib = std::find(chart.vars.begin(), chart.vars.end(), b);
        return ia < ib;
    });
    int step_index = static_cast<int>(run.steps.size());

    // center-in-non-snc-locus certificate
    NonSncLocus nsl = non_snc_locus(s);
    std::optional<Ideal> witness;
    for (const auto& comp : nsl.components) {
        if (!vanishes_on_center(comp, chart, center)) continue;
        if (is_unit_ideal(comp.gens(), run.ctx.budget)) continue;
        witness = comp;
        break;
    }
    if (!witness)
        throw internal_error("engine chose a center outside the non-snc locus at step " +
                             std::to_string(step_index));

    // induction on m: centers stay away from the earlier, already-snc cosupports
    std::vector<std::size_t> disjoint;
    for (std::size_t k = 0; k < std::min(active_j, s.ideals.size()); ++k) {
        if (s.ideals[k].is_unit()) continue;
        std::vector<Poly> gens = {s.ideals[k]};
        for (const auto& v : center) gens.push_back(Poly::variable(chart.vars, v));
        if (!is_unit_ideal(gens, run.ctx.budget))
            throw internal_error("center meets the cosupport of an earlier ideal at step " +
                                 std::to_string(step_index));
        disjoint.push_back(k);
    }

    BlowUpStep step{chart_id, center, justification};
    std::vector<PairState> states;
    try {
        states = birational_transform(run.charts, s, step, step_index, run.ctx.budget);
    } catch (const input_error& e) {
        throw abstain_error(std::string("blow-up outside the supported family: ") + e.what());
    }
    if (run.ctx.cfg.mutation == EngineConfig::Mutation::skip_transform_division) {
        // test hook: wrong transform rule, the division step is undone
        for (auto& st : states) {
            if (st.ideals.empty()) continue;
            const Chart& cc = run.charts.at(st.chart);
            st.ideals[0] = st.ideals[0] * Poly::variable(cc.vars, cc.blowup->chosen);
        }
    }
    run.steps.push_back(step);
    run.certs.push_back(StepCertificate{step_index, center, *witness, disjoint});
    run.leaves.erase(chart_id);
    std::vector<std::string> kids;
    for (auto& st : states) {
        kids.push_back(st.chart);
        run.leaves.emplace(st.chart, std::move(st));
    }
    return kids;
}

// --- restriction machinery -------------------------------------------------

// substitute var v := 0 and drop it from the variable list
Poly restrict_poly(const Poly& p, std::size_t v) {
    std::vector<std::string> sub_vars;
    for (std::size_t i = 0; i < p.nvars(); ++i)
        if (i != v) sub_vars.push_back(p.vars()[i]);
    std::vector<Poly> images;
    for (std::size_t i = 0; i < p.nvars(); ++i) {
        if (i == v) images.push_back(Poly::zero(sub_vars));
        else images.push_back(Poly::variable(sub_vars, p.vars()[i]));
    }
    return p.substitute(images);
}

void process_leaf(Run& run, const std::string& chart_id, std::size_t j);

Run make_sub_run(Ctx& ctx, const std::vector<std::string>& vars, std::vector<Poly> ideals,
                 std::vector<EComp> E) {
    Run sub{ctx, ChartTable{}, {}, {}, {}, {}, {}};
    std::string root = sub.charts.add_root(vars);
    PairState st;
    st.chart = root;
    st.ideals = std::move(ideals);
    st.E = std::move(E);
    sub.initial = st;
    sub.leaves.emplace(root, std::move(st));
    return sub;
}

void resolve_all(Run& run) { process_leaf(run, run.charts.root(), 0); }

// replay the steps of a finished sub-run on S = (s_var = 0) as blow-ups of
// this run: center C in S lifts to C + {strict transform variable of S}
void lift_subrun(Run& run, const std::string& base_chart, const std::string& s_var,
                 const Run& sub, const std::string& tag, std::size_t active_j,
                 const std::vector<std::size_t>& sub_to_run_idx) {
    // sub chart id -> (run chart id, name of the S-variable there)
    std::map<std::string, std::pair<std::string, std::string>> mirror;
    mirror[sub.charts.root()] = {base_chart, s_var};
    for (const auto& st : sub.steps) {
        auto [run_chart, sv] = mirror.at(st.chart);
        std::vector<std::string> center = st.center;
        center.push_back(sv);
        auto kids = apply_step(run, run_chart, center, tag, active_j);
        // children of the sub step, matched by chosen variable
        for (std::size_t i = 0; i < st.center.size(); ++i) {
            std::string sub_child;
            for (const auto& cid : sub.charts.ids_in_order()) {
                const Chart& sc = sub.charts.at(cid);
                if (sc.is_root() || !sc.blowup) continue;
                if (sc.parent->parent_id == st.chart && sc.blowup->chosen == st.center[i] &&
                    std::is_permutation(sc.blowup->center.begin(), sc.blowup->center.end(),
                                        st.center.begin(), st.center.end())) {
                    sub_child = cid;
                    break;
                }
            }
            if (sub_child.empty()) throw internal_error("lift: missing sub-run child chart");
            std::string run_kid;
            for (const auto& kid : kids) {
                if (run.charts.at(kid).blowup->chosen == st.center[i]) run_kid = kid;
            }
            if (run_kid.empty()) throw internal_error("lift: missing lifted child chart");
            const Chart& parent = run.charts.at(run_chart);
            const Chart& rc = run.charts.at(run_kid);
            auto it = std::find(parent.vars.begin(), parent.vars.end(), sv);
            std::size_t pos = static_cast<std::size_t>(it - parent.vars.begin());
            mirror[sub_child] = {run_kid, rc.vars[pos]};
        }
        // the chart chosen at the lifted S-variable is extra: S is invisible there
    }
    // commutation check: restricting the lifted states recovers the sub-run
    for (const auto& [sub_id, target] : mirror) {
        if (!sub.leaves.count(sub_id)) continue;
        const auto& [run_id, sv] = target;
        if (!run.leaves.count(run_id)) continue;
        const PairState& rs = run.leaves.at(run_id);
        const PairState& ss = sub.leaves.at(sub_id);
        const Chart& rc = run.charts.at(run_id);
        auto it = std::find(rc.vars.begin(), rc.vars.end(), sv);
        std::size_t sv_idx = static_cast<std::size_t>(it - rc.vars.begin());
        for (std::size_t si = 0; si < sub_to_run_idx.size(); ++si) {
            Poly restricted = restrict_poly(rs.ideals[sub_to_run_idx[si]], sv_idx);
            Poly expected = ss.ideals[si].on_vars(restricted.vars());
            if (restricted != expected)
                throw internal_error("lifted blow-ups do not commute with restriction on chart " +
                                     run_id);
        }
    }
}

// stratum of points where the marked ideal still has order >= its mark; the
// returned ideal cuts the maximal-order stratum
std::optional<Ideal> max_order_stratum(const MarkedIdeal& mi, GbBudget& budget) {
    const Poly& f = mi.ideal;
    if (f.is_unit() || f.is_zero() || f.is_constant()) return std::nullopt;
    std::optional<Ideal> best;
    long deg = f.total_degree();
    for (int k = mi.mark; k <= deg + 1; ++k) {
        auto gens = partials_below_order(f, k);
        if (is_unit_ideal(gens, budget)) break;
        best = Ideal(gens);
    }
    return best;
}

// variable factors of f (indices), in variable order
std::vector<std::size_t> variable_factors(const Poly& f) {
    std::vector<std::size_t> out;
    if (f.is_zero() || f.is_unit()) return out;
    for (std::size_t v = 0; v < f.nvars(); ++v)
        if (f.divisible_by_var(v)) out.push_back(v);
    return out;
}

// gcd with all variable factors removed
Poly nonmonomial_part(Poly g) {
    for (std::size_t v = 0; v < g.nvars(); ++v)
        while (!g.is_constant() && g.divisible_by_var(v)) g = g.divided_by_var(v);
    return g;
}

// cleanup trigger: the divisor maps into the original non-snc locus
bool divisor_maps_into_initial_nsl(Run& run, const std::string& chart_id, std::size_t v) {
    const Chart& c = run.charts.at(chart_id);
    auto image = divisor_image_downstairs(run.charts, chart_id, c.vars[v], run.ctx.budget);
    if (image.empty()) return false; // dominant: certainly meets the snc locus
    Ideal image_ideal(image);
    for (const auto& J : run.initial_nsl) {
        bool contained = true;
        for (const auto& g : J.gens()) {
            if (!radical_member(g.on_vars(image_ideal.vars()), image_ideal, run.ctx.budget)) {
                contained = false;
                break;
            }
        }
        if (contained) return true;
    }
    return false;
}

// Phase II helper: the restriction of ([f_j], E - S) to the hyperplane S
// still needs work?
bool restricted_pair_needs_work(const PairState& s, std::size_t j, std::size_t e_idx,
                                std::size_t v, GbBudget& budget) {
    std::vector<Poly> rid = {restrict_poly(s.ideals[j], v)};
    std::vector<Poly> re;
    for (std::size_t k = 0; k < s.E.size(); ++k) {
        if (k == e_idx) continue;
        Poly r = restrict_poly(s.E[k].support, v);
        if (r.is_zero())
            throw internal_error("E components share a component (restriction vanished)");
        if (!r.is_unit()) re.push_back(r);
    }
    if (rid[0].is_zero()) return false; // handled by the divisor guard beforehand
    return !non_snc_locus(rid, re).is_empty(budget);
}

void process_leaf(Run& run, const std::string& chart_id, std::size_t j) {
    for (;;) {
        if (!run.leaves.count(chart_id))
            throw internal_error("process_leaf on a non-leaf chart " + chart_id);
        PairState s = run.leaves.at(chart_id);
        const Chart& chart = run.charts.at(chart_id);
        const std::size_t m = s.ideals.size();
        const std::size_t dim = chart.vars.size();

        if (j >= m) {
            // cleanup: drop cosupport components that are not birational
            // transforms of components meeting the snc locus
            bool acted = false;
            for (std::size_t k = 0; k < m && !acted; ++k) {
                for (std::size_t v : variable_factors(s.ideals[k])) {
                    if (divisor_maps_into_initial_nsl(run, chart_id, v)) {
                        auto kids = apply_step(run, chart_id, {chart.vars[v]}, "cleanup", j);
                        process_leaf(run, kids[0], j);
                        acted = true;
                        break;
                    }
                }
            }
            if (!acted) return; // leaf finished
            return;
        }

        // done with this ideal and everything after it?
        if (sub_tuple_nsl(s, j).is_empty(run.ctx.budget)) {
            ++j;
            continue;
        }

        const Poly& f = s.ideals[j];
        const std::string tag_i = (j == 0) ? "step-i" : "step-iv";
        const std::string tag_if = (j == 0) ? "step-i-F" : "step-iv";
        const std::string tag_ii = (j == 0) ? "step-ii" : "step-iv";
        const std::string tag_iii = (j == 0) ? "step-iii" : "step-iv";

        const bool mutated = run.ctx.cfg.mutation != EngineConfig::Mutation::none;

        // ---- Step i: order reduction of the marked ideal (I_j, 2)
        if (!f.is_unit() && !f.is_zero()) {
            auto stratum = max_order_stratum(MarkedIdeal{f, 2}, run.ctx.budget);
            if (stratum) {
                auto centers = coordinate_subspace_decomposition(*stratum, chart.vars, run.ctx.budget);
                const auto& Z = centers.front();
                auto kids = apply_step(run, chart_id, Z, tag_i, j);
                if (mutated) return; // defect injection: leave the trace as is
                // every F-partner is emitted right away, before any deeper work
                std::vector<std::string> nexts;
                for (const auto& kid : kids) {
                    const Chart& kc = run.charts.at(kid);
                    auto fkids = apply_step(run, kid, {kc.blowup->chosen}, tag_if, j);
                    nexts.push_back(fkids[0]);
                }
                for (const auto& next : nexts) process_leaf(run, next, j);
                return;
            }
        }

        // ---- Step ii: make (X, I_j, E) snc along each E component
        for (std::size_t e = 0; e < s.E.size(); ++e) {
            const Poly& es = s.E[e].support;
            // coordinate component?
            int ev = -1;
            for (std::size_t v = 0; v < dim; ++v) {
                if (es.normalized() == Poly::variable(chart.vars, chart.vars[v])) ev = static_cast<int>(v);
            }
            if (ev < 0) {
                // non-coordinate E component: fine if nothing non-snc sits on it
                NonSncLocus pair_nsl = non_snc_locus({f}, e_supports(s));
                for (const auto& comp : pair_nsl.components) {
                    std::vector<Poly> gens = comp.gens();
                    gens.push_back(es);
                    if (is_unit_ideal(gens, run.ctx.budget)) continue;
                    if (is_unit_ideal(comp.gens(), run.ctx.budget)) continue;
                    throw abstain_error("E component " + print_poly(es) +
                                        " is not coordinate-aligned in chart " + chart_id);
                }
                continue;
            }
            std::size_t v = static_cast<std::size_t>(ev);
            if (!f.is_unit() && f.divisible_by_var(v)) {
                // the ideal still vanishes along this E component: divide it out
                auto kids = apply_step(run, chart_id, {chart.vars[v]}, tag_ii, j);
                process_leaf(run, kids[0], j);
                return;
            }
            if (dim <= 1) continue;
            if (!restricted_pair_needs_work(s, j, e, v, run.ctx.budget)) continue;
            // resolve the restriction (S, I_j|_S, (E-S)|_S) and lift
            std::vector<std::string> sub_vars;
            for (std::size_t i = 0; i < dim; ++i)
                if (i != v) sub_vars.push_back(chart.vars[i]);
            std::vector<Poly> rid = {restrict_poly(f, v)};
            std::vector<EComp> re;
            for (std::size_t k = 0; k < s.E.size(); ++k) {
                if (k == e) continue;
                Poly r = restrict_poly(s.E[k].support, v);
                if (!r.is_unit()) re.push_back(EComp{r, s.E[k].mult});
            }
            Run sub = make_sub_run(run.ctx, sub_vars, rid, re);
            resolve_all(sub);
            if (sub.steps.empty())
                throw internal_error("restriction needed work but the sub-run was empty");
            lift_subrun(run, chart_id, chart.vars[v], sub, tag_ii, j, {j});
            for (const auto& leaf : leaves_under(run, chart_id)) process_leaf(run, leaf, j);
            return;
        }

        // ---- Step iii: snc near cosupp I_j
        // (a) components of cosupp I_j shared with later ideals or with E
        if (!f.is_unit()) {
            for (std::size_t v : variable_factors(f)) {
                bool shared = false;
                for (std::size_t k = j + 1; k < m && !shared; ++k)
                    if (s.ideals[k].divisible_by_var(v)) shared = true;
                for (const auto& ec : s.E)
                    if (!shared && ec.support.divisible_by_var(v)) shared = true;
                if (shared) {
                    auto kids = apply_step(run, chart_id, {chart.vars[v]}, tag_iii, j);
                    process_leaf(run, kids[0], j);
                    return;
                }
            }
            // shared non-coordinate components are outside the desk family
            for (std::size_t k = j + 1; k < m; ++k) {
                Poly g = nonmonomial_part(poly_gcd(f, s.ideals[k]));
                if (!g.is_unit())
                    throw abstain_error("ideals " + std::to_string(j) + " and " + std::to_string(k) +
                                        " share the non-coordinate component " + print_poly(g));
            }
            for (const auto& ec : s.E) {
                Poly g = nonmonomial_part(poly_gcd(f, ec.support));
                if (!g.is_unit())
                    throw abstain_error("ideal " + std::to_string(j) +
                                        " shares a non-coordinate component with E: " + print_poly(g));
            }
        }

        // (b) localized non-snc work near cosupp I_j
        NonSncLocus nsl = sub_tuple_nsl(s, j);
        std::vector<std::size_t> localized;
        for (std::size_t c = 0; c < nsl.components.size(); ++c) {
            if (is_unit_ideal(nsl.components[c].gens(), run.ctx.budget)) continue;
            if (f.is_unit()) continue;
            std::vector<Poly> gens = nsl.components[c].gens();
            gens.push_back(f);
            if (is_unit_ideal(gens, run.ctx.budget)) continue;
            localized.push_back(c);
        }
        if (!localized.empty() && !f.is_unit() && dim > 1) {
            for (std::size_t v : variable_factors(f)) {
                // restriction (S, I_{j+1}|_S, ..., E|_S)
                std::vector<Poly> rid;
                std::vector<std::size_t> idx_map;
                for (std::size_t k = j + 1; k < m; ++k) {
                    Poly r = restrict_poly(s.ideals[k], v);
                    if (r.is_zero())
                        throw internal_error("shared component survived the divisor cleanup");
                    rid.push_back(r);
                    idx_map.push_back(k);
                }
                std::vector<EComp> re;
                for (const auto& ec : s.E) {
                    Poly r = restrict_poly(ec.support, v);
                    if (r.is_zero())
                        throw internal_error("E component equal to a cosupport hyperplane survived");
                    if (!r.is_unit()) re.push_back(EComp{r, ec.mult});
                }
                std::vector<Poly> re_polys;
                for (const auto& ec : re) re_polys.push_back(ec.support);
                if (rid.empty() && re.empty()) continue;
                if (non_snc_locus(rid, re_polys).is_empty(run.ctx.budget)) continue;
                std::vector<std::string> sub_vars;
                for (std::size_t i = 0; i < dim; ++i)
                    if (i != v) sub_vars.push_back(chart.vars[i]);
                Run sub = make_sub_run(run.ctx, sub_vars, rid, re);
                resolve_all(sub);
                if (sub.steps.empty())
                    throw internal_error("restriction needed work but the sub-run was empty");
                lift_subrun(run, chart_id, chart.vars[v], sub, tag_iii, j, idx_map);
                for (const auto& leaf : leaves_under(run, chart_id)) process_leaf(run, leaf, j);
                return;
            }
            // residual non-snc locus touching cosupp I_j away from its
            // coordinate components: blow it up directly when it is itself a
            // union of coordinate subspaces
            const Ideal& J = nsl.components[localized.front()];
            auto centers = coordinate_subspace_decomposition(J, chart.vars, run.ctx.budget);
            auto kids = apply_step(run, chart_id, centers.front(), tag_iii, j);
            for (const auto& kid : kids) process_leaf(run, kid, j);
            return;
        }

        // ---- Step iv: induction on m
        ++j;
    }
}

ResolutionTrace finish_run(Run& run) {
    ResolutionTrace t;
    t.initial = run.initial;
    t.steps = std::move(run.steps);
    t.charts = std::move(run.charts);
    t.certificates = std::move(run.certs);
    for (const auto& id : t.charts.ids_in_order())
        if (run.leaves.count(id)) t.finals.push_back(run.leaves.at(id));
    return t;
}

void validate_tuple_input(const std::vector<Poly>& ideals, const std::vector<EComp>& E,
                          GbBudget& budget) {
    if (ideals.empty() && E.empty()) throw input_error("empty tuple");
    const std::vector<std::string>* vars = nullptr;
    auto check_vars = [&](const Poly& p) {
        if (!vars) vars = &p.vars();
        else if (p.vars() != *vars) throw input_error("tuple members on different variable sets");
    };
    for (const auto& f : ideals) {
        check_vars(f);
        if (f.is_zero()) throw input_error("zero ideal generator (not a Cartier divisor ideal)");
    }
    for (const auto& e : E) {
        check_vars(e.support);
        if (e.support.is_zero() || e.support.is_unit())
            throw input_error("E component must be a nonzero nonunit polynomial");
        if (e.mult <= 0) throw input_error("E multiplicities must be positive");
    }
    for (std::size_t a = 0; a < E.size(); ++a)
        for (std::size_t b = a + 1; b < E.size(); ++b)
            if (!poly_gcd(E[a].support, E[b].support).is_constant())
                throw input_error("E supports are not pairwise coprime");
    // E itself must be snc
    std::vector<Poly> es;
    for (const auto& e : E) es.push_back(e.support);
    if (!es.empty() && !non_snc_locus({}, es).is_empty(budget))
        throw input_error("E is not an snc divisor");
}

} // namespace

ResolutionTrace resolve_tuple(const std::vector<Poly>& ideals, const std::vector<EComp>& E,
                              const EngineConfig& cfg) {
    if (cfg.max_blowups <= 0) throw input_error("max_blowups must be positive");
    if (cfg.groebner_budget <= 0) throw input_error("groebner_budget must be positive");
    Ctx ctx{cfg, GbBudget{cfg.groebner_budget, 0}, 0};
    validate_tuple_input(ideals, E, ctx.budget);
    const std::vector<std::string>& vars = !ideals.empty() ? ideals.front().vars() : E.front().support.vars();
    Run run = make_sub_run(ctx, vars, ideals, E);
    // the cleanup phase compares against the input non-snc locus
    NonSncLocus initial = non_snc_locus(run.initial);
    for (const auto& comp : initial.components)
        if (!is_unit_ideal(comp.gens(), ctx.budget)) run.initial_nsl.push_back(comp);
    resolve_all(run);
    // the engine must only terminate in fully snc leaves
    if (cfg.mutation == EngineConfig::Mutation::none) {
        for (const auto& [id, st] : run.leaves) {
            if (!non_snc_locus(st).is_empty(ctx.budget))
                throw internal_error("engine finished with a non-snc leaf " + id);
        }
    }
    return finish_run(run);
}

ResolutionTrace log_resolve(const std::vector<std::pair<Poly, Rat>>& components,
                            const EngineConfig& cfg) {
    if (components.empty()) throw input_error("no divisor components");
    std::vector<std::size_t> order = cfg.component_order;
    if (order.empty()) {
        order.resize(components.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    }
    if (order.size() != components.size()) throw input_error("component_order has the wrong length");
    std::vector<Poly> ideals;
    for (std::size_t i : order) {
        if (i >= components.size()) throw input_error("component_order index out of range");
        const Poly& f = components[i].first;
        if (f.is_zero() || f.is_unit())
            throw input_error("divisor components must be nonzero nonunits");
        ideals.push_back(f);
    }
    for (std::size_t a = 0; a < ideals.size(); ++a)
        for (std::size_t b = a + 1; b < ideals.size(); ++b)
            if (!poly_gcd(ideals[a], ideals[b]).is_constant())
                throw input_error("divisor components are not pairwise coprime");
    return resolve_tuple(ideals, {}, cfg);
}

// --- verification -----------------------------------------------------------

namespace {

void add_item(VerifyReport& r, const std::string& name, bool pass, const std::string& detail) {
    r.items.push_back(VerifyItem{name, pass, detail});
    if (!pass) r.pass = false;
}

} // namespace

VerifyReport verify_trace(const ResolutionTrace& t, const EngineConfig& cfg) {
    VerifyReport report;
    report.pass = true;
    GbBudget budget{cfg.groebner_budget, 0};

    // (a) replay determinism: rebuild everything from the initial state
    ChartTable charts;
    std::map<std::string, PairState> leaves;
    const std::vector<std::string>& root_vars = t.charts.at(t.charts.root()).vars;
    std::string root = charts.add_root(root_vars);
    PairState init = t.initial;
    init.chart = root;
    leaves.emplace(root, init);
    bool replay_ok = (root == t.charts.root());
    std::string replay_detail;
    std::map<int, PairState> step_states;
    for (std::size_t i = 0; i < t.steps.size() && replay_ok; ++i) {
        const BlowUpStep& st = t.steps[i];
        if (!leaves.count(st.chart)) {
            replay_ok = false;
            replay_detail = "step " + std::to_string(i) + " targets a chart that is not a leaf";
            break;
        }
        PairState s = leaves.at(st.chart);
        step_states.emplace(static_cast<int>(i), s);
        std::vector<PairState> out;
        try {
            out = birational_transform(charts, s, st, static_cast<int>(i), budget);
        } catch (const std::exception& e) {
            replay_ok = false;
            replay_detail = "step " + std::to_string(i) + " failed to replay: " + e.what();
            break;
        }
        leaves.erase(st.chart);
        for (auto& ns : out) leaves.emplace(ns.chart, std::move(ns));
    }
    if (replay_ok) {
        std::vector<PairState> finals;
        for (const auto& id : charts.ids_in_order())
            if (leaves.count(id)) finals.push_back(leaves.at(id));
        if (finals.size() != t.finals.size()) {
            replay_ok = false;
            replay_detail = "leaf count mismatch";
        } else {
            for (std::size_t i = 0; i < finals.size(); ++i) {
                if (!(finals[i] == t.finals[i])) {
                    replay_ok = false;
                    replay_detail = "final state " + std::to_string(i) + " differs on replay";
                    break;
                }
            }
        }
        if (charts.size() != t.charts.size()) {
            replay_ok = false;
            replay_detail = "chart table size mismatch";
        }
    }
    add_item(report, "replay-determinism", replay_ok, replay_detail);
    if (!replay_ok) return report;

    // (b) every leaf chart is snc at the symbolic level
    for (std::size_t i = 0; i < t.finals.size(); ++i) {
        bool ok = true;
        std::string detail;
        try {
            ok = non_snc_locus(t.finals[i]).is_empty(budget);
            if (!ok) detail = "non-snc locus of leaf " + t.finals[i].chart + " is nonempty";
        } catch (const std::exception& e) {
            ok = false;
            detail = e.what();
        }
        add_item(report, "final-snc[" + t.finals[i].chart + "]", ok, detail);
    }

    // (c) each center is contained in the non-snc locus of its step's state.
    // Fixed-locus steps of the semi pipeline are exempt: their centers sit in
    // the snc locus by design and carry their own tau/fixed-locus certificates.
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const BlowUpStep& st = t.steps[i];
        if (st.justification == "semi") {
            add_item(report, "center-in-non-snc-locus[step " + std::to_string(i) + "]", true,
                     "semi step: certified by the semi pipeline");
            continue;
        }
        const PairState& s = step_states.at(static_cast<int>(i));
        const Chart& chart = charts.at(st.chart);
        bool ok = false;
        std::string detail;
        try {
            NonSncLocus nsl = non_snc_locus(s);
            for (const auto& comp : nsl.components) {
                if (!vanishes_on_center(comp, chart, st.center)) continue;
                if (is_unit_ideal(comp.gens(), budget)) continue;
                ok = true;
                break;
            }
            if (!ok) detail = "no proper non-snc component contains the center";
        } catch (const std::exception& e) {
            detail = e.what();
        }
        // the recorded witness must itself be valid
        if (ok && i < t.certificates.size()) {
            const StepCertificate& cert = t.certificates[i];
            if (cert.step == static_cast<int>(i)) {
                if (!vanishes_on_center(cert.nsl_component, chart, st.center)) {
                    ok = false;
                    detail = "recorded witness does not contain the center";
                } else if (is_unit_ideal(cert.nsl_component.gens(), budget)) {
                    ok = false;
                    detail = "recorded witness is the unit ideal";
                }
            }
        }
        add_item(report, "center-in-non-snc-locus[step " + std::to_string(i) + "]", ok, detail);
    }

    // (d) strict-transform matching: the pullback of each input generator
    // into each leaf equals a monomial in the chart variables times the
    // recorded final generator
    for (const auto& fin : t.finals) {
        auto to_root = charts.compose_to_root(fin.chart);
        for (std::size_t k = 0; k < t.initial.ideals.size(); ++k) {
            bool ok = true;
            std::string detail;
            Poly pulled = t.initial.ideals[k].substitute(to_root);
            if (fin.ideals[k].is_zero()) {
                ok = false;
                detail = "final generator is zero";
            } else {
                Poly q;
                if (!try_divide(pulled, fin.ideals[k], q)) {
                    ok = false;
                    detail = "final generator does not divide the pullback";
                } else if (q.nterms() != 1 || q.lead_coeff_grevlex() != 1) {
                    ok = false;
                    detail = "pullback/final quotient is not a monomial: " + print_poly(q);
                }
            }
            add_item(report, "strict-transform[" + fin.chart + ", I" + std::to_string(k) + "]", ok,
                     detail);
        }
    }
    return report;
}

} // namespace sncres
