#include "sncres/charts.hpp"
#include "sncres/errors.hpp"

#include <algorithm>
#include <set>

namespace sncres {

std::string ChartTable::fresh_id() { return "c" + std::to_string(next_++); }

std::string ChartTable::add_root(std::vector<std::string> vars) {
    if (!charts_.empty()) throw internal_error("chart table already has a root");
    std::set<std::string> uniq(vars.begin(), vars.end());
    if (uniq.size() != vars.size()) throw input_error("duplicate chart variables");
    Chart c;
    c.id = fresh_id();
    c.vars = std::move(vars);
    root_ = c.id;
    order_.push_back(c.id);
    charts_.emplace(c.id, std::move(c));
    return root_;
}

std::string ChartTable::add_chart(Chart c) {
    if (charts_.count(c.id)) throw internal_error("duplicate chart id " + c.id);
    if (charts_.empty()) root_ = c.id;
    order_.push_back(c.id);
    std::string id = c.id;
    charts_.emplace(id, std::move(c));
    // keep fresh_id ahead of any numeric ids fed in by deserialization
    if (id.size() > 1 && id[0] == 'c') {
        try {
            int n = std::stoi(id.substr(1));
            next_ = std::max(next_, n + 1);
        } catch (...) {
        }
    }
    return id;
}

const Chart& ChartTable::at(const std::string& id) const {
    auto it = charts_.find(id);
    if (it == charts_.end()) throw internal_error("unknown chart " + id);
    return it->second;
}

std::vector<Poly> ChartTable::compose_to_root(const std::string& id) const {
    const Chart& c = at(id);
    if (c.is_root()) {
        std::vector<Poly> identity;
        identity.reserve(c.vars.size());
        for (const auto& v : c.vars) identity.push_back(Poly::variable(c.vars, v));
        return identity;
    }
    std::vector<Poly> up = compose_to_root(c.parent->parent_id);
    std::vector<Poly> out;
    out.reserve(up.size());
    for (const auto& p : up) out.push_back(p.substitute(c.parent->subst));
    return out;
}

Point ChartTable::push_down(const std::string& id, const Point& p) const {
    auto maps = compose_to_root(id);
    std::vector<Rat> coords;
    coords.reserve(maps.size());
    for (const auto& m : maps) coords.push_back(m.evaluate(p));
    return Point(std::move(coords));
}

std::optional<Point> ChartTable::lift_point(const std::string& id, const Point& root_pt) const {
    const Chart& c = at(id);
    if (c.is_root()) {
        if (root_pt.dim() != c.vars.size()) throw input_error("lift_point: dimension mismatch");
        return root_pt;
    }
    auto parent_ptO = lift_point(c.parent->parent_id, root_pt);
    if (!parent_ptO) return std::nullopt;
    const Point& pp = *parent_ptO;
    const Chart& par = at(c.parent->parent_id);
    const BlowupInfo& bu = *c.blowup;
    if (bu.center.size() == 1) return pp; // identity chart
    // ownership: the first center variable with a nonzero parent coordinate
    // names the chart that owns the preimage
    std::string owner;
    for (const auto& v : bu.center) {
        auto it = std::find(par.vars.begin(), par.vars.end(), v);
        std::size_t vi = static_cast<std::size_t>(it - par.vars.begin());
        if (pp.coords[vi] != 0) { owner = v; break; }
    }
    if (owner.empty() || owner != bu.chosen) return std::nullopt; // on the center, or owned elsewhere
    auto jt = std::find(par.vars.begin(), par.vars.end(), bu.chosen);
    std::size_t j = static_cast<std::size_t>(jt - par.vars.begin());
    Rat xj = pp.coords[j];
    std::vector<Rat> coords(c.vars.size());
    // chart variables are positionally aligned with parent variables
    for (std::size_t i = 0; i < par.vars.size(); ++i) {
        bool in_center = std::find(bu.center.begin(), bu.center.end(), par.vars[i]) != bu.center.end();
        if (in_center && i != j) coords[i] = pp.coords[i] / xj;
        else coords[i] = pp.coords[i];
    }
    return Point(std::move(coords));
}

std::vector<std::size_t> center_indices(const Chart& c, const std::vector<std::string>& center) {
    if (center.empty()) throw input_error("empty blow-up center");
    std::vector<std::size_t> idx;
    std::set<std::string> seen;
    for (const auto& v : center) {
        if (!seen.insert(v).second) throw input_error("duplicate center variable " + v);
        auto it = std::find(c.vars.begin(), c.vars.end(), v);
        if (it == c.vars.end())
            throw input_error("center variable " + v + " is not a variable of chart " + c.id);
        idx.push_back(static_cast<std::size_t>(it - c.vars.begin()));
    }
    return idx;
}

namespace {

std::string primed_name(const std::string& base, const std::vector<std::string>& taken) {
    std::string name = base + "'";
    while (std::find(taken.begin(), taken.end(), name) != taken.end()) name += "'";
    return name;
}

} // namespace

std::vector<std::string> blow_up(ChartTable& T, const std::string& chart_id,
                                 const std::vector<std::string>& center, int step_index) {
    const Chart parent = T.at(chart_id);
    auto idx = center_indices(parent, center);
    if (center.size() < 2)
        throw input_error("blow_up needs a center of codimension >= 2; use blow_up_divisor");

    std::vector<std::string> children;
    for (std::size_t pick = 0; pick < center.size(); ++pick) {
        std::size_t j = idx[pick];
        Chart child;
        child.id = T.fresh_id();
        child.vars = parent.vars;
        // rename the non-chosen center variables x_i -> x_i'
        for (std::size_t k = 0; k < center.size(); ++k) {
            if (k == pick) continue;
            child.vars[idx[k]] = primed_name(parent.vars[idx[k]], child.vars);
        }
        // substitution: x_i |-> x_i' * x_j for center vars, identity elsewhere
        Poly xj = Poly::variable(child.vars, parent.vars[j]);
        std::vector<Poly> subst;
        subst.reserve(parent.vars.size());
        for (std::size_t i = 0; i < parent.vars.size(); ++i) {
            bool in_center = std::find(idx.begin(), idx.end(), i) != idx.end();
            if (in_center && i != j)
                subst.push_back(Poly::variable(child.vars, child.vars[i]) * xj);
            else
                subst.push_back(Poly::variable(child.vars, child.vars[i]));
        }
        child.parent = ParentLink{parent.id, subst};
        child.blowup = BlowupInfo{center, parent.vars[j]};
        // inherited exceptional divisors: strict transforms
        for (const auto& exc : parent.exceptional) {
            Poly pulled = exc.divisor.substitute(subst);
            while (!pulled.is_unit() && pulled.divisible_by_var(j)) pulled = pulled.divided_by_var(j);
            child.exceptional.push_back(ExcEntry{pulled, exc.step_index});
        }
        child.exceptional.push_back(ExcEntry{Poly::variable(child.vars, parent.vars[j]), step_index});
        children.push_back(T.add_chart(std::move(child)));
    }
    return children;
}

std::string blow_up_divisor(ChartTable& T, const std::string& chart_id,
                            const std::string& center_var, int step_index) {
    const Chart parent = T.at(chart_id);
    center_indices(parent, {center_var}); // validates the variable
    Chart child;
    child.id = T.fresh_id();
    child.vars = parent.vars;
    std::vector<Poly> subst;
    for (const auto& v : parent.vars) subst.push_back(Poly::variable(parent.vars, v));
    child.parent = ParentLink{parent.id, subst};
    child.blowup = BlowupInfo{{center_var}, center_var};
    child.exceptional = parent.exceptional;
    child.exceptional.push_back(ExcEntry{Poly::variable(child.vars, center_var), step_index});
    return T.add_chart(std::move(child));
}

bool center_snc_with_E(const ChartTable& T, const std::string& chart_id,
                       const std::vector<std::string>& center,
                       const std::vector<EComp>& E, GbBudget& budget) {
    const Chart& c = T.at(chart_id);
    auto idx = center_indices(c, center);
    // coordinates of the center subspace
    std::vector<std::string> sub_vars;
    for (std::size_t i = 0; i < c.vars.size(); ++i)
        if (std::find(idx.begin(), idx.end(), i) == idx.end()) sub_vars.push_back(c.vars[i]);
    for (const auto& comp : E) {
        // restrict: set the center variables to zero
        std::vector<Poly> images;
        images.reserve(c.vars.size());
        std::vector<std::string> target = sub_vars.empty() ? std::vector<std::string>{c.vars[idx[0]]} : sub_vars;
        for (std::size_t i = 0; i < c.vars.size(); ++i) {
            bool in_center = std::find(idx.begin(), idx.end(), i) != idx.end();
            if (in_center) images.push_back(Poly::zero(target));
            else images.push_back(Poly::variable(target, c.vars[i]));
        }
        Poly r = comp.support.substitute(images);
        if (r.is_zero()) continue;       // the component contains the center
        if (r.is_unit()) continue;       // the component misses the center
        // transversality: the restriction must be a smooth divisor of the subspace
        if (!is_unit_ideal(jacobian_ideal(r).gens(), budget)) return false;
    }
    return true;
}

std::vector<PairState> birational_transform(ChartTable& T, const PairState& s,
                                            const BlowUpStep& step, int step_index,
                                            GbBudget& budget) {
    if (step.chart != s.chart) throw input_error("birational_transform: step targets a different chart");
    const Chart parent = T.at(s.chart);
    auto idx = center_indices(parent, step.center);
    if (!center_snc_with_E(T, s.chart, step.center, s.E, budget))
        throw input_error("blow-up center fails simple normal crossing with E");

    // vanishing order of each ideal generator and E support along the center
    std::vector<long> ideal_ord, e_ord;
    for (const auto& f : s.ideals) ideal_ord.push_back(f.order_along(idx));
    for (const auto& comp : s.E) e_ord.push_back(comp.support.order_along(idx));

    std::vector<std::string> children;
    if (step.center.size() == 1) children.push_back(blow_up_divisor(T, s.chart, step.center[0], step_index));
    else children = blow_up(T, s.chart, step.center, step_index);

    std::vector<PairState> out;
    for (const auto& child_id : children) {
        const Chart& child = T.at(child_id);
        const std::vector<Poly>& subst = child.parent->subst;
        int jv = -1;
        {
            auto it = std::find(child.vars.begin(), child.vars.end(), child.blowup->chosen);
            jv = static_cast<int>(it - child.vars.begin());
        }
        std::size_t j = static_cast<std::size_t>(jv);
        PairState ns;
        ns.chart = child_id;
        for (std::size_t k = 0; k < s.ideals.size(); ++k) {
            Poly pulled = s.ideals[k].substitute(subst);
            if (ideal_ord[k] >= 1 && !pulled.is_zero()) {
                // center inside the cosupport: divide exactly once
                if (!pulled.divisible_by_var(j))
                    throw internal_error("transform division not exact (ideal " + std::to_string(k) + ")");
                pulled = pulled.divided_by_var(j);
            }
            ns.ideals.push_back(pulled);
        }
        // E: total transform; F picks up the multiplicity it acquires
        long f_mult = 1;
        for (std::size_t k = 0; k < s.E.size(); ++k) {
            Poly pulled = s.E[k].support.substitute(subst);
            long drop = 0;
            while (!pulled.is_unit() && pulled.divisible_by_var(j)) {
                pulled = pulled.divided_by_var(j);
                ++drop;
            }
            if (drop != e_ord[k] && step.center.size() > 1)
                throw internal_error("E transform: multiplicity bookkeeping mismatch");
            f_mult += s.E[k].mult * drop;
            if (!pulled.is_unit()) ns.E.push_back(EComp{pulled, s.E[k].mult});
        }
        ns.E.push_back(EComp{Poly::variable(child.vars, child.blowup->chosen), f_mult});
        out.push_back(std::move(ns));
    }
    return out;
}

} // namespace sncres
