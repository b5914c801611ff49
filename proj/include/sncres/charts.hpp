#ifndef SNCRES_CHARTS_HPP
#define SNCRES_CHARTS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sncres/ideal.hpp"
#include "sncres/poly.hpp"

namespace sncres {

// One exceptional divisor as seen in a chart: the strict transform of the
// divisor created at the recorded trace step. A unit polynomial means the
// divisor is not visible in this chart.
struct ExcEntry {
    Poly divisor;
    int step_index = -1;
};

struct ParentLink {
    std::string parent_id;
    std::vector<Poly> subst; // image of the i-th parent variable, on this chart's variables
};

// How this chart was created: the center (in parent variables) and the chosen
// chart variable. Identity charts from codimension-1 centers record |center|=1.
struct BlowupInfo {
    std::vector<std::string> center;
    std::string chosen;
};

struct Chart {
    std::string id;
    std::vector<std::string> vars;
    std::optional<ParentLink> parent;
    std::optional<BlowupInfo> blowup;
    std::vector<ExcEntry> exceptional;

    bool is_root() const { return !parent.has_value(); }
};

// Append-only tree of affine charts.
class ChartTable {
public:
    std::string add_root(std::vector<std::string> vars);
    std::string add_chart(Chart c); // id must be fresh; used by deserialization

    const Chart& at(const std::string& id) const;
    bool has(const std::string& id) const { return charts_.count(id) != 0; }
    const std::string& root() const { return root_; }
    std::vector<std::string> ids_in_order() const { return order_; }
    std::size_t size() const { return charts_.size(); }

    std::string fresh_id();

    // Composition of all ancestor substitutions: root variables -> polynomials
    // of the given chart. The root chart gets the identity map.
    std::vector<Poly> compose_to_root(const std::string& id) const;

    // Evaluate the composed map: the downstairs (root) image of a chart point.
    Point push_down(const std::string& id, const Point& p) const;

    // Preimage of a root point in this chart, when the chart both covers and
    // owns it (first-nonzero-center-coordinate rule on every ancestor step).
    std::optional<Point> lift_point(const std::string& id, const Point& root_pt) const;

private:
    std::map<std::string, Chart> charts_;
    std::vector<std::string> order_;
    std::string root_;
    int next_ = 0;
};

// Divisor with multiplicity, as part of the snc locus bookkeeping E.
struct EComp {
    Poly support;
    long mult = 1;
    bool operator==(const EComp& o) const { return support == o.support && mult == o.mult; }
};

// The tuple (X, I_1,...,I_m, E) on one chart. Ideals are principal: one
// generator each. E supports are pairwise coprime.
struct PairState {
    std::string chart;
    std::vector<Poly> ideals;
    std::vector<EComp> E;

    bool operator==(const PairState& o) const {
        return chart == o.chart && ideals == o.ideals && E == o.E;
    }
};

struct BlowUpStep {
    std::string chart;
    std::vector<std::string> center;
    std::string justification;
};

// Blow up a coordinate subspace of codimension >= 2: one new chart per center
// variable (in center order), each registering the exceptional divisor.
std::vector<std::string> blow_up(ChartTable& T, const std::string& chart_id,
                                 const std::vector<std::string>& center, int step_index);

// Codimension-1 center: the map is an isomorphism; an identity chart is
// created and the transform rule downstream still divides by the center.
std::string blow_up_divisor(ChartTable& T, const std::string& chart_id,
                            const std::string& center_var, int step_index);

// Blow-up precondition: the center has simple normal crossing with E. Decided
// symbolically: each E support restricted to the center subspace is either
// identically zero (contains) or cuts a smooth divisor there (transversal).
bool center_snc_with_E(const ChartTable& T, const std::string& chart_id,
                       const std::vector<std::string>& center,
                       const std::vector<EComp>& E, GbBudget& budget);

// The birational transform rule: pull back each ideal, divide exactly once by
// the exceptional coordinate when the center lies in its cosupport; E becomes
// its total transform with the exceptional divisor appended. Creates the new
// charts and returns one PairState per chart (center order).
std::vector<PairState> birational_transform(ChartTable& T, const PairState& s,
                                            const BlowUpStep& step, int step_index,
                                            GbBudget& budget);

// Indices (into chart vars) of a center given by names; throws input_error on
// unknown or duplicate names.
std::vector<std::size_t> center_indices(const Chart& c, const std::vector<std::string>& center);

} // namespace sncres

#endif
