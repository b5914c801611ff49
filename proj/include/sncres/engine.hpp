#ifndef SNCRES_ENGINE_HPP
#define SNCRES_ENGINE_HPP

#include <string>
#include <vector>

#include "sncres/charts.hpp"
#include "sncres/classify.hpp"

namespace sncres {

// Marked ideal (I, m). Order reduction in this artifact always runs with
// mark 2: each marked blow-up is realized as two engine steps (the center,
// then the exceptional divisor).
struct MarkedIdeal {
    Poly ideal;
    int mark = 2;
};

struct EngineConfig {
    long max_blowups = 64;
    long groebner_budget = 100000;
    // user-fixed ordering of the divisor components; empty = input order
    std::vector<std::size_t> component_order;

    // test-only defect injection for the mutation fixtures
    enum class Mutation { none, skip_marked_f_step, skip_transform_division };
    Mutation mutation = Mutation::none;
};

// Per-step proof obligations: a proper non-snc-locus component whose zero set
// contains the center, and (for steps taken under the induction on m) the
// list of earlier ideals certified disjoint from the center.
struct StepCertificate {
    int step = -1;
    std::vector<std::string> center;
    Ideal nsl_component;
    std::vector<std::size_t> disjoint_from;
};

struct ResolutionTrace {
    PairState initial;
    std::vector<BlowUpStep> steps;
    ChartTable charts;
    std::vector<PairState> finals; // leaf states, chart-creation order
    std::vector<StepCertificate> certificates;
};

// Entry point: log resolution of a divisor given by its components, starting
// from (X = A^n, I_j = (f_j), E = 0). Components must be pairwise coprime.
ResolutionTrace log_resolve(const std::vector<std::pair<Poly, Rat>>& components,
                            const EngineConfig& cfg);

// The general tuple engine (also used for restrictions and the semi pipeline).
ResolutionTrace resolve_tuple(const std::vector<Poly>& ideals, const std::vector<EComp>& E,
                              const EngineConfig& cfg);

struct VerifyItem {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    bool pass = false;
    std::vector<VerifyItem> items;
};

// Independent certificate checker: replay determinism, final snc verdicts,
// center-in-non-snc-locus containments, strict-transform matching. Uses only
// the chart and classification layers.
VerifyReport verify_trace(const ResolutionTrace& t, const EngineConfig& cfg);

// Decompose the zero set of J into maximal coordinate subspaces of the chart:
// returns minimal variable subsets C with V(C) inside V(J) covering V(J).
// Throws abstain_error when V(J) is not such a union.
std::vector<std::vector<std::string>> coordinate_subspace_decomposition(
    const Ideal& J, const std::vector<std::string>& vars, GbBudget& budget);

// All partial derivatives of order < k (including f itself), the generators
// of the order->=k stratum ideal.
std::vector<Poly> partials_below_order(const Poly& f, int k);

// Closure of the image of the divisor (var = 0) of a chart under the
// composed map to the root chart, as an ideal on the root variables (lex
// elimination). An empty list means the image is dense. The cleanup phase
// compares these images against the input non-snc locus.
std::vector<Poly> divisor_image_downstairs(const ChartTable& T, const std::string& chart_id,
                                           const std::string& var, GbBudget& budget);

} // namespace sncres

#endif
