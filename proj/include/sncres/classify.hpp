#ifndef SNCRES_CLASSIFY_HPP
#define SNCRES_CLASSIFY_HPP

#include <optional>
#include <string>
#include <vector>

#include "sncres/charts.hpp"
#include "sncres/ideal.hpp"

namespace sncres {

enum class PointClassKind {
    Smooth,
    SncMult,
    NcDoubleNotSnc,
    Pinch,
    SemiSncModel,
    Outside,
    Unclassified,
};

// Pointwise verdict. The detectors are sound for the listed local models and
// return Unclassified elsewhere; Unclassified is a legal answer, never a guess.
struct PointClass {
    PointClassKind kind = PointClassKind::Unclassified;
    int param = 0;       // multiplicity for SncMult, case number for SemiSncModel
    std::string witness; // gradients / normal-form / mismatch data

    bool operator==(const PointClass& o) const { return kind == o.kind && param == o.param; }
};

std::string point_class_name(const PointClass& c);

// Closed-set description of the complement of the snc locus: a finite union
// of ideals (no primary decomposition; emptiness means every ideal is unit).
struct NonSncLocus {
    std::vector<Ideal> components;

    bool is_empty(GbBudget& budget) const;
    // indices of the components that are proper ideals
    std::vector<std::size_t> proper_components(GbBudget& budget) const;
};

// Exact rational matrix rank (Gaussian elimination).
std::size_t matrix_rank(std::vector<std::vector<Rat>> m);

std::vector<Rat> gradient_at(const Poly& f, const Point& pt);

// Divisor-level test: every component through the point is smooth there
// and the gradients of the vanishing components are linearly independent.
bool is_snc_at(const std::vector<std::pair<Poly, Rat>>& components, const Point& pt);

// Tuple-level test on one chart: cosupports through the point smooth,
// jointly transverse with the E-components, and no two members share a
// component through the point.
bool is_snc_tuple_at(const PairState& s, const Point& pt);
bool is_snc_tuple_at(const std::vector<Poly>& ideal_gens, const std::vector<Poly>& e_supports,
                     const Point& pt);

// Union of per-component singular loci, tangency loci (vanishing + dependent
// gradients, via minors), and shared-component gcd loci.
NonSncLocus non_snc_locus(const std::vector<Poly>& ideal_gens, const std::vector<Poly>& e_supports);
NonSncLocus non_snc_locus(const PairState& s);

// Multiplicity-2 recipe: distinguish snc double points, nc-not-snc double
// points, and pinch points; abstains with Unclassified beyond those models.
PointClass classify_double_point(const Poly& f, const Point& pt);

// General pointwise driver: Outside / Smooth / SncMult(k) / double-point cases.
PointClass classify_point(const std::vector<std::pair<Poly, Rat>>& components, const Point& pt);

// Weil divisor data for the semi-snc local models: coefficient c on
// (y_coord = 0), optionally restricted to the X-branch (y_branch = 0).
struct SemiDivisorPart {
    std::size_t coord = 0;
    Rat coeff;
    std::optional<std::size_t> branch;
};

PointClass classify_semi_snc(const std::vector<std::string>& ambient_vars,
                             const std::vector<std::size_t>& X_branches,
                             const std::vector<SemiDivisorPart>& D,
                             const Point& pt);

enum class TauClass { invariant, anti_square_descends, neither };

std::string tau_class_name(TauClass c);

// Decide which branch of the tau-invariance dichotomy a function falls in,
// working modulo the conductor coordinate and splitting by parity in the
// deck coordinate.
TauClass tau_invariant_divisor_test(const Poly& f, const std::string& deck_var,
                                    const std::string& conductor_var);

} // namespace sncres

#endif
