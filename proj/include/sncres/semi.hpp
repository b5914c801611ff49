#ifndef SNCRES_SEMI_HPP
#define SNCRES_SEMI_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sncres/engine.hpp"

namespace sncres {

// The double-cover presentation X = (y^2 = g(x) h(x)^2), g squarefree.
// g and h may share factors.
struct DoubleCoverDatum {
    std::vector<std::string> ambient_vars; // includes y_var
    std::string y_var;
    std::vector<std::string> x_vars; // ambient minus y
    Poly g, h;                       // on x_vars
};

DoubleCoverDatum double_cover_from_gh(const std::vector<std::string>& ambient_vars,
                                      const std::string& y_var, const Poly& g, const Poly& h);

// Split an explicit equation y^2 - G(x): the y-variable is detected as the
// unique coordinate appearing exactly as a monic square, and G = g h^2 via
// iterated squarefree decomposition.
DoubleCoverDatum double_cover_from_poly(const Poly& f);

// Normalization z^2 = g with z = y/h, reduced conductor (h = 0), deck
// involution z -> -z. The chart realization records how the normalization is
// presented as affine space at desk scale.
struct NormalizationDatum {
    DoubleCoverDatum cover;
    std::string z_var;

    enum class ChartKind {
        affine_solved, // g = c x_k + r: the normalization is A^(n) in (z, x != x_k)
        split_sheets,  // g a nonzero rational square: two disjoint sheets z = +-c
        unrealized,    // outside the desk families (pipeline abstains)
    };
    ChartKind kind = ChartKind::unrealized;

    // affine_solved data
    std::size_t solved_var = 0; // index into cover.x_vars
    Rat solved_coeff;
    Poly solved_rest; // on x_vars, free of the solved variable

    // split_sheets data
    Rat sheet_value;

    std::vector<std::string> nvars; // normalization chart coordinates
    Poly conductor;                 // reduced conductor on nvars (affine_solved)
    Poly equation;                  // z^2 - g on x_vars + z (symbolic record)

    // ambient coordinate functions on the normalization chart (affine_solved):
    // images of x_1..x_n and of y
    std::vector<Poly> x_images;
    Poly y_image;
};

NormalizationDatum normalize_double(const DoubleCoverDatum& d);

// Involution acting by a sign on each chart coordinate.
struct SignInvolution {
    std::vector<int> signs; // +1 / -1 per chart variable

    Poly apply(const Poly& p) const;
    Point apply(const Point& p) const;
};

// Lifted involution on a chart of a blow-up tree rooted at a chart carrying a
// sign involution; exists for every chart over coordinate centers.
SignInvolution lift_involution(const ChartTable& T, const std::string& chart_id,
                               const SignInvolution& root);

struct PushoutPresentation {
    // named generators on the leaf chart variables
    std::vector<std::pair<std::string, Poly>> generators;
    std::string relation; // e.g. "a^2 - b^2*c = 0"
    bool relation_holds = false;
    bool restrictions_invariant = false;
};

struct SemiLeafModel {
    std::string chart;
    std::string model; // "Smooth" | "DoubleNc" | "Pinched"
    SignInvolution involution;
    Poly conductor_transform;
    std::vector<std::string> snc_components; // the coordinate-I part of D'
    bool has_D2 = false;
    std::optional<PushoutPresentation> pushout;
};

struct SemiRunResult {
    ResolutionTrace trace;
    std::vector<SemiLeafModel> leaves;
    std::vector<VerifyItem> certificates;
    bool pass = true;
};

// Run the resolve engine on (normalization, conductor + divisors) with every
// center certified stable under the deck involution; divisors are
// symmetrized (q and tau q both enter) first. Then the fixed locus of the
// lifted involution on the conductor transform is cut down to pure
// codimension 1 by extra blow-ups (justification "semi").
SemiRunResult equivariant_resolve(const NormalizationDatum& n,
                                  const std::vector<Poly>& divisors, const EngineConfig& cfg);

// Fixed-locus normalization on one leaf: blow up the components of
// Fix(tau) on the conductor transform of codimension >= 2 (in the conductor).
// Exposed for tests; equivariant_resolve calls it on every leaf.
// Returns the number of blow-ups performed.
int normalize_fixed_locus(ChartTable& charts, std::vector<BlowUpStep>& steps,
                          std::map<std::string, PairState>& leaves, const std::string& leaf,
                          const SignInvolution& root_inv, std::size_t conductor_idx,
                          const EngineConfig& cfg, GbBudget& budget);

// Generators-and-relation presentation of the universal pushout on one leaf.
PushoutPresentation pushout_generators(const ChartTable& charts, const std::string& leaf,
                                       const PairState& state, const SignInvolution& inv,
                                       std::size_t conductor_idx, const Poly& z_pullback);

// The full pipeline of the log version: normalize, pull back and symmetrize
// D, resolve equivariantly, fix the fixed locus, present the pushout, and
// classify every output chart against the local models.
struct SemiResolution {
    NormalizationDatum datum;
    SemiRunResult run;                          // affine_solved kind
    std::vector<SemiRunResult> sheet_runs;      // split_sheets kind (z = +c, z = -c)
    bool input_snc2 = false;                    // no pinch points on the input
    std::vector<VerifyItem> certificates;
    bool pass = true;
};

SemiResolution semi_log_resolve(const DoubleCoverDatum& cover,
                                const std::vector<std::vector<Poly>>& divisor_ideals,
                                const EngineConfig& cfg);

// The worked pinch-point model: reproduces the blow-up chart computation, the
// normalization by the shifted coordinate, the conductor preimage, the
// involution, the invariance dichotomy and the Q-Cartier identity as exact
// polynomial identities.
struct UmbrellaReport {
    bool pass = true;
    std::vector<VerifyItem> items;
};

UmbrellaReport umbrella_pipeline();

} // namespace sncres

#endif
