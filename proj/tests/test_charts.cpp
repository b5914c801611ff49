#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "sncres/charts.hpp"
#include "sncres/poly_io.hpp"
#include "sncres/errors.hpp"

using namespace sncres;

namespace {

const std::vector<std::string> A3 = {"x1", "x2", "x3"};
const std::vector<std::string> A2 = {"x", "y"};

Poly P(const std::vector<std::string>& vars, const std::string& s) { return parse_poly(vars, s); }

GbBudget budget() { return GbBudget{100000, 0}; }

Point rand_point(std::mt19937& rng, std::size_t dim, bool nonzero) {
    std::uniform_int_distribution<int> c(-9, 9);
    std::vector<Rat> v;
    for (std::size_t i = 0; i < dim; ++i) {
        int k = c(rng);
        if (nonzero) {
            while (k == 0) k = c(rng);
        }
        v.push_back(rat_of(k, 1 + static_cast<int>(i)));
    }
    return Point(std::move(v));
}

} // namespace

TEST_CASE("blow-up of a codimension-2 center in A^3") {
    ChartTable T;
    std::string root = T.add_root(A3);
    auto kids = blow_up(T, root, {"x1", "x2"}, 0);
    REQUIRE(kids.size() == 2);
    const Chart& c2 = T.at(kids[1]); // the x2-chart
    CHECK(c2.blowup->chosen == "x2");
    CHECK(c2.vars == std::vector<std::string>{"x1'", "x2", "x3"});
    // x1 |-> x1'*x2
    CHECK(c2.parent->subst[0] == P(c2.vars, "x1'*x2"));
    CHECK(c2.parent->subst[1] == P(c2.vars, "x2"));
    CHECK(c2.parent->subst[2] == P(c2.vars, "x3"));
    REQUIRE(c2.exceptional.size() == 1);
    CHECK(c2.exceptional[0].divisor == P(c2.vars, "x2"));

    const Chart& c1 = T.at(kids[0]);
    CHECK(c1.vars == std::vector<std::string>{"x1", "x2'", "x3"});
    CHECK(c1.exceptional[0].divisor == P(c1.vars, "x1"));
}

TEST_CASE("origin blow-up of the plane") {
    ChartTable T;
    std::string root = T.add_root(A2);
    auto kids = blow_up(T, root, {"x", "y"}, 0);
    REQUIRE(kids.size() == 2);
    const Chart& cy = T.at(kids[1]);
    CHECK(cy.exceptional[0].divisor == Poly::variable(cy.vars, "y"));
}

TEST_CASE("full-point blow-up of A^3 glues on overlaps") {
    ChartTable T;
    std::string root = T.add_root(A3);
    auto kids = blow_up(T, root, {"x1", "x2", "x3"}, 0);
    REQUIRE(kids.size() == 3);
    for (const auto& id : kids) {
        const Chart& c = T.at(id);
        int primed = 0;
        for (const auto& v : c.vars)
            if (v.find('\'') != std::string::npos) ++primed;
        CHECK(primed == 2);
    }
    // cross-substitution identity: a random root point away from the center
    // has exactly one owned preimage, and the maps agree on overlaps
    std::mt19937 rng(3);
    for (int it = 0; it < 50; ++it) {
        Point q = rand_point(rng, 3, true);
        int owners = 0;
        for (const auto& id : kids) {
            auto lifted = T.lift_point(id, q);
            if (!lifted) continue;
            ++owners;
            CHECK(T.push_down(id, *lifted) == q);
        }
        CHECK(owners == 1);
    }
}

TEST_CASE("compose_to_root") {
    ChartTable T;
    std::string root = T.add_root(A3);
    auto ident = T.compose_to_root(root);
    for (std::size_t i = 0; i < 3; ++i) CHECK(ident[i] == Poly::variable(A3, A3[i]));

    auto kids = blow_up(T, root, {"x1", "x2"}, 0);
    auto maps = T.compose_to_root(kids[1]);
    const Chart& c2 = T.at(kids[1]);
    CHECK(maps[0] == P(c2.vars, "x1'*x2"));
    CHECK(maps[1] == P(c2.vars, "x2"));
    CHECK(maps[2] == P(c2.vars, "x3"));

    // two stacked blow-ups: round-trip random rational points off the exceptional loci
    auto kids2 = blow_up(T, kids[1], {"x1'", "x3"}, 1);
    std::mt19937 rng(11);
    for (int it = 0; it < 50; ++it) {
        for (const auto& leaf : kids2) {
            Point p = rand_point(rng, 3, true);
            Point down = T.push_down(leaf, p);
            auto up = T.lift_point(leaf, down);
            if (up) CHECK(T.push_down(leaf, *up) == down);
        }
    }
}

TEST_CASE("divisor blow-up bookkeeping") {
    ChartTable T;
    std::string root = T.add_root(A2);
    GbBudget b = budget();

    // I1 = <x*(x+y)>, I2 = <x*(x-y)>: both multiplicities along (x=0) drop by 1
    PairState s{root, {P(A2, "x*(x+y)"), P(A2, "x*(x-y)")}, {}};
    BlowUpStep step{root, {"x"}, "step-iii"};
    auto out = birational_transform(T, s, step, 0, b);
    REQUIRE(out.size() == 1);
    CHECK(out[0].ideals[0] == P(A2, "x+y"));
    CHECK(out[0].ideals[1] == P(A2, "x-y"));
    CHECK(out[0].ideals[0].order_along({0}) == 0);
    REQUIRE(out[0].E.size() == 1);
    CHECK(out[0].E[0].support == P(A2, "x"));

    // no-op on cosupports when x does not divide the generators
    PairState s2{out[0].chart, {P(A2, "x+y"), P(A2, "x-y")}, out[0].E};
    auto out2 = birational_transform(T, s2, BlowUpStep{s2.chart, {"x"}, "step-iii"}, 1, b);
    CHECK(out2[0].ideals[0] == P(A2, "x+y"));
    CHECK(out2[0].ideals[1] == P(A2, "x-y"));
    // the E entry for (x) merged rather than duplicated
    REQUIRE(out2[0].E.size() == 1);
    CHECK(out2[0].E[0].support == P(A2, "x"));
    CHECK(out2[0].E[0].mult == 2);

    // iterate twice on <x^2>: cosupport multiplicity 2 -> 0, by term-order bookkeeping
    ChartTable T2;
    std::string r2 = T2.add_root(A2);
    PairState q{r2, {P(A2, "x^2")}, {}};
    CHECK(q.ideals[0].order_along({0}) == 2);
    auto q1 = birational_transform(T2, q, BlowUpStep{r2, {"x"}, "step-i"}, 0, b);
    CHECK(q1[0].ideals[0].order_along({0}) == 1);
    auto q2 = birational_transform(T2, q1[0], BlowUpStep{q1[0].chart, {"x"}, "step-i-F"}, 1, b);
    CHECK(q2[0].ideals[0].order_along({0}) == 0);
    CHECK(q2[0].ideals[0].is_unit());
}

TEST_CASE("birational transform of the pinch-point equation") {
    ChartTable T;
    std::string root = T.add_root(A3);
    GbBudget b = budget();
    PairState s{root, {P(A3, "x1^2 - x2^2*x3")}, {}};
    BlowUpStep step{root, {"x1", "x2"}, "step-i"};
    auto out = birational_transform(T, s, step, 0, b);
    REQUIRE(out.size() == 2);

    const Chart& c2 = T.at(out[1].chart);
    // pullback is x2^2*(x1'^2 - x3); divided once by the exceptional
    Poly pulled = s.ideals[0].substitute(c2.parent->subst);
    CHECK(pulled == P(c2.vars, "x2^2*(x1'^2 - x3)"));
    CHECK(out[1].ideals[0] == P(c2.vars, "x2*(x1'^2 - x3)"));
    REQUIRE(out[1].E.size() == 1);
    CHECK(out[1].E[0].support == P(c2.vars, "x2"));

    // exact-division postcondition: multiplying back recovers the pullback
    CHECK(out[1].ideals[0] * Poly::variable(c2.vars, "x2") == pulled);

    // center disjoint from the cosupport: plain pullback
    ChartTable T3;
    std::string r3 = T3.add_root(A3);
    PairState s3{r3, {P(A3, "x3 - 1")}, {}};
    auto out3 = birational_transform(T3, s3, BlowUpStep{r3, {"x1", "x2"}, "step-iv"}, 0, b);
    const Chart& d = T3.at(out3[0].chart);
    CHECK(out3[0].ideals[0] == P(d.vars, "x3 - 1"));
}

TEST_CASE("marked convention divides twice in total") {
    // blow up Z = (x1=x2=0), then the exceptional divisor F: ideals that
    // contained Z to order >= 2 get divided by the exceptional exactly twice
    ChartTable T;
    std::string root = T.add_root(A3);
    GbBudget b = budget();
    Poly f = P(A3, "x1^2 - x2^2*x3");
    PairState s{root, {f}, {}};
    auto after_z = birational_transform(T, s, BlowUpStep{root, {"x1", "x2"}, "step-i"}, 0, b);
    PairState x2state = after_z[1];
    const Chart& c2 = T.at(x2state.chart);
    auto after_f = birational_transform(T, x2state, BlowUpStep{x2state.chart, {"x2"}, "step-i-F"}, 1, b);
    const Chart& c2f = T.at(after_f[0].chart);
    CHECK(after_f[0].ideals[0] == P(c2f.vars, "x1'^2 - x3"));
    // composite: pullback divided by the exceptional coordinate twice
    Poly pulled = f.substitute(c2.parent->subst);
    Poly twice = Poly::variable(c2.vars, "x2").pow(2);
    CHECK(after_f[0].ideals[0].on_vars(c2.vars) * twice == pulled);
}

TEST_CASE("pullback correctness at random rational points") {
    ChartTable T;
    std::string root = T.add_root(A3);
    GbBudget b = budget();
    Poly f = P(A3, "x1^2 - x2^2*x3 + x3^3");
    PairState s{root, {f}, {}};
    auto out = birational_transform(T, s, BlowUpStep{root, {"x1", "x2"}, "cleanup"}, 0, b);
    std::mt19937 rng(21);
    for (int it = 0; it < 100; ++it) {
        for (const auto& st : out) {
            Point p = rand_point(rng, 3, true);
            Point down = T.push_down(st.chart, p);
            Poly pulled = f.substitute(T.at(st.chart).parent->subst);
            CHECK(pulled.evaluate(p) == f.evaluate(down));
        }
    }
}

TEST_CASE("center snc with E") {
    ChartTable T;
    std::string root = T.add_root(A3);
    GbBudget b = budget();
    auto E1 = std::vector<EComp>{EComp{P(A3, "x2"), 1}};
    CHECK(center_snc_with_E(T, root, {"x1", "x2"}, E1, b)); // contains
    auto E2 = std::vector<EComp>{EComp{P(A3, "x3"), 1}};
    CHECK(center_snc_with_E(T, root, {"x1", "x2"}, E2, b)); // transverse
    // E = (x1 - x2^2): contains V(x1,x2), so snc with that center...
    auto E3 = std::vector<EComp>{EComp{P(A3, "x1 - x2^2"), 1}};
    CHECK(center_snc_with_E(T, root, {"x1", "x2"}, E3, b));
    // ...but is tangent to V(x1,x3) at the origin: restriction -x2^2 is not smooth
    CHECK_FALSE(center_snc_with_E(T, root, {"x1", "x3"}, E3, b));
    // direct tangent-space oracle for the failing case: at the origin the
    // gradient of E is (1,0,0), which kills the x1 direction but not the
    // center's tangent direction x2 |-> the center lies inside T_0 E while the
    // center is not inside E itself (the point (0,1,0) of V(x1,x3) has E = -1)
    Poly e = P(A3, "x1 - x2^2");
    Point origin = Point::origin(3);
    CHECK(e.evaluate(origin) == Rat(0));
    CHECK(e.derivative("x2").evaluate(origin) == Rat(0));
    CHECK(e.derivative("x3").evaluate(origin) == Rat(0));
    Point onZ(std::vector<Rat>{Rat(0), Rat(1), Rat(0)});
    CHECK(e.evaluate(onZ) != Rat(0));
}

TEST_CASE("invalid centers are rejected") {
    ChartTable T;
    std::string root = T.add_root(A2);
    CHECK_THROWS_AS(blow_up(T, root, {"x", "z"}, 0), input_error);
    CHECK_THROWS_AS(blow_up(T, root, {"x", "x"}, 0), input_error);
    CHECK_THROWS_AS(blow_up(T, root, {"x"}, 0), input_error);
}
