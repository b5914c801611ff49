#include "sncres/corpus.hpp"
#include "sncres/errors.hpp"
#include "sncres/poly_io.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>

namespace sncres {

namespace {

Poly P(const std::vector<std::string>& vars, const std::string& s) { return parse_poly(vars, s); }

Point pt(std::vector<long> cs) {
    std::vector<Rat> v;
    for (long c : cs) v.push_back(Rat(c));
    return Point(std::move(v));
}

const std::vector<std::string> A2 = {"x", "y"};
const std::vector<std::string> A3 = {"x1", "x2", "x3"};

} // namespace

std::vector<DetectorFixture> detector_fixtures() {
    std::vector<DetectorFixture> out;
    auto div = [&](const std::string& name, const std::vector<std::string>& amb,
                   std::vector<std::pair<Poly, Rat>> comps, Point p, const std::string& expect) {
        DetectorFixture f;
        f.name = name;
        f.ambient = amb;
        f.components = std::move(comps);
        f.point = std::move(p);
        f.expected = expect;
        out.push_back(std::move(f));
    };
    auto one = [&](const Poly& p) { return std::vector<std::pair<Poly, Rat>>{{p, Rat(1)}}; };

    div("coordinate-cross", A2, {{P(A2, "x"), Rat(1)}, {P(A2, "y"), Rat(1)}}, pt({0, 0}),
        "SncMult(2)");
    div("cross-off-center", A2, {{P(A2, "x"), Rat(1)}, {P(A2, "y"), Rat(1)}}, pt({0, 3}), "Smooth");
    div("three-planes", A3,
        {{P(A3, "x1"), Rat(1)}, {P(A3, "x2"), Rat(1)}, {P(A3, "x3"), Rat(1)}}, pt({0, 0, 0}),
        "SncMult(3)");
    div("nodal-cubic", A2, one(P(A2, "y^2 - x^2 - x^3")), pt({0, 0}), "NcDoubleNotSnc");
    div("nodal-cubic-smooth-point", A2, one(P(A2, "y^2 - x^2 - x^3")), pt({3, 6}), "Smooth");
    div("sum-of-squares", A2, one(P(A2, "x^2 + y^2")), pt({0, 0}), "NcDoubleNotSnc");
    div("rational-split-quadric", A2, one(P(A2, "x^2 - 4y^2")), pt({0, 0}), "SncMult(2)");
    div("umbrella-pinch", A3, one(P(A3, "x1^2 - x2^2*x3")), pt({0, 0, 0}), "Pinch");
    div("umbrella-axis", A3, one(P(A3, "x1^2 - x2^2*x3")), pt({0, 0, 7}), "NcDoubleNotSnc");
    div("umbrella-axis-square-height", A3, one(P(A3, "x1^2 - x2^2*x3")), pt({0, 0, 4}),
        "NcDoubleNotSnc");
    div("umbrella-smooth-point", A3, one(P(A3, "x1^2 - x2^2*x3")), pt({1, 1, 1}), "Smooth");
    div("outside", A3, one(P(A3, "x1^2 - x2^2*x3")), pt({1, 0, 5}), "Outside");
    div("tacnode", A2, one(P(A2, "y^2 - x^4")), pt({0, 0}), "Unclassified");
    div("cusp", A2, one(P(A2, "y^2 - x^3")), pt({0, 0}), "Unclassified");
    div("three-concurrent-lines", A2,
        {{P(A2, "x"), Rat(1)}, {P(A2, "y"), Rat(1)}, {P(A2, "x + y"), Rat(1)}}, pt({0, 0}),
        "Unclassified");
    div("tangent-pair", A2, {{P(A2, "x"), Rat(1)}, {P(A2, "x - y^2"), Rat(1)}}, pt({0, 0}),
        "Unclassified");
    div("smooth-quadric", A3, one(P(A3, "x1^2 + x2^2 - x3")), pt({0, 0, 0}), "Smooth");
    div("double-cross-at-line", A3, {{P(A3, "x1*x2"), Rat(1)}}, pt({0, 0, 5}), "SncMult(2)");

    auto semi = [&](const std::string& name, const std::vector<std::string>& amb,
                    std::vector<std::size_t> xb, std::vector<SemiDivisorPart> D, Point p,
                    const std::string& expect) {
        DetectorFixture f;
        f.name = name;
        f.ambient = amb;
        f.point = std::move(p);
        f.expected = expect;
        f.semi = true;
        f.X_branches = std::move(xb);
        f.D = std::move(D);
        out.push_back(std::move(f));
    };
    const std::vector<std::string> xyz = {"x", "y", "z"};
    semi("semi-normal-case", xyz, {2},
         {SemiDivisorPart{0, Rat(1), std::nullopt}, SemiDivisorPart{1, Rat(2), std::nullopt}},
         pt({0, 0, 0}), "SemiSncModel(1)");
    semi("semi-two-branches-equal", xyz, {1, 2},
         {SemiDivisorPart{0, Rat(3), 1}, SemiDivisorPart{0, Rat(3), 2}}, pt({0, 0, 0}),
         "SemiSncModel(2)");
    semi("semi-two-branches-unequal", xyz, {1, 2},
         {SemiDivisorPart{0, Rat(1), 1}, SemiDivisorPart{0, Rat(2), 2}}, pt({0, 0, 0}),
         "Unclassified");
    semi("semi-three-branches", xyz, {0, 1, 2}, {}, pt({0, 0, 0}), "SemiSncModel(3)");
    semi("semi-outside", xyz, {2}, {}, pt({1, 1, 1}), "Outside");
    return out;
}

std::vector<ResolutionFixture> resolution_fixtures() {
    std::vector<ResolutionFixture> out;
    auto add = [&](const std::string& name, std::vector<std::pair<Poly, Rat>> comps) {
        out.push_back(ResolutionFixture{name, std::move(comps)});
    };
    add("snc-input", {{P(A2, "x"), Rat(1)}, {P(A2, "y"), Rat(1)}});
    add("nodal-cubic", {{P(A2, "y^2 - x^2 - x^3"), Rat(1)}});
    add("tacnode", {{P(A2, "y^2 - x^4"), Rat(1)}});
    add("three-concurrent-lines",
        {{P(A2, "x"), Rat(1)}, {P(A2, "y"), Rat(1)}, {P(A2, "x + y"), Rat(1)}});
    add("umbrella-divisor", {{P(A3, "x1^2 - x2^2*x3"), Rat(1)}});
    // beyond the required five: a cuspidal curve and a quadric cone
    add("cusp", {{P(A2, "y^2 - x^3"), Rat(1)}});
    add("quadric-cone", {{P(A3, "x3^2 - x1*x2"), Rat(1)}});
    return out;
}

namespace {

// criterion: every step-i blow-up is immediately followed by its step-i-F
// partners (one per chart), and the composite divides the pullback of every
// ideal of center-order >= 2 by the exceptional coordinate exactly twice
bool check_marked_pairs(const ResolutionTrace& t, std::string& why) {
    // replay to know the state at each step
    ChartTable charts;
    std::map<std::string, PairState> leaves;
    GbBudget budget{1000000, 0};
    std::string root = charts.add_root(t.charts.at(t.charts.root()).vars);
    PairState init = t.initial;
    init.chart = root;
    leaves.emplace(root, init);
    std::vector<PairState> before;
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const auto& st = t.steps[i];
        before.push_back(leaves.at(st.chart));
        auto out = birational_transform(charts, leaves.at(st.chart), st, static_cast<int>(i), budget);
        leaves.erase(st.chart);
        for (auto& ns : out) leaves.emplace(ns.chart, std::move(ns));
    }
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        if (t.steps[i].justification != "step-i") continue;
        const auto& st = t.steps[i];
        const PairState& s = before[i];
        const Chart& chart = charts.at(st.chart);
        auto idx = center_indices(chart, st.center);
        // the next |center| steps must be the F-partners on the children
        std::size_t width = st.center.size() == 1 ? 1 : st.center.size();
        for (std::size_t k = 0; k < width; ++k) {
            std::size_t j = i + 1 + k;
            if (j >= t.steps.size() || t.steps[j].justification != "step-i-F") {
                why = "step " + std::to_string(i) + " lacks its step-i-F partner";
                return false;
            }
            const auto& fst = t.steps[j];
            const Chart& child = charts.at(fst.chart);
            if (!child.parent || child.parent->parent_id != st.chart) {
                why = "step " + std::to_string(j) + " is not on a child chart of step " +
                      std::to_string(i);
                return false;
            }
            if (fst.center.size() != 1 || fst.center[0] != child.blowup->chosen) {
                why = "step " + std::to_string(j) + " does not blow up the exceptional divisor";
                return false;
            }
            // composite division count on ideals of order >= 2 along the center
            const PairState& after_f = before[j]; // state before the F-step
            for (std::size_t m = 0; m < s.ideals.size(); ++m) {
                if (s.ideals[m].is_unit() || s.ideals[m].order_along(idx) < 2) continue;
                Poly pulled = s.ideals[m].substitute(child.parent->subst);
                // after Z and F: divided exactly twice in this chart
                Poly once = after_f.ideals[m];
                Poly exc = Poly::variable(child.vars, child.blowup->chosen);
                // the state after the F-step lives on the (identity) F-chart
                // with the same variables; find it among the leaves' ancestors
                Poly twice_divided = once.divisible_by_var(
                                         static_cast<std::size_t>(once.var_index(child.blowup->chosen)))
                                         ? once.divided_by_var(static_cast<std::size_t>(
                                               once.var_index(child.blowup->chosen)))
                                         : Poly();
                if (twice_divided.vars().empty() || !(twice_divided * exc * exc == pulled)) {
                    why = "marked transform of ideal " + std::to_string(m) + " at step " +
                          std::to_string(i) + " is not a double division";
                    return false;
                }
            }
        }
        i += width;
    }
    return true;
}

void run_resolution_fixture(CertificateReport& rep, const ResolutionFixture& fx,
                            const CorpusOptions& opts) {
    auto t0 = std::chrono::steady_clock::now();
    EngineConfig cfg = opts.config;
    if (opts.inject_defect == "skip-f-step") cfg.mutation = EngineConfig::Mutation::skip_marked_f_step;
    if (opts.inject_defect == "wrong-transform")
        cfg.mutation = EngineConfig::Mutation::skip_transform_division;
    ResolutionTrace trace;
    try {
        trace = log_resolve(fx.components, cfg);
    } catch (const std::exception& e) {
        rep.add("resolve[" + fx.name + "]", false, e.what());
        return;
    }
    rep.add("resolve[" + fx.name + "]", true, std::to_string(trace.steps.size()) + " steps");

    VerifyReport vr = verify_trace(trace, opts.config);
    rep.add("verify[" + fx.name + "]", vr.pass, vr.pass ? "" : [&] {
        for (const auto& item : vr.items)
            if (!item.pass) return item.name + ": " + item.detail;
        return std::string("unknown");
    }());

    // replay determinism down to bytes
    Json j1 = trace_to_json(trace);
    ResolutionTrace t2;
    try {
        t2 = trace_from_json(j1);
        Json j2 = trace_to_json(t2);
        bool same = j1.dump() == j2.dump();
        rep.add("trace-bytes[" + fx.name + "]", same, same ? "" : "serialized trace differs");
    } catch (const std::exception& e) {
        rep.add("trace-bytes[" + fx.name + "]", false, e.what());
    }

    // idempotence on every final chart
    if (vr.pass) {
        bool idem = true;
        std::string why;
        for (const auto& fin : trace.finals) {
            try {
                auto again = resolve_tuple(fin.ideals, fin.E, opts.config);
                if (!again.steps.empty()) {
                    idem = false;
                    why = "final chart " + fin.chart + " resolved again";
                }
            } catch (const std::exception& e) {
                idem = false;
                why = e.what();
            }
        }
        rep.add("idempotent[" + fx.name + "]", idem, why);
    }

    // marked-ideal convention
    {
        std::string why;
        bool ok = check_marked_pairs(trace, why);
        rep.add("marked-pairs[" + fx.name + "]", ok, why);
    }

    auto t1 = std::chrono::steady_clock::now();
    double secs = std::chrono::duration<double>(t1 - t0).count();
    rep.add("runtime[" + fx.name + "]", secs < 5.0,
            std::to_string(secs) + " s (budget 5 s)");
}

} // namespace

CertificateReport run_corpus(const CorpusOptions& opts) {
    CertificateReport rep;

    // detector fixtures
    for (const auto& fx : detector_fixtures()) {
        try {
            PointClass got = fx.semi
                                 ? classify_semi_snc(fx.ambient, fx.X_branches, fx.D, fx.point)
                                 : classify_point(fx.components, fx.point);
            bool ok = point_class_name(got) == fx.expected;
            rep.add("classify[" + fx.name + "]", ok,
                    ok ? "" : "got " + point_class_name(got) + ", expected " + fx.expected);
        } catch (const std::exception& e) {
            rep.add("classify[" + fx.name + "]", false, e.what());
        }
    }

    // umbrella identities
    {
        UmbrellaReport ur = umbrella_pipeline();
        rep.merge("umbrella.", ur.items);
    }

    // resolution corpus
    for (const auto& fx : resolution_fixtures()) run_resolution_fixture(rep, fx, opts);

    // semi-resolution corpus
    try {
        DoubleCoverDatum d = double_cover_from_poly(P(A3, "x1^2 - x2^2*x3"));
        SemiResolution sr = semi_log_resolve(d, {{P(A3, "x1"), P(A3, "x3")}}, opts.config);
        bool ok = sr.pass && !sr.run.leaves.empty() && sr.run.leaves[0].model == "Pinched" &&
                  sr.run.leaves[0].has_D2;
        rep.add("semi[umbrella-with-D2]", ok, ok ? "" : "expected the pinched model with D2");
    } catch (const std::exception& e) {
        rep.add("semi[umbrella-with-D2]", false, e.what());
    }
    try {
        const std::vector<std::string> v3 = {"y", "u", "w"};
        DoubleCoverDatum d = double_cover_from_gh(v3, "y", parse_poly({"u", "w"}, "1"),
                                                  parse_poly({"u", "w"}, "u"));
        SemiResolution sr = semi_log_resolve(d, {{parse_poly(v3, "w")}}, opts.config);
        bool ok = sr.pass && sr.input_snc2;
        for (const auto& run : sr.sheet_runs)
            for (const auto& m : run.leaves)
                if (m.model == "Pinched") ok = false;
        rep.add("semi[snc2-no-pinch]", ok, ok ? "" : "pinch model over an snc2 input");
    } catch (const std::exception& e) {
        rep.add("semi[snc2-no-pinch]", false, e.what());
    }

    // abstention honesty
    {
        bool abstained = false;
        try {
            log_resolve({{P(A2, "y^2 - (x-1)^2*(x+1)"), Rat(1)}}, opts.config);
        } catch (const abstain_error&) {
            abstained = true;
        } catch (const std::exception&) {
        }
        rep.add("abstain[translated-node]", abstained,
                abstained ? "" : "expected an abstention");
    }
    {
        bool abstained = false;
        try {
            DoubleCoverDatum d = double_cover_from_gh({"y", "x"}, "y", parse_poly({"x"}, "2"),
                                                      parse_poly({"x"}, "x"));
            semi_log_resolve(d, {}, opts.config);
        } catch (const abstain_error&) {
            abstained = true;
        } catch (const std::exception&) {
        }
        rep.add("abstain[nonsquare-constant-branch]", abstained,
                abstained ? "" : "expected an abstention");
    }

    // extra job files
    if (!opts.extra_dir.empty()) {
        namespace fs = std::filesystem;
        std::vector<std::string> files;
        if (fs::is_directory(opts.extra_dir)) {
            for (const auto& entry : fs::directory_iterator(opts.extra_dir))
                if (entry.path().extension() == ".json") files.push_back(entry.path().string());
        }
        std::sort(files.begin(), files.end());
        for (const auto& file : files) {
            try {
                std::ifstream in(file);
                std::string text((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
                JobSpec job = parse_job(text);
                if (job.command == "resolve") {
                    std::vector<std::pair<Poly, Rat>> components;
                    auto vars = string_list(require_field(job.payload, "ambient_vars", "$.payload"),
                                            "$.payload.ambient_vars");
                    for (const auto& c : require_field(job.payload, "components", "$.payload")) {
                        components.emplace_back(
                            parse_poly(vars, require_field(c, "poly", "$.payload.components")
                                                 .get<std::string>()),
                            Rat(1));
                    }
                    auto trace = log_resolve(components, job.config);
                    auto vr = verify_trace(trace, job.config);
                    rep.add("job[" + fs::path(file).filename().string() + "]", vr.pass, "");
                } else {
                    rep.add("job[" + fs::path(file).filename().string() + "]", false,
                            "unsupported corpus job command " + job.command);
                }
            } catch (const std::exception& e) {
                rep.add("job[" + fs::path(file).filename().string() + "]", false, e.what());
            }
        }
    }
    return rep;
}

} // namespace sncres
