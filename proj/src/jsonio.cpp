#include "sncres/jsonio.hpp"
#include "sncres/errors.hpp"
#include "sncres/poly_io.hpp"

#include <sstream>

namespace sncres {

namespace {

Json poly_json(const Poly& p) { return print_poly(p); }

Poly poly_from(const std::vector<std::string>& vars, const Json& j, const std::string& path) {
    if (!j.is_string()) throw input_error(path + ": expected a polynomial string");
    return parse_poly(vars, j.get<std::string>());
}

Json state_json(const PairState& s) {
    Json out;
    out["chart"] = s.chart;
    Json ideals = Json::array();
    for (const auto& f : s.ideals) ideals.push_back(poly_json(f));
    out["ideals"] = ideals;
    Json e = Json::array();
    for (const auto& c : s.E) {
        Json comp;
        comp["support"] = poly_json(c.support);
        comp["mult"] = c.mult;
        e.push_back(comp);
    }
    out["E"] = e;
    return out;
}

PairState state_from(const Json& j, const std::vector<std::string>& vars, const std::string& path) {
    PairState s;
    s.chart = require_field(j, "chart", path).get<std::string>();
    for (const auto& f : require_field(j, "ideals", path))
        s.ideals.push_back(poly_from(vars, f, path + ".ideals"));
    for (const auto& c : require_field(j, "E", path)) {
        EComp comp;
        comp.support = poly_from(vars, require_field(c, "support", path + ".E"), path + ".E.support");
        comp.mult = require_field(c, "mult", path + ".E").get<long>();
        s.E.push_back(comp);
    }
    return s;
}

} // namespace

const Json& require_field(const Json& j, const std::string& key, const std::string& path) {
    if (!j.is_object()) throw input_error(path + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw input_error(path + "." + key + ": missing field");
    return *it;
}

std::vector<std::string> string_list(const Json& j, const std::string& path) {
    if (!j.is_array()) throw input_error(path + ": expected an array of strings");
    std::vector<std::string> out;
    for (const auto& v : j) {
        if (!v.is_string()) throw input_error(path + ": expected an array of strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

Json trace_to_json(const ResolutionTrace& t) {
    Json out;
    const auto& root = t.charts.at(t.charts.root());
    out["root_vars"] = root.vars;
    out["initial"] = state_json(t.initial);
    Json steps = Json::array();
    for (const auto& st : t.steps) {
        Json s;
        s["chart_id"] = st.chart;
        s["center"] = st.center;
        s["justification"] = st.justification;
        steps.push_back(s);
    }
    out["steps"] = steps;
    Json charts = Json::array();
    for (const auto& id : t.charts.ids_in_order()) {
        const Chart& c = t.charts.at(id);
        Json cj;
        cj["id"] = c.id;
        cj["vars"] = c.vars;
        if (c.parent) {
            Json p;
            p["id"] = c.parent->parent_id;
            Json subst = Json::array();
            for (const auto& s : c.parent->subst) subst.push_back(poly_json(s));
            p["subst"] = subst;
            cj["parent"] = p;
        }
        if (c.blowup) {
            Json b;
            b["center"] = c.blowup->center;
            b["chosen"] = c.blowup->chosen;
            cj["blowup"] = b;
        }
        Json exc = Json::array();
        for (const auto& e : c.exceptional) {
            Json ej;
            ej["divisor"] = poly_json(e.divisor);
            ej["step"] = e.step_index;
            exc.push_back(ej);
        }
        cj["exceptional"] = exc;
        charts.push_back(cj);
    }
    out["charts"] = charts;
    Json finals = Json::array();
    for (const auto& f : t.finals) finals.push_back(state_json(f));
    out["finals"] = finals;
    Json certs = Json::array();
    for (const auto& c : t.certificates) {
        Json cj;
        cj["step"] = c.step;
        cj["center"] = c.center;
        Json gens = Json::array();
        for (const auto& g : c.nsl_component.gens()) gens.push_back(poly_json(g));
        cj["nsl_component"] = gens;
        cj["disjoint_from"] = c.disjoint_from;
        certs.push_back(cj);
    }
    out["certificates"] = certs;
    return out;
}

ResolutionTrace trace_from_json(const Json& j) {
    ResolutionTrace t;
    auto root_vars = string_list(require_field(j, "root_vars", "$"), "$.root_vars");
    // charts first: they carry each chart's variable list
    const Json& charts = require_field(j, "charts", "$");
    std::size_t idx = 0;
    for (const auto& cj : charts) {
        std::string path = "$.charts[" + std::to_string(idx++) + "]";
        Chart c;
        c.id = require_field(cj, "id", path).get<std::string>();
        c.vars = string_list(require_field(cj, "vars", path), path + ".vars");
        if (cj.contains("parent")) {
            ParentLink link;
            link.parent_id = require_field(cj["parent"], "id", path + ".parent").get<std::string>();
            for (const auto& s : require_field(cj["parent"], "subst", path + ".parent"))
                link.subst.push_back(poly_from(c.vars, s, path + ".parent.subst"));
            c.parent = link;
        }
        if (cj.contains("blowup")) {
            BlowupInfo b;
            b.center = string_list(require_field(cj["blowup"], "center", path + ".blowup"),
                                   path + ".blowup.center");
            b.chosen = require_field(cj["blowup"], "chosen", path + ".blowup").get<std::string>();
            c.blowup = b;
        }
        if (cj.contains("exceptional")) {
            for (const auto& ej : cj["exceptional"]) {
                ExcEntry e;
                e.divisor = poly_from(c.vars, require_field(ej, "divisor", path), path + ".exceptional");
                e.step_index = require_field(ej, "step", path).get<int>();
                c.exceptional.push_back(e);
            }
        }
        t.charts.add_chart(std::move(c));
    }
    if (t.charts.size() == 0) throw input_error("$.charts: empty chart table");
    if (t.charts.at(t.charts.root()).vars != root_vars)
        throw input_error("$.root_vars: does not match the root chart");
    t.initial = state_from(require_field(j, "initial", "$"), root_vars, "$.initial");
    idx = 0;
    for (const auto& sj : require_field(j, "steps", "$")) {
        std::string path = "$.steps[" + std::to_string(idx++) + "]";
        BlowUpStep st;
        st.chart = require_field(sj, "chart_id", path).get<std::string>();
        st.center = string_list(require_field(sj, "center", path), path + ".center");
        st.justification = require_field(sj, "justification", path).get<std::string>();
        t.steps.push_back(st);
    }
    idx = 0;
    for (const auto& fj : require_field(j, "finals", "$")) {
        std::string path = "$.finals[" + std::to_string(idx++) + "]";
        std::string chart = require_field(fj, "chart", path).get<std::string>();
        if (!t.charts.has(chart)) throw input_error(path + ": unknown chart " + chart);
        t.finals.push_back(state_from(fj, t.charts.at(chart).vars, path));
    }
    if (j.contains("certificates")) {
        idx = 0;
        for (const auto& cj : j["certificates"]) {
            std::string path = "$.certificates[" + std::to_string(idx++) + "]";
            StepCertificate c;
            c.step = require_field(cj, "step", path).get<int>();
            c.center = string_list(require_field(cj, "center", path), path + ".center");
            if (c.step < 0 || c.step >= static_cast<int>(t.steps.size()))
                throw input_error(path + ".step: out of range");
            const std::string& chart = t.steps[static_cast<std::size_t>(c.step)].chart;
            std::vector<Poly> gens;
            for (const auto& g : require_field(cj, "nsl_component", path))
                gens.push_back(poly_from(t.charts.at(chart).vars, g, path + ".nsl_component"));
            if (gens.empty()) gens.push_back(Poly::zero(t.charts.at(chart).vars));
            c.nsl_component = Ideal(gens);
            for (const auto& d : require_field(cj, "disjoint_from", path))
                c.disjoint_from.push_back(d.get<std::size_t>());
            t.certificates.push_back(c);
        }
    }
    return t;
}

std::string trace_step_log(const ResolutionTrace& t) {
    std::ostringstream os;
    if (t.steps.empty()) {
        os << "already snc: empty trace, " << t.finals.size() << " chart(s)\n";
        return os.str();
    }
    for (std::size_t i = 0; i < t.steps.size(); ++i) {
        const auto& st = t.steps[i];
        os << "step " << i << " [" << st.justification << "] chart " << st.chart << ": blow up (";
        for (std::size_t k = 0; k < st.center.size(); ++k) {
            if (k) os << " = ";
            os << st.center[k];
        }
        os << " = 0)\n";
    }
    os << t.finals.size() << " final chart(s):";
    for (const auto& f : t.finals) os << " " << f.chart;
    os << "\n";
    return os.str();
}

void CertificateReport::merge(const std::string& prefix, const std::vector<VerifyItem>& more) {
    for (const auto& item : more) add(prefix + item.name, item.pass, item.detail);
}

Json report_to_json(const CertificateReport& r) {
    Json out;
    out["verdict"] = r.pass ? "pass" : "fail";
    Json items = Json::array();
    for (const auto& item : r.items) {
        Json ij;
        ij["check"] = item.name;
        ij["status"] = item.pass ? "pass" : "fail";
        if (!item.detail.empty()) ij["witness"] = item.detail;
        items.push_back(ij);
    }
    out["items"] = items;
    return out;
}

std::string report_to_text(const CertificateReport& r) {
    std::ostringstream os;
    for (const auto& item : r.items) {
        os << (item.pass ? "PASS" : "FAIL") << "  " << item.name;
        if (!item.detail.empty()) os << "  (" << item.detail << ")";
        os << "\n";
    }
    os << (r.pass ? "verdict: pass" : "verdict: FAIL") << "\n";
    return os.str();
}

Json verify_report_to_json(const VerifyReport& r) {
    CertificateReport cr;
    cr.pass = r.pass;
    cr.items = r.items;
    return report_to_json(cr);
}

JobSpec parse_job(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw input_error(std::string("invalid JSON at byte ") + std::to_string(e.byte) + ": " +
                          e.what());
    }
    JobSpec spec;
    spec.command = require_field(j, "command", "$").get<std::string>();
    static const std::vector<std::string> known = {"classify", "resolve", "semi-resolve",
                                                   "verify", "umbrella-demo", "corpus"};
    if (std::find(known.begin(), known.end(), spec.command) == known.end())
        throw input_error("$.command: unknown command '" + spec.command + "'");
    spec.payload = j.contains("payload") ? j["payload"] : Json::object();
    if (j.contains("config")) {
        const Json& c = j["config"];
        if (c.contains("max_blowups")) spec.config.max_blowups = c["max_blowups"].get<long>();
        if (c.contains("groebner_budget"))
            spec.config.groebner_budget = c["groebner_budget"].get<long>();
        if (spec.config.max_blowups <= 0) throw input_error("$.config.max_blowups: must be positive");
        if (spec.config.groebner_budget <= 0)
            throw input_error("$.config.groebner_budget: must be positive");
    }
    return spec;
}

Json point_class_to_json(const PointClass& c) {
    Json out;
    out["class"] = point_class_name(c);
    out["witness"] = c.witness;
    return out;
}

Json semi_resolution_to_json(const SemiResolution& s) {
    Json out;
    out["normalization"] = Json::object();
    out["normalization"]["z_var"] = s.datum.z_var;
    out["normalization"]["equation"] = print_poly(s.datum.equation);
    switch (s.datum.kind) {
        case NormalizationDatum::ChartKind::affine_solved:
            out["normalization"]["chart"] = "affine";
            out["normalization"]["vars"] = s.datum.nvars;
            out["normalization"]["conductor"] = print_poly(s.datum.conductor);
            break;
        case NormalizationDatum::ChartKind::split_sheets:
            out["normalization"]["chart"] = "split-sheets";
            out["normalization"]["sheet_value"] = rat_str(s.datum.sheet_value);
            break;
        case NormalizationDatum::ChartKind::unrealized:
            out["normalization"]["chart"] = "unrealized";
            break;
    }
    out["input_snc2"] = s.input_snc2;
    auto run_json = [](const SemiRunResult& r) {
        Json rj;
        rj["trace"] = trace_to_json(r.trace);
        Json models = Json::array();
        for (const auto& m : r.leaves) {
            Json mj;
            mj["chart"] = m.chart;
            mj["model"] = m.model;
            mj["involution_signs"] = m.involution.signs;
            mj["conductor"] = print_poly(m.conductor_transform);
            mj["snc_components"] = m.snc_components;
            mj["D2"] = m.has_D2;
            if (m.pushout) {
                Json pj;
                Json gens = Json::array();
                for (const auto& [name, p] : m.pushout->generators) {
                    Json gj;
                    gj["name"] = name;
                    gj["poly"] = print_poly(p);
                    gens.push_back(gj);
                }
                pj["generators"] = gens;
                pj["relation"] = m.pushout->relation;
                pj["relation_holds"] = m.pushout->relation_holds;
                mj["pushout"] = pj;
            }
            models.push_back(mj);
        }
        rj["models"] = models;
        return rj;
    };
    if (s.datum.kind == NormalizationDatum::ChartKind::split_sheets) {
        Json sheets = Json::array();
        for (const auto& r : s.sheet_runs) sheets.push_back(run_json(r));
        out["sheets"] = sheets;
    } else {
        out["run"] = run_json(s.run);
    }
    CertificateReport rep;
    rep.pass = s.pass;
    rep.items = s.certificates;
    out["certificates"] = report_to_json(rep);
    return out;
}

Json umbrella_report_to_json(const UmbrellaReport& r) {
    CertificateReport rep;
    rep.pass = r.pass;
    rep.items = r.items;
    return report_to_json(rep);
}

} // namespace sncres
