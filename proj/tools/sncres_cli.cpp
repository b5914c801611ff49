// Command-line front end: classification, log resolution, semi resolution,
// trace verification, the worked pinch-point model, and the fixture corpus.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "sncres/corpus.hpp"
#include "sncres/errors.hpp"
#include "sncres/jsonio.hpp"
#include "sncres/poly_io.hpp"

using namespace sncres;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitCertFail = 1;
constexpr int kExitAbstain = 2;
constexpr int kExitInput = 3;

std::string read_input(const std::string& path) {
    if (path == "-") {
        std::ostringstream os;
        os << std::cin.rdbuf();
        return os.str();
    }
    std::ifstream in(path);
    if (!in) throw input_error("cannot open input file " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

struct Output {
    bool compact = false;
    void emit(const Json& j) const { std::cout << (compact ? j.dump() : j.dump(2)) << "\n"; }
};

// the input may be a bare payload or a full job envelope
Json payload_for(const std::string& command, const std::string& text, EngineConfig& cfg) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw input_error(std::string("invalid JSON at byte ") + std::to_string(e.byte) + ": " +
                          e.what());
    }
    if (j.is_object() && j.contains("command")) {
        JobSpec spec = parse_job(text);
        if (spec.command != command)
            throw input_error("$.command: job says '" + spec.command + "', subcommand is '" +
                              command + "'");
        cfg = spec.config;
        return spec.payload;
    }
    return j;
}

Point parse_point_json(const Json& j, std::size_t dim, const std::string& path) {
    if (j.is_string()) return parse_point(j.get<std::string>(), dim);
    if (!j.is_array()) throw input_error(path + ": expected a point (array or string)");
    std::vector<Rat> coords;
    for (const auto& c : j) {
        if (c.is_number_integer()) {
            coords.push_back(Rat(c.get<long>()));
        } else if (c.is_string()) {
            Rat r(c.get<std::string>());
            r.canonicalize();
            coords.push_back(r);
        } else {
            throw input_error(path + ": coordinates must be integers or rational strings");
        }
    }
    if (coords.size() != dim)
        throw input_error(path + ": expected " + std::to_string(dim) + " coordinates");
    return Point(std::move(coords));
}

std::vector<std::pair<Poly, Rat>> parse_components(const Json& payload,
                                                   const std::vector<std::string>& vars,
                                                   const std::string& path) {
    std::vector<std::pair<Poly, Rat>> out;
    const Json& comps = require_field(payload, "components", path);
    std::size_t i = 0;
    for (const auto& c : comps) {
        std::string cpath = path + ".components[" + std::to_string(i++) + "]";
        Poly p = parse_poly(vars, require_field(c, "poly", cpath).get<std::string>());
        Rat coeff(1);
        if (c.contains("coeff")) {
            if (c["coeff"].is_number_integer()) coeff = Rat(c["coeff"].get<long>());
            else {
                coeff = Rat(c["coeff"].get<std::string>());
                coeff.canonicalize();
            }
        }
        out.emplace_back(std::move(p), coeff);
    }
    if (out.empty()) throw input_error(path + ".components: empty");
    return out;
}

int cmd_classify(const Json& payload, const Output& out) {
    auto vars = string_list(require_field(payload, "ambient_vars", "$"), "$.ambient_vars");
    Point pt = parse_point_json(require_field(payload, "point", "$"), vars.size(), "$.point");
    PointClass cls;
    if (payload.contains("X_branches")) {
        std::vector<std::size_t> xb;
        for (const auto& b : payload["X_branches"]) xb.push_back(b.get<std::size_t>());
        std::vector<SemiDivisorPart> D;
        if (payload.contains("D")) {
            for (const auto& d : payload["D"]) {
                SemiDivisorPart part;
                part.coord = require_field(d, "coord", "$.D").get<std::size_t>();
                if (d.contains("coeff")) {
                    if (d["coeff"].is_number_integer()) part.coeff = Rat(d["coeff"].get<long>());
                    else {
                        part.coeff = Rat(d["coeff"].get<std::string>());
                        part.coeff.canonicalize();
                    }
                } else {
                    part.coeff = Rat(1);
                }
                if (d.contains("branch")) part.branch = d["branch"].get<std::size_t>();
                D.push_back(part);
            }
        }
        cls = classify_semi_snc(vars, xb, D, pt);
    } else {
        auto comps = parse_components(payload, vars, "$");
        cls = classify_point(comps, pt);
    }
    out.emit(point_class_to_json(cls));
    return kExitPass;
}

int cmd_resolve(const Json& payload, EngineConfig cfg, const Output& out) {
    auto vars = string_list(require_field(payload, "ambient_vars", "$"), "$.ambient_vars");
    if (payload.contains("ambient_dim") &&
        payload["ambient_dim"].get<std::size_t>() != vars.size())
        throw input_error("$.ambient_dim: does not match ambient_vars");
    auto comps = parse_components(payload, vars, "$");
    if (payload.contains("order")) {
        cfg.component_order.clear();
        for (const auto& i : payload["order"]) cfg.component_order.push_back(i.get<std::size_t>());
    }
    if (payload.contains("max_blowups")) cfg.max_blowups = payload["max_blowups"].get<long>();
    ResolutionTrace trace = log_resolve(comps, cfg);
    std::cerr << trace_step_log(trace);
    out.emit(trace_to_json(trace));
    return kExitPass;
}

int cmd_verify(const Json& payload, const EngineConfig& cfg, const Output& out) {
    ResolutionTrace trace = trace_from_json(payload);
    VerifyReport rep = verify_trace(trace, cfg);
    out.emit(verify_report_to_json(rep));
    return rep.pass ? kExitPass : kExitCertFail;
}

int cmd_semi_resolve(const Json& payload, const EngineConfig& cfg, const Output& out) {
    const Json& eq = require_field(payload, "equation", "$");
    DoubleCoverDatum cover;
    if (eq.contains("poly")) {
        auto vars = string_list(require_field(eq, "ambient_vars", "$.equation"),
                                "$.equation.ambient_vars");
        cover = double_cover_from_poly(
            parse_poly(vars, require_field(eq, "poly", "$.equation").get<std::string>()));
    } else {
        auto vars = string_list(require_field(eq, "ambient_vars", "$.equation"),
                                "$.equation.ambient_vars");
        std::string y = require_field(eq, "y", "$.equation").get<std::string>();
        std::vector<std::string> xvars;
        for (const auto& v : vars)
            if (v != y) xvars.push_back(v);
        Poly g = parse_poly(xvars, require_field(eq, "g", "$.equation").get<std::string>());
        Poly h = parse_poly(xvars, require_field(eq, "h", "$.equation").get<std::string>());
        cover = double_cover_from_gh(vars, y, g, h);
    }
    std::vector<std::vector<Poly>> divisors;
    if (payload.contains("divisors")) {
        std::size_t i = 0;
        for (const auto& dj : payload["divisors"]) {
            std::string path = "$.divisors[" + std::to_string(i++) + "]";
            std::vector<Poly> gens;
            for (const auto& g : dj)
                gens.push_back(parse_poly(cover.ambient_vars, g.get<std::string>()));
            if (gens.empty()) throw input_error(path + ": empty divisor ideal");
            divisors.push_back(std::move(gens));
        }
    }
    SemiResolution sr = semi_log_resolve(cover, divisors, cfg);
    out.emit(semi_resolution_to_json(sr));
    return sr.pass ? kExitPass : kExitCertFail;
}

int cmd_umbrella(const Output& out) {
    UmbrellaReport rep = umbrella_pipeline();
    out.emit(umbrella_report_to_json(rep));
    return rep.pass ? kExitPass : kExitCertFail;
}

int cmd_corpus(const EngineConfig& cfg, const std::string& defect, const Output& out) {
    CorpusOptions opts;
    opts.config = cfg;
    opts.inject_defect = defect;
    if (const char* dir = std::getenv("SNCRES_CORPUS_DIR")) opts.extra_dir = dir;
    CertificateReport rep = run_corpus(opts);
    std::cerr << report_to_text(rep);
    out.emit(report_to_json(rep));
    return rep.pass ? kExitPass : kExitCertFail;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"log resolutions preserving the snc locus, with certificates"};
    app.require_subcommand(1);
    app.fallthrough(); // global flags may follow the subcommand

    EngineConfig cfg;
    Output out;
    bool json_flag = false, pretty_flag = false;
    std::string input = "-";
    std::string defect;

    app.add_option("--max-blowups", cfg.max_blowups, "blow-up budget")->capture_default_str();
    app.add_option("--groebner-budget", cfg.groebner_budget, "S-polynomial reduction budget")
        ->capture_default_str();
    app.add_flag("--json", json_flag, "compact single-line JSON output");
    app.add_flag("--pretty", pretty_flag, "indented JSON output (default)");

    auto* c_classify = app.add_subcommand("classify", "classify a point against the local models");
    c_classify->add_option("input", input, "payload JSON file ('-' for stdin)");
    auto* c_resolve = app.add_subcommand("resolve", "log resolution of a divisor");
    c_resolve->add_option("input", input, "payload JSON file ('-' for stdin)");
    auto* c_semi = app.add_subcommand("semi-resolve", "semi resolution of a double-point scheme");
    c_semi->add_option("input", input, "payload JSON file ('-' for stdin)");
    auto* c_verify = app.add_subcommand("verify", "re-check the certificates of a trace");
    c_verify->add_option("input", input, "trace JSON file ('-' for stdin)");
    auto* c_umbrella = app.add_subcommand("umbrella-demo", "the worked pinch-point model");
    auto* c_corpus = app.add_subcommand("corpus", "run the bundled fixture corpus");
    c_corpus->add_option("--inject-defect", defect,
                         "testing aid: 'skip-f-step' or 'wrong-transform'");

    CLI11_PARSE(app, argc, argv);
    out.compact = json_flag && !pretty_flag;

    try {
        if (c_umbrella->parsed()) return cmd_umbrella(out);
        if (c_corpus->parsed()) return cmd_corpus(cfg, defect, out);
        std::string text = read_input(input);
        if (c_classify->parsed()) {
            Json payload = payload_for("classify", text, cfg);
            return cmd_classify(payload, out);
        }
        if (c_resolve->parsed()) {
            Json payload = payload_for("resolve", text, cfg);
            return cmd_resolve(payload, cfg, out);
        }
        if (c_semi->parsed()) {
            Json payload = payload_for("semi-resolve", text, cfg);
            return cmd_semi_resolve(payload, cfg, out);
        }
        if (c_verify->parsed()) {
            Json payload = payload_for("verify", text, cfg);
            return cmd_verify(payload, cfg, out);
        }
    } catch (const abstain_error& e) {
        std::cerr << "abstain: " << e.what() << "\n";
        return kExitAbstain;
    } catch (const resource_error& e) {
        std::cerr << "resource limit: " << e.what() << "\n";
        return kExitAbstain;
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitCertFail;
    }
    return kExitInput;
}
