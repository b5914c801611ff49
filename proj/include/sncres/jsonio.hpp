#ifndef SNCRES_JSONIO_HPP
#define SNCRES_JSONIO_HPP

#include <json.hpp>

#include <string>
#include <vector>

#include "sncres/classify.hpp"
#include "sncres/engine.hpp"
#include "sncres/semi.hpp"

namespace sncres {

// insertion-ordered JSON keeps the output byte-deterministic
using Json = nlohmann::ordered_json;

// --- traces ---------------------------------------------------------------

Json trace_to_json(const ResolutionTrace& t);
ResolutionTrace trace_from_json(const Json& j);

std::string trace_step_log(const ResolutionTrace& t);

// --- reports ----------------------------------------------------------------

struct CertificateReport {
    bool pass = true;
    std::vector<VerifyItem> items;

    void add(const std::string& name, bool ok, const std::string& detail = "") {
        items.push_back(VerifyItem{name, ok, detail});
        if (!ok) pass = false;
    }
    void merge(const std::string& prefix, const std::vector<VerifyItem>& more);
};

Json report_to_json(const CertificateReport& r);
std::string report_to_text(const CertificateReport& r);

Json verify_report_to_json(const VerifyReport& r);

// --- jobs -------------------------------------------------------------------

struct JobSpec {
    std::string command; // classify | resolve | semi-resolve | verify | umbrella-demo
    Json payload;
    EngineConfig config;
};

// schema-checked parse with path-precise error messages
JobSpec parse_job(const std::string& text);

// field access helpers used by the CLI (path-precise input errors)
const Json& require_field(const Json& j, const std::string& key, const std::string& path);
std::vector<std::string> string_list(const Json& j, const std::string& path);

Json semi_resolution_to_json(const SemiResolution& s);
Json umbrella_report_to_json(const UmbrellaReport& r);
Json point_class_to_json(const PointClass& c);

} // namespace sncres

#endif
