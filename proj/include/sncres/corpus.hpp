#ifndef SNCRES_CORPUS_HPP
#define SNCRES_CORPUS_HPP

#include <string>

#include "sncres/jsonio.hpp"

namespace sncres {

struct CorpusOptions {
    EngineConfig config;
    // test defect injection: "", "skip-f-step", "wrong-transform"
    std::string inject_defect;
    // extra directory of job JSON files (SNCRES_CORPUS_DIR)
    std::string extra_dir;
};

// Run every bundled fixture and aggregate the certificates. The report fails
// as soon as any fixture's certificate fails; wall-clock times are recorded.
CertificateReport run_corpus(const CorpusOptions& opts);

// The bundled detector fixtures (name, expected class, computed class), used
// by both the corpus runner and the acceptance suite.
struct DetectorFixture {
    std::string name;
    std::vector<std::string> ambient;
    std::vector<std::pair<Poly, Rat>> components; // empty for semi-snc fixtures
    Point point;
    std::string expected;
    bool semi = false;
    std::vector<std::size_t> X_branches;
    std::vector<SemiDivisorPart> D;
};

std::vector<DetectorFixture> detector_fixtures();

// The bundled resolution fixtures of the Prop-5 corpus.
struct ResolutionFixture {
    std::string name;
    std::vector<std::pair<Poly, Rat>> components;
};

std::vector<ResolutionFixture> resolution_fixtures();

} // namespace sncres

#endif
