#ifndef SNCRES_ERRORS_HPP
#define SNCRES_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sncres {

// Bad user input: malformed text, mismatched variable sets, schema violations.
struct input_error : std::runtime_error {
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A configured budget (Groebner steps, blow-up count) was exhausted.
struct resource_error : std::runtime_error {
    explicit resource_error(const std::string& msg) : std::runtime_error(msg) {}
};

// The instance is outside the supported desk-scale family (e.g. a required
// blow-up center is not a coordinate subspace). Honest refusal, not failure.
struct abstain_error : std::runtime_error {
    explicit abstain_error(const std::string& msg) : std::runtime_error(msg) {}
};

// An invariant the implementation guarantees was violated; always a bug.
struct internal_error : std::logic_error {
    explicit internal_error(const std::string& msg) : std::logic_error(msg) {}
};

} // namespace sncres

#endif
