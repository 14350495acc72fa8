#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ballcover {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed input: wrong dimensions, non-positive radii, coincident centers.
struct InvalidInput : Error {
    using Error::Error;
};

// Two balls are tangent (or nearly so) and no strict branch can be certified.
struct DegenerateInput : Error {
    enum class Family { LambdaLambda, LambdaV, VV, Other };
    Family family = Family::Other;
    std::size_t first = 0;
    std::size_t second = 0;

    explicit DegenerateInput(const std::string& what) : Error(what) {}
    DegenerateInput(const std::string& what, Family f, std::size_t a, std::size_t b)
        : Error(what), family(f), first(a), second(b) {}
};

struct NonCrossingSpheres : Error {
    using Error::Error;
};

struct ArityMismatch : Error {
    using Error::Error;
};

struct NumericallyDegenerate : Error {
    using Error::Error;
};

struct MaxIterations : Error {
    using Error::Error;
};

// A decision threshold fell inside the tolerance band.
struct DegenerateDecision : Error {
    std::size_t ref_index = 0;
    double margin = 0.0;

    DegenerateDecision(const std::string& what, std::size_t j, double m)
        : Error(what), ref_index(j), margin(m) {}
};

struct WitnessExtractionFailed : Error {
    using Error::Error;
};

struct RetriesExhausted : Error {
    using Error::Error;
};

struct StepTooCoarse : Error {
    using Error::Error;
};

struct ParseError : Error {
    using Error::Error;
};

} // namespace ballcover
