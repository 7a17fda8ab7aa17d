#pragma once

#include <stdexcept>

namespace stockemb {

// Error taxonomy, so callers can catch by failure category rather than
// string-matching messages.

// Malformed input file contents; the message names the offending line.
struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Structurally valid input that breaks a documented invariant
// (duplicate ticker, non-positive price, out-of-order dates, ...).
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A caller-supplied parameter is out of its documented range.
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// An artifact file (embeddings, config) does not match the expected schema.
struct FormatError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A ticker or label is absent from the universe.
struct LookupError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A quantity with no defined value was requested, e.g. the cosine of a
// zero vector.
struct UndefinedSimilarity : std::domain_error {
    using std::domain_error::domain_error;
};

// Training diverged (non-finite loss); the message names epoch and step.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace stockemb
