#pragma once

#include <stdexcept>
#include <string>

namespace desmqa {

// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed or inconsistent input data (bad JSONL/TSV record, bad
// embedding file, invalid configuration). The CLI maps these to exit 2.
struct ParseError : Error {
    explicit ParseError(const std::string& msg) : Error(msg) {}
};

// A question or specification with no usable (in-vocabulary, nonzero-norm)
// tokens under the active embedding.
struct UnscorableError : Error {
    explicit UnscorableError(const std::string& msg) : Error(msg) {}
};

// External scorer process misbehaved: failed to start, broke the line
// protocol, or timed out.
struct ScorerError : Error {
    explicit ScorerError(const std::string& msg) : Error(msg) {}
};

}  // namespace desmqa
