#ifndef FORESTWALK_ERRORS_HPP
#define FORESTWALK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace forestwalk {

// Error taxonomy. Each class maps to a distinct failure mode so callers
// (and the CLI exit-code mapping) can tell them apart without string matching.

// Graph mutation rejected: self-loop, duplicate edge, dead endpoint,
// missing edge/vertex. Carries a stable code for tests.
class GraphError : public std::invalid_argument {
public:
    enum class Code {
        SelfLoop,
        DuplicateEdge,
        DeadEndpoint,
        MissingEdge,
        MissingVertex,
        DuplicateVertex,
        VertexNotIsolated,
    };

    GraphError(Code code, const std::string& what)
        : std::invalid_argument(what), code_(code) {}

    Code code() const { return code_; }

private:
    Code code_;
};

// The labelling no longer encodes a valid forest. This always signals a bug
// in the protocol engine (or a hand-corrupted snapshot), never user error.
class CorruptionError : public std::logic_error {
public:
    explicit CorruptionError(const std::string& what) : std::logic_error(what) {}
};

// An operation was called outside its contract (e.g. try_merge on a Plain
// vertex). Distinct from CorruptionError: the state may be fine, the call is not.
class ContractViolation : public std::logic_error {
public:
    explicit ContractViolation(const std::string& what) : std::logic_error(what) {}
};

// Bad configuration file / bad CLI arguments.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A request the analysis module cannot honour: state space too large,
// or a policy the exact solver does not model.
class UnsupportedError : public std::runtime_error {
public:
    explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace forestwalk

#endif // FORESTWALK_ERRORS_HPP
