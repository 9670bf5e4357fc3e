#pragma once

#include <stdexcept>
#include <string>

namespace trdevdiv {

// Invalid user-supplied configuration: bad dimension, resolution, Sobolev
// order, layout mismatch, malformed input file.  CLI maps this to exit 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical solver failure: factorization breakdown, residual above
// tolerance, degenerate eigenproblem.  CLI maps this to exit 3.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace trdevdiv
