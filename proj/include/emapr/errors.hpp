#pragma once

#include <stdexcept>
#include <string>

namespace emapr {

/// Requested configuration is valid in principle but not supported here.
class UnsupportedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Linear solve failed or produced an unacceptable residual.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonConvergenceError : public SolverError {
public:
    NonConvergenceError(const std::string& what, int iterations, double last_increment)
        : SolverError(what), iterations_(iterations), last_increment_(last_increment) {}
    int iterations() const { return iterations_; }
    double last_increment() const { return last_increment_; }

private:
    int iterations_;
    double last_increment_;
};

}  // namespace emapr
