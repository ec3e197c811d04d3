#pragma once

#include <stdexcept>
#include <string>

namespace ltlab {

/// A sampled matrix potential failed the positive-semidefiniteness check.
class NotPsdError : public std::runtime_error {
public:
    explicit NotPsdError(const std::string& what) : std::runtime_error(what) {}
};

/// Gram-Schmidt input was numerically rank deficient.
class RankDeficientError : public std::runtime_error {
public:
    explicit RankDeficientError(const std::string& what) : std::runtime_error(what) {}
};

/// The eigensolver did not converge within its iteration budget.
class SolverFailure : public std::runtime_error {
public:
    explicit SolverFailure(const std::string& what) : std::runtime_error(what) {}
};

/// A cross-validation identity (solver vs quadrature vs kernel) exceeded tolerance.
class ConsistencyFailure : public std::runtime_error {
public:
    explicit ConsistencyFailure(const std::string& what) : std::runtime_error(what) {}
};

/// Adaptive quadrature or another numeric routine failed to reach tolerance.
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// A derivative-free search had no successful objective evaluation.
class SearchFailure : public std::runtime_error {
public:
    explicit SearchFailure(const std::string& what) : std::runtime_error(what) {}
};

/// A 1D factor spectrum was truncated below the depth scale of the potential.
class ResolutionError : public std::runtime_error {
public:
    explicit ResolutionError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace ltlab
