#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace geoprint {

/// Malformed input file.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// File missing or unwritable.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input violates a structural invariant. `index` names the offending element when known.
class ValidationError : public std::runtime_error {
public:
    ValidationError(const std::string& what, long index = -1)
        : std::runtime_error(what), index_(index) {}
    [[nodiscard]] long index() const { return index_; }

private:
    long index_;
};

class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double best_residual, int iterations)
        : std::runtime_error(what), best_residual_(best_residual), iterations_(iterations) {}
    [[nodiscard]] double best_residual() const { return best_residual_; }
    [[nodiscard]] int iterations() const { return iterations_; }

private:
    double best_residual_;
    int iterations_;
};

/// Greedy sequencing ran out of printable candidates. `blocking` holds a cycle of waiting node ids.
class DeadlockError : public std::runtime_error {
public:
    DeadlockError(const std::string& what, std::vector<int> blocking)
        : std::runtime_error(what), blocking_(std::move(blocking)) {}
    [[nodiscard]] const std::vector<int>& blocking() const { return blocking_; }

private:
    std::vector<int> blocking_;
};

}  // namespace geoprint
