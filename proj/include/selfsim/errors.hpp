#pragma once

#include <stdexcept>
#include <string>

namespace selfsim {

/// Input is mathematically unsuitable (not Perron, wrong degree, ...).
class MathRefusal : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A commutator image needs a factor with exponent -1 that does not cancel.
class NegativeExponentError : public MathRefusal {
public:
    NegativeExponentError(const std::string& pair, const std::string& detail)
        : MathRefusal("NegativeExponent: " + pair + " " + detail), pair_(pair) {}
    const std::string& pair() const { return pair_; }

private:
    std::string pair_;
};

class NotPerronError : public MathRefusal {
public:
    using MathRefusal::MathRefusal;
};

class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DegenerateError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Iterative method failed to converge; message carries residuals.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A budget (enumeration size, triangle count) was exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal geometric bound the construction relies on was violated.
class ConstructionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

}  // namespace selfsim
