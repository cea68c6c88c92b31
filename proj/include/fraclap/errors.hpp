#pragma once

#include <stdexcept>
#include <string>

namespace fraclap {

/// Input outside the mathematical domain of an operation (poles, |z| != 1, x = y, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A field lacks the growth class an operator needs (u not in L1_t).
class IntegrabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A declared decay is too slow for the requested tail integral.
class DivergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The request is valid mathematics but outside what this library evaluates.
class CapabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quadrature or extrapolation did not reach its tolerance. Carries the best
/// estimate and its error bound so callers can still inspect them.
class AccuracyFailure : public std::runtime_error {
public:
    AccuracyFailure(const std::string& what, double estimate, double error_bound)
        : std::runtime_error(what), estimate_(estimate), error_bound_(error_bound) {}

    double estimate() const noexcept { return estimate_; }
    double error_bound() const noexcept { return error_bound_; }

private:
    double estimate_;
    double error_bound_;
};

/// Value with an absolute error estimate.
struct Estimate {
    double value = 0.0;
    double error = 0.0;

    Estimate& operator+=(const Estimate& o) {
        value += o.value;
        error += o.error;
        return *this;
    }
    friend Estimate operator+(Estimate a, const Estimate& b) { return a += b; }
    friend Estimate operator*(double c, Estimate e) {
        e.value *= c;
        e.error *= (c < 0 ? -c : c);
        return e;
    }
};

} // namespace fraclap
