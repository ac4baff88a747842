#pragma once

#include <stdexcept>
#include <string>

namespace nldiff {

/// Concentration (or other argument) outside a model's validity interval.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Kirchhoff potential outside the range reachable over the validity interval.
class RangeError : public std::range_error {
public:
    using std::range_error::range_error;
};

/// Derivative / Taylor order not available for the model variant.
class UnsupportedOrderError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Operation requested on a boundary mode it does not support.
class UnsupportedBoundaryError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Fields, grids or time lists that do not line up.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Not enough snapshots to form the requested quadrature / difference.
class InsufficientDataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Identity requires a nonlinear law (nonzero derivative) but got a flat one.
class NonlinearityRequiredError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Taylor coefficients blew up while building a series.
class DivergenceError : public std::runtime_error {
public:
    DivergenceError(int order, const std::string& what)
        : std::runtime_error(what), order_(order) {}
    int order() const noexcept { return order_; }

private:
    int order_;
};

/// Explicit stepping produced non-finite values.
class InstabilityError : public std::runtime_error {
public:
    InstabilityError(long step, const std::string& what)
        : std::runtime_error(what), step_(step) {}
    long step() const noexcept { return step_; }

private:
    long step_;
};

}  // namespace nldiff
