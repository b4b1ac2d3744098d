#ifndef DUHEM_ERRORS_HPP
#define DUHEM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace duhem {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition or type invariant was violated by the caller.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Bisection bracket does not straddle a root.
class NoSignChange : public Error {
public:
    NoSignChange(double lo_value, double hi_value)
        : Error("bracket does not straddle a root: g(lo) = " + std::to_string(lo_value) +
                ", g(hi) = " + std::to_string(hi_value)),
          lo_value_(lo_value), hi_value_(hi_value) {}

    double lo_value() const noexcept { return lo_value_; }
    double hi_value() const noexcept { return hi_value_; }

private:
    double lo_value_;
    double hi_value_;
};

class DegenerateOrbit : public Error {
public:
    using Error::Error;
};

class InconsistentTopology : public Error {
public:
    using Error::Error;
};

/// Hypotheses of the invariance / butterfly construction do not hold.
class HypothesisViolated : public Error {
public:
    using Error::Error;
};

class EpsilonExhausted : public Error {
public:
    using Error::Error;
};

} // namespace duhem

#endif // DUHEM_ERRORS_HPP
