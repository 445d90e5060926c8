#pragma once

#include <stdexcept>

namespace poc {

// Input tables contradict each other, or a computed interval crossed by more
// than the numerical tolerance.
class IncoherentDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The conditioning event of the requested quantity has zero probability.
class UndefinedEstimandError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The requested method fails the graph eligibility check, or the data needed
// for it is absent.
class IneligibleMethodError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// No model in the oracle's family reproduces the requested observables.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace poc
