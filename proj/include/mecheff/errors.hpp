#pragma once

#include <stdexcept>
#include <string>

namespace mecheff {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a formula (e.g. phi > 1 - 1/e, x >= 1).
class DomainError : public Error {
public:
    using Error::Error;
};

/// x * hazard(x) never reaches 1 on the support, so there is no reserve price.
class NoRoot : public Error {
public:
    using Error::Error;
};

/// The conditioning event {all values below the reserve} has vanishing probability.
class DegenerateConditioning : public Error {
public:
    using Error::Error;
};

/// The counterexample scan ran out of epsilon values without success.
class SearchExhausted : public Error {
public:
    using Error::Error;
};

}  // namespace mecheff
