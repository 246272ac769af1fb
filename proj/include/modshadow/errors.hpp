#pragma once

#include <stdexcept>
#include <string>

namespace modshadow {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Point not in general position for the product chart (|h22| too small).
struct OutsideChartError : Error {
    OutsideChartError() : Error("outside product chart") {}
    explicit OutsideChartError(const std::string& what) : Error(what) {}
};

// Bracket coordinates exceed the locality cap eta.
struct EtaExceededError : Error {
    double sigma, nu, c, eta;
    EtaExceededError(double sigma_, double nu_, double c_, double eta_)
        : Error("exceeds eta: |sigma|=" + std::to_string(sigma_) +
                " |nu|=" + std::to_string(nu_) + " |c|=" + std::to_string(c_) +
                " eta=" + std::to_string(eta_)),
          sigma(sigma_), nu(nu_), c(c_), eta(eta_) {}
};

struct NoCandidateDeckError : Error {
    NoCandidateDeckError() : Error("no candidate deck") {}
};

struct NoRecurrenceError : Error {
    NoRecurrenceError() : Error("no return within budget") {}
};

struct RecurrenceBudgetError : Error {
    RecurrenceBudgetError() : Error("recurrence budget exhausted") {}
};

struct NonHyperbolicReturnError : Error {
    NonHyperbolicReturnError() : Error("non-hyperbolic return") {}
};

struct DeckOverflowError : Error {
    DeckOverflowError() : Error("deck entry beyond 2^62") {}
};

struct AmbiguousMatchError : Error {
    AmbiguousMatchError() : Error("ambiguous match") {}
};

struct VerificationError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

}  // namespace modshadow
