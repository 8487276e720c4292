#pragma once

#include <stdexcept>
#include <string>

namespace frl {

/// Bad or inconsistent configuration (unknown scenario, malformed config file, ...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller broke an operation's precondition (out-of-range device, shape mismatch, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// An internal invariant no longer holds (empty feasible set, stale encoding, ...).
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Q-learning produced a non-finite loss.
class TrainingDivergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace frl
