#pragma once

#include <stdexcept>
#include <string>

namespace fastdiff {

/// Base class for all library errors. Subclasses map to CLI exit codes:
/// config/usage problems -> 1, numerical failures -> 2, invariant breaches -> 3.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// -- usage / configuration --------------------------------------------------

class RangeError : public Error {
public:
    explicit RangeError(const std::string& msg) : Error(msg) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& msg) : Error(msg) {}
};

class WrongKind : public Error {
public:
    explicit WrongKind(const std::string& msg) : Error(msg) {}
};

class WrongRegime : public Error {
public:
    explicit WrongRegime(const std::string& msg) : Error(msg) {}
};

class WrongExponent : public Error {
public:
    explicit WrongExponent(const std::string& msg) : Error(msg) {}
};

class KindMismatch : public Error {
public:
    explicit KindMismatch(const std::string& msg) : Error(msg) {}
};

class GridMismatch : public Error {
public:
    explicit GridMismatch(const std::string& msg) : Error(msg) {}
};

class WindowTooShort : public Error {
public:
    explicit WindowTooShort(const std::string& msg) : Error(msg) {}
};

// -- numerical failures -----------------------------------------------------

class IntegrationFailure : public Error {
public:
    explicit IntegrationFailure(const std::string& msg) : Error(msg) {}
};

class NewtonDivergence : public Error {
public:
    explicit NewtonDivergence(const std::string& msg) : Error(msg) {}
};

class NoDecay : public Error {
public:
    explicit NoDecay(const std::string& msg) : Error(msg) {}
};

class NotExtincting : public Error {
public:
    explicit NotExtincting(const std::string& msg) : Error(msg) {}
};

class PastExtinction : public Error {
public:
    explicit PastExtinction(const std::string& msg) : Error(msg) {}
};

// -- invariant violations (signal bugs or broken preconditions) --------------

class InvariantViolation : public Error {
public:
    explicit InvariantViolation(const std::string& msg) : Error(msg) {}
};

class NonPositive : public Error {
public:
    explicit NonPositive(const std::string& msg) : Error(msg) {}
};

class PositivityLoss : public Error {
public:
    explicit PositivityLoss(const std::string& msg) : Error(msg) {}
};

class SandwichViolation : public Error {
public:
    explicit SandwichViolation(const std::string& msg) : Error(msg) {}
};

} // namespace fastdiff
