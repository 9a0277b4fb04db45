#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace entropy_games {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed game description (schema, dangling endpoint, bad weight, dead end).
class InvalidGame : public Error {
public:
    using Error::Error;
};

/// A policy that is not total or selects a non-existent arc.
class InvalidPolicy : public Error {
public:
    using Error::Error;
};

/// The algorithm requires a precondition on the game class (Despot-free, ...).
class PreconditionViolated : public Error {
public:
    using Error::Error;
};

/// Raised when an irreducible nonnegative matrix was required.
/// `classes` lists the strongly connected components of the offending matrix.
class ReducibleMatrix : public Error {
public:
    ReducibleMatrix(const std::string& what, std::vector<std::vector<std::size_t>> classes)
        : Error(what), classes(std::move(classes)) {}

    std::vector<std::vector<std::size_t>> classes;
};

/// Enumeration or iteration budget exceeded.
class CapExceeded : public Error {
public:
    using Error::Error;
};

/// Multiplicative value iteration left the representable range.
class Overflow : public Error {
public:
    using Error::Error;
};

/// A computed object failed its post-hoc check.
class VerificationFailed : public Error {
public:
    using Error::Error;
};

}  // namespace entropy_games
