#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace levycalc {

/// Location on a radial ray where a pointwise check failed.
struct Witness {
    std::size_t ray = 0;
    double r = 0.0;
};

class LevyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public LevyError {
public:
    using LevyError::LevyError;
};

class NonIntegrableMeasure : public LevyError {
public:
    using LevyError::LevyError;
};

class QuadratureFailure : public LevyError {
public:
    using LevyError::LevyError;
};

/// An operator was applied outside its domain (e.g. the log-moment domain of I).
class DomainViolation : public LevyError {
public:
    DomainViolation(const std::string& what, int momentOrder)
        : LevyError(what), momentOrder_(momentOrder) {}
    /// Order k of the log^k moment that is infinite.
    int momentOrder() const noexcept { return momentOrder_; }

private:
    int momentOrder_;
};

class NotInRange : public LevyError {
public:
    NotInRange(const std::string& what, std::optional<Witness> witness = std::nullopt)
        : LevyError(what), witness_(witness) {}
    const std::optional<Witness>& witness() const noexcept { return witness_; }

private:
    std::optional<Witness> witness_;
};

class NotSelfdecomposable : public LevyError {
public:
    NotSelfdecomposable(const std::string& what, std::optional<Witness> witness = std::nullopt)
        : LevyError(what), witness_(witness) {}
    const std::optional<Witness>& witness() const noexcept { return witness_; }

private:
    std::optional<Witness> witness_;
};

class UnsupportedRepresentation : public LevyError {
public:
    using LevyError::LevyError;
};

/// The monotonicity characterisation and the direct dilation grid test disagree.
class ClassificationInconsistent : public LevyError {
public:
    using LevyError::LevyError;
};

class NegativeScale : public LevyError {
public:
    using LevyError::LevyError;
};

class InfiniteIntensity : public LevyError {
public:
    using LevyError::LevyError;
};

class CoverageError : public LevyError {
public:
    using LevyError::LevyError;
};

class ParseError : public LevyError {
public:
    ParseError(const std::string& message, std::size_t column, std::string expected)
        : LevyError(message + " at column " + std::to_string(column) +
                    (expected.empty() ? std::string{} : " (expected " + expected + ")")),
          column_(column),
          expected_(std::move(expected)) {}
    /// 1-based column of the offending character (input length + 1 at end of input).
    std::size_t column() const noexcept { return column_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t column_;
    std::string expected_;
};

}  // namespace levycalc
