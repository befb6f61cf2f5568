#ifndef FLAGDECOMP_ERRORS_HPP
#define FLAGDECOMP_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace flagdecomp {

/// Root of every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument or violated precondition (shape mismatch, out-of-range index, ...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed input file (CSV, JSON).
class ParseError : public Error {
public:
    using Error::Error;
};

/// The data and the requested structure disagree: hierarchy, flag type, degenerate blocks.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Column ranks fail to increase strictly between two hierarchy levels.
class HierarchyViolation : public DomainError {
public:
    HierarchyViolation(std::size_t level, const std::string& what)
        : DomainError(what), level_(level) {}

    /// 0-based index of the level whose rank did not increase.
    std::size_t level() const noexcept { return level_; }

private:
    std::size_t level_;
};

/// A (deflated) column block has fewer independent directions than requested.
class DegenerateBlock : public DomainError {
public:
    DegenerateBlock(std::size_t block, const std::string& what)
        : DomainError(what), block_(block) {}

    std::size_t block() const noexcept { return block_; }

private:
    std::size_t block_;
};

/// Flag type is inconsistent with the data or with another flag.
class FlagTypeError : public DomainError {
public:
    using DomainError::DomainError;
};

/// An iterative numerical routine failed to converge or produced non-finite output.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

}  // namespace flagdecomp

#endif
