#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cubemorse {

/// Input outside an operation's domain (non-member cell, bad index, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A structure failed validation (braid skeleton, complex, input file).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Refusal to enumerate or build something larger than a configured guard.
class SizeGuardError : public std::runtime_error {
public:
    SizeGuardError(const std::string& what, std::uint64_t size, std::uint64_t limit)
        : std::runtime_error(what), size_(size), limit_(limit) {}

    std::uint64_t size() const { return size_; }
    std::uint64_t limit() const { return limit_; }

private:
    std::uint64_t size_;
    std::uint64_t limit_;
};

/// A matching sequence entry broke its involution contract.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// A cycle was found where an acyclic matching was required.
class AcyclicityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An internal invariant that should hold by construction did not.
class IntegrityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace cubemorse
