#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cubemorse/core.hpp"

namespace cubemorse::matching {

using MatchFn = std::function<CellId(CellId)>;

/// Ordered partial matchings (w_1, ..., w_n) given as pure functions.
class MatchingSequence {
public:
    MatchingSequence() = default;
    explicit MatchingSequence(std::vector<MatchFn> entries) : entries_(std::move(entries)) {}

    std::size_t size() const { return entries_.size(); }
    /// w_i(cell), 1-based.
    CellId apply(std::size_t i, CellId cell) const { return entries_.at(i - 1)(cell); }

private:
    std::vector<MatchFn> entries_;
};

struct MateResult {
    CellId partner;
    /// Index of the sequence entry that produced the pair; 0 when unmatched.
    unsigned index;
};

/// Stable aggregation of a matching sequence by the MateHelper recursion:
/// level i keeps the level i-1 partner unless the cell and its w_i partner
/// are both unmatched at level i-1.
///
/// With `memoize` the helper results are cached per (cell, level) in a table
/// that is dropped whenever it exceeds `cache_limit` entries; cached and
/// uncached evaluation give identical results. Instances with a cache are
/// not safe for concurrent use.
class Mate {
public:
    explicit Mate(MatchingSequence sequence, bool memoize = false, std::size_t cache_limit = 1 << 20);

    CellId operator()(CellId cell) const { return evaluate(cell).partner; }
    MateResult evaluate(CellId cell) const;
    /// MateHelper(cell, level); level 0 is the identity.
    MateResult helper(CellId cell, std::size_t level) const;

    const MatchingSequence& sequence() const { return sequence_; }

private:
    MatchingSequence sequence_;
    bool memoize_;
    std::size_t cache_limit_;
    mutable std::unordered_map<CellId, std::vector<std::optional<MateResult>>> cache_;
};

/// A partial matching as an on-demand function, with optional provenance
/// (which sequence entry matched each cell, 0 for critical cells).
struct MatchingOracle {
    MatchFn mate;
    std::function<unsigned(CellId)> provenance;
};

MatchingOracle make_oracle(const Mate& mate);
MatchingOracle identity_oracle();

enum class CellClass { Critical, Lower, Upper };  // A, Q, K

const char* to_string(CellClass c);

/// A if fixed, Q if the cell is a primary face of its partner, K if the
/// partner is a primary face of the cell. Throws ContractError otherwise.
CellClass classify(const CellComplex& complex, CellId cell, const MatchingOracle& oracle);

struct MatchingViolation {
    enum class Kind { NotInvolution, NotIncident, PartnerNotMember };
    Kind kind;
    CellId cell;
    CellId partner;
};

struct MatchingReport {
    std::uint64_t critical = 0;
    std::uint64_t lower = 0;
    std::uint64_t upper = 0;
    std::vector<MatchingViolation> violations;
    bool ok() const { return violations.empty() && lower == upper; }
};

inline constexpr std::uint64_t kVerifyMatchingLimit = 1'000'000;
inline constexpr std::uint64_t kVerifyAcyclicLimit = 100'000;

/// Involution, incidence trichotomy and the Q/K bijection, cell by cell.
MatchingReport verify_matching(const CellComplex& complex, const MatchingOracle& oracle,
                               std::uint64_t limit = kVerifyMatchingLimit);

/// True when the relation q1 << q0 (q1 a face of w(q0), q1 in Q) has no
/// directed cycle.
bool verify_acyclic(const CellComplex& complex, const MatchingOracle& oracle,
                    std::uint64_t limit = kVerifyAcyclicLimit);

struct UnstablePair {
    CellId upper_start;  // xi_0
    CellId lower_next;   // xi_1
    unsigned witness;    // i with w_i(xi_1) = w(xi_0)
};

/// Scans every pair xi_0 >> xi_1 for a sequence entry i smaller than both
/// provenance indices with w_i(xi_1) = w(xi_0). Requires provenance.
std::optional<UnstablePair> find_unstable_pair(const CellComplex& complex, const MatchingOracle& oracle,
                                               const MatchingSequence& sequence,
                                               std::uint64_t limit = kVerifyMatchingLimit);

bool verify_stable(const CellComplex& complex, const MatchingOracle& oracle, const MatchingSequence& sequence,
                   std::uint64_t limit = kVerifyMatchingLimit);

}  // namespace cubemorse::matching
