#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "cubemorse/cubical.hpp"
#include "cubemorse/matching.hpp"

namespace cubemorse::matching {

/// Mate over the pulled-back hypercube templates (alpha_1, ..., alpha_d) of a
/// cubical complex, or over the graded templates beta_i when a grading is
/// supplied.
///
/// Every template keeps a cell inside its fiber (same anchors), so the
/// recursion never leaves the fiber and is evaluated once per fiber as a
/// table over its at most 2^d cells. Tables live in a bounded cache keyed by
/// the fiber vertex. The result equals Mate(cell, alpha) cell for cell.
class FiberMatcher {
public:
    using Grading = std::function<GradeId(CellId)>;

    explicit FiberMatcher(const cubical::CubicalComplex& complex, Grading grading = {},
                          std::size_t cache_fibers = 1 << 14);

    CellId mate(CellId cell) const { return evaluate(cell).partner; }
    MateResult evaluate(CellId cell) const;

    /// Critical cells in ascending id order. `threads` > 1 partitions the
    /// fiber sweep; the grading, if any, must then be safe to call
    /// concurrently.
    std::vector<CellId> critical_cells(unsigned threads = 1) const;

    /// The template sequence as plain functions, for the generic Mate and
    /// the verification routines.
    MatchingSequence sequence() const;
    MatchingOracle oracle() const;

    const cubical::CubicalComplex& complex() const { return complex_; }
    bool graded() const { return static_cast<bool>(grading_); }

private:
    struct Table {
        std::vector<std::uint32_t> free;  // free coordinates, 0-based
        std::vector<std::uint32_t> partner;
        std::vector<std::uint8_t> index;
        std::vector<std::uint8_t> member;
    };

    Table build(CellId vertex) const;
    const Table& table(CellId vertex) const;
    std::uint32_t local_index(const Table& t, CellId vertex, CellId cell) const;
    CellId global_id(const Table& t, CellId vertex, std::uint32_t local) const;
    void sweep(std::uint64_t begin, std::uint64_t end, std::vector<CellId>& out) const;

    const cubical::CubicalComplex& complex_;
    Grading grading_;
    std::size_t cache_fibers_;
    mutable std::unordered_map<CellId, Table> cache_;
};

}  // namespace cubemorse::matching
