#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "cubemorse/core.hpp"
#include "cubemorse/cubical.hpp"
#include "cubemorse/matching.hpp"

namespace cubemorse::morse {

/// Partial order on grade ids.
class GradeOrder {
public:
    virtual ~GradeOrder() = default;
    virtual bool leq(GradeId p, GradeId q) const = 0;
    /// Covering or generating edges (p, q) with p <= q, for serialization.
    virtual std::vector<std::pair<GradeId, GradeId>> edges() const { return {}; }
};

using GradeFn = std::function<std::optional<GradeId>(CellId)>;

/// Morse complex of an acyclic matching.
///
/// `critical` must be exactly the fixed cells of `mate`, ascending. The
/// coefficient of critical b in the boundary of critical a is the number of
/// flowlines from a to b mod 2; flow values are memoized per Q cell and the
/// traversal is iterative. Throws AcyclicityError when a flowline revisits a
/// cell on the active path.
ExplicitComplex morse_complex(const CellComplex& complex, const matching::MatchFn& mate,
                              std::span<const CellId> critical, const GradeFn& grade = {});

/// Same, enumerating the critical cells first (small complexes).
ExplicitComplex morse_complex(const CellComplex& complex, const matching::MatchFn& mate,
                              const GradeFn& grade = {}, std::uint64_t limit = 10'000'000);

/// Acyclic matching on an explicit complex by coreduction sweeps.
///
/// A cell whose remaining (same-grade, when `graded`) boundary has exactly
/// one entry is paired with that face; when no such cell exists the lowest
/// remaining cell becomes critical. If that yields no pair although an
/// eligible incidence exists, a single incident pair is matched. Returns the
/// partner of every cell position.
std::vector<std::uint32_t> generic_round(const ExplicitComplex& complex, bool graded);

/// One reduction step on an explicit complex with the given matching.
ExplicitComplex reduce(const ExplicitComplex& complex, const std::vector<std::uint32_t>& partner);

struct HomologyResult {
    std::vector<std::uint64_t> betti;
    unsigned rounds = 0;
    std::uint64_t cell_count = 0;
    /// Cell count after each round.
    std::vector<std::uint64_t> round_sizes;
    ExplicitComplex reduced;
};

/// Iterated Morse reduction: template Mate on the fibers first, then
/// generic rounds until the boundary vanishes. Betti numbers are listed up
/// to the highest nonzero one.
HomologyResult homology(const cubical::CubicalComplex& complex, unsigned threads = 1);
HomologyResult homology(const ExplicitComplex& complex);

struct ConleyResult {
    ExplicitComplex first_round;
    ExplicitComplex conley;
    unsigned tower = 0;
    std::vector<std::uint64_t> round_sizes;
};

/// Graded iterated reduction to a Conley complex: graded template Mate in
/// round one, then graded generic rounds until no boundary entry joins two
/// cells of equal grade. `tower` counts the rounds.
ConleyResult connection_matrix(const cubical::CubicalComplex& complex,
                               const std::function<GradeId(CellId)>& grading, const GradeOrder& order);
ConleyResult connection_matrix(const ExplicitComplex& graded, const GradeOrder& order);

/// Throws DomainError naming the first boundary entry whose face grade is
/// not below (or equal, unless `strict`) the cell grade.
void check_filtered(const ExplicitComplex& complex, const GradeOrder& order, bool strict = false);

bool has_same_grade_entry(const ExplicitComplex& complex);

/// Euler characteristic per grade.
std::map<GradeId, std::int64_t> euler_by_grade(const ExplicitComplex& complex);

/// Cell counts keyed by (grade, dim).
std::map<std::pair<GradeId, unsigned>, std::uint64_t> count_by_grade_dim(const ExplicitComplex& complex);

}  // namespace cubemorse::morse
