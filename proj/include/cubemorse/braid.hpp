#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "cubemorse/core.hpp"
#include "cubemorse/cubical.hpp"
#include "cubemorse/error.hpp"
#include "cubemorse/morse.hpp"

namespace cubemorse::braid {

/// Periodic strand diagram: m strands, each given by its d+1 anchor values.
struct BraidSkeleton {
    unsigned m = 0;
    unsigned d = 0;
    std::vector<std::vector<std::int64_t>> strands;
    /// tau[a] = strand whose first value equals the last value of strand a.
    std::vector<unsigned> tau;

    /// Anchor value of strand a (0-based) at column i (1-based, 1..d+1).
    std::int64_t value(unsigned a, unsigned i) const { return strands[a][i - 1]; }
    bool operator==(const BraidSkeleton&) const = default;
};

enum class SkeletonFault { Shape, Closure, Transversality, CrossSection, ConstantStrand };

const char* to_string(SkeletonFault fault);

/// Validation failure naming the offending strand and column (1-based;
/// 0 when not applicable).
class SkeletonError : public ValidationError {
public:
    SkeletonError(SkeletonFault fault, unsigned strand, unsigned column, const std::string& what);
    SkeletonFault fault() const { return fault_; }
    unsigned strand() const { return strand_; }
    unsigned column() const { return column_; }

private:
    SkeletonFault fault_;
    unsigned strand_;
    unsigned column_;
};

/// Checks shape, closure, transversality, cross sections and the two
/// constant strands, in that order, and computes tau.
BraidSkeleton validate_skeleton(std::vector<std::vector<std::int64_t>> strands);

/// n copies concatenated along tau; period n*d.
BraidSkeleton nfold_cover(const BraidSkeleton& skel, unsigned n);

/// Period-4 torus braid on m strands (m >= 4) with constant strands 0, m-1.
BraidSkeleton torus_knot(unsigned m);

/// Six-strand, period-two skeleton used as the base of the n-fold family.
BraidSkeleton base_skeleton();

/// Text format: `m d`, then m lines of d+1 integers; `#` starts a comment.
BraidSkeleton read_braid(std::istream& in);
BraidSkeleton read_braid_file(const std::string& path);

/// Number of sign changes between a free strand through the top cube and
/// every skeleton strand. The free strand sits at l_i + quarters/4 in each
/// coordinate, so quarters in {1,2,3} picks an interior representative.
unsigned crossing_number(const cubical::CubeCell& top_cube, const BraidSkeleton& skel, unsigned quarters = 2);

/// Top cubes of C(m-1;d) indexed in base m-1 with coordinate 1 least
/// significant (same order as their cell ids).
class TopCubeGrid {
public:
    TopCubeGrid(std::uint32_t side, unsigned d);
    std::uint64_t size() const { return size_; }
    std::uint32_t side() const { return side_; }
    unsigned dim() const { return d_; }
    std::vector<std::int64_t> anchors(std::uint64_t index) const;
    std::uint64_t index(const std::vector<std::int64_t>& anchors) const;
    std::uint64_t stride(unsigned i) const { return strides_[i]; }
    std::uint32_t anchor(std::uint64_t index, unsigned i) const {
        return static_cast<std::uint32_t>((index / strides_[i]) % side_);
    }

private:
    std::uint32_t side_;
    unsigned d_;
    std::uint64_t size_;
    std::vector<std::uint64_t> strides_;
};

/// Relation F on top cubes, with edge xi -> xi' for adjacent cubes when
/// cross(xi') <= cross(xi) or both lie in the star of one improper vertex.
/// Successors are enumerated on demand.
class RelationF {
public:
    explicit RelationF(const BraidSkeleton& skel);

    const TopCubeGrid& grid() const { return grid_; }
    std::uint64_t size() const { return grid_.size(); }
    unsigned cross(std::uint64_t cube) const { return cross_[cube]; }
    const std::vector<std::vector<std::int64_t>>& improper_vertices() const { return improper_; }

    bool has_edge(std::uint64_t from, std::uint64_t to) const;
    void successors(std::uint64_t cube, std::vector<std::uint64_t>& out) const;

private:
    bool share_improper_star(std::uint64_t a, std::uint64_t b) const;

    TopCubeGrid grid_;
    std::vector<std::uint32_t> cross_;
    std::vector<std::vector<std::int64_t>> improper_;
};

/// Strongly connected components ordered by reachability: p <= q iff p is
/// reachable from q. Component ids follow the minimum contained node.
class CondensationPoset final : public morse::GradeOrder {
public:
    /// Above this total size of reachability bitsets, leq searches the dag
    /// directly instead of caching descendant sets.
    static constexpr double kReachBudgetBytes = 512.0 * 1024 * 1024;

    CondensationPoset() = default;
    CondensationPoset(std::vector<GradeId> component, std::vector<std::pair<GradeId, GradeId>> dag);

    std::size_t scc_count() const { return members_.size(); }
    GradeId scc_of(std::uint64_t node) const { return component_[node]; }
    const std::vector<std::uint64_t>& members(GradeId p) const { return members_[p]; }
    const std::vector<std::pair<GradeId, GradeId>>& dag_edges() const { return dag_; }

    bool leq(GradeId p, GradeId q) const override;
    std::vector<std::pair<GradeId, GradeId>> edges() const override;

    /// Least element of a set under the order; IntegrityError if none.
    GradeId least(const std::vector<GradeId>& set) const;

private:
    const std::vector<std::uint64_t>& descendants(GradeId q) const;

    std::vector<GradeId> component_;
    std::vector<std::vector<std::uint64_t>> members_;
    std::vector<std::pair<GradeId, GradeId>> dag_;
    std::vector<std::vector<GradeId>> succ_;
    mutable std::vector<std::vector<std::uint64_t>> reach_;  // lazily filled bitsets
};

using SuccessorFn = std::function<void(std::uint64_t, std::vector<std::uint64_t>&)>;

/// Iterative Tarjan over nodes 0..n-1.
CondensationPoset condensation(std::uint64_t n, const SuccessorFn& successors);
CondensationPoset condensation(const RelationF& relation);

/// Cells of the star of a cell that are top cubes, as grid indices.
std::vector<std::uint64_t> star_top_cubes(const cubical::CubeCell& cell, const TopCubeGrid& grid);

/// Least component among the star's top cubes.
GradeId grade(const cubical::CubeCell& cell, const CondensationPoset& poset, const TopCubeGrid& grid);

struct BraidComplex {
    BraidSkeleton skeleton;
    cubical::CubicalComplex complex;
    RelationF relation;
    CondensationPoset poset;
    std::vector<GradeId> grades;  // by cell id

    GradeId grade(CellId cell) const { return grades.at(cell); }
    std::uint64_t top_cube_count() const { return relation.size(); }
};

/// C(m-1;d) with every cell graded; the grade table is filled eagerly.
BraidComplex build_braid_complex(const BraidSkeleton& skel);

/// Condensation graph in DOT; nodes carry id, cube count and cross range.
std::string to_dot(const BraidComplex& braid);

}  // namespace cubemorse::braid
