#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cubemorse/error.hpp"

namespace cubemorse {

using CellId = std::uint64_t;
using GradeId = std::uint32_t;

/// Coefficient in the field with two elements.
struct Z2 {
    bool value = false;

    constexpr Z2() = default;
    constexpr explicit Z2(bool v) : value(v) {}
    constexpr explicit Z2(int v) : value((v & 1) != 0) {}

    constexpr Z2 operator+(Z2 o) const { return Z2(value != o.value); }
    constexpr Z2 operator*(Z2 o) const { return Z2(value && o.value); }
    constexpr Z2& operator+=(Z2 o) { value = value != o.value; return *this; }
    constexpr bool operator==(const Z2&) const = default;
    constexpr explicit operator bool() const { return value; }

    static constexpr Z2 zero() { return Z2(false); }
    static constexpr Z2 one() { return Z2(true); }
};

struct Incidence {
    CellId cell;
    Z2 coeff;
    bool operator==(const Incidence&) const = default;
};

/// A finite cell complex over Z2 presented through oracles.
///
/// Implementations never need to store their cells: membership, dimension
/// and primary faces are evaluated on demand from the cell id. Faces are
/// reported in ascending id order and carry coefficient one (the zero
/// entries of the incidence function are not listed).
class CellComplex {
public:
    virtual ~CellComplex() = default;

    virtual bool contains(CellId cell) const = 0;
    virtual unsigned dim(CellId cell) const = 0;
    virtual std::uint64_t cell_count() const = 0;

    /// Appends the primary faces of a member cell to `out` (cleared first).
    virtual void faces(CellId cell, std::vector<CellId>& out) const = 0;
    /// Appends the member cells having `cell` as a primary face.
    virtual void cofaces(CellId cell, std::vector<CellId>& out) const = 0;
    /// Visits every member cell in ascending id order.
    virtual void for_each_cell(const std::function<void(CellId)>& visit) const = 0;

    /// Id used when cells of this complex are reported outside of it.
    virtual CellId external_ref(CellId cell) const { return cell; }

    /// Checked boundary; throws DomainError for non-members.
    std::vector<Incidence> boundary(CellId cell) const;
    std::vector<Incidence> coboundary(CellId cell) const;

    /// All member cells, ascending. Guarded by `limit`.
    std::vector<CellId> cells(std::uint64_t limit = 10'000'000) const;
};

struct ExplicitCell {
    CellId ref = 0;
    unsigned dim = 0;
    std::optional<GradeId> grade;
    bool operator==(const ExplicitCell&) const = default;
};

/// A small, fully materialized complex. Cell ids are positions in `cells()`;
/// `ref` keeps the id a cell had in the complex it was derived from.
class ExplicitComplex final : public CellComplex {
public:
    ExplicitComplex() = default;

    /// `boundary[k]` lists the face positions of cell k (any order, no
    /// duplicates expected; duplicates cancel over Z2).
    ExplicitComplex(std::vector<ExplicitCell> cells,
                    std::vector<std::vector<std::uint32_t>> boundary);

    bool contains(CellId cell) const override { return cell < cells_.size(); }
    unsigned dim(CellId cell) const override;
    std::uint64_t cell_count() const override { return cells_.size(); }
    void faces(CellId cell, std::vector<CellId>& out) const override;
    void cofaces(CellId cell, std::vector<CellId>& out) const override;
    void for_each_cell(const std::function<void(CellId)>& visit) const override;
    CellId external_ref(CellId cell) const override { return cells_.at(cell).ref; }

    std::span<const ExplicitCell> cell_data() const { return cells_; }
    const ExplicitCell& cell(std::size_t k) const { return cells_.at(k); }
    std::span<const std::uint32_t> face_indices(std::size_t k) const { return faces_.at(k); }

    std::size_t boundary_entry_count() const;
    bool graded() const;
    unsigned top_dim() const;
    /// Cell count per dimension, indexed 0..top_dim().
    std::vector<std::uint64_t> count_by_dim() const;
    /// Alternating sum of the per-dimension counts.
    std::int64_t euler_characteristic() const;
    /// True when boundary of boundary vanishes for every cell.
    bool boundary_squares_to_zero() const;

    bool operator==(const ExplicitComplex& other) const {
        return cells_ == other.cells_ && faces_ == other.faces_;
    }

private:
    std::vector<ExplicitCell> cells_;
    std::vector<std::vector<std::uint32_t>> faces_;
    std::vector<std::vector<std::uint32_t>> cofaces_;
};

/// Builds the explicit chain complex of any enumerable complex.
ExplicitComplex materialize(const CellComplex& complex,
                            const std::function<std::optional<GradeId>(CellId)>& grade = {},
                            std::uint64_t limit = 1'000'000);

struct ComplexViolation {
    enum class Kind { NotFaceClosed, WrongFaceDimension, BoundarySquareNonzero, DimensionOrder };
    Kind kind;
    CellId cell;
    CellId other;
    std::string message;
};

struct ValidationReport {
    std::uint64_t cells_checked = 0;
    std::vector<ComplexViolation> violations;
    bool ok() const { return violations.empty(); }
};

inline constexpr std::uint64_t kDefaultValidationLimit = 1'000'000;

/// Exhaustive check of the cell complex axioms over Z2.
ValidationReport validate_complex(const CellComplex& complex,
                                  std::uint64_t limit = kDefaultValidationLimit);

/// Betti numbers by Gaussian elimination over Z2. Test oracle; the input
/// must satisfy boundary-squared-zero.
std::vector<std::uint64_t> betti_oracle(const ExplicitComplex& complex);

const char* to_string(ComplexViolation::Kind kind);

}  // namespace cubemorse
