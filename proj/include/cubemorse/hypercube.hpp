#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cubemorse/core.hpp"

namespace cubemorse::hypercube {

inline constexpr unsigned kMaxWidth = 64;

/// A cell of the hypercube complex H_n: a bit-vector of length n.
///
/// Bit index 1 is the leftmost character of the printed string and is stored
/// in the most significant of the n low bits of `bits`. This class is the
/// only place that convention is encoded.
class HCell {
public:
    constexpr HCell() = default;
    HCell(std::uint64_t bits, unsigned width);

    /// Parses a 0/1 string, leftmost character = bit 1.
    static HCell parse(std::string_view text);

    std::uint64_t bits() const { return bits_; }
    unsigned width() const { return width_; }
    unsigned dim() const;

    /// Bit i, 1-based from the left.
    bool test(unsigned i) const;
    HCell flipped(unsigned i) const;

    /// Face order: bitwise <= (product order).
    bool is_face_of(const HCell& other) const;

    std::string to_string() const;

    bool operator==(const HCell&) const = default;
    auto operator<=>(const HCell& o) const { return bits_ <=> o.bits_; }

private:
    std::uint64_t mask_for(unsigned i) const;

    std::uint64_t bits_ = 0;
    unsigned width_ = 0;
};

/// Primary faces: every vector obtained by clearing one set bit, ascending.
std::vector<std::pair<HCell, Z2>> hc_boundary(const HCell& x);

/// Template M_i: toggles bit i. Throws DomainError unless 1 <= i <= width.
HCell apply_template(unsigned i, const HCell& x);

/// H_n, or a subcomplex of it given by a membership table, as a CellComplex.
/// Cell ids are the raw bit patterns.
class HypercubeComplex final : public CellComplex {
public:
    /// Full H_n.
    explicit HypercubeComplex(unsigned n);
    /// Subcomplex with the given cells (not closed automatically). n <= 24.
    HypercubeComplex(unsigned n, const std::vector<std::uint64_t>& cells);

    /// Face closure of the given cells.
    static HypercubeComplex closure(unsigned n, const std::vector<std::uint64_t>& cells);

    unsigned width() const { return n_; }

    bool contains(CellId cell) const override;
    unsigned dim(CellId cell) const override;
    std::uint64_t cell_count() const override { return count_; }
    void faces(CellId cell, std::vector<CellId>& out) const override;
    void cofaces(CellId cell, std::vector<CellId>& out) const override;
    void for_each_cell(const std::function<void(CellId)>& visit) const override;

    /// Template M_i pulled back through the inclusion: toggles bit i when
    /// the result is a member, identity otherwise.
    CellId alpha(unsigned i, CellId cell) const;

private:
    unsigned n_;
    bool full_ = true;
    std::vector<bool> member_;
    std::uint64_t count_ = 0;
};

}  // namespace cubemorse::hypercube
