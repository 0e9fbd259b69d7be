#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cubemorse/core.hpp"
#include "cubemorse/hypercube.hpp"

namespace cubemorse::cubical {

inline constexpr unsigned kMaxDim = 32;

/// An elementary cube in R^d as mixed-radix digits c_i in {0..2m}.
/// Even c_i = 2l encodes [l,l]; odd c_i = 2l+1 encodes [l,l+1].
class CubeCell {
public:
    CubeCell() = default;
    explicit CubeCell(std::span<const std::uint32_t> digits);

    /// Builds from anchors l_i and extents a_i in {0,1}.
    static CubeCell from_intervals(std::span<const std::int64_t> anchors, std::span<const int> extents);

    unsigned ambient_dim() const { return size_; }
    std::uint32_t digit(unsigned i) const { return digits_[i]; }  // 0-based
    std::span<const std::uint32_t> digits() const { return {digits_.data(), size_}; }

    unsigned dim() const;
    std::int64_t anchor(unsigned i) const { return digits_[i] / 2; }  // 0-based
    unsigned extent(unsigned i) const { return digits_[i] % 2; }      // 0-based

    std::string to_string() const;  // e.g. [0,1]x[2,2]

    bool operator==(const CubeCell& o) const;

private:
    std::array<std::uint32_t, kMaxDim> digits_{};
    unsigned size_ = 0;
};

/// Value (-l_1, ..., -l_d) of the fiber map.
struct FiberGrade {
    std::vector<std::int64_t> values;

    /// Componentwise order on Z^d.
    bool leq(const FiberGrade& other) const;
    bool operator==(const FiberGrade&) const = default;
};

FiberGrade fiber_map(const CubeCell& cell);

/// Extent bits as an element of H_d (coordinate 1 = leftmost bit).
hypercube::HCell fiber_embed(const CubeCell& cell);

enum class Kind { Full, Sphere, TopSphere, Closure, Braid };

const char* to_string(Kind kind);

/// Cubical complex inside C(m;d) given by a face-closed membership oracle.
///
/// Cell ids are sum_i c_i * (2m+1)^(i-1) with coordinate 1 least
/// significant. Full, sphere and top-sphere complexes are pure predicates;
/// closure complexes keep a sorted id list.
class CubicalComplex final : public CellComplex {
public:
    static CubicalComplex full(std::uint32_t m, unsigned d);
    /// Boundary of the unit cube in R^(d+1): cells of C(1;d+1) below top dimension.
    static CubicalComplex sphere(unsigned d);
    /// C(3;d+1) without its central top cube [1,2]^(d+1).
    static CubicalComplex top_sphere(unsigned d);
    /// Face closure of the top cubes with the given anchors, inside C(m;d).
    static CubicalComplex from_top_cells(std::uint32_t m, unsigned d,
                                         const std::vector<std::vector<std::int64_t>>& anchors);
    /// Face closure of arbitrary cells of C(m;d).
    static CubicalComplex closure(std::uint32_t m, unsigned d, const std::vector<CellId>& cells);
    /// Full C(m;d) tagged as a braid complex.
    static CubicalComplex braid_grid(std::uint32_t m, unsigned d);

    static constexpr std::uint64_t kClosureLimit = 100'000'000;

    Kind kind() const { return kind_; }
    std::uint32_t m() const { return m_; }
    unsigned ambient_dim() const { return d_; }
    std::uint32_t radix() const { return 2 * m_ + 1; }
    /// (2m+1)^d, the size of the id space.
    std::uint64_t id_space() const { return id_space_; }
    std::uint64_t weight(unsigned i) const { return weights_[i]; }  // 0-based coordinate

    // Codec.
    CellId encode(const CubeCell& cell) const;
    CubeCell decode(CellId id) const;
    /// Digit of coordinate i (0-based) of an id.
    std::uint32_t digit(CellId id, unsigned i) const;

    bool contains(CellId cell) const override;
    bool contains(const CubeCell& cell) const;
    unsigned dim(CellId cell) const override;
    std::uint64_t cell_count() const override { return count_; }
    void faces(CellId cell, std::vector<CellId>& out) const override;
    void cofaces(CellId cell, std::vector<CellId>& out) const override;
    void for_each_cell(const std::function<void(CellId)>& visit) const override;

    /// Pulled-back template: toggles the extent of coordinate i (1-based)
    /// when the result is a member (it then lies in the same fiber),
    /// identity otherwise.
    CellId alpha(unsigned i, CellId cell) const;

    /// Graded template: alpha_i restricted to pairs with equal grade.
    CellId beta(unsigned i, CellId cell, const std::function<GradeId(CellId)>& grading) const;

    /// Id of the vertex [l_1,l_1] x ... x [l_d,l_d] of the cell's fiber.
    CellId fiber_vertex(CellId cell) const;

private:
    CubicalComplex(Kind kind, std::uint32_t m, unsigned d);
    bool contains_digits(std::span<const std::uint32_t> digits) const;

    Kind kind_;
    std::uint32_t m_;
    unsigned d_;
    std::uint64_t id_space_ = 1;
    std::array<std::uint64_t, kMaxDim + 1> weights_{};
    std::uint64_t count_ = 0;
    std::vector<CellId> members_;  // Closure kind only, sorted.
};

/// Closed-form cell counts.
std::uint64_t full_cell_count(std::uint32_t m, unsigned d);
std::uint64_t sphere_cell_count(unsigned d);
std::uint64_t top_sphere_cell_count(unsigned d);

/// Reads the cubical text format: header `d m`, then one top-cube anchor
/// (d integers) per line; `#` starts a comment.
CubicalComplex read_cubical(std::istream& in);
CubicalComplex read_cubical_file(const std::string& path);

}  // namespace cubemorse::cubical
