#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cubemorse/core.hpp"
#include "cubemorse/cubical.hpp"
#include "cubemorse/error.hpp"
#include "cubemorse/hypercube.hpp"
#include "oracles.hpp"

using namespace cubemorse;

namespace {

// Circle as four vertices and four edges.
ExplicitComplex square_loop() {
    std::vector<ExplicitCell> cells;
    for (int k = 0; k < 4; ++k) cells.push_back({static_cast<CellId>(k), 0, std::nullopt});
    for (int k = 0; k < 4; ++k) cells.push_back({static_cast<CellId>(4 + k), 1, std::nullopt});
    return ExplicitComplex(cells, {{}, {}, {}, {}, {0, 1}, {1, 2}, {2, 3}, {3, 0}});
}

// Two vertices and one edge joining a vertex to an id outside the complex.
class DanglingEdge final : public CellComplex {
public:
    bool contains(CellId c) const override { return c <= 2; }
    unsigned dim(CellId c) const override { return c == 2 ? 2 : (c == 1 ? 1 : 0); }
    std::uint64_t cell_count() const override { return 3; }
    void faces(CellId c, std::vector<CellId>& out) const override {
        out.clear();
        if (c == 1) out = {0, 7};
        if (c == 2) out = {0};
    }
    void cofaces(CellId c, std::vector<CellId>& out) const override {
        out.clear();
        if (c == 0) out = {1, 2};
    }
    void for_each_cell(const std::function<void(CellId)>& visit) const override {
        for (CellId c = 0; c <= 2; ++c) visit(c);
    }
};

}  // namespace

TEST_CASE("z2 addition is xor and one is its own inverse") {
    CHECK((Z2::one() + Z2::one()) == Z2::zero());
    CHECK((Z2::one() + Z2::zero()) == Z2::one());
    CHECK((Z2::one() * Z2::one()) == Z2::one());
    CHECK_FALSE(static_cast<bool>(Z2::zero()));
}

TEST_CASE("explicit complex cancels repeated faces and records cofaces") {
    std::vector<ExplicitCell> cells{{10, 0, std::nullopt}, {11, 0, std::nullopt}, {12, 1, std::nullopt}};
    ExplicitComplex c(cells, {{}, {}, {1, 0, 1, 1}});
    REQUIRE(c.face_indices(2).size() == 2);
    std::vector<CellId> up;
    c.cofaces(0, up);
    CHECK(up == std::vector<CellId>{2});
    CHECK(c.external_ref(2) == 12);
    CHECK(c.boundary_entry_count() == 2);
    CHECK(c.count_by_dim() == std::vector<std::uint64_t>{2, 1});
    CHECK(c.euler_characteristic() == 1);
    CHECK_THROWS_AS(ExplicitComplex(cells, {{}, {}}), DomainError);
    CHECK_THROWS_AS(ExplicitComplex(cells, {{}, {}, {5}}), DomainError);
}

TEST_CASE("boundary and coboundary reject non-members") {
    auto full = cubical::CubicalComplex::full(2, 2);
    CHECK_THROWS_AS(full.boundary(full.id_space()), DomainError);
    auto s1 = cubical::CubicalComplex::sphere(1);
    const CellId centre = s1.encode(cubical::CubeCell(std::vector<std::uint32_t>{1, 1}));
    CHECK_THROWS_AS(s1.boundary(centre), DomainError);
    CHECK_THROWS_AS(s1.coboundary(centre), DomainError);
}

TEST_CASE("betti oracle on small chain complexes") {
    CHECK(betti_oracle(square_loop()) == std::vector<std::uint64_t>{1, 1});
    CHECK(betti_oracle(ExplicitComplex({{0, 0, std::nullopt}}, {{}})) == std::vector<std::uint64_t>{1});
    CHECK(betti_oracle(materialize(cubical::CubicalComplex::full(2, 2))) == std::vector<std::uint64_t>{1, 0, 0});
    CHECK(betti_oracle(ExplicitComplex()).empty());
    // With zero boundary the Betti numbers are the cell counts.
    ExplicitComplex flat({{0, 0, {}}, {1, 1, {}}, {2, 1, {}}, {3, 2, {}}}, {{}, {}, {}, {}});
    CHECK(betti_oracle(flat) == std::vector<std::uint64_t>{1, 2, 1});
}

TEST_CASE("betti oracle refuses a boundary that does not square to zero") {
    // Filled square whose boundary omits one edge.
    std::vector<ExplicitCell> cells;
    for (int k = 0; k < 4; ++k) cells.push_back({static_cast<CellId>(k), 0, {}});
    for (int k = 0; k < 4; ++k) cells.push_back({static_cast<CellId>(4 + k), 1, {}});
    cells.push_back({8, 2, {}});
    ExplicitComplex broken(cells, {{}, {}, {}, {}, {0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5, 6}});
    CHECK_FALSE(broken.boundary_squares_to_zero());
    CHECK_THROWS_AS(betti_oracle(broken), DomainError);

    const auto report = validate_complex(broken);
    REQUIRE_FALSE(report.ok());
    bool found = false;
    for (const auto& v : report.violations) found |= v.kind == ComplexViolation::Kind::BoundarySquareNonzero;
    CHECK(found);
}

TEST_CASE("betti oracle agrees with dense rank computation on random cubical complexes") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const auto c = oracle::random_cubical(3, 1 + trial % 3, rng);
        const auto e = materialize(c);
        CHECK(betti_oracle(e) == oracle::dense_betti(e));
    }
}

TEST_CASE("validator reports missing faces and dimension defects") {
    const auto report = validate_complex(DanglingEdge());
    std::set<ComplexViolation::Kind> kinds;
    for (const auto& v : report.violations) kinds.insert(v.kind);
    CHECK(kinds.count(ComplexViolation::Kind::NotFaceClosed) == 1);
    CHECK(kinds.count(ComplexViolation::Kind::WrongFaceDimension) == 1);
    for (const auto& v : report.violations) CHECK_FALSE(v.message.empty());
}

TEST_CASE("validator accepts generated complexes") {
    CHECK(validate_complex(hypercube::HypercubeComplex(3)).ok());
    CHECK(validate_complex(cubical::CubicalComplex::sphere(1)).ok());
    CHECK(validate_complex(cubical::CubicalComplex::top_sphere(2)).ok());
    CHECK(validate_complex(cubical::CubicalComplex::full(3, 3)).ok());
    CHECK(validate_complex(square_loop()).ok());
}

TEST_CASE("validator and materialize refuse oversized complexes") {
    const auto big = cubical::CubicalComplex::sphere(9);
    CHECK_THROWS_AS(validate_complex(big, 1000), SizeGuardError);
    CHECK_THROWS_AS(materialize(big, {}, 1000), SizeGuardError);
}

TEST_CASE("materialize keeps ids and grades in ascending id order") {
    const auto s1 = cubical::CubicalComplex::sphere(1);
    const auto e = materialize(s1, [](CellId c) { return std::optional<GradeId>(static_cast<GradeId>(c % 3)); });
    REQUIRE(e.cell_count() == 8);
    for (std::size_t k = 0; k < e.cell_count(); ++k) {
        CHECK(e.cell(k).dim == s1.dim(e.cell(k).ref));
        CHECK(e.cell(k).grade == std::optional<GradeId>(static_cast<GradeId>(e.cell(k).ref % 3)));
        if (k > 0) CHECK(e.cell(k - 1).ref < e.cell(k).ref);
    }
    CHECK(e.graded());
    CHECK(e.boundary_squares_to_zero());
}

TEST_CASE("boundary and coboundary are dual") {
    const auto c = cubical::CubicalComplex::top_sphere(1);
    std::vector<CellId> buf;
    c.for_each_cell([&](CellId x) {
        for (const auto& inc : c.boundary(x)) {
            c.cofaces(inc.cell, buf);
            CHECK(std::binary_search(buf.begin(), buf.end(), x));
        }
        for (const auto& inc : c.coboundary(x)) {
            c.faces(inc.cell, buf);
            CHECK(std::binary_search(buf.begin(), buf.end(), x));
        }
    });
}
