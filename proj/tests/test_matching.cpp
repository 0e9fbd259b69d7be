#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <memory>
#include <random>

#include "cubemorse/cubical.hpp"
#include "cubemorse/error.hpp"
#include "cubemorse/fiber_mate.hpp"
#include "cubemorse/hypercube.hpp"
#include "cubemorse/matching.hpp"
#include "oracles.hpp"

using namespace cubemorse;
using hypercube::HCell;
using hypercube::HypercubeComplex;
using matching::Mate;
using matching::MatchingSequence;

namespace {

std::uint64_t bits(const char* s) { return HCell::parse(s).bits(); }

MatchingSequence templates(const HypercubeComplex& h) {
    std::vector<matching::MatchFn> entries;
    for (unsigned i = 1; i <= h.width(); ++i) entries.emplace_back([&h, i](CellId c) { return h.alpha(i, c); });
    return MatchingSequence(std::move(entries));
}

MatchingSequence templates(const cubical::CubicalComplex& c) {
    std::vector<matching::MatchFn> entries;
    for (unsigned i = 1; i <= c.ambient_dim(); ++i) entries.emplace_back([&c, i](CellId x) { return c.alpha(i, x); });
    return MatchingSequence(std::move(entries));
}

// Matching given by an explicit table; cells not listed are fixed.
matching::MatchingOracle table_oracle(std::map<CellId, CellId> pairs, std::map<CellId, unsigned> levels = {}) {
    auto p = std::make_shared<std::map<CellId, CellId>>(std::move(pairs));
    auto l = std::make_shared<std::map<CellId, unsigned>>(std::move(levels));
    return {[p](CellId c) {
                auto it = p->find(c);
                return it == p->end() ? c : it->second;
            },
            [l](CellId c) {
                auto it = l->find(c);
                return it == l->end() ? 0U : it->second;
            }};
}

}  // namespace

TEST_CASE("Mate on the six-cell subcomplex of H_3 yields three pairs") {
    const HypercubeComplex sub(3, {bits("000"), bits("001"), bits("010"), bits("011"), bits("100"), bits("101")});
    REQUIRE(validate_complex(sub).ok());
    const Mate mate(templates(sub));
    CHECK(mate(bits("000")) == bits("100"));
    CHECK(mate(bits("001")) == bits("101"));
    CHECK(mate(bits("010")) == bits("011"));
    std::set<std::pair<CellId, CellId>> arrows;
    sub.for_each_cell([&](CellId c) {
        const CellId p = mate(c);
        if (sub.dim(p) > sub.dim(c)) arrows.emplace(c, p);
    });
    CHECK(arrows == std::set<std::pair<CellId, CellId>>{
                        {bits("000"), bits("100")}, {bits("001"), bits("101")}, {bits("010"), bits("011")}});

    const auto oracle = matching::make_oracle(mate);
    CHECK(matching::classify(sub, bits("000"), oracle) == matching::CellClass::Lower);
    CHECK(matching::classify(sub, bits("100"), oracle) == matching::CellClass::Upper);
    CHECK(std::string(matching::to_string(matching::CellClass::Lower)) == "Q");
    CHECK(matching::verify_stable(sub, oracle, mate.sequence()));
    CHECK(matching::verify_acyclic(sub, oracle));
}

TEST_CASE("Mate on full H_3 equals the first template") {
    const HypercubeComplex h(3);
    const Mate mate(templates(h));
    h.for_each_cell([&](CellId c) {
        CHECK(mate(c) == hypercube::apply_template(1, HCell(c, 3)).bits());
        CHECK(mate.evaluate(c).index == 1);
    });
}

TEST_CASE("Mate on full C(2;2) leaves one vertex critical") {
    const auto c = cubical::CubicalComplex::full(2, 2);
    const Mate mate(templates(c));
    std::vector<CellId> fixed;
    c.for_each_cell([&](CellId x) {
        if (mate(x) == x) fixed.push_back(x);
    });
    REQUIRE(fixed.size() == 1);
    CHECK(c.decode(fixed[0]).to_string() == "[2,2]x[2,2]");
    const auto o = matching::make_oracle(mate);
    CHECK(matching::classify(c, fixed[0], o) == matching::CellClass::Critical);
}

TEST_CASE("Mate on the circle") {
    const auto s1 = cubical::CubicalComplex::sphere(1);
    const Mate mate(templates(s1));
    std::vector<std::string> fixed;
    s1.for_each_cell([&](CellId x) {
        if (mate(x) == x) fixed.push_back(s1.decode(x).to_string());
    });
    CHECK(fixed == std::vector<std::string>{"[0,0]x[0,1]", "[1,1]x[1,1]"});
}

TEST_CASE("memoized and plain evaluation agree, even when the cache is flushed") {
    const auto t = cubical::CubicalComplex::top_sphere(2);
    const Mate plain(templates(t));
    const Mate cached(templates(t), true, 16);
    t.for_each_cell([&](CellId x) {
        const auto a = plain.evaluate(x);
        const auto b = cached.evaluate(x);
        REQUIRE(a.partner == b.partner);
        REQUIRE(a.index == b.index);
    });
}

TEST_CASE("a non-involutive sequence entry is reported") {
    const HypercubeComplex h(2);
    // Sends 00 to 10 but 10 to 11.
    MatchingSequence bad({[](CellId c) -> CellId {
        if (c == 0) return 2;
        if (c == 2) return 3;
        return c;
    }});
    const Mate mate(bad);
    CHECK_THROWS_AS(mate(0), ContractError);
}

TEST_CASE("verify_matching names the corrupted pair") {
    const HypercubeComplex h(3);
    CHECK(matching::verify_matching(h, matching::identity_oracle()).ok());
    CHECK(matching::verify_matching(h, matching::identity_oracle()).critical == 8);

    const auto broken = table_oracle({{bits("000"), bits("100")}});
    const auto rep = matching::verify_matching(h, broken);
    REQUIRE(rep.violations.size() == 1);
    CHECK(rep.violations[0].cell == bits("000"));
    CHECK(rep.violations[0].partner == bits("100"));
    CHECK(rep.violations[0].kind == matching::MatchingViolation::Kind::NotInvolution);

    const auto far = table_oracle({{bits("000"), bits("110")}, {bits("110"), bits("000")}});
    const auto rep2 = matching::verify_matching(h, far);
    CHECK(rep2.violations.size() == 2);
    CHECK(rep2.violations[0].kind == matching::MatchingViolation::Kind::NotIncident);
    CHECK_THROWS_AS(matching::classify(h, bits("000"), far), ContractError);

    CHECK_THROWS_AS(matching::verify_matching(cubical::CubicalComplex::sphere(12), broken, 100), SizeGuardError);
}

TEST_CASE("verify_acyclic finds the loop on the circle") {
    const auto s1 = cubical::CubicalComplex::sphere(1);
    auto id = [&s1](std::vector<std::int64_t> a, std::vector<int> e) {
        return s1.encode(cubical::CubeCell::from_intervals(a, e));
    };
    // Every vertex takes the next edge around the square.
    const auto cyclic = table_oracle({
        {id({0, 0}, {0, 0}), id({0, 0}, {0, 1})}, {id({0, 0}, {0, 1}), id({0, 0}, {0, 0})},
        {id({0, 1}, {0, 0}), id({0, 1}, {1, 0})}, {id({0, 1}, {1, 0}), id({0, 1}, {0, 0})},
        {id({1, 1}, {0, 0}), id({1, 0}, {0, 1})}, {id({1, 0}, {0, 1}), id({1, 1}, {0, 0})},
        {id({1, 0}, {0, 0}), id({0, 0}, {1, 0})}, {id({0, 0}, {1, 0}), id({1, 0}, {0, 0})},
    });
    CHECK(matching::verify_matching(s1, cyclic).ok());
    CHECK_FALSE(matching::verify_acyclic(s1, cyclic));
    CHECK(matching::verify_acyclic(s1, matching::identity_oracle()));
}

TEST_CASE("verify_stable detects an earlier template that was passed over") {
    const HypercubeComplex h(3);
    const auto seq = templates(h);
    // 100-110 via entry 2, 010-011 via entry 3, 001-101 via entry 1; 000 and
    // 111 fixed. Entry 1 pairs 010 with 110 = w(100), and 1 < 2, 3.
    const auto unstable = table_oracle(
        {{bits("100"), bits("110")}, {bits("110"), bits("100")}, {bits("010"), bits("011")},
         {bits("011"), bits("010")}, {bits("001"), bits("101")}, {bits("101"), bits("001")}},
        {{bits("100"), 2}, {bits("110"), 2}, {bits("010"), 3}, {bits("011"), 3}, {bits("001"), 1}, {bits("101"), 1}});
    REQUIRE(matching::verify_matching(h, unstable).ok());
    const auto pair = matching::find_unstable_pair(h, unstable, seq);
    REQUIRE(pair.has_value());
    CHECK(pair->upper_start == bits("100"));
    CHECK(pair->lower_next == bits("010"));
    CHECK(pair->witness == 1);
    CHECK_FALSE(matching::verify_stable(h, unstable, seq));

    CHECK(matching::verify_stable(h, matching::identity_oracle(), seq));
    CHECK_THROWS_AS(matching::verify_stable(h, matching::MatchingOracle{[](CellId c) { return c; }, {}}, seq),
                    DomainError);
}

TEST_CASE("Mate equals the level-by-level construction on random subcomplexes of H_n") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const unsigned n = 1 + trial % 5;
        const auto sub = oracle::random_hypercube_subcomplex(n, rng);
        const auto seq = templates(sub);
        const Mate mate(seq);
        const auto ref = oracle::set_matching(sub.cells(), seq);
        for (CellId c : sub.cells()) {
            REQUIRE(mate(c) == ref.partner.at(c));
            REQUIRE(mate.evaluate(c).index == ref.level.at(c));
        }
        for (std::size_t i = 1; i < ref.fixed_sets.size(); ++i) {
            CHECK(std::includes(ref.fixed_sets[i - 1].begin(), ref.fixed_sets[i - 1].end(), ref.fixed_sets[i].begin(),
                                ref.fixed_sets[i].end()));
        }
        if (n >= 1) {
            std::size_t first_fixed = 0;
            for (CellId c : sub.cells()) first_fixed += seq.apply(1, c) == c;
            CHECK(ref.fixed_sets.back().size() <= first_fixed);
        }
        const auto o = matching::make_oracle(mate);
        CHECK(matching::verify_matching(sub, o).ok());
        CHECK(matching::verify_stable(sub, o, seq));
        CHECK(matching::verify_acyclic(sub, o));
    }
}

TEST_CASE("fiber tables agree with the generic recursion") {
    std::mt19937_64 rng(77);
    std::vector<cubical::CubicalComplex> cases{cubical::CubicalComplex::sphere(3),
                                               cubical::CubicalComplex::top_sphere(2),
                                               cubical::CubicalComplex::full(3, 3)};
    for (int k = 0; k < 100; ++k) cases.push_back(oracle::random_cubical(3, 1 + k % 3, rng));
    for (const auto& c : cases) {
        const auto seq = templates(c);
        const Mate mate(seq);
        const matching::FiberMatcher fm(c);
        const auto ref = oracle::set_matching(c.cells(), seq);
        std::vector<CellId> fixed;
        c.for_each_cell([&](CellId x) {
            const auto a = fm.evaluate(x);
            const auto b = mate.evaluate(x);
            REQUIRE(a.partner == b.partner);
            REQUIRE(a.index == b.index);
            REQUIRE(a.partner == ref.partner.at(x));
            if (a.partner == x) fixed.push_back(x);
        });
        CHECK(fm.critical_cells() == fixed);
        const auto o = fm.oracle();
        CHECK(matching::verify_matching(c, o).ok());
        CHECK(matching::verify_stable(c, o, fm.sequence()));
        CHECK(matching::verify_acyclic(c, o));
    }
}

TEST_CASE("graded fiber tables agree with the recursion over graded templates") {
    const auto c = cubical::CubicalComplex::full(3, 3);
    const matching::FiberMatcher::Grading grading = [&c](CellId x) {
        const auto cell = c.decode(x);
        return static_cast<GradeId>((cell.anchor(0) + 2 * cell.digit(1)) % 3);
    };
    const matching::FiberMatcher fm(c, grading);
    const Mate mate(fm.sequence());
    c.for_each_cell([&](CellId x) {
        REQUIRE(fm.mate(x) == mate(x));
        REQUIRE(grading(fm.mate(x)) == grading(x));
    });
}

TEST_CASE("threaded sweep returns the same critical cells") {
    const auto s = cubical::CubicalComplex::sphere(7);
    const matching::FiberMatcher fm(s);
    const auto one = fm.critical_cells(1);
    CHECK(one.size() == 2);
    CHECK(fm.critical_cells(4) == one);
    CHECK_THROWS_AS(fm.evaluate(s.encode(cubical::CubeCell(std::vector<std::uint32_t>(8, 1)))), DomainError);
}
