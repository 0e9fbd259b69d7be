#include "cubemorse/fiber_mate.hpp"

#include <algorithm>
#include <thread>

namespace cubemorse::matching {

namespace {
constexpr std::size_t kMaxFreeCoordinates = 26;
}

FiberMatcher::FiberMatcher(const cubical::CubicalComplex& complex, Grading grading, std::size_t cache_fibers)
    : complex_(complex), grading_(std::move(grading)), cache_fibers_(std::max<std::size_t>(cache_fibers, 1)) {}

FiberMatcher::Table FiberMatcher::build(CellId vertex) const {
    const unsigned d = complex_.ambient_dim();
    const std::uint32_t top = 2 * complex_.m();
    Table t;
    for (unsigned i = 0; i < d; ++i) {
        if (complex_.digit(vertex, i) < top) t.free.push_back(i);
    }
    if (t.free.size() > kMaxFreeCoordinates) {
        throw SizeGuardError("fiber has too many free coordinates for a template table", t.free.size(),
                             kMaxFreeCoordinates);
    }
    const std::size_t k = t.free.size();
    const std::uint32_t n = std::uint32_t{1} << k;
    t.partner.resize(n);
    t.index.assign(n, 0);
    t.member.assign(n, 0);
    std::vector<GradeId> grade;
    if (grading_) grade.assign(n, 0);

    for (std::uint32_t x = 0; x < n; ++x) {
        t.partner[x] = x;
        const CellId id = global_id(t, vertex, x);
        if (complex_.contains(id)) {
            t.member[x] = 1;
            if (grading_) grade[x] = grading_(id);
        }
    }
    // Level i of the recursion pairs x with x + e_i when both are still
    // unmatched after levels 1..i-1.
    for (std::size_t j = 0; j < k; ++j) {
        const std::uint32_t bit = std::uint32_t{1} << j;
        const auto level = static_cast<std::uint8_t>(t.free[j] + 1);
        for (std::uint32_t x = 0; x < n; ++x) {
            if (x & bit) continue;
            const std::uint32_t y = x | bit;
            if (!t.member[x] || !t.member[y]) continue;
            if (t.partner[x] != x || t.partner[y] != y) continue;
            if (grading_ && grade[x] != grade[y]) continue;
            t.partner[x] = y;
            t.partner[y] = x;
            t.index[x] = t.index[y] = level;
        }
    }
    return t;
}

const FiberMatcher::Table& FiberMatcher::table(CellId vertex) const {
    auto it = cache_.find(vertex);
    if (it != cache_.end()) return it->second;
    if (cache_.size() >= cache_fibers_) cache_.clear();
    return cache_.emplace(vertex, build(vertex)).first->second;
}

std::uint32_t FiberMatcher::local_index(const Table& t, CellId vertex, CellId cell) const {
    std::uint32_t x = 0;
    for (std::size_t j = 0; j < t.free.size(); ++j) {
        if (complex_.digit(cell, t.free[j]) != complex_.digit(vertex, t.free[j])) x |= std::uint32_t{1} << j;
    }
    return x;
}

CellId FiberMatcher::global_id(const Table& t, CellId vertex, std::uint32_t local) const {
    CellId id = vertex;
    for (std::size_t j = 0; j < t.free.size(); ++j) {
        if (local & (std::uint32_t{1} << j)) id += complex_.weight(t.free[j]);
    }
    return id;
}

MateResult FiberMatcher::evaluate(CellId cell) const {
    if (!complex_.contains(cell)) {
        throw DomainError("mate: cell " + std::to_string(cell) + " is not a member of the complex");
    }
    const CellId vertex = complex_.fiber_vertex(cell);
    const Table& t = table(vertex);
    const std::uint32_t x = local_index(t, vertex, cell);
    return {global_id(t, vertex, t.partner[x]), t.index[x]};
}

void FiberMatcher::sweep(std::uint64_t begin, std::uint64_t end, std::vector<CellId>& out) const {
    const unsigned d = complex_.ambient_dim();
    const std::uint64_t base = complex_.m() + 1;
    for (std::uint64_t v = begin; v < end; ++v) {
        CellId vertex = 0;
        std::uint64_t rest = v;
        for (unsigned i = 0; i < d; ++i) {
            vertex += 2 * (rest % base) * complex_.weight(i);
            rest /= base;
        }
        if (!complex_.contains(vertex)) continue;
        const Table t = build(vertex);
        for (std::uint32_t x = 0; x < t.partner.size(); ++x) {
            if (t.member[x] && t.partner[x] == x) out.push_back(global_id(t, vertex, x));
        }
    }
}

std::vector<CellId> FiberMatcher::critical_cells(unsigned threads) const {
    std::vector<CellId> out;
    if (complex_.kind() == cubical::Kind::Closure) {
        std::vector<CellId> vertices;
        complex_.for_each_cell([&](CellId c) {
            if (complex_.dim(c) == 0) vertices.push_back(c);
        });
        for (CellId vertex : vertices) {
            const Table t = build(vertex);
            for (std::uint32_t x = 0; x < t.partner.size(); ++x) {
                if (t.member[x] && t.partner[x] == x) out.push_back(global_id(t, vertex, x));
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }

    std::uint64_t fibers = 1;
    for (unsigned i = 0; i < complex_.ambient_dim(); ++i) fibers *= complex_.m() + 1;
    threads = std::max(1U, threads);
    if (threads == 1 || fibers < 2 * threads) {
        sweep(0, fibers, out);
    } else {
        std::vector<std::vector<CellId>> parts(threads);
        std::vector<std::thread> pool;
        const std::uint64_t chunk = (fibers + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::uint64_t b = std::min<std::uint64_t>(fibers, t * chunk);
            const std::uint64_t e = std::min<std::uint64_t>(fibers, b + chunk);
            pool.emplace_back([this, b, e, &parts, t] { sweep(b, e, parts[t]); });
        }
        for (auto& th : pool) th.join();
        for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

MatchingSequence FiberMatcher::sequence() const {
    std::vector<MatchFn> entries;
    for (unsigned i = 1; i <= complex_.ambient_dim(); ++i) {
        if (grading_) {
            entries.emplace_back([this, i](CellId c) { return complex_.beta(i, c, grading_); });
        } else {
            entries.emplace_back([this, i](CellId c) { return complex_.alpha(i, c); });
        }
    }
    return MatchingSequence(std::move(entries));
}

MatchingOracle FiberMatcher::oracle() const {
    return {[this](CellId c) { return mate(c); }, [this](CellId c) { return evaluate(c).index; }};
}

}  // namespace cubemorse::matching
