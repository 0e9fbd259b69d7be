#include "cubemorse/matching.hpp"

#include <algorithm>

namespace cubemorse::matching {

Mate::Mate(MatchingSequence sequence, bool memoize, std::size_t cache_limit)
    : sequence_(std::move(sequence)), memoize_(memoize), cache_limit_(cache_limit) {}

MateResult Mate::evaluate(CellId cell) const { return helper(cell, sequence_.size()); }

MateResult Mate::helper(CellId cell, std::size_t level) const {
    if (level == 0) return {cell, 0};

    std::vector<std::optional<MateResult>>* slot = nullptr;
    if (memoize_) {
        if (cache_.size() > cache_limit_) cache_.clear();
        auto& row = cache_[cell];
        if (row.empty()) row.resize(sequence_.size() + 1);
        if (row[level]) return *row[level];
        slot = &row;
    }

    MateResult result = helper(cell, level - 1);
    if (result.partner == cell) {
        const CellId other = sequence_.apply(level, cell);
        if (other != cell) {
            if (sequence_.apply(level, other) != cell) {
                throw ContractError("matching sequence entry " + std::to_string(level) +
                                    " is not an involution at cell " + std::to_string(cell));
            }
            if (helper(other, level - 1).partner == other) {
                result = {other, static_cast<unsigned>(level)};
            }
        }
    }
    // The recursion above may have cleared the cache; look the row up again.
    if (slot != nullptr) {
        auto& row = cache_[cell];
        if (row.empty()) row.resize(sequence_.size() + 1);
        row[level] = result;
    }
    return result;
}

MatchingOracle make_oracle(const Mate& mate) {
    return {[&mate](CellId c) { return mate(c); }, [&mate](CellId c) { return mate.evaluate(c).index; }};
}

MatchingOracle identity_oracle() {
    return {[](CellId c) { return c; }, [](CellId) { return 0U; }};
}

const char* to_string(CellClass c) {
    switch (c) {
        case CellClass::Critical: return "A";
        case CellClass::Lower: return "Q";
        case CellClass::Upper: return "K";
    }
    return "?";
}

namespace {

bool is_face(const CellComplex& complex, CellId face, CellId cell, std::vector<CellId>& buf) {
    complex.faces(cell, buf);
    return std::binary_search(buf.begin(), buf.end(), face);
}

}  // namespace

CellClass classify(const CellComplex& complex, CellId cell, const MatchingOracle& oracle) {
    const CellId partner = oracle.mate(cell);
    if (partner == cell) return CellClass::Critical;
    std::vector<CellId> buf;
    if (is_face(complex, cell, partner, buf)) return CellClass::Lower;
    if (is_face(complex, partner, cell, buf)) return CellClass::Upper;
    throw ContractError("incidence trichotomy violated: cell " + std::to_string(cell) + " matched with " +
                        std::to_string(partner));
}

MatchingReport verify_matching(const CellComplex& complex, const MatchingOracle& oracle, std::uint64_t limit) {
    if (complex.cell_count() > limit) {
        throw SizeGuardError("verify_matching: complex too large to enumerate", complex.cell_count(), limit);
    }
    MatchingReport report;
    std::vector<CellId> buf;
    complex.for_each_cell([&](CellId cell) {
        const CellId partner = oracle.mate(cell);
        if (partner == cell) {
            ++report.critical;
            return;
        }
        if (!complex.contains(partner)) {
            report.violations.push_back({MatchingViolation::Kind::PartnerNotMember, cell, partner});
            return;
        }
        if (oracle.mate(partner) != cell) {
            report.violations.push_back({MatchingViolation::Kind::NotInvolution, cell, partner});
            return;
        }
        if (is_face(complex, cell, partner, buf)) {
            ++report.lower;
        } else if (is_face(complex, partner, cell, buf)) {
            ++report.upper;
        } else {
            report.violations.push_back({MatchingViolation::Kind::NotIncident, cell, partner});
        }
    });
    return report;
}

bool verify_acyclic(const CellComplex& complex, const MatchingOracle& oracle, std::uint64_t limit) {
    if (complex.cell_count() > limit) {
        throw SizeGuardError("verify_acyclic: complex too large to enumerate", complex.cell_count(), limit);
    }
    const auto cells = complex.cells(limit);
    std::unordered_map<CellId, std::uint32_t> index;
    for (std::size_t k = 0; k < cells.size(); ++k) index.emplace(cells[k], static_cast<std::uint32_t>(k));

    // Only Q cells (lower partners) take part in the relation.
    std::vector<char> lower(cells.size(), 0);
    for (std::size_t k = 0; k < cells.size(); ++k) {
        const CellId p = oracle.mate(cells[k]);
        if (p != cells[k] && complex.dim(p) > complex.dim(cells[k])) lower[k] = 1;
    }

    // successors(q0) = Q faces of w(q0) other than q0.
    std::vector<std::vector<std::uint32_t>> succ(cells.size());
    std::vector<CellId> buf;
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (!lower[k]) continue;
        complex.faces(oracle.mate(cells[k]), buf);
        for (CellId f : buf) {
            if (f == cells[k]) continue;
            auto it = index.find(f);
            if (it != index.end() && lower[it->second]) succ[k].push_back(it->second);
        }
    }

    enum : char { White, Grey, Black };
    std::vector<char> color(cells.size(), White);
    std::vector<std::pair<std::uint32_t, std::size_t>> stack;
    for (std::size_t root = 0; root < cells.size(); ++root) {
        if (!lower[root] || color[root] != White) continue;
        stack.emplace_back(static_cast<std::uint32_t>(root), 0);
        color[root] = Grey;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next < succ[v].size()) {
                const std::uint32_t w = succ[v][next++];
                if (color[w] == Grey) return false;
                if (color[w] == White) {
                    color[w] = Grey;
                    stack.emplace_back(w, 0);
                }
            } else {
                color[v] = Black;
                stack.pop_back();
            }
        }
    }
    return true;
}

std::optional<UnstablePair> find_unstable_pair(const CellComplex& complex, const MatchingOracle& oracle,
                                               const MatchingSequence& sequence, std::uint64_t limit) {
    if (!oracle.provenance) throw DomainError("verify_stable: oracle has no provenance");
    if (complex.cell_count() > limit) {
        throw SizeGuardError("verify_stable: complex too large to enumerate", complex.cell_count(), limit);
    }
    std::optional<UnstablePair> found;
    std::vector<CellId> buf;
    complex.for_each_cell([&](CellId xi0) {
        if (found) return;
        const CellId up = oracle.mate(xi0);
        if (up == xi0 || complex.dim(up) < complex.dim(xi0)) return;
        const unsigned j = oracle.provenance(xi0);
        complex.faces(up, buf);
        for (CellId xi1 : buf) {
            if (xi1 == xi0) continue;
            const CellId up1 = oracle.mate(xi1);
            if (up1 == xi1 || complex.dim(up1) < complex.dim(xi1)) continue;
            const unsigned j1 = oracle.provenance(xi1);
            const unsigned bound = std::min(j, j1);
            for (unsigned i = 1; i < bound; ++i) {
                if (sequence.apply(i, xi1) == up) {
                    found = UnstablePair{xi0, xi1, i};
                    return;
                }
            }
        }
    });
    return found;
}

bool verify_stable(const CellComplex& complex, const MatchingOracle& oracle, const MatchingSequence& sequence,
                   std::uint64_t limit) {
    return !find_unstable_pair(complex, oracle, sequence, limit).has_value();
}

}  // namespace cubemorse::matching
