#include "cubemorse/morse.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

#include "cubemorse/fiber_mate.hpp"

namespace cubemorse::morse {

namespace {

// Sorts and cancels repeated entries in pairs (Z2 sum of unit vectors).
void normalize(std::vector<std::uint32_t>& v) {
    std::sort(v.begin(), v.end());
    std::size_t out = 0;
    for (std::size_t i = 0; i < v.size();) {
        std::size_t j = i;
        while (j < v.size() && v[j] == v[i]) ++j;
        if ((j - i) % 2 == 1) v[out++] = v[i];
        i = j;
    }
    v.resize(out);
}

class FlowSolver {
public:
    FlowSolver(const CellComplex& complex, const matching::MatchFn& mate, std::span<const CellId> critical)
        : complex_(complex), mate_(mate) {
        index_.reserve(critical.size());
        for (std::size_t k = 0; k < critical.size(); ++k) {
            index_.emplace(critical[k], static_cast<std::uint32_t>(k));
        }
    }

    std::vector<std::uint32_t> boundary_of(CellId cell) {
        std::vector<std::uint32_t> acc;
        std::vector<CellId> faces;
        complex_.faces(cell, faces);
        for (CellId f : faces) absorb(f, acc);
        normalize(acc);
        return acc;
    }

private:
    struct Memo {
        bool done = false;
        std::vector<std::uint32_t> value;
    };

    struct Frame {
        CellId lower;
        std::vector<CellId> faces;
        std::size_t next = 0;
        std::vector<std::uint32_t> acc;
    };

    enum class Role { Critical, Lower, Upper };

    Role role(CellId f, std::uint32_t* crit) const {
        if (auto it = index_.find(f); it != index_.end()) {
            *crit = it->second;
            return Role::Critical;
        }
        const CellId p = mate_(f);
        if (p == f) {
            throw IntegrityError("morse_complex: cell " + std::to_string(f) + " is fixed but not listed as critical");
        }
        return complex_.dim(p) > complex_.dim(f) ? Role::Lower : Role::Upper;
    }

    // Adds the contribution of face f (of some cell being expanded) to acc.
    void absorb(CellId f, std::vector<std::uint32_t>& acc) {
        std::uint32_t crit = 0;
        switch (role(f, &crit)) {
            case Role::Critical: acc.push_back(crit); return;
            case Role::Upper: return;
            case Role::Lower: {
                const auto& v = flow(f);
                acc.insert(acc.end(), v.begin(), v.end());
                return;
            }
        }
    }

    void push(CellId lower) {
        memo_[lower];  // present but not done: on the active path
        Frame fr;
        fr.lower = lower;
        complex_.faces(mate_(lower), fr.faces);
        stack_.push_back(std::move(fr));
    }

    const std::vector<std::uint32_t>& flow(CellId start) {
        if (auto it = memo_.find(start); it != memo_.end()) {
            if (!it->second.done) throw AcyclicityError("flowline cycle through cell " + std::to_string(start));
            return it->second.value;
        }
        push(start);
        while (!stack_.empty()) {
            Frame& fr = stack_.back();
            if (fr.next < fr.faces.size()) {
                const CellId f = fr.faces[fr.next++];
                if (f == fr.lower) continue;
                std::uint32_t crit = 0;
                const Role r = role(f, &crit);
                if (r == Role::Critical) {
                    fr.acc.push_back(crit);
                } else if (r == Role::Lower) {
                    auto it = memo_.find(f);
                    if (it == memo_.end()) {
                        push(f);
                    } else if (!it->second.done) {
                        throw AcyclicityError("flowline cycle through cell " + std::to_string(f));
                    } else {
                        fr.acc.insert(fr.acc.end(), it->second.value.begin(), it->second.value.end());
                    }
                }
                continue;
            }
            normalize(fr.acc);
            Memo& m = memo_[fr.lower];
            m.done = true;
            m.value = std::move(fr.acc);
            stack_.pop_back();
            if (!stack_.empty()) {
                auto& parent = stack_.back().acc;
                parent.insert(parent.end(), m.value.begin(), m.value.end());
            }
        }
        return memo_.at(start).value;
    }

    const CellComplex& complex_;
    const matching::MatchFn& mate_;
    std::unordered_map<CellId, std::uint32_t> index_;
    std::unordered_map<CellId, Memo> memo_;
    std::vector<Frame> stack_;
};

std::vector<std::uint64_t> trimmed_betti(const ExplicitComplex& reduced) {
    auto counts = reduced.count_by_dim();
    while (counts.size() > 1 && counts.back() == 0) counts.pop_back();
    if (counts.empty()) counts.push_back(0);
    return counts;
}

bool is_identity(const std::vector<std::uint32_t>& partner) {
    for (std::size_t k = 0; k < partner.size(); ++k) {
        if (partner[k] != k) return false;
    }
    return true;
}

void assert_chain_complex(const ExplicitComplex& c, unsigned round) {
    if (!c.boundary_squares_to_zero()) {
        throw IntegrityError("round " + std::to_string(round) + " produced a boundary that does not square to zero");
    }
}

}  // namespace

ExplicitComplex morse_complex(const CellComplex& complex, const matching::MatchFn& mate,
                              std::span<const CellId> critical, const GradeFn& grade) {
    FlowSolver solver(complex, mate, critical);
    std::vector<ExplicitCell> cells;
    std::vector<std::vector<std::uint32_t>> boundary;
    cells.reserve(critical.size());
    boundary.reserve(critical.size());
    for (CellId c : critical) {
        ExplicitCell cell{complex.external_ref(c), complex.dim(c), std::nullopt};
        if (grade) cell.grade = grade(c);
        cells.push_back(cell);
        boundary.push_back(solver.boundary_of(c));
    }
    return ExplicitComplex(std::move(cells), std::move(boundary));
}

ExplicitComplex morse_complex(const CellComplex& complex, const matching::MatchFn& mate, const GradeFn& grade,
                              std::uint64_t limit) {
    std::vector<CellId> critical;
    for (CellId c : complex.cells(limit)) {
        if (mate(c) == c) critical.push_back(c);
    }
    return morse_complex(complex, mate, critical, grade);
}

std::vector<std::uint32_t> generic_round(const ExplicitComplex& complex, bool graded) {
    const auto n = static_cast<std::uint32_t>(complex.cell_count());
    std::vector<std::uint32_t> partner(n);
    for (std::uint32_t k = 0; k < n; ++k) partner[k] = k;
    if (graded && n > 0 && !complex.graded()) throw DomainError("generic_round: complex carries no grades");

    auto eligible = [&](std::uint32_t a, std::uint32_t b) {
        return !graded || complex.cell(a).grade == complex.cell(b).grade;
    };

    std::vector<char> removed(n, 0);
    std::vector<std::uint32_t> remaining(n, 0);
    std::vector<std::vector<std::uint32_t>> cofaces(n);
    for (std::uint32_t k = 0; k < n; ++k) {
        for (std::uint32_t f : complex.face_indices(k)) {
            if (!eligible(k, f)) continue;
            ++remaining[k];
            cofaces[f].push_back(k);
        }
    }

    std::deque<std::uint32_t> queue;
    for (std::uint32_t k = 0; k < n; ++k) {
        if (remaining[k] == 1) queue.push_back(k);
    }
    auto remove = [&](std::uint32_t c) {
        removed[c] = 1;
        for (std::uint32_t g : cofaces[c]) {
            if (!removed[g] && --remaining[g] == 1) queue.push_back(g);
        }
    };

    std::vector<std::uint32_t> order(n);
    for (std::uint32_t k = 0; k < n; ++k) order[k] = k;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return complex.cell(a).dim < complex.cell(b).dim; });

    std::size_t pairs = 0;
    std::size_t cursor = 0;
    while (true) {
        while (!queue.empty()) {
            const std::uint32_t c = queue.front();
            queue.pop_front();
            if (removed[c] || remaining[c] != 1) continue;
            std::uint32_t face = n;
            for (std::uint32_t f : complex.face_indices(c)) {
                if (!removed[f] && eligible(c, f)) {
                    face = f;
                    break;
                }
            }
            if (face == n) continue;
            partner[c] = face;
            partner[face] = c;
            ++pairs;
            remove(face);
            remove(c);
        }
        while (cursor < n && removed[order[cursor]]) ++cursor;
        if (cursor == n) break;
        remove(order[cursor]);  // critical
    }

    if (pairs == 0) {
        for (std::uint32_t k = 0; k < n; ++k) {
            for (std::uint32_t f : complex.face_indices(k)) {
                if (eligible(k, f)) {
                    partner[k] = f;
                    partner[f] = k;
                    return partner;
                }
            }
        }
    }
    return partner;
}

ExplicitComplex reduce(const ExplicitComplex& complex, const std::vector<std::uint32_t>& partner) {
    if (partner.size() != complex.cell_count()) throw DomainError("reduce: matching size mismatch");
    std::vector<CellId> critical;
    for (std::uint32_t k = 0; k < partner.size(); ++k) {
        if (partner[k] == k) critical.push_back(k);
    }
    const matching::MatchFn mate = [&partner](CellId c) { return static_cast<CellId>(partner.at(c)); };
    GradeFn grade;
    if (complex.graded()) grade = [&complex](CellId c) { return complex.cell(c).grade; };
    return morse_complex(complex, mate, critical, grade);
}

HomologyResult homology(const cubical::CubicalComplex& complex, unsigned threads) {
    HomologyResult result;
    result.cell_count = complex.cell_count();
    matching::FiberMatcher matcher(complex);
    const auto critical = matcher.critical_cells(threads);
    const matching::MatchFn mate = [&matcher](CellId c) { return matcher.mate(c); };
    ExplicitComplex current = morse_complex(complex, mate, critical);
    assert_chain_complex(current, 1);
    result.rounds = 1;
    result.round_sizes.push_back(current.cell_count());
    while (current.boundary_entry_count() > 0) {
        const auto partner = generic_round(current, false);
        if (is_identity(partner)) throw IntegrityError("homology: a round made no progress on a nonzero boundary");
        current = reduce(current, partner);
        ++result.rounds;
        assert_chain_complex(current, result.rounds);
        result.round_sizes.push_back(current.cell_count());
    }
    result.betti = trimmed_betti(current);
    result.reduced = std::move(current);
    return result;
}

HomologyResult homology(const ExplicitComplex& complex) {
    HomologyResult result;
    result.cell_count = complex.cell_count();
    ExplicitComplex current = complex;
    while (current.boundary_entry_count() > 0) {
        const auto partner = generic_round(current, false);
        if (is_identity(partner)) throw IntegrityError("homology: a round made no progress on a nonzero boundary");
        current = reduce(current, partner);
        ++result.rounds;
        assert_chain_complex(current, result.rounds);
        result.round_sizes.push_back(current.cell_count());
    }
    result.betti = trimmed_betti(current);
    result.reduced = std::move(current);
    return result;
}

void check_filtered(const ExplicitComplex& complex, const GradeOrder& order, bool strict) {
    for (std::size_t k = 0; k < complex.cell_count(); ++k) {
        const auto& cell = complex.cell(k);
        if (!cell.grade) throw DomainError("check_filtered: cell " + std::to_string(cell.ref) + " has no grade");
        for (std::uint32_t f : complex.face_indices(k)) {
            const auto& face = complex.cell(f);
            if (!face.grade) throw DomainError("check_filtered: cell " + std::to_string(face.ref) + " has no grade");
            const bool ok = order.leq(*face.grade, *cell.grade) && (!strict || *face.grade != *cell.grade);
            if (!ok) {
                throw DomainError("grading violation: face " + std::to_string(face.ref) + " (grade " +
                                  std::to_string(*face.grade) + ") of cell " + std::to_string(cell.ref) + " (grade " +
                                  std::to_string(*cell.grade) + ")");
            }
        }
    }
}

bool has_same_grade_entry(const ExplicitComplex& complex) {
    for (std::size_t k = 0; k < complex.cell_count(); ++k) {
        for (std::uint32_t f : complex.face_indices(k)) {
            if (complex.cell(f).grade == complex.cell(k).grade) return true;
        }
    }
    return false;
}

ConleyResult connection_matrix(const cubical::CubicalComplex& complex,
                               const std::function<GradeId(CellId)>& grading, const GradeOrder& order) {
    ConleyResult result;
    matching::FiberMatcher matcher(complex, grading);
    const auto critical = matcher.critical_cells(1);
    const matching::MatchFn mate = [&matcher](CellId c) { return matcher.mate(c); };
    const GradeFn grade = [&grading](CellId c) { return std::optional<GradeId>(grading(c)); };
    result.first_round = morse_complex(complex, mate, critical, grade);
    assert_chain_complex(result.first_round, 1);
    check_filtered(result.first_round, order);
    result.tower = 1;
    result.round_sizes.push_back(result.first_round.cell_count());

    ExplicitComplex current = result.first_round;
    while (has_same_grade_entry(current)) {
        const auto partner = generic_round(current, true);
        if (is_identity(partner)) throw IntegrityError("connection_matrix: a round made no progress");
        current = reduce(current, partner);
        ++result.tower;
        assert_chain_complex(current, result.tower);
        check_filtered(current, order);
        result.round_sizes.push_back(current.cell_count());
    }
    result.conley = std::move(current);
    return result;
}

ConleyResult connection_matrix(const ExplicitComplex& graded, const GradeOrder& order) {
    ConleyResult result;
    check_filtered(graded, order);
    result.first_round = graded;
    ExplicitComplex current = graded;
    while (has_same_grade_entry(current)) {
        const auto partner = generic_round(current, true);
        if (is_identity(partner)) throw IntegrityError("connection_matrix: a round made no progress");
        current = reduce(current, partner);
        ++result.tower;
        assert_chain_complex(current, result.tower);
        check_filtered(current, order);
        result.round_sizes.push_back(current.cell_count());
    }
    result.conley = std::move(current);
    return result;
}

std::map<GradeId, std::int64_t> euler_by_grade(const ExplicitComplex& complex) {
    std::map<GradeId, std::int64_t> chi;
    for (const auto& c : complex.cell_data()) {
        if (!c.grade) throw DomainError("euler_by_grade: ungraded cell");
        chi[*c.grade] += (c.dim % 2 == 0) ? 1 : -1;
    }
    return chi;
}

std::map<std::pair<GradeId, unsigned>, std::uint64_t> count_by_grade_dim(const ExplicitComplex& complex) {
    std::map<std::pair<GradeId, unsigned>, std::uint64_t> counts;
    for (const auto& c : complex.cell_data()) {
        if (!c.grade) throw DomainError("count_by_grade_dim: ungraded cell");
        ++counts[{*c.grade, c.dim}];
    }
    return counts;
}

}  // namespace cubemorse::morse
