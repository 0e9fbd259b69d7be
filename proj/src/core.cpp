#include "cubemorse/core.hpp"

#include <algorithm>
#include <unordered_map>

namespace cubemorse {

std::vector<Incidence> CellComplex::boundary(CellId cell) const {
    if (!contains(cell)) {
        throw DomainError("boundary: cell " + std::to_string(cell) + " is not a member of the complex");
    }
    std::vector<CellId> buf;
    faces(cell, buf);
    std::vector<Incidence> out;
    out.reserve(buf.size());
    for (CellId f : buf) out.push_back({f, Z2::one()});
    return out;
}

std::vector<Incidence> CellComplex::coboundary(CellId cell) const {
    if (!contains(cell)) {
        throw DomainError("coboundary: cell " + std::to_string(cell) + " is not a member of the complex");
    }
    std::vector<CellId> buf;
    cofaces(cell, buf);
    std::vector<Incidence> out;
    out.reserve(buf.size());
    for (CellId f : buf) out.push_back({f, Z2::one()});
    return out;
}

std::vector<CellId> CellComplex::cells(std::uint64_t limit) const {
    const std::uint64_t n = cell_count();
    if (n > limit) {
        throw SizeGuardError("complex has " + std::to_string(n) + " cells, above the enumeration limit of " +
                                 std::to_string(limit),
                             n, limit);
    }
    std::vector<CellId> out;
    out.reserve(n);
    for_each_cell([&](CellId c) { out.push_back(c); });
    return out;
}

// ---------------------------------------------------------------------------
// ExplicitComplex

ExplicitComplex::ExplicitComplex(std::vector<ExplicitCell> cells,
                                 std::vector<std::vector<std::uint32_t>> boundary)
    : cells_(std::move(cells)), faces_(std::move(boundary)) {
    if (faces_.size() != cells_.size()) {
        throw DomainError("explicit complex: boundary list size does not match cell count");
    }
    cofaces_.assign(cells_.size(), {});
    for (std::size_t k = 0; k < faces_.size(); ++k) {
        auto& col = faces_[k];
        std::sort(col.begin(), col.end());
        // Repeated entries cancel in pairs.
        std::vector<std::uint32_t> reduced;
        for (std::size_t i = 0; i < col.size();) {
            std::size_t j = i;
            while (j < col.size() && col[j] == col[i]) ++j;
            if ((j - i) % 2 == 1) reduced.push_back(col[i]);
            i = j;
        }
        col = std::move(reduced);
        for (std::uint32_t f : col) {
            if (f >= cells_.size()) throw DomainError("explicit complex: face index out of range");
            cofaces_[f].push_back(static_cast<std::uint32_t>(k));
        }
    }
}

unsigned ExplicitComplex::dim(CellId cell) const { return cells_.at(cell).dim; }

void ExplicitComplex::faces(CellId cell, std::vector<CellId>& out) const {
    out.clear();
    for (std::uint32_t f : faces_.at(cell)) out.push_back(f);
}

void ExplicitComplex::cofaces(CellId cell, std::vector<CellId>& out) const {
    out.clear();
    for (std::uint32_t f : cofaces_.at(cell)) out.push_back(f);
}

void ExplicitComplex::for_each_cell(const std::function<void(CellId)>& visit) const {
    for (std::size_t k = 0; k < cells_.size(); ++k) visit(k);
}

std::size_t ExplicitComplex::boundary_entry_count() const {
    std::size_t n = 0;
    for (const auto& col : faces_) n += col.size();
    return n;
}

bool ExplicitComplex::graded() const {
    return !cells_.empty() && std::all_of(cells_.begin(), cells_.end(),
                                          [](const ExplicitCell& c) { return c.grade.has_value(); });
}

unsigned ExplicitComplex::top_dim() const {
    unsigned top = 0;
    for (const auto& c : cells_) top = std::max(top, c.dim);
    return top;
}

std::vector<std::uint64_t> ExplicitComplex::count_by_dim() const {
    if (cells_.empty()) return {};
    std::vector<std::uint64_t> counts(top_dim() + 1, 0);
    for (const auto& c : cells_) ++counts[c.dim];
    return counts;
}

std::int64_t ExplicitComplex::euler_characteristic() const {
    std::int64_t chi = 0;
    for (const auto& c : cells_) chi += (c.dim % 2 == 0) ? 1 : -1;
    return chi;
}

bool ExplicitComplex::boundary_squares_to_zero() const {
    std::vector<std::uint32_t> acc;
    for (std::size_t k = 0; k < cells_.size(); ++k) {
        acc.clear();
        for (std::uint32_t f : faces_[k]) {
            acc.insert(acc.end(), faces_[f].begin(), faces_[f].end());
        }
        std::sort(acc.begin(), acc.end());
        for (std::size_t i = 0; i < acc.size();) {
            std::size_t j = i;
            while (j < acc.size() && acc[j] == acc[i]) ++j;
            if ((j - i) % 2 == 1) return false;
            i = j;
        }
    }
    return true;
}

ExplicitComplex materialize(const CellComplex& complex,
                            const std::function<std::optional<GradeId>(CellId)>& grade,
                            std::uint64_t limit) {
    const auto ids = complex.cells(limit);
    std::unordered_map<CellId, std::uint32_t> index;
    index.reserve(ids.size());
    for (std::size_t k = 0; k < ids.size(); ++k) index.emplace(ids[k], static_cast<std::uint32_t>(k));

    std::vector<ExplicitCell> cells;
    std::vector<std::vector<std::uint32_t>> bd(ids.size());
    cells.reserve(ids.size());
    std::vector<CellId> buf;
    for (std::size_t k = 0; k < ids.size(); ++k) {
        ExplicitCell cell{complex.external_ref(ids[k]), complex.dim(ids[k]), std::nullopt};
        if (grade) cell.grade = grade(ids[k]);
        cells.push_back(cell);
        complex.faces(ids[k], buf);
        for (CellId f : buf) {
            auto it = index.find(f);
            if (it == index.end()) {
                throw DomainError("materialize: face " + std::to_string(f) + " of cell " + std::to_string(ids[k]) +
                                  " is not a member");
            }
            bd[k].push_back(it->second);
        }
    }
    return ExplicitComplex(std::move(cells), std::move(bd));
}

// ---------------------------------------------------------------------------
// Validation

const char* to_string(ComplexViolation::Kind kind) {
    switch (kind) {
        case ComplexViolation::Kind::NotFaceClosed: return "not_face_closed";
        case ComplexViolation::Kind::WrongFaceDimension: return "wrong_face_dimension";
        case ComplexViolation::Kind::BoundarySquareNonzero: return "boundary_square_nonzero";
        case ComplexViolation::Kind::DimensionOrder: return "dimension_order";
    }
    return "unknown";
}

ValidationReport validate_complex(const CellComplex& complex, std::uint64_t limit) {
    const std::uint64_t n = complex.cell_count();
    if (n > limit) {
        throw SizeGuardError("validate_complex: " + std::to_string(n) + " cells exceeds limit " +
                                 std::to_string(limit),
                             n, limit);
    }
    ValidationReport report;
    std::vector<CellId> faces;
    std::vector<CellId> second;
    std::vector<CellId> acc;
    complex.for_each_cell([&](CellId cell) {
        ++report.cells_checked;
        const unsigned d = complex.dim(cell);
        complex.faces(cell, faces);
        acc.clear();
        for (CellId f : faces) {
            if (!complex.contains(f)) {
                report.violations.push_back({ComplexViolation::Kind::NotFaceClosed, cell, f,
                                             "face " + std::to_string(f) + " of " + std::to_string(cell) +
                                                 " is not a member"});
                continue;
            }
            const unsigned fd = complex.dim(f);
            if (fd >= d) {
                report.violations.push_back({ComplexViolation::Kind::DimensionOrder, cell, f,
                                             "face " + std::to_string(f) + " does not have lower dimension"});
            } else if (fd + 1 != d) {
                report.violations.push_back({ComplexViolation::Kind::WrongFaceDimension, cell, f,
                                             "face " + std::to_string(f) + " is not of codimension one"});
            }
            complex.faces(f, second);
            acc.insert(acc.end(), second.begin(), second.end());
        }
        std::sort(acc.begin(), acc.end());
        for (std::size_t i = 0; i < acc.size();) {
            std::size_t j = i;
            while (j < acc.size() && acc[j] == acc[i]) ++j;
            if ((j - i) % 2 == 1) {
                report.violations.push_back({ComplexViolation::Kind::BoundarySquareNonzero, cell, acc[i],
                                             "boundary of boundary of " + std::to_string(cell) +
                                                 " has nonzero coefficient on " + std::to_string(acc[i])});
            }
            i = j;
        }
    });
    return report;
}

// ---------------------------------------------------------------------------
// Betti oracle

namespace {

// Rank of a set of sparse Z2 columns via pivot-driven column reduction.
std::uint64_t z2_rank(std::vector<std::vector<std::uint32_t>> columns) {
    std::unordered_map<std::uint32_t, std::size_t> pivot_owner;
    std::uint64_t rank = 0;
    std::vector<std::uint32_t> tmp;
    for (std::size_t c = 0; c < columns.size(); ++c) {
        auto& col = columns[c];
        std::sort(col.begin(), col.end());
        while (!col.empty()) {
            auto it = pivot_owner.find(col.back());
            if (it == pivot_owner.end()) break;
            const auto& other = columns[it->second];
            tmp.clear();
            std::set_symmetric_difference(col.begin(), col.end(), other.begin(), other.end(),
                                          std::back_inserter(tmp));
            col.swap(tmp);
        }
        if (!col.empty()) {
            pivot_owner.emplace(col.back(), c);
            ++rank;
        }
    }
    return rank;
}

}  // namespace

std::vector<std::uint64_t> betti_oracle(const ExplicitComplex& complex) {
    if (!complex.boundary_squares_to_zero()) {
        throw DomainError("betti_oracle: boundary operator does not square to zero");
    }
    if (complex.cell_count() == 0) return {};
    const unsigned top = complex.top_dim();
    std::vector<std::vector<std::vector<std::uint32_t>>> by_dim(top + 1);
    std::vector<std::uint64_t> counts(top + 1, 0);
    for (std::size_t k = 0; k < complex.cell_count(); ++k) {
        const unsigned d = complex.cell(k).dim;
        ++counts[d];
        auto f = complex.face_indices(k);
        by_dim[d].emplace_back(f.begin(), f.end());
    }
    std::vector<std::uint64_t> rank(top + 2, 0);
    for (unsigned d = 1; d <= top; ++d) rank[d] = z2_rank(std::move(by_dim[d]));
    std::vector<std::uint64_t> betti(top + 1, 0);
    for (unsigned d = 0; d <= top; ++d) betti[d] = counts[d] - rank[d] - rank[d + 1];
    return betti;
}

}  // namespace cubemorse
