#include "cubemorse/cubical.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>
#include <unordered_set>

namespace cubemorse::cubical {

namespace {

std::uint64_t checked_pow(std::uint64_t base, unsigned exp) {
    std::uint64_t r = 1;
    for (unsigned k = 0; k < exp; ++k) {
        if (r > std::numeric_limits<std::uint64_t>::max() / base) {
            throw DomainError("cubical: id space does not fit in 64 bits");
        }
        r *= base;
    }
    return r;
}

}  // namespace

// ---------------------------------------------------------------------------
// CubeCell

CubeCell::CubeCell(std::span<const std::uint32_t> digits) {
    if (digits.size() > kMaxDim) throw DomainError("CubeCell: too many coordinates");
    std::copy(digits.begin(), digits.end(), digits_.begin());
    size_ = static_cast<unsigned>(digits.size());
}

CubeCell CubeCell::from_intervals(std::span<const std::int64_t> anchors, std::span<const int> extents) {
    if (anchors.size() != extents.size()) throw DomainError("CubeCell: anchors/extents size mismatch");
    std::vector<std::uint32_t> digits;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        if (anchors[i] < 0 || (extents[i] != 0 && extents[i] != 1)) {
            throw DomainError("CubeCell: negative anchor or extent not in {0,1}");
        }
        digits.push_back(static_cast<std::uint32_t>(2 * anchors[i] + extents[i]));
    }
    return CubeCell(digits);
}

unsigned CubeCell::dim() const {
    unsigned n = 0;
    for (unsigned i = 0; i < size_; ++i) n += digits_[i] & 1U;
    return n;
}

std::string CubeCell::to_string() const {
    std::string s;
    for (unsigned i = 0; i < size_; ++i) {
        if (i) s += 'x';
        const auto l = anchor(i);
        s += '[' + std::to_string(l) + ',' + std::to_string(l + extent(i)) + ']';
    }
    return s;
}

bool CubeCell::operator==(const CubeCell& o) const {
    return size_ == o.size_ && std::equal(digits_.begin(), digits_.begin() + size_, o.digits_.begin());
}

bool FiberGrade::leq(const FiberGrade& other) const {
    if (values.size() != other.values.size()) throw DomainError("FiberGrade: dimension mismatch");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] > other.values[i]) return false;
    }
    return true;
}

FiberGrade fiber_map(const CubeCell& cell) {
    FiberGrade g;
    g.values.reserve(cell.ambient_dim());
    for (unsigned i = 0; i < cell.ambient_dim(); ++i) g.values.push_back(-cell.anchor(i));
    return g;
}

hypercube::HCell fiber_embed(const CubeCell& cell) {
    const unsigned d = cell.ambient_dim();
    std::uint64_t bits = 0;
    for (unsigned i = 0; i < d; ++i) bits = (bits << 1) | cell.extent(i);
    return hypercube::HCell(bits, d);
}

const char* to_string(Kind kind) {
    switch (kind) {
        case Kind::Full: return "full";
        case Kind::Sphere: return "sphere";
        case Kind::TopSphere: return "top_sphere";
        case Kind::Closure: return "closure";
        case Kind::Braid: return "braid";
    }
    return "unknown";
}

std::uint64_t full_cell_count(std::uint32_t m, unsigned d) { return checked_pow(2ULL * m + 1, d); }
std::uint64_t sphere_cell_count(unsigned d) { return checked_pow(3, d + 1) - 1; }
std::uint64_t top_sphere_cell_count(unsigned d) { return checked_pow(7, d + 1) - 1; }

// ---------------------------------------------------------------------------
// CubicalComplex

CubicalComplex::CubicalComplex(Kind kind, std::uint32_t m, unsigned d) : kind_(kind), m_(m), d_(d) {
    if (d == 0 || d > kMaxDim) throw DomainError("cubical: dimension must be in 1..32");
    if (m == 0) throw DomainError("cubical: m must be at least 1");
    weights_[0] = 1;
    for (unsigned i = 0; i < d; ++i) {
        if (weights_[i] > std::numeric_limits<std::uint64_t>::max() / radix()) {
            throw DomainError("cubical: id space does not fit in 64 bits");
        }
        weights_[i + 1] = weights_[i] * radix();
    }
    id_space_ = weights_[d];
}

CubicalComplex CubicalComplex::full(std::uint32_t m, unsigned d) {
    CubicalComplex c(Kind::Full, m, d);
    c.count_ = c.id_space_;
    return c;
}

CubicalComplex CubicalComplex::braid_grid(std::uint32_t m, unsigned d) {
    CubicalComplex c(Kind::Braid, m, d);
    c.count_ = c.id_space_;
    return c;
}

CubicalComplex CubicalComplex::sphere(unsigned d) {
    if (d == 0) throw DomainError("sphere: d must be at least 1");
    CubicalComplex c(Kind::Sphere, 1, d + 1);
    c.count_ = sphere_cell_count(d);
    return c;
}

CubicalComplex CubicalComplex::top_sphere(unsigned d) {
    if (d == 0) throw DomainError("top_sphere: d must be at least 1");
    CubicalComplex c(Kind::TopSphere, 3, d + 1);
    c.count_ = top_sphere_cell_count(d);
    return c;
}

CubicalComplex CubicalComplex::closure(std::uint32_t m, unsigned d, const std::vector<CellId>& cells) {
    if (cells.empty()) throw DomainError("closure: empty cell list");
    CubicalComplex c(Kind::Closure, m, d);
    std::unordered_set<CellId> seen;
    std::vector<CellId> stack;
    for (CellId id : cells) {
        if (id >= c.id_space_) throw DomainError("closure: cell id " + std::to_string(id) + " out of range");
        if (seen.insert(id).second) stack.push_back(id);
    }
    while (!stack.empty()) {
        const CellId id = stack.back();
        stack.pop_back();
        for (unsigned i = 0; i < d; ++i) {
            const std::uint32_t dig = c.digit(id, i);
            if (dig % 2 == 0) continue;
            for (CellId f : {id - c.weights_[i], id + c.weights_[i]}) {
                if (seen.insert(f).second) stack.push_back(f);
            }
        }
        if (seen.size() > kClosureLimit) {
            throw SizeGuardError("closure: more than " + std::to_string(kClosureLimit) + " cells", seen.size(),
                                 kClosureLimit);
        }
    }
    c.members_.assign(seen.begin(), seen.end());
    std::sort(c.members_.begin(), c.members_.end());
    c.count_ = c.members_.size();
    return c;
}

CubicalComplex CubicalComplex::from_top_cells(std::uint32_t m, unsigned d,
                                              const std::vector<std::vector<std::int64_t>>& anchors) {
    if (anchors.empty()) throw DomainError("from_top_cells: empty top-cell list");
    CubicalComplex shape(Kind::Closure, m, d);
    std::vector<CellId> tops;
    tops.reserve(anchors.size());
    for (const auto& a : anchors) {
        if (a.size() != d) {
            throw DomainError("from_top_cells: anchor has " + std::to_string(a.size()) + " coordinates, expected " +
                              std::to_string(d));
        }
        CellId id = 0;
        for (unsigned i = 0; i < d; ++i) {
            if (a[i] < 0 || a[i] >= static_cast<std::int64_t>(m)) {
                throw DomainError("from_top_cells: anchor coordinate " + std::to_string(a[i]) + " outside [0," +
                                  std::to_string(m - 1) + "]");
            }
            id += static_cast<CellId>(2 * a[i] + 1) * shape.weights_[i];
        }
        tops.push_back(id);
    }
    return closure(m, d, tops);
}

CellId CubicalComplex::encode(const CubeCell& cell) const {
    if (cell.ambient_dim() != d_) throw DomainError("encode: ambient dimension mismatch");
    CellId id = 0;
    for (unsigned i = 0; i < d_; ++i) {
        if (cell.digit(i) > 2 * m_) throw DomainError("encode: digit out of range");
        id += cell.digit(i) * weights_[i];
    }
    return id;
}

CubeCell CubicalComplex::decode(CellId id) const {
    if (id >= id_space_) throw DomainError("decode: id " + std::to_string(id) + " out of range");
    std::array<std::uint32_t, kMaxDim> digits{};
    for (unsigned i = 0; i < d_; ++i) {
        digits[i] = static_cast<std::uint32_t>(id % radix());
        id /= radix();
    }
    return CubeCell(std::span<const std::uint32_t>(digits.data(), d_));
}

std::uint32_t CubicalComplex::digit(CellId id, unsigned i) const {
    return static_cast<std::uint32_t>((id / weights_[i]) % radix());
}

bool CubicalComplex::contains_digits(std::span<const std::uint32_t> digits) const {
    switch (kind_) {
        case Kind::Full:
        case Kind::Braid:
            return true;
        case Kind::Sphere:
            return std::any_of(digits.begin(), digits.end(), [](std::uint32_t c) { return c % 2 == 0; });
        case Kind::TopSphere:
            return std::any_of(digits.begin(), digits.end(), [](std::uint32_t c) { return c != 3; });
        case Kind::Closure: {
            CellId id = 0;
            for (unsigned i = 0; i < d_; ++i) id += digits[i] * weights_[i];
            return std::binary_search(members_.begin(), members_.end(), id);
        }
    }
    return false;
}

bool CubicalComplex::contains(CellId cell) const {
    if (cell >= id_space_) return false;
    switch (kind_) {
        case Kind::Full:
        case Kind::Braid:
            return true;
        case Kind::Closure:
            return std::binary_search(members_.begin(), members_.end(), cell);
        case Kind::Sphere:
            // Missing only the cells with every interval nondegenerate.
            for (unsigned i = 0; i < d_; ++i, cell /= radix()) {
                if ((cell % radix()) % 2 == 0) return true;
            }
            return false;
        case Kind::TopSphere:
            // Missing only the central cube, all digits equal to 3.
            for (unsigned i = 0; i < d_; ++i, cell /= radix()) {
                if (cell % radix() != 3) return true;
            }
            return false;
    }
    return false;
}

bool CubicalComplex::contains(const CubeCell& cell) const {
    if (cell.ambient_dim() != d_) return false;
    for (unsigned i = 0; i < d_; ++i) {
        if (cell.digit(i) > 2 * m_) return false;
    }
    return contains_digits(cell.digits());
}

unsigned CubicalComplex::dim(CellId cell) const {
    unsigned n = 0;
    for (unsigned i = 0; i < d_; ++i) {
        n += static_cast<unsigned>(cell % radix()) & 1U;
        cell /= radix();
    }
    return n;
}

void CubicalComplex::faces(CellId cell, std::vector<CellId>& out) const {
    out.clear();
    CellId rest = cell;
    for (unsigned i = 0; i < d_; ++i) {
        const auto c = rest % radix();
        rest /= radix();
        if (c % 2 == 0) continue;
        if (contains(cell - weights_[i])) out.push_back(cell - weights_[i]);
        if (contains(cell + weights_[i])) out.push_back(cell + weights_[i]);
    }
    std::sort(out.begin(), out.end());
}

void CubicalComplex::cofaces(CellId cell, std::vector<CellId>& out) const {
    out.clear();
    CellId rest = cell;
    for (unsigned i = 0; i < d_; ++i) {
        const auto c = rest % radix();
        rest /= radix();
        if (c % 2 == 1) continue;
        if (c > 0 && contains(cell - weights_[i])) out.push_back(cell - weights_[i]);
        if (c < 2 * m_ && contains(cell + weights_[i])) out.push_back(cell + weights_[i]);
    }
    std::sort(out.begin(), out.end());
}

void CubicalComplex::for_each_cell(const std::function<void(CellId)>& visit) const {
    if (kind_ == Kind::Closure) {
        for (CellId id : members_) visit(id);
        return;
    }
    std::array<std::uint32_t, kMaxDim> digits{};
    const std::uint32_t top = 2 * m_;
    for (CellId id = 0; id < id_space_; ++id) {
        if (contains_digits(std::span<const std::uint32_t>(digits.data(), d_))) visit(id);
        for (unsigned i = 0; i < d_; ++i) {
            if (digits[i] < top) {
                ++digits[i];
                break;
            }
            digits[i] = 0;
        }
    }
}

CellId CubicalComplex::alpha(unsigned i, CellId cell) const {
    if (i == 0 || i > d_) throw DomainError("alpha: template index " + std::to_string(i) + " out of range");
    if (!contains(cell)) throw DomainError("alpha: cell " + std::to_string(cell) + " is not a member");
    const std::uint32_t c = digit(cell, i - 1);
    CellId other = cell;
    if (c % 2 == 1) {
        other = cell - weights_[i - 1];
    } else if (c < 2 * m_) {
        other = cell + weights_[i - 1];
    }
    return contains(other) ? other : cell;
}

CellId CubicalComplex::beta(unsigned i, CellId cell, const std::function<GradeId(CellId)>& grading) const {
    const CellId other = alpha(i, cell);
    if (other == cell) return cell;
    return grading(other) == grading(cell) ? other : cell;
}

CellId CubicalComplex::fiber_vertex(CellId cell) const {
    CellId rest = cell;
    CellId vertex = cell;
    for (unsigned i = 0; i < d_; ++i) {
        if ((rest % radix()) % 2 == 1) vertex -= weights_[i];
        rest /= radix();
    }
    return vertex;
}

// ---------------------------------------------------------------------------
// File format

CubicalComplex read_cubical(std::istream& in) {
    std::string line;
    std::vector<std::vector<std::int64_t>> anchors;
    std::optional<std::pair<unsigned, std::uint32_t>> header;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::vector<std::int64_t> values;
        std::int64_t v;
        while (ss >> v) values.push_back(v);
        if (!ss.eof()) {
            throw ValidationError("cubical file line " + std::to_string(lineno) + ": expected integers");
        }
        if (values.empty()) continue;
        if (!header) {
            if (values.size() != 2 || values[0] < 1 || values[1] < 1) {
                throw ValidationError("cubical file line " + std::to_string(lineno) +
                                      ": header must be `d m` with positive integers");
            }
            header = {static_cast<unsigned>(values[0]), static_cast<std::uint32_t>(values[1])};
            continue;
        }
        if (values.size() != header->first) {
            throw ValidationError("cubical file line " + std::to_string(lineno) + ": expected " +
                                  std::to_string(header->first) + " anchor coordinates, got " +
                                  std::to_string(values.size()));
        }
        anchors.push_back(std::move(values));
    }
    if (!header) throw ValidationError("cubical file: missing `d m` header");
    if (anchors.empty()) throw ValidationError("cubical file: no top cubes listed");
    try {
        return CubicalComplex::from_top_cells(header->second, header->first, anchors);
    } catch (const DomainError& e) {
        throw ValidationError(std::string("cubical file: ") + e.what());
    }
}

CubicalComplex read_cubical_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open cubical file " + path);
    return read_cubical(in);
}

}  // namespace cubemorse::cubical
