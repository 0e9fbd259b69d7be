#include "cubemorse/braid.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

namespace cubemorse::braid {

const char* to_string(SkeletonFault fault) {
    switch (fault) {
        case SkeletonFault::Shape: return "shape";
        case SkeletonFault::Closure: return "closure";
        case SkeletonFault::Transversality: return "transversality";
        case SkeletonFault::CrossSection: return "cross-section";
        case SkeletonFault::ConstantStrand: return "constant-strand";
    }
    return "?";
}

SkeletonError::SkeletonError(SkeletonFault fault, unsigned strand, unsigned column, const std::string& what)
    : ValidationError(std::string(to_string(fault)) + " error: " + what),
      fault_(fault),
      strand_(strand),
      column_(column) {}

namespace {

std::string where(unsigned strand, unsigned column) {
    std::string s = "strand " + std::to_string(strand);
    if (column != 0) s += ", column " + std::to_string(column);
    return s;
}

}  // namespace

BraidSkeleton validate_skeleton(std::vector<std::vector<std::int64_t>> strands) {
    if (strands.size() < 2) {
        throw SkeletonError(SkeletonFault::Shape, 0, 0, "need at least two strands");
    }
    const std::size_t width = strands.front().size();
    if (width < 2) throw SkeletonError(SkeletonFault::Shape, 1, 0, "strand 1 needs at least two anchor values");
    for (std::size_t a = 0; a < strands.size(); ++a) {
        if (strands[a].size() != width) {
            throw SkeletonError(SkeletonFault::Shape, static_cast<unsigned>(a + 1), 0,
                                where(a + 1, 0) + " has " + std::to_string(strands[a].size()) +
                                    " anchor values, expected " + std::to_string(width));
        }
    }

    BraidSkeleton skel;
    skel.m = static_cast<unsigned>(strands.size());
    skel.d = static_cast<unsigned>(width - 1);
    skel.strands = std::move(strands);
    const unsigned m = skel.m;
    const unsigned d = skel.d;

    // Closure: pair every last value with an unused strand starting there.
    std::multimap<std::int64_t, unsigned> starts;
    for (unsigned a = 0; a < m; ++a) starts.emplace(skel.value(a, 1), a);
    skel.tau.assign(m, 0);
    for (unsigned a = 0; a < m; ++a) {
        auto it = starts.find(skel.value(a, d + 1));
        if (it == starts.end()) {
            throw SkeletonError(SkeletonFault::Closure, a + 1, d + 1,
                                where(a + 1, d + 1) + ": last value " + std::to_string(skel.value(a, d + 1)) +
                                    " is not the first value of any unused strand");
        }
        skel.tau[a] = it->second;
        starts.erase(it);
    }
    std::vector<unsigned> tau_inv(m);
    for (unsigned a = 0; a < m; ++a) tau_inv[skel.tau[a]] = a;

    // Transversality at every coincidence, with cyclic neighbours.
    auto prev = [&](unsigned a, unsigned i) {
        return i == 1 ? skel.value(tau_inv[a], d) : skel.value(a, i - 1);
    };
    for (unsigned i = 1; i <= d; ++i) {
        for (unsigned a = 0; a < m; ++a) {
            for (unsigned b = a + 1; b < m; ++b) {
                if (skel.value(a, i) != skel.value(b, i)) continue;
                const std::int64_t before = prev(a, i) - prev(b, i);
                const std::int64_t after = skel.value(a, i + 1) - skel.value(b, i + 1);
                if (before * after >= 0) {
                    throw SkeletonError(SkeletonFault::Transversality, a + 1, i,
                                        where(a + 1, i) + " meets strand " + std::to_string(b + 1) +
                                            " without crossing it");
                }
            }
        }
    }

    for (unsigned i = 1; i <= d + 1; ++i) {
        std::vector<char> seen(m, 0);
        for (unsigned a = 0; a < m; ++a) {
            const std::int64_t v = skel.value(a, i);
            if (v < 0 || v >= static_cast<std::int64_t>(m) || seen[static_cast<std::size_t>(v)]) {
                throw SkeletonError(SkeletonFault::CrossSection, a + 1, i,
                                    where(a + 1, i) + ": value " + std::to_string(v) +
                                        " breaks the permutation of 0.." + std::to_string(m - 1));
            }
            seen[static_cast<std::size_t>(v)] = 1;
        }
    }

    for (std::int64_t level : {std::int64_t{0}, static_cast<std::int64_t>(m) - 1}) {
        unsigned owner = 0;
        for (unsigned a = 0; a < m; ++a) {
            if (skel.value(a, 1) == level) owner = a;
        }
        for (unsigned i = 1; i <= d + 1; ++i) {
            if (skel.value(owner, i) != level) {
                throw SkeletonError(SkeletonFault::ConstantStrand, owner + 1, i,
                                    "no constant strand at level " + std::to_string(level) + " (" +
                                        where(owner + 1, i) + " leaves it)");
            }
        }
    }
    return skel;
}

BraidSkeleton nfold_cover(const BraidSkeleton& skel, unsigned n) {
    if (n == 0) throw DomainError("nfold_cover: n must be at least 1");
    std::vector<std::vector<std::int64_t>> strands(skel.m);
    for (unsigned a = 0; a < skel.m; ++a) {
        auto& row = strands[a];
        row = skel.strands[a];
        unsigned b = a;
        for (unsigned k = 1; k < n; ++k) {
            b = skel.tau[b];
            row.insert(row.end(), skel.strands[b].begin() + 1, skel.strands[b].end());
        }
    }
    return validate_skeleton(std::move(strands));
}

BraidSkeleton torus_knot(unsigned m) {
    if (m < 4) throw DomainError("torus_knot: m must be at least 4");
    const auto top = static_cast<std::int64_t>(m) - 1;
    std::vector<std::vector<std::int64_t>> strands;
    strands.push_back(std::vector<std::int64_t>(5, 0));
    for (std::int64_t start = 1; start < top; ++start) {
        std::vector<std::int64_t> row{start};
        for (int i = 0; i < 4; ++i) {
            const std::int64_t t = row.back();
            row.push_back(t == 1 ? top - 1 : t - 1);
        }
        strands.push_back(std::move(row));
    }
    strands.push_back(std::vector<std::int64_t>(5, top));
    return validate_skeleton(std::move(strands));
}

BraidSkeleton base_skeleton() {
    return validate_skeleton({{0, 0, 0}, {1, 3, 1}, {2, 1, 2}, {3, 4, 3}, {4, 2, 4}, {5, 5, 5}});
}

BraidSkeleton read_braid(std::istream& in) {
    std::string line;
    std::size_t lineno = 0;
    std::optional<std::pair<unsigned, unsigned>> header;
    std::vector<std::vector<std::int64_t>> strands;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::vector<std::int64_t> values;
        std::int64_t v;
        while (ss >> v) values.push_back(v);
        if (!ss.eof()) throw ValidationError("braid file line " + std::to_string(lineno) + ": expected integers");
        if (values.empty()) continue;
        if (!header) {
            if (values.size() != 2 || values[0] < 2 || values[1] < 1) {
                throw ValidationError("braid file line " + std::to_string(lineno) +
                                      ": header must be `m d` with m >= 2 and d >= 1");
            }
            header = {static_cast<unsigned>(values[0]), static_cast<unsigned>(values[1])};
            continue;
        }
        if (strands.size() == header->first) {
            throw ValidationError("braid file line " + std::to_string(lineno) + ": more than " +
                                  std::to_string(header->first) + " strands");
        }
        if (values.size() != header->second + 1) {
            throw SkeletonError(SkeletonFault::Shape, static_cast<unsigned>(strands.size() + 1), 0,
                                "braid file line " + std::to_string(lineno) + ": expected " +
                                    std::to_string(header->second + 1) + " values, got " +
                                    std::to_string(values.size()));
        }
        strands.push_back(std::move(values));
    }
    if (!header) throw ValidationError("braid file: missing `m d` header");
    if (strands.size() != header->first) {
        throw SkeletonError(SkeletonFault::Shape, 0, 0,
                            "braid file lists " + std::to_string(strands.size()) + " strands, header says " +
                                std::to_string(header->first));
    }
    return validate_skeleton(std::move(strands));
}

BraidSkeleton read_braid_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open braid file " + path);
    return read_braid(in);
}

unsigned crossing_number(const cubical::CubeCell& top_cube, const BraidSkeleton& skel, unsigned quarters) {
    const unsigned d = skel.d;
    if (quarters < 1 || quarters > 3) throw DomainError("crossing_number: representative must be interior");
    if (top_cube.ambient_dim() != d || top_cube.dim() != d) {
        throw DomainError("crossing_number: " + top_cube.to_string() + " is not a top cube of dimension " +
                          std::to_string(d));
    }
    std::vector<std::int64_t> u(d + 1);
    for (unsigned i = 0; i < d; ++i) {
        const std::int64_t l = top_cube.anchor(i);
        if (l < 0 || l + 1 >= static_cast<std::int64_t>(skel.m)) {
            throw DomainError("crossing_number: " + top_cube.to_string() + " lies outside the braid grid");
        }
        u[i] = 4 * l + quarters;
    }
    u[d] = u[0];
    unsigned count = 0;
    for (unsigned a = 0; a < skel.m; ++a) {
        for (unsigned i = 1; i <= d; ++i) {
            const std::int64_t x = u[i - 1] - 4 * skel.value(a, i);
            const std::int64_t y = u[i] - 4 * skel.value(a, i + 1);
            if ((x < 0) != (y < 0)) ++count;
        }
    }
    return count;
}

TopCubeGrid::TopCubeGrid(std::uint32_t side, unsigned d) : side_(side), d_(d), size_(1), strides_(d) {
    if (side == 0 || d == 0) throw DomainError("TopCubeGrid: empty grid");
    for (unsigned i = 0; i < d; ++i) {
        strides_[i] = size_;
        if (size_ > std::numeric_limits<std::uint64_t>::max() / side) {
            throw SizeGuardError("TopCubeGrid: too many top cubes", 0, 0);
        }
        size_ *= side;
    }
}

std::vector<std::int64_t> TopCubeGrid::anchors(std::uint64_t index) const {
    std::vector<std::int64_t> out(d_);
    for (unsigned i = 0; i < d_; ++i) out[i] = anchor(index, i);
    return out;
}

std::uint64_t TopCubeGrid::index(const std::vector<std::int64_t>& anchors) const {
    if (anchors.size() != d_) throw DomainError("TopCubeGrid: wrong number of anchors");
    std::uint64_t idx = 0;
    for (unsigned i = 0; i < d_; ++i) {
        if (anchors[i] < 0 || anchors[i] >= side_) throw DomainError("TopCubeGrid: anchor out of range");
        idx += static_cast<std::uint64_t>(anchors[i]) * strides_[i];
    }
    return idx;
}

RelationF::RelationF(const BraidSkeleton& skel) : grid_(skel.m - 1, skel.d), cross_(grid_.size()) {
    if (skel.m < 2) throw DomainError("RelationF: need at least two strands");
    std::vector<std::int64_t> anchors(skel.d);
    std::vector<int> extents(skel.d, 1);
    for (std::uint64_t c = 0; c < grid_.size(); ++c) {
        for (unsigned i = 0; i < skel.d; ++i) anchors[i] = grid_.anchor(c, i);
        cross_[c] = crossing_number(cubical::CubeCell::from_intervals(anchors, extents), skel);
    }
    for (unsigned a = 0; a < skel.m; ++a) {
        if (skel.value(a, 1) == skel.value(a, skel.d + 1)) {
            improper_.emplace_back(skel.strands[a].begin(), skel.strands[a].end() - 1);
        }
    }
}

bool RelationF::share_improper_star(std::uint64_t a, std::uint64_t b) const {
    for (const auto& v : improper_) {
        bool both = true;
        for (unsigned i = 0; i < grid_.dim() && both; ++i) {
            const std::int64_t la = grid_.anchor(a, i);
            const std::int64_t lb = grid_.anchor(b, i);
            both = (la == v[i] || la == v[i] - 1) && (lb == v[i] || lb == v[i] - 1);
        }
        if (both) return true;
    }
    return false;
}

bool RelationF::has_edge(std::uint64_t from, std::uint64_t to) const {
    if (from >= size() || to >= size() || from == to) return false;
    unsigned differing = 0;
    for (unsigned i = 0; i < grid_.dim(); ++i) {
        const std::int64_t delta =
            static_cast<std::int64_t>(grid_.anchor(from, i)) - static_cast<std::int64_t>(grid_.anchor(to, i));
        if (delta < -1 || delta > 1) return false;
        if (delta != 0) ++differing;
    }
    if (differing != 1) return false;
    return cross_[to] <= cross_[from] || share_improper_star(from, to);
}

void RelationF::successors(std::uint64_t cube, std::vector<std::uint64_t>& out) const {
    out.clear();
    for (unsigned i = 0; i < grid_.dim(); ++i) {
        const std::uint32_t l = grid_.anchor(cube, i);
        const std::uint64_t s = grid_.stride(i);
        auto consider = [&](std::uint64_t n) {
            if (cross_[n] <= cross_[cube] || share_improper_star(cube, n)) out.push_back(n);
        };
        if (l > 0) consider(cube - s);
        if (l + 1 < grid_.side()) consider(cube + s);
    }
}

CondensationPoset::CondensationPoset(std::vector<GradeId> component, std::vector<std::pair<GradeId, GradeId>> dag)
    : component_(std::move(component)), dag_(std::move(dag)) {
    GradeId count = 0;
    for (GradeId c : component_) count = std::max(count, c + 1);
    members_.resize(count);
    for (std::uint64_t n = 0; n < component_.size(); ++n) members_[component_[n]].push_back(n);
    std::sort(dag_.begin(), dag_.end());
    dag_.erase(std::unique(dag_.begin(), dag_.end()), dag_.end());
    succ_.resize(count);
    for (auto [p, q] : dag_) succ_[p].push_back(q);
    reach_.resize(count);
}

const std::vector<std::uint64_t>& CondensationPoset::descendants(GradeId q) const {
    if (!reach_[q].empty()) return reach_[q];
    const std::size_t words = (members_.size() + 63) / 64;
    // Post-order over the dag so children are complete before parents.
    std::vector<std::pair<GradeId, std::size_t>> stack{{q, 0}};
    while (!stack.empty()) {
        auto& [v, next] = stack.back();
        if (next < succ_[v].size()) {
            const GradeId w = succ_[v][next++];
            if (reach_[w].empty()) stack.emplace_back(w, 0);
            continue;
        }
        std::vector<std::uint64_t> bits(words, 0);
        bits[v / 64] |= std::uint64_t{1} << (v % 64);
        for (GradeId w : succ_[v]) {
            const auto& child = reach_[w];
            for (std::size_t k = 0; k < words; ++k) bits[k] |= child[k];
        }
        reach_[v] = std::move(bits);
        stack.pop_back();
    }
    return reach_[q];
}

bool CondensationPoset::leq(GradeId p, GradeId q) const {
    if (p >= members_.size() || q >= members_.size()) throw DomainError("leq: unknown component");
    if (p == q) return true;
    const double words = static_cast<double>((members_.size() + 63) / 64);
    if (words * 8.0 * static_cast<double>(members_.size()) > kReachBudgetBytes) {
        // Too many components for per-node bitsets: search without caching.
        std::vector<bool> seen(members_.size(), false);
        std::vector<GradeId> stack{q};
        seen[q] = true;
        while (!stack.empty()) {
            const GradeId v = stack.back();
            stack.pop_back();
            for (GradeId w : succ_[v]) {
                if (w == p) return true;
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
            }
        }
        return false;
    }
    const auto& bits = descendants(q);
    return (bits[p / 64] >> (p % 64)) & 1U;
}

std::vector<std::pair<GradeId, GradeId>> CondensationPoset::edges() const {
    // Reported as (p, q) with p <= q.
    std::vector<std::pair<GradeId, GradeId>> out;
    out.reserve(dag_.size());
    for (auto [from, to] : dag_) out.emplace_back(to, from);
    std::sort(out.begin(), out.end());
    return out;
}

GradeId CondensationPoset::least(const std::vector<GradeId>& set) const {
    if (set.empty()) throw IntegrityError("least: empty set of components");
    GradeId best = set.front();
    for (GradeId s : set) {
        if (s != best && leq(s, best)) best = s;
    }
    for (GradeId s : set) {
        if (!leq(best, s)) {
            throw IntegrityError("no least component: " + std::to_string(best) + " and " + std::to_string(s) +
                                 " are incomparable");
        }
    }
    return best;
}

CondensationPoset condensation(std::uint64_t n, const SuccessorFn& successors) {
    constexpr std::uint64_t kUnset = std::numeric_limits<std::uint64_t>::max();
    std::vector<std::uint64_t> index(n, kUnset);
    std::vector<std::uint64_t> low(n, 0);
    std::vector<char> on_stack(n, 0);
    std::vector<std::uint64_t> scc_stack;
    std::vector<GradeId> raw(n, 0);
    GradeId found = 0;
    std::uint64_t counter = 0;

    struct Frame {
        std::uint64_t node;
        std::vector<std::uint64_t> next;
        std::size_t pos = 0;
    };
    std::vector<Frame> calls;
    auto open = [&](std::uint64_t v) {
        index[v] = low[v] = counter++;
        scc_stack.push_back(v);
        on_stack[v] = 1;
        Frame f{v, {}, 0};
        successors(v, f.next);
        calls.push_back(std::move(f));
    };

    for (std::uint64_t root = 0; root < n; ++root) {
        if (index[root] != kUnset) continue;
        open(root);
        while (!calls.empty()) {
            Frame& f = calls.back();
            if (f.pos < f.next.size()) {
                const std::uint64_t w = f.next[f.pos++];
                if (index[w] == kUnset) {
                    open(w);
                } else if (on_stack[w]) {
                    low[f.node] = std::min(low[f.node], index[w]);
                }
                continue;
            }
            const std::uint64_t v = f.node;
            calls.pop_back();
            if (!calls.empty()) low[calls.back().node] = std::min(low[calls.back().node], low[v]);
            if (low[v] == index[v]) {
                std::uint64_t w;
                do {
                    w = scc_stack.back();
                    scc_stack.pop_back();
                    on_stack[w] = 0;
                    raw[w] = found;
                } while (w != v);
                ++found;
            }
        }
    }

    // Renumber by the smallest member: nodes are visited in ascending order,
    // so first appearance order is minimum-member order.
    std::vector<GradeId> rename(found, std::numeric_limits<GradeId>::max());
    GradeId next_id = 0;
    for (std::uint64_t v = 0; v < n; ++v) {
        if (rename[raw[v]] == std::numeric_limits<GradeId>::max()) rename[raw[v]] = next_id++;
        raw[v] = rename[raw[v]];
    }

    std::vector<std::pair<GradeId, GradeId>> dag;
    std::vector<std::uint64_t> buf;
    for (std::uint64_t v = 0; v < n; ++v) {
        successors(v, buf);
        for (std::uint64_t w : buf) {
            if (raw[v] != raw[w]) dag.emplace_back(raw[v], raw[w]);
        }
    }
    return CondensationPoset(std::move(raw), std::move(dag));
}

CondensationPoset condensation(const RelationF& relation) {
    return condensation(relation.size(),
                        [&relation](std::uint64_t c, std::vector<std::uint64_t>& out) { relation.successors(c, out); });
}

std::vector<std::uint64_t> star_top_cubes(const cubical::CubeCell& cell, const TopCubeGrid& grid) {
    if (cell.ambient_dim() != grid.dim()) throw DomainError("star: cell has the wrong ambient dimension");
    std::vector<std::uint64_t> out{0};
    for (unsigned i = 0; i < grid.dim(); ++i) {
        const std::int64_t l = cell.anchor(i);
        std::int64_t options[2];
        int count = 0;
        if (cell.extent(i) == 1) {
            if (l < 0 || l >= grid.side()) throw DomainError("star: cell outside the grid");
            options[count++] = l;
        } else {
            if (l < 0 || l > grid.side()) throw DomainError("star: cell outside the grid");
            if (l >= 1) options[count++] = l - 1;
            if (l < grid.side()) options[count++] = l;
        }
        std::vector<std::uint64_t> next;
        next.reserve(out.size() * count);
        for (std::uint64_t base : out) {
            for (int k = 0; k < count; ++k) next.push_back(base + static_cast<std::uint64_t>(options[k]) * grid.stride(i));
        }
        out = std::move(next);
    }
    std::sort(out.begin(), out.end());
    return out;
}

GradeId grade(const cubical::CubeCell& cell, const CondensationPoset& poset, const TopCubeGrid& grid) {
    std::vector<GradeId> comps;
    for (std::uint64_t c : star_top_cubes(cell, grid)) comps.push_back(poset.scc_of(c));
    std::sort(comps.begin(), comps.end());
    comps.erase(std::unique(comps.begin(), comps.end()), comps.end());
    return poset.least(comps);
}

BraidComplex build_braid_complex(const BraidSkeleton& skel) {
    RelationF relation(skel);
    CondensationPoset poset = condensation(relation);
    auto complex = cubical::CubicalComplex::braid_grid(skel.m - 1, skel.d);
    std::vector<GradeId> grades(complex.id_space());
    for (CellId id = 0; id < complex.id_space(); ++id) {
        grades[id] = grade(complex.decode(id), poset, relation.grid());
    }
    return BraidComplex{skel, std::move(complex), std::move(relation), std::move(poset), std::move(grades)};
}

std::string to_dot(const BraidComplex& braid) {
    const auto& poset = braid.poset;
    std::ostringstream out;
    out << "digraph condensation {\n  rankdir=TB;\n";
    for (GradeId p = 0; p < poset.scc_count(); ++p) {
        unsigned lo = std::numeric_limits<unsigned>::max();
        unsigned hi = 0;
        for (std::uint64_t c : poset.members(p)) {
            lo = std::min(lo, braid.relation.cross(c));
            hi = std::max(hi, braid.relation.cross(c));
        }
        out << "  " << p << " [label=\"" << p << "\\ncubes " << poset.members(p).size() << "\\ncross " << lo;
        if (hi != lo) out << ".." << hi;
        out << "\"];\n";
    }
    for (auto [from, to] : poset.dag_edges()) out << "  " << from << " -> " << to << ";\n";
    out << "}\n";
    return out.str();
}

}  // namespace cubemorse::braid
