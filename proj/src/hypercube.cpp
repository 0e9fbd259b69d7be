#include "cubemorse/hypercube.hpp"

#include <algorithm>
#include <bit>

namespace cubemorse::hypercube {

HCell::HCell(std::uint64_t bits, unsigned width) : bits_(bits), width_(width) {
    if (width == 0 || width > kMaxWidth) throw DomainError("HCell: width must be in 1..64");
    if (width < 64 && (bits >> width) != 0) throw DomainError("HCell: bits exceed width");
}

HCell HCell::parse(std::string_view text) {
    if (text.empty() || text.size() > kMaxWidth) throw DomainError("HCell: bad string length");
    std::uint64_t bits = 0;
    for (char ch : text) {
        if (ch != '0' && ch != '1') throw DomainError("HCell: expected only 0/1 characters");
        bits = (bits << 1) | static_cast<std::uint64_t>(ch == '1');
    }
    return HCell(bits, static_cast<unsigned>(text.size()));
}

unsigned HCell::dim() const { return static_cast<unsigned>(std::popcount(bits_)); }

std::uint64_t HCell::mask_for(unsigned i) const {
    if (i == 0 || i > width_) {
        throw DomainError("hypercube bit index " + std::to_string(i) + " outside 1.." + std::to_string(width_));
    }
    return std::uint64_t{1} << (width_ - i);
}

bool HCell::test(unsigned i) const { return (bits_ & mask_for(i)) != 0; }

HCell HCell::flipped(unsigned i) const { return HCell(bits_ ^ mask_for(i), width_); }

bool HCell::is_face_of(const HCell& other) const {
    return width_ == other.width_ && (bits_ & ~other.bits_) == 0;
}

std::string HCell::to_string() const {
    std::string s(width_, '0');
    for (unsigned i = 1; i <= width_; ++i) {
        if (test(i)) s[i - 1] = '1';
    }
    return s;
}

std::vector<std::pair<HCell, Z2>> hc_boundary(const HCell& x) {
    std::vector<std::pair<HCell, Z2>> out;
    std::uint64_t rest = x.bits();
    while (rest != 0) {
        const std::uint64_t low = rest & (~rest + 1);
        out.emplace_back(HCell(x.bits() ^ low, x.width()), Z2::one());
        rest ^= low;
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    return out;
}

HCell apply_template(unsigned i, const HCell& x) { return x.flipped(i); }

// ---------------------------------------------------------------------------

HypercubeComplex::HypercubeComplex(unsigned n) : n_(n) {
    if (n == 0 || n > 63) throw DomainError("HypercubeComplex: n must be in 1..63");
    count_ = std::uint64_t{1} << n;
}

HypercubeComplex::HypercubeComplex(unsigned n, const std::vector<std::uint64_t>& cells) : n_(n), full_(false) {
    if (n == 0 || n > 24) throw DomainError("HypercubeComplex: explicit subcomplexes need n in 1..24");
    member_.assign(std::size_t{1} << n, false);
    for (auto c : cells) {
        if (c >= member_.size()) throw DomainError("HypercubeComplex: cell outside H_n");
        if (!member_[c]) ++count_;
        member_[c] = true;
    }
}

HypercubeComplex HypercubeComplex::closure(unsigned n, const std::vector<std::uint64_t>& cells) {
    if (n == 0 || n > 24) throw DomainError("HypercubeComplex: explicit subcomplexes need n in 1..24");
    std::vector<bool> in(std::size_t{1} << n, false);
    for (auto c : cells) {
        if (c >= in.size()) throw DomainError("HypercubeComplex: cell outside H_n");
        in[c] = true;
    }
    // Descending sweep: every face has a smaller pattern than its cofaces.
    for (std::uint64_t x = in.size(); x-- > 0;) {
        if (!in[x]) continue;
        for (std::uint64_t rest = x; rest != 0; rest &= rest - 1) in[x ^ (rest & (~rest + 1))] = true;
    }
    std::vector<std::uint64_t> closed;
    for (std::uint64_t x = 0; x < in.size(); ++x) {
        if (in[x]) closed.push_back(x);
    }
    return HypercubeComplex(n, closed);
}

bool HypercubeComplex::contains(CellId cell) const {
    if (n_ < 64 && (cell >> n_) != 0) return false;
    return full_ || member_[cell];
}

unsigned HypercubeComplex::dim(CellId cell) const { return static_cast<unsigned>(std::popcount(cell)); }

void HypercubeComplex::faces(CellId cell, std::vector<CellId>& out) const {
    out.clear();
    for (std::uint64_t rest = cell; rest != 0; rest &= rest - 1) {
        const CellId f = cell ^ (rest & (~rest + 1));
        if (contains(f)) out.push_back(f);
    }
    std::sort(out.begin(), out.end());
}

void HypercubeComplex::cofaces(CellId cell, std::vector<CellId>& out) const {
    out.clear();
    for (unsigned b = 0; b < n_; ++b) {
        const CellId bit = CellId{1} << b;
        if ((cell & bit) == 0 && contains(cell | bit)) out.push_back(cell | bit);
    }
    std::sort(out.begin(), out.end());
}

void HypercubeComplex::for_each_cell(const std::function<void(CellId)>& visit) const {
    const std::uint64_t total = std::uint64_t{1} << n_;
    for (std::uint64_t x = 0; x < total; ++x) {
        if (contains(x)) visit(x);
    }
}

CellId HypercubeComplex::alpha(unsigned i, CellId cell) const {
    if (i == 0 || i > n_) throw DomainError("alpha: template index out of range");
    if (!contains(cell)) throw DomainError("alpha: cell is not a member");
    const CellId other = cell ^ (CellId{1} << (n_ - i));
    return contains(other) ? other : cell;
}

}  // namespace cubemorse::hypercube
