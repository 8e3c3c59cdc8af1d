// Copyright 2026 The stab-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Exact linear algebra over F2 with vectors packed into a single 64-bit word.
//
// Conventions used across the library:
//   * coordinate i of x in F2^n is bit i of the packed word (x_1 of the
//     mathematical notation is bit 0); printed bit strings list coordinate 0
//     first, so "10" is e_1.
//   * a symplectic vector z = (y, alpha) in F2^{2n} is packed as
//     (y << n) | alpha. The same integer indexes characteristic tables.
//   * "lexicographic" order on vectors is the order of the packed integers.

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stablab/error.hpp"

namespace stablab {

using word = std::uint64_t;

inline constexpr unsigned max_bits = 64;

constexpr word low_mask(unsigned n) {
    return n >= 64 ? ~word{0} : (word{1} << n) - 1;
}

constexpr bool parity(word x) {
    return (std::popcount(x) & 1) != 0;
}

constexpr bool dot(word a, word b) {
    return parity(a & b);
}

inline std::string bits_to_string(word x, unsigned n) {
    std::string s(n, '0');
    for (unsigned i = 0; i < n; i++) {
        if ((x >> i) & 1) {
            s[i] = '1';
        }
    }
    return s;
}

inline word bits_from_string(std::string_view s) {
    require(s.size() <= max_bits, "bit string longer than 64 coordinates");
    word x = 0;
    for (size_t i = 0; i < s.size(); i++) {
        if (s[i] == '1') {
            x |= word{1} << i;
        } else {
            require(s[i] == '0', "bit string may only contain '0' and '1'");
        }
    }
    return x;
}

/// An element of F2^n.
struct BitVec {
    unsigned n = 0;
    word bits = 0;

    constexpr BitVec() = default;
    BitVec(unsigned dim, word value) : n(dim), bits(value) {
        require(dim <= max_bits, "BitVec dimension exceeds 64");
        require((value & ~low_mask(dim)) == 0, "BitVec value has bits beyond its dimension");
    }

    static BitVec parse(std::string_view s) {
        return BitVec(static_cast<unsigned>(s.size()), bits_from_string(s));
    }

    bool operator[](unsigned i) const {
        return (bits >> i) & 1;
    }
    unsigned weight() const {
        return static_cast<unsigned>(std::popcount(bits));
    }
    std::string str() const {
        return bits_to_string(bits, n);
    }

    BitVec operator+(const BitVec &other) const {
        require(n == other.n, "BitVec dimension mismatch");
        return BitVec(n, bits ^ other.bits);
    }
    auto operator<=>(const BitVec &) const = default;
};

inline bool dot(const BitVec &a, const BitVec &b) {
    require(a.n == b.n, "inner product dimension mismatch");
    return dot(a.bits, b.bits);
}

/// An element (y, alpha) of the symplectic space F2^{2n}.
struct SympVec {
    unsigned n = 0;
    word y = 0;
    word alpha = 0;

    constexpr SympVec() = default;
    SympVec(unsigned half_dim, word y_bits, word alpha_bits) : n(half_dim), y(y_bits), alpha(alpha_bits) {
        require(2 * half_dim <= max_bits, "SympVec half-dimension exceeds 32");
        require(((y_bits | alpha_bits) & ~low_mask(half_dim)) == 0, "SympVec component has bits beyond n");
    }
    SympVec(const BitVec &y_part, const BitVec &alpha_part) : SympVec(y_part.n, y_part.bits, alpha_part.bits) {
        require(y_part.n == alpha_part.n, "SympVec halves must have equal dimension");
    }

    static SympVec unpack(unsigned half_dim, word z) {
        return SympVec(half_dim, z >> half_dim, z & low_mask(half_dim));
    }
    word packed() const {
        return (y << n) | alpha;
    }
    std::string str() const {
        return "(" + bits_to_string(y, n) + "," + bits_to_string(alpha, n) + ")";
    }

    SympVec operator+(const SympVec &other) const {
        require(n == other.n, "SympVec dimension mismatch");
        return SympVec(n, y ^ other.y, alpha ^ other.alpha);
    }
    auto operator<=>(const SympVec &) const = default;
};

/// [z1, z2] on packed symplectic vectors of half-dimension n.
constexpr bool symplectic_form(unsigned n, word z1, word z2) {
    word m = low_mask(n);
    return dot(z1 >> n, z2 & m) != dot(z2 >> n, z1 & m);
}

inline bool symplectic_form(const SympVec &z1, const SympVec &z2) {
    require(z1.n == z2.n, "symplectic form dimension mismatch");
    return symplectic_form(z1.n, z1.packed(), z2.packed());
}

/// Swaps the y and alpha halves; [z1, z2] == dot(z1, swap_halves(z2)).
constexpr word swap_halves(unsigned n, word z) {
    return ((z & low_mask(n)) << n) | (z >> n);
}

/// A linear subspace of F2^dim, stored as a basis in reduced row-echelon form.
///
/// Each row's pivot is its highest set bit, rows are sorted by decreasing pivot,
/// and every pivot column is zero in all other rows. The form is unique for a
/// given subspace, so structural equality is set equality.
class Subspace {
   public:
    Subspace() = default;
    explicit Subspace(unsigned ambient_dim) : dim_(ambient_dim) {
        require(ambient_dim <= max_bits, "subspace ambient dimension exceeds 64");
    }

    static Subspace zero(unsigned ambient_dim) {
        return Subspace(ambient_dim);
    }
    static Subspace full(unsigned ambient_dim) {
        Subspace s(ambient_dim);
        for (unsigned i = 0; i < ambient_dim; i++) {
            s.insert(word{1} << i);
        }
        return s;
    }
    static Subspace span(unsigned ambient_dim, std::span<const word> generators) {
        Subspace s(ambient_dim);
        for (word g : generators) {
            s.insert(g);
        }
        return s;
    }
    static Subspace span(std::span<const BitVec> generators) {
        require(!generators.empty(), "span of an empty BitVec list needs an explicit dimension");
        Subspace s(generators.front().n);
        for (const auto &g : generators) {
            require(g.n == s.dim_, "generator dimension mismatch");
            s.insert(g.bits);
        }
        return s;
    }

    /// {x : dot(c, x) = 0 for every constraint c}.
    static Subspace solutions(unsigned ambient_dim, std::span<const word> constraints) {
        Subspace c = span(ambient_dim, constraints);
        word pivots = c.pivot_mask();
        Subspace out(ambient_dim);
        for (unsigned f = 0; f < ambient_dim; f++) {
            if ((pivots >> f) & 1) {
                continue;
            }
            word x = word{1} << f;
            for (word row : c.rows_) {
                if ((row >> f) & 1) {
                    x |= word{1} << pivot_of(row);
                }
            }
            out.insert(x);
        }
        return out;
    }

    unsigned ambient_dim() const {
        return dim_;
    }
    unsigned rank() const {
        return static_cast<unsigned>(rows_.size());
    }
    word size() const {
        return word{1} << rows_.size();
    }
    const std::vector<word> &basis() const {
        return rows_;
    }
    word pivot_mask() const {
        word m = 0;
        for (word r : rows_) {
            m |= word{1} << pivot_of(r);
        }
        return m;
    }

    /// The smallest element of the coset x + S.
    word reduce(word x) const {
        for (word r : rows_) {
            if ((x >> pivot_of(r)) & 1) {
                x ^= r;
            }
        }
        return x;
    }
    bool contains(word x) const {
        return reduce(x) == 0;
    }
    bool contains(const BitVec &x) const {
        require(x.n == dim_, "membership dimension mismatch");
        return contains(x.bits);
    }

    /// Adds x to the spanning set. Returns false if x was already in the span.
    bool insert(word x) {
        require((x & ~low_mask(dim_)) == 0, "vector has bits beyond the ambient dimension");
        x = reduce(x);
        if (x == 0) {
            return false;
        }
        unsigned p = pivot_of(x);
        for (word &r : rows_) {
            if ((r >> p) & 1) {
                r ^= x;
            }
        }
        rows_.push_back(x);
        std::sort(rows_.begin(), rows_.end(), std::greater<>());
        return true;
    }

    /// Element with coordinates c in the basis: XOR of rows i where bit i of c is set.
    word element(word c) const {
        word x = 0;
        for (size_t i = 0; i < rows_.size(); i++) {
            if ((c >> i) & 1) {
                x ^= rows_[i];
            }
        }
        return x;
    }
    std::vector<word> elements() const {
        std::vector<word> out;
        out.reserve(size());
        for (word c = 0; c < size(); c++) {
            out.push_back(element(c));
        }
        return out;
    }

    bool operator==(const Subspace &) const = default;
    auto operator<=>(const Subspace &other) const {
        if (auto c = dim_ <=> other.dim_; c != 0) {
            return c;
        }
        if (auto c = rows_.size() <=> other.rows_.size(); c != 0) {
            return c;
        }
        return rows_ <=> other.rows_;
    }

   private:
    static unsigned pivot_of(word x) {
        return 63u - static_cast<unsigned>(std::countl_zero(x));
    }

    unsigned dim_ = 0;
    std::vector<word> rows_;
};

/// offset + direction, with the offset reduced to the smallest coset element.
struct AffineSubspace {
    word offset = 0;
    Subspace direction;

    AffineSubspace() = default;
    AffineSubspace(word offset_, Subspace direction_) : direction(std::move(direction_)) {
        require((offset_ & ~low_mask(direction.ambient_dim())) == 0, "affine offset has bits beyond the dimension");
        offset = direction.reduce(offset_);
    }

    unsigned ambient_dim() const {
        return direction.ambient_dim();
    }
    word size() const {
        return direction.size();
    }
    bool contains(word x) const {
        return direction.contains(x ^ offset);
    }
    std::vector<word> elements() const {
        auto out = direction.elements();
        for (word &x : out) {
            x ^= offset;
        }
        return out;
    }

    bool operator==(const AffineSubspace &) const = default;
};

/// A linear map F2^n -> F2^n; column j is the image of e_j, so entry (i, j) is
/// bit i of column j.
class LinMap {
   public:
    LinMap() = default;
    explicit LinMap(unsigned n) : n_(n), cols_(n, 0) {
        require(n <= max_bits, "linear map dimension exceeds 64");
    }
    LinMap(unsigned n, std::vector<word> columns) : n_(n), cols_(std::move(columns)) {
        require(n <= max_bits, "linear map dimension exceeds 64");
        require(cols_.size() == n, "linear map needs exactly n columns");
        for (word c : cols_) {
            require((c & ~low_mask(n)) == 0, "linear map column has bits beyond n");
        }
    }

    static LinMap identity(unsigned n) {
        LinMap m(n);
        for (unsigned j = 0; j < n; j++) {
            m.cols_[j] = word{1} << j;
        }
        return m;
    }
    /// Rows given as bit strings, row i listing entries (i, 0), (i, 1), ...
    static LinMap from_rows(const std::vector<std::string> &rows) {
        auto n = static_cast<unsigned>(rows.size());
        LinMap m(n);
        for (unsigned i = 0; i < n; i++) {
            require(rows[i].size() == n, "matrix rows must be square");
            word r = bits_from_string(rows[i]);
            for (unsigned j = 0; j < n; j++) {
                if ((r >> j) & 1) {
                    m.cols_[j] |= word{1} << i;
                }
            }
        }
        return m;
    }
    /// Inverse of encoding(): bit (j*n + i) is entry (i, j).
    static LinMap from_encoding(unsigned n, word code) {
        require(n * n <= max_bits, "matrix too large for a single-word encoding");
        LinMap m(n);
        for (unsigned j = 0; j < n; j++) {
            m.cols_[j] = (code >> (j * n)) & low_mask(n);
        }
        return m;
    }

    unsigned dim() const {
        return n_;
    }
    const std::vector<word> &columns() const {
        return cols_;
    }
    bool entry(unsigned i, unsigned j) const {
        return (cols_[j] >> i) & 1;
    }
    void set_entry(unsigned i, unsigned j, bool v) {
        cols_[j] = (cols_[j] & ~(word{1} << i)) | (word{v} << i);
    }

    word apply(word x) const {
        word out = 0;
        for (unsigned j = 0; x != 0; j++, x >>= 1) {
            if (x & 1) {
                out ^= cols_[j];
            }
        }
        return out;
    }
    BitVec operator()(const BitVec &x) const {
        require(x.n == n_, "linear map applied to wrong dimension");
        return BitVec(n_, apply(x.bits));
    }

    LinMap transpose() const {
        LinMap t(n_);
        for (unsigned i = 0; i < n_; i++) {
            for (unsigned j = 0; j < n_; j++) {
                if (entry(i, j)) {
                    t.cols_[i] |= word{1} << j;
                }
            }
        }
        return t;
    }
    bool is_symmetric() const {
        return *this == transpose();
    }
    /// d_i = <e_i, l(e_i)>.
    word diagonal() const {
        word d = 0;
        for (unsigned i = 0; i < n_; i++) {
            d |= word{entry(i, i)} << i;
        }
        return d;
    }

    LinMap operator+(const LinMap &other) const {
        require(n_ == other.n_, "linear map dimension mismatch");
        LinMap s(n_);
        for (unsigned j = 0; j < n_; j++) {
            s.cols_[j] = cols_[j] ^ other.cols_[j];
        }
        return s;
    }
    /// (*this) o other.
    LinMap compose(const LinMap &other) const {
        require(n_ == other.n_, "linear map dimension mismatch");
        LinMap c(n_);
        for (unsigned j = 0; j < n_; j++) {
            c.cols_[j] = apply(other.cols_[j]);
        }
        return c;
    }
    /// Gauss-Jordan inverse; throws if singular.
    LinMap inverse() const {
        // Work on rows of [M | I].
        std::vector<word> rows(n_, 0), inv(n_, 0);
        for (unsigned i = 0; i < n_; i++) {
            for (unsigned j = 0; j < n_; j++) {
                rows[i] |= word{entry(i, j)} << j;
            }
            inv[i] = word{1} << i;
        }
        for (unsigned c = 0; c < n_; c++) {
            unsigned p = c;
            while (p < n_ && !((rows[p] >> c) & 1)) {
                p++;
            }
            require(p < n_, "linear map is singular");
            std::swap(rows[p], rows[c]);
            std::swap(inv[p], inv[c]);
            for (unsigned r = 0; r < n_; r++) {
                if (r != c && ((rows[r] >> c) & 1)) {
                    rows[r] ^= rows[c];
                    inv[r] ^= inv[c];
                }
            }
        }
        LinMap out(n_);
        for (unsigned i = 0; i < n_; i++) {
            for (unsigned j = 0; j < n_; j++) {
                if ((inv[i] >> j) & 1) {
                    out.cols_[j] |= word{1} << i;
                }
            }
        }
        return out;
    }
    Subspace kernel() const {
        std::vector<word> rows(n_, 0);
        for (unsigned i = 0; i < n_; i++) {
            for (unsigned j = 0; j < n_; j++) {
                rows[i] |= word{entry(i, j)} << j;
            }
        }
        return Subspace::solutions(n_, rows);
    }

    /// Column-major packing used for deterministic tie-breaking; needs n*n <= 64.
    word encoding() const {
        require(n_ * n_ <= max_bits, "matrix too large for a single-word encoding");
        word code = 0;
        for (unsigned j = 0; j < n_; j++) {
            code |= cols_[j] << (j * n_);
        }
        return code;
    }

    std::vector<std::string> row_strings() const {
        std::vector<std::string> out;
        for (unsigned i = 0; i < n_; i++) {
            std::string s(n_, '0');
            for (unsigned j = 0; j < n_; j++) {
                if (entry(i, j)) {
                    s[j] = '1';
                }
            }
            out.push_back(std::move(s));
        }
        return out;
    }

    bool operator==(const LinMap &) const = default;

   private:
    unsigned n_ = 0;
    std::vector<word> cols_;
};

/// y -> linear(y) + shift.
struct AffineMap {
    LinMap linear;
    word shift = 0;

    unsigned dim() const {
        return linear.dim();
    }
    word apply(word y) const {
        return linear.apply(y) ^ shift;
    }
    /// G(l) = {(y, l(y))} as packed symplectic vectors, in increasing y.
    std::vector<word> graph() const {
        unsigned n = dim();
        std::vector<word> out;
        out.reserve(word{1} << n);
        for (word y = 0; y < (word{1} << n); y++) {
            out.push_back((y << n) | apply(y));
        }
        return out;
    }
    /// Matrix encoding followed by the shift bits; smaller wins ties.
    word encoding() const {
        return linear.encoding() | (shift << (dim() * dim()));
    }

    bool operator==(const AffineMap &) const = default;
};

/// Symplectic complement S^perp = {z : [z, s] = 0 for all s in S} inside F2^{2n}.
inline Subspace perp(const Subspace &s, unsigned n) {
    require(s.ambient_dim() == 2 * n, "perp: subspace must live in F2^{2n}");
    std::vector<word> constraints;
    for (word b : s.basis()) {
        constraints.push_back(swap_halves(n, b));
    }
    return Subspace::solutions(2 * n, constraints);
}

/// sum_{z in S} (-1)^{[z, zp]}. Evaluated through the perp test: the sum is |S|
/// when zp lies in the symplectic complement and cancels to 0 otherwise.
inline long long phase_sum(const Subspace &s, const SympVec &zp) {
    require(s.ambient_dim() == 2 * zp.n, "phase_sum dimension mismatch");
    return perp(s, zp.n).contains(zp.packed()) ? static_cast<long long>(s.size()) : 0;
}

struct CoverResult {
    AffineMap map;
    std::uint64_t count = 0;  // |G(map) ∩ S|
    double bound = 0;         // |S ∩ V| |U| / |V|
};

namespace detail {

inline std::vector<std::uint8_t> membership(std::span<const word> points, unsigned bits) {
    require(bits <= 26, "point set ambient dimension too large for a membership table");
    std::vector<std::uint8_t> in(size_t{1} << bits, 0);
    for (word p : points) {
        require((p & ~low_mask(bits)) == 0, "point has bits beyond the ambient dimension");
        in[p] = 1;
    }
    return in;
}

/// Smallest alpha with (y, alpha) in V, if any.
inline bool smallest_fiber_point(const AffineSubspace &v, unsigned n, word y, word &alpha) {
    for (word a = 0; a < (word{1} << n); a++) {
        if (v.contains((y << n) | a)) {
            alpha = a;
            return true;
        }
    }
    return false;
}

}  // namespace detail

/// Constructive covering lemma: an affine map l : F2^n -> F2^n whose graph meets
/// S in at least |S ∩ V| |U| / |V| points, U being the projection of V onto the
/// y coordinates.
///
/// Builds an affine L with (u, L(u)) in V for all u in U (fiber choices take the
/// smallest valid alpha), then scores every translate z + G(L) against S and
/// keeps the best; ties go to the smallest z.
inline CoverResult cover_affine_map(std::span<const word> s_points, const AffineSubspace &v, unsigned n) {
    require(v.ambient_dim() == 2 * n, "cover_affine_map: V must live in F2^{2n}");
    auto in_s = detail::membership(s_points, 2 * n);
    word mask = low_mask(n);

    word u0 = v.offset >> n;
    std::vector<word> projected;
    for (word b : v.direction.basis()) {
        projected.push_back(b >> n);
    }
    Subspace u_dir = Subspace::span(n, projected);

    word u0_image = 0;
    ensure(detail::smallest_fiber_point(v, n, u0, u0_image), "cover_affine_map: offset fiber empty");

    // Basis change P = [u_1..u_k | complement standard vectors], images T.
    std::vector<word> p_cols, t_cols;
    for (word u : u_dir.basis()) {
        word image = 0;
        ensure(detail::smallest_fiber_point(v, n, u0 ^ u, image), "cover_affine_map: fiber empty");
        p_cols.push_back(u);
        t_cols.push_back(image ^ u0_image);
    }
    word pivots = u_dir.pivot_mask();
    for (unsigned j = 0; j < n; j++) {
        if (!((pivots >> j) & 1)) {
            p_cols.push_back(word{1} << j);
            t_cols.push_back(0);
        }
    }
    LinMap p(n, p_cols), t(n, t_cols);
    LinMap m = t.compose(p.inverse());
    word base_shift = u0_image ^ m.apply(u0);

    // Every translate z + G(L) is the graph of y -> m y + c for some c, and the
    // smallest z producing shift c is (0, c + base_shift).
    CoverResult best;
    best.map = AffineMap{m, base_shift};
    bool have = false;
    for (word z2 = 0; z2 <= mask; z2++) {
        AffineMap cand{m, base_shift ^ z2};
        std::uint64_t count = 0;
        for (word y = 0; y <= mask; y++) {
            count += in_s[(y << n) | cand.apply(y)];
        }
        if (!have || count > best.count) {
            best.map = cand;
            best.count = count;
            have = true;
        }
    }

    std::uint64_t in_v = 0;
    std::vector<word> unique(s_points.begin(), s_points.end());
    std::sort(unique.begin(), unique.end());
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
    for (word z : unique) {
        in_v += v.contains(z);
    }
    best.bound = static_cast<double>(in_v) * static_cast<double>(u_dir.size()) / static_cast<double>(v.size());
    return best;
}

struct DoublingStats {
    double energy = 0;  // Pr_{z1,z2 in S}[z1 + z2 in S]
    double ratio = 0;   // |S + S| / |S|
};

/// Additive-structure diagnostics of a finite point set (duplicates ignored).
inline DoublingStats doubling_stats(std::span<const word> s_points) {
    std::vector<word> s(s_points.begin(), s_points.end());
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    require(!s.empty(), "doubling_stats needs a nonempty set");

    std::uint64_t hits = 0;
    std::vector<word> sums;
    sums.reserve(s.size() * s.size());
    for (word a : s) {
        for (word b : s) {
            word c = a ^ b;
            hits += std::binary_search(s.begin(), s.end(), c);
            sums.push_back(c);
        }
    }
    std::sort(sums.begin(), sums.end());
    auto distinct = std::unique(sums.begin(), sums.end()) - sums.begin();
    double size = static_cast<double>(s.size());
    return {static_cast<double>(hits) / (size * size), static_cast<double>(distinct) / size};
}

// Constants of the additive-combinatorics corollary behind the existence proof
// (K2 = 73, K1 = 3 * 6^72). Recorded for reporting; never used as thresholds.
inline constexpr double additive_K2 = 73.0;
inline const double additive_K1 = 3.0 * std::pow(6.0, 72.0);

}  // namespace stablab
