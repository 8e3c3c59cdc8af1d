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

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include "stablab/error.hpp"
#include "stablab/gf2.hpp"
#include "stablab/rng.hpp"
#include "stablab/states.hpp"

namespace stablab {

/// i^k for k mod 4.
inline cplx i_power(unsigned k) {
    static const std::array<cplx, 4> table{cplx{1, 0}, cplx{0, 1}, cplx{-1, 0}, cplx{0, -1}};
    return table[k & 3];
}

/// W_z = i^{y.alpha} X^y Z^alpha, where y.alpha counts the positions set in both.
inline StateVector apply_weyl(const StateVector &state, const SympVec &z) {
    require(state.n == z.n, "apply_weyl: qubit count mismatch");
    cplx prefactor = i_power(static_cast<unsigned>(std::popcount(z.y & z.alpha)));
    StateVector out = state;
    for (word x = 0; x < state.g.size(); x++) {
        cplx a = dot(x, z.alpha) ? -state.g[x] : state.g[x];
        out.g[x ^ z.y] = prefactor * a;
    }
    return out;
}

struct Gate {
    enum Kind : std::uint8_t { H, S, Z, CNOT };
    Kind kind = H;
    unsigned a = 0;  // target, or control for CNOT
    unsigned b = 0;  // CNOT target

    std::string str() const {
        switch (kind) {
            case H:
                return "H(" + std::to_string(a) + ")";
            case S:
                return "S(" + std::to_string(a) + ")";
            case Z:
                return "Z(" + std::to_string(a) + ")";
            case CNOT:
                return "CNOT(" + std::to_string(a) + "," + std::to_string(b) + ")";
        }
        return "?";
    }
    bool operator==(const Gate &) const = default;
};

inline void apply_gate(const Gate &gate, unsigned n, std::span<cplx> g) {
    const double r = 1.0 / std::sqrt(2.0);
    switch (gate.kind) {
        case Gate::H: {
            word bit = word{1} << gate.a;
            for (word x = 0; x < g.size(); x++) {
                if (!(x & bit)) {
                    cplx u = g[x], v = g[x | bit];
                    g[x] = (u + v) * r;
                    g[x | bit] = (u - v) * r;
                }
            }
            break;
        }
        case Gate::S:
        case Gate::Z: {
            word bit = word{1} << gate.a;
            cplx phase = gate.kind == Gate::S ? cplx{0, 1} : cplx{-1, 0};
            for (word x = 0; x < g.size(); x++) {
                if (x & bit) {
                    g[x] *= phase;
                }
            }
            break;
        }
        case Gate::CNOT: {
            word c = word{1} << gate.a, t = word{1} << gate.b;
            for (word x = 0; x < g.size(); x++) {
                if ((x & c) && !(x & t)) {
                    std::swap(g[x], g[x | t]);
                }
            }
            break;
        }
    }
    (void)n;
}

/// An ordered gate list over {H, S, Z, CNOT}; gates act left to right.
struct CliffordCircuit {
    unsigned n = 0;
    std::vector<Gate> gates;

    void validate() const {
        for (const auto &g : gates) {
            require(g.a < n, "gate index out of range: " + g.str());
            if (g.kind == Gate::CNOT) {
                require(g.b < n && g.b != g.a, "bad CNOT operands: " + g.str());
            }
        }
    }
    /// Real circuits (no S gate) have real matrices in the computational basis.
    bool is_real() const {
        for (const auto &g : gates) {
            if (g.kind == Gate::S) {
                return false;
            }
        }
        return true;
    }
    CliffordCircuit inverse() const {
        CliffordCircuit inv{n, {}};
        for (auto it = gates.rbegin(); it != gates.rend(); ++it) {
            int copies = it->kind == Gate::S ? 3 : 1;
            for (int k = 0; k < copies; k++) {
                inv.gates.push_back(*it);
            }
        }
        return inv;
    }
    std::vector<std::string> gate_strings() const {
        std::vector<std::string> out;
        for (const auto &g : gates) {
            out.push_back(g.str());
        }
        return out;
    }
};

inline StateVector apply_clifford(const CliffordCircuit &c, const StateVector &state) {
    require(c.n == state.n, "apply_clifford: qubit count mismatch");
    c.validate();
    StateVector out = state;
    for (const auto &gate : c.gates) {
        apply_gate(gate, c.n, out.g);
    }
    return out;
}

/// Word length of the random generator walk used to sample the real Clifford group.
inline size_t real_clifford_mixing_depth(unsigned n) {
    return 40 * size_t{n} * n;
}

/// Seeded random word in {H, Z, CNOT} of length `depth` (>= 40 n^2), plus an
/// optional trailing Z. Gate kinds and qubits are chosen uniformly; CNOT is only
/// offered when n >= 2.
inline CliffordCircuit random_real_clifford(unsigned n, size_t depth, std::uint64_t seed) {
    require(n >= 1, "random_real_clifford needs n >= 1");
    require(depth >= real_clifford_mixing_depth(n), "random_real_clifford: depth below the 40 n^2 mixing floor");
    Rng rng(seed);
    CliffordCircuit c{n, {}};
    c.gates.reserve(depth);
    unsigned kinds = n >= 2 ? 3 : 2;
    for (size_t k = 0; k < depth; k++) {
        auto kind = std::uniform_int_distribution<unsigned>(0, kinds - 1)(rng);
        auto q = std::uniform_int_distribution<unsigned>(0, n - 1)(rng);
        if (kind == 0) {
            c.gates.push_back({Gate::H, q, 0});
        } else if (kind == 1) {
            c.gates.push_back({Gate::Z, q, 0});
        } else {
            auto t = std::uniform_int_distribution<unsigned>(0, n - 2)(rng);
            if (t >= q) {
                t++;
            }
            c.gates.push_back({Gate::CNOT, q, t});
        }
    }
    // Every generator has determinant -1 at n = 1, so a fixed-length word only
    // reaches one coset; a coin-flip Z fixes the parity.
    if (std::uniform_int_distribution<unsigned>(0, 1)(rng)) {
        c.gates.push_back({Gate::Z, std::uniform_int_distribution<unsigned>(0, n - 1)(rng), 0});
    }
    return c;
}

inline CliffordCircuit random_real_clifford(unsigned n, std::uint64_t seed) {
    return random_real_clifford(n, real_clifford_mixing_depth(n), seed);
}

/// (1/sqrt|A|) sum_{x in A} i^{l(x)} (-1)^{Q(x)} |x>, with l(x) = <ell, x> and
/// Q(x) = sum_{i<j} Q_ij x_i x_j + <q_linear, x> over F2.
struct StabilizerState {
    unsigned n = 0;
    AffineSubspace support;
    word ell = 0;
    std::vector<word> q_upper;  // row i holds the bits j > i with Q_ij = 1
    word q_linear = 0;

    bool l_value(word x) const {
        return dot(ell, x);
    }
    bool q_value(word x) const {
        bool q = dot(q_linear, x);
        for (unsigned i = 0; i < n; i++) {
            if ((x >> i) & 1) {
                q ^= dot(q_upper[i], x);
            }
        }
        return q;
    }
    /// Power of i of the amplitude at x in A.
    unsigned phase_power(word x) const {
        return (l_value(x) ? 1u : 0u) + (q_value(x) ? 2u : 0u);
    }

    void validate() const {
        require(n >= 1 && n <= max_dense_qubits, "stabilizer state qubit count out of range");
        require(support.ambient_dim() == n, "stabilizer support dimension mismatch");
        require(q_upper.size() == n, "Q_upper must have n rows");
        require((ell & ~low_mask(n)) == 0 && (q_linear & ~low_mask(n)) == 0, "ell / linear Q bits beyond n");
        for (unsigned i = 0; i < n; i++) {
            require((q_upper[i] & ~low_mask(n)) == 0, "Q_upper row has bits beyond n");
            require((q_upper[i] & low_mask(i + 1)) == 0, "Q_upper must be strictly upper triangular");
        }
    }

    StateVector to_statevector() const {
        validate();
        size_t dim = size_t{1} << n;
        std::vector<cplx> g(dim, 0.0);
        double amp = std::sqrt(static_cast<double>(dim) / static_cast<double>(support.size()));
        for (word x : support.elements()) {
            g[x] = amp * i_power(phase_power(x));
        }
        return StateVector(n, std::move(g));
    }
};

inline StateVector stabilizer_to_statevector(const StabilizerState &s) {
    return s.to_statevector();
}

/// Recovers the canonical (A, l, Q) form of a stabilizer vector, up to global phase.
/// Returns nullopt when the vector is not a stabilizer state.
inline std::optional<StabilizerState> stabilizer_from_statevector(const StateVector &state, double tol = 1e-9) {
    auto amps = state.unit_amplitudes();
    std::vector<word> supp;
    for (word x = 0; x < amps.size(); x++) {
        if (std::abs(amps[x]) > tol) {
            supp.push_back(x);
        }
    }
    if (supp.empty() || !is_power_of_two(supp.size())) {
        return std::nullopt;
    }
    Subspace dir(state.n);
    for (word x : supp) {
        dir.insert(x ^ supp.front());
    }
    if (dir.size() != supp.size()) {
        return std::nullopt;
    }
    StabilizerState s;
    s.n = state.n;
    s.support = AffineSubspace(supp.front(), dir);
    s.q_upper.assign(state.n, 0);

    word v = s.support.offset;
    cplx ref = amps[v];
    double magnitude = 1.0 / std::sqrt(static_cast<double>(supp.size()));
    std::map<word, unsigned> power;
    for (word x : supp) {
        cplx r = amps[x] / ref;
        if (std::abs(std::abs(amps[x]) - magnitude) > tol) {
            return std::nullopt;
        }
        bool matched = false;
        for (unsigned k = 0; k < 4; k++) {
            if (std::abs(r - i_power(k)) <= 1e-6) {
                power[x] = k;
                matched = true;
                break;
            }
        }
        if (!matched) {
            return std::nullopt;
        }
    }

    const auto &rows = dir.basis();
    auto pivot = [](word r) { return 63u - static_cast<unsigned>(std::countl_zero(r)); };
    auto l_at = [&](word x) { return (power[x] & 1) != 0; };
    auto q_at = [&](word x) { return ((power[x] >> 1) & 1) != 0; };
    for (size_t j = 0; j < rows.size(); j++) {
        unsigned pj = pivot(rows[j]);
        word xj = v ^ rows[j];
        if (l_at(xj)) {
            s.ell |= word{1} << pj;
        }
        if (q_at(xj)) {
            s.q_linear |= word{1} << pj;
        }
        for (size_t k = j + 1; k < rows.size(); k++) {
            unsigned pk = pivot(rows[k]);
            word xk = v ^ rows[k];
            word xjk = v ^ rows[j] ^ rows[k];
            if (q_at(xjk) != (q_at(xj) != q_at(xk))) {
                unsigned lo = std::min(pj, pk), hi = std::max(pj, pk);
                s.q_upper[lo] |= word{1} << hi;
            }
        }
    }
    // The offset has zero pivot bits, so l and Q vanish there; check everything else.
    for (word x : supp) {
        if (s.phase_power(x) != power[x]) {
            return std::nullopt;
        }
    }
    return s;
}

/// 2^n prod_{k=1..n} (2^k + 1).
inline std::uint64_t stabilizer_count(unsigned n) {
    std::uint64_t c = std::uint64_t{1} << n;
    for (unsigned k = 1; k <= n; k++) {
        c *= (std::uint64_t{1} << k) + 1;
    }
    return c;
}

inline constexpr unsigned max_enumeration_qubits = 4;

namespace detail {

inline std::vector<std::vector<Subspace>> subspaces_by_dim(unsigned n) {
    std::vector<std::set<Subspace>> layers(n + 1);
    layers[0].insert(Subspace::zero(n));
    for (unsigned k = 0; k < n; k++) {
        for (const auto &s : layers[k]) {
            for (word x = 1; x < (word{1} << n); x++) {
                if (!s.contains(x)) {
                    Subspace t = s;
                    t.insert(x);
                    layers[k + 1].insert(std::move(t));
                }
            }
        }
    }
    std::vector<std::vector<Subspace>> out;
    for (auto &layer : layers) {
        out.emplace_back(layer.begin(), layer.end());
    }
    return out;
}

/// Hash key of a vector after fixing global phase (first nonzero amplitude made
/// positive real) and rounding to 12 decimals.
inline std::string phase_fixed_key(const std::vector<cplx> &amps) {
    cplx phase = 1;
    for (const auto &a : amps) {
        if (std::abs(a) > 1e-9) {
            phase = std::conj(a) / std::abs(a);
            break;
        }
    }
    std::string key;
    key.reserve(amps.size() * 24);
    for (const auto &a : amps) {
        cplx b = a * phase;
        for (double part : {b.real(), b.imag()}) {
            long long r = std::llround(part * 1e12);
            key.append(reinterpret_cast<const char *>(&r), sizeof r);
        }
    }
    return key;
}

inline std::vector<StabilizerState> build_stabilizers(unsigned n) {
    std::vector<StabilizerState> out;
    std::unordered_set<std::string> seen;
    auto layers = subspaces_by_dim(n);
    for (unsigned k = 0; k <= n; k++) {
        for (const auto &dir : layers[k]) {
            std::vector<unsigned> pivots;
            for (word r : dir.basis()) {
                pivots.push_back(63u - static_cast<unsigned>(std::countl_zero(r)));
            }
            word pivot_mask = dir.pivot_mask();
            unsigned pairs = k * (k - 1) / 2;
            for (word offset = 0; offset < (word{1} << n); offset++) {
                if (offset & pivot_mask) {
                    continue;
                }
                for (word lc = 0; lc < (word{1} << k); lc++) {
                    for (word qc = 0; qc < (word{1} << (k + pairs)); qc++) {
                        StabilizerState s;
                        s.n = n;
                        s.support = AffineSubspace(offset, dir);
                        s.q_upper.assign(n, 0);
                        unsigned bit = 0;
                        for (unsigned j = 0; j < k; j++) {
                            if ((lc >> j) & 1) {
                                s.ell |= word{1} << pivots[j];
                            }
                            if ((qc >> bit++) & 1) {
                                s.q_linear |= word{1} << pivots[j];
                            }
                        }
                        for (unsigned j = 0; j < k; j++) {
                            for (unsigned m = j + 1; m < k; m++) {
                                if ((qc >> bit++) & 1) {
                                    unsigned lo = std::min(pivots[j], pivots[m]);
                                    unsigned hi = std::max(pivots[j], pivots[m]);
                                    s.q_upper[lo] |= word{1} << hi;
                                }
                            }
                        }
                        if (seen.insert(phase_fixed_key(s.to_statevector().unit_amplitudes())).second) {
                            out.push_back(std::move(s));
                        }
                    }
                }
            }
        }
    }
    ensure(out.size() == stabilizer_count(n), "stabilizer enumeration count disagrees with 2^n prod(2^k + 1)");
    return out;
}

struct StabilizerCache {
    std::once_flag once;
    std::vector<StabilizerState> states;
    std::vector<cplx> unit_vectors;  // states.size() rows of 2^n unit amplitudes
};

inline StabilizerCache &stabilizer_cache(unsigned n) {
    static std::array<StabilizerCache, max_enumeration_qubits + 1> caches;
    auto &c = caches[n];
    std::call_once(c.once, [&] {
        c.states = build_stabilizers(n);
        size_t dim = size_t{1} << n;
        c.unit_vectors.reserve(c.states.size() * dim);
        for (const auto &s : c.states) {
            auto u = s.to_statevector().unit_amplitudes();
            c.unit_vectors.insert(c.unit_vectors.end(), u.begin(), u.end());
        }
    });
    return c;
}

}  // namespace detail

/// Every n-qubit stabilizer state exactly once, ordered by support dimension, then
/// support direction, offset, l and Q. n is capped at 4 (36720 states).
inline const std::vector<StabilizerState> &enumerate_stabilizers(unsigned n) {
    require(n >= 1 && n <= max_enumeration_qubits, "enumerate_stabilizers: n must be in [1, 4]");
    return detail::stabilizer_cache(n).states;
}

/// Unit-convention amplitudes of enumerate_stabilizers(n), row-major.
inline std::span<const cplx> stabilizer_unit_vector(unsigned n, size_t index) {
    require(n >= 1 && n <= max_enumeration_qubits, "stabilizer_unit_vector: n must be in [1, 4]");
    const auto &c = detail::stabilizer_cache(n);
    size_t dim = size_t{1} << n;
    return std::span<const cplx>(c.unit_vectors).subspan(index * dim, dim);
}

/// sum_x |<x|phi>|^4.
inline double fourth_moment(const StateVector &state) {
    double s = 0;
    for (const auto &a : state.g) {
        s += std::norm(a) * std::norm(a);
    }
    double dim = static_cast<double>(state.g.size());
    return s / (dim * dim);
}

struct BalanceFailed : InvariantViolation {
    double best_moment;
    BalanceFailed(const std::string &what, double best) : InvariantViolation(what), best_moment(best) {
    }
};

struct BalanceResult {
    CliffordCircuit circuit;
    StateVector state;
    double moment = 0;  // sum_x |<x|C phi>|^4
    size_t tries = 0;
};

/// Finds a real Clifford C with sum_x |<x|C phi>|^4 <= 3/N by seeded rejection
/// sampling. The identity is tried first; draw t uses seed derived_seed(seed, t).
inline BalanceResult balance(const StateVector &state, size_t max_tries, std::uint64_t seed) {
    require(max_tries >= 1, "balance: max_tries must be >= 1");
    require(state.is_real(1e-12), "balance: input must have real amplitudes (apply split_real first)");
    require(state.is_normalized(1e-9), "balance: input must be normalized");
    double limit = 3.0 / static_cast<double>(state.g.size()) + 1e-12;
    double best = fourth_moment(state);
    if (best <= limit) {
        return {CliffordCircuit{state.n, {}}, state, best, 1};
    }
    for (size_t t = 1; t < max_tries; t++) {
        auto c = random_real_clifford(state.n, derived_seed(seed, t, 0xba1a));
        auto out = apply_clifford(c, state);
        double m = fourth_moment(out);
        if (m <= limit) {
            return {std::move(c), std::move(out), m, t + 1};
        }
        best = std::min(best, m);
    }
    throw BalanceFailed("balance: no real Clifford reached sum|amp|^4 <= 3/N within " + std::to_string(max_tries) +
                            " tries (best " + std::to_string(best) + ")",
                        best);
}

}  // namespace stablab
