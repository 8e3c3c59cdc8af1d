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

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "stablab/charfn.hpp"
#include "stablab/clifford.hpp"
#include "stablab/error.hpp"
#include "stablab/gf2.hpp"
#include "stablab/parallel.hpp"
#include "stablab/rng.hpp"
#include "stablab/states.hpp"

namespace stablab {

struct SplitResult {
    StateVector state;  // the chosen part, renormalized; real amplitudes
    double nu = 0;      // E|g_part|^2
    bool imaginary = false;
};

/// g = g_R + i g_I; keeps whichever part has the larger U3 norm (real on ties).
inline SplitResult split_real(const StateVector &state) {
    require(state.is_normalized(1e-9), "split_real: state must be normalized");
    size_t dim = state.dim();
    std::vector<cplx> re(dim), im(dim);
    for (size_t x = 0; x < dim; x++) {
        re[x] = state.g[x].real();
        im[x] = state.g[x].imag();
    }
    StateVector r(state.n, std::move(re)), i(state.n, std::move(im));
    double nu_r = r.norm_sq(), nu_i = i.norm_sq();
    ensure(nu_r > 0 || nu_i > 0, "split_real: both parts vanish for a normalized state");
    // ||c g||^8_{U3} = c^8 ||g||^8_{U3}, so the unnormalized value is nu^4 times the normalized one.
    auto weight = [](const StateVector &p, double nu) { return nu > 0 ? std::pow(nu, 4) * gowers3(p.normalized()) : -1.0; };
    double w_r = weight(r, nu_r), w_i = weight(i, nu_i);
    SplitResult out;
    if (w_r >= w_i) {
        out = {r.normalized(), nu_r, false};
    } else {
        out = {i.normalized(), nu_i, true};
    }
    for (auto &a : out.state.g) {
        a = {a.real(), 0.0};
    }
    double input = gowers3(state);
    double output = gowers3(out.state);
    ensure(output >= input / (256.0 * std::pow(out.nu, 4)) - 1e-9,
           "split_real: chosen part violates ||g_part||_{U3} >= ||g||_{U3} / 2");
    return out;
}

struct ZetaSample {
    std::vector<word> zeta;
    double L_value = 0;
};

/// Pr_{y1,y2}[f(y1,z(y1)) >= d, f(y2,z(y2)) >= d, f(y1+y2,z(y1+y2)) >= d, z(y1)+z(y2) = z(y1+y2)].
inline double zeta_L_value(const CharTable &t, std::span<const word> zeta, double delta) {
    size_t dim = t.dim();
    require(zeta.size() == dim, "zeta table length must be 2^n");
    std::vector<std::uint8_t> good(dim);
    for (word y = 0; y < dim; y++) {
        good[y] = t.at(y, zeta[y]) >= delta;
    }
    std::uint64_t hits = 0;
    for (word y1 = 0; y1 < dim; y1++) {
        if (!good[y1]) {
            continue;
        }
        for (word y2 = 0; y2 < dim; y2++) {
            word y3 = y1 ^ y2;
            hits += good[y2] && good[y3] && (zeta[y1] ^ zeta[y2]) == zeta[y3];
        }
    }
    return static_cast<double>(hits) / (static_cast<double>(dim) * static_cast<double>(dim));
}

/// Independent per-y draws z(y) = alpha with probability f(y, alpha) / r(y), r(y) the row sum.
inline ZetaSample sample_zeta(const CharTable &t, double delta, std::uint64_t seed) {
    require(delta > 0, "sample_zeta: delta must be > 0");
    size_t dim = t.dim();
    ZetaSample out;
    out.zeta.assign(dim, 0);
    for (word y = 0; y < dim; y++) {
        double r = t.row_sum(y);
        require(r <= 3 + 1e-9, "sample_zeta: row sum exceeds 3; the state was not balanced");
        if (r <= 0) {
            continue;
        }
        auto rng = derived_rng(seed, y, 0x2e7a);
        double u = uniform01(rng) * r, acc = 0;
        word pick = 0;
        bool picked = false;
        for (word a = 0; a < dim; a++) {
            double p = t.at(y, a);
            if (p <= 0) {
                continue;
            }
            acc += p;
            pick = a;
            if (u < acc) {
                picked = true;
                break;
            }
        }
        (void)picked;  // rounding past the last positive entry keeps the last one
        out.zeta[y] = pick;
    }
    out.L_value = zeta_L_value(t, out.zeta, delta);
    return out;
}

/// (1/27)((1/N) sum f^3 - 3 delta) - 2/N, the averaged L lower bound with the
/// exponentially small error term taken as 2/N.
inline double zeta_L_lower_bound(const CharTable &t, double delta) {
    double s = 0;
    for (double v : t.f) {
        s += v * v * v;
    }
    double dim = static_cast<double>(t.dim());
    return (s / dim - 3 * delta) / 27.0 - 2.0 / dim;
}

/// The points (y, zeta(y)) with f(y, zeta(y)) >= delta.
inline std::vector<word> zeta_support(const CharTable &t, std::span<const word> zeta, double delta) {
    std::vector<word> s;
    for (word y = 0; y < t.dim(); y++) {
        if (t.at(y, zeta[y]) >= delta) {
            s.push_back((y << t.n) | zeta[y]);
        }
    }
    return s;
}

/// sum_y t(y, l(y)).
inline double graph_sum(const CharTable &t, const AffineMap &m) {
    double s = 0;
    for (word y = 0; y < t.dim(); y++) {
        s += t.at(y, m.apply(y));
    }
    return s;
}

inline double graph_sum(const CharTable &t, const LinMap &m) {
    return graph_sum(t, AffineMap{m, 0});
}

struct AffineSearchResult {
    AffineMap map;
    double value = 0;  // sum over the graph, not divided by N
    bool exhaustive = true;
};

inline constexpr unsigned max_exhaustive_map_qubits = 4;

namespace detail {

inline bool better(double v, word enc, double best_v, word best_enc) {
    double tol = 1e-12 * std::max(1.0, std::abs(best_v));
    if (v > best_v + tol) {
        return true;
    }
    return v >= best_v - tol && enc < best_enc;
}

inline AffineSearchResult hill_climb_affine(const CharTable &t, std::uint64_t seed, unsigned restarts) {
    unsigned n = t.n;
    unsigned bits = n * n + n;
    AffineSearchResult best{AffineMap{LinMap(n), 0}, -1, false};
    word best_enc = ~word{0};
    auto decode = [&](word code) { return AffineMap{LinMap::from_encoding(n, code & low_mask(n * n)), code >> (n * n)}; };
    // Second start: shift and columns read off the per-row maxima at 0 and e_j.
    auto row_argmax = [&](word y) {
        word arg = 0;
        for (word a = 1; a < t.dim(); a++) {
            if (t.at(y, a) > t.at(y, arg)) {
                arg = a;
            }
        }
        return arg;
    };
    word shift = row_argmax(0);
    word argmax_start = shift << (n * n);
    for (unsigned j = 0; j < n; j++) {
        argmax_start |= (row_argmax(word{1} << j) ^ shift) << (j * n);
    }
    for (unsigned r = 0; r < restarts; r++) {
        auto rng = derived_rng(seed, r, 0xc11b);
        word code = r == 0 ? 0 : r == 1 ? argmax_start : (rng() & low_mask(bits));
        double value = graph_sum(t, decode(code));
        while (true) {
            word next = code;
            double next_v = value;
            for (unsigned b = 0; b < bits; b++) {
                word c = code ^ (word{1} << b);
                double v = graph_sum(t, decode(c));
                if (better(v, c, next_v, next) && v > value + 1e-12) {
                    next = c;
                    next_v = v;
                }
            }
            if (next == code) {
                break;
            }
            code = next;
            value = next_v;
        }
        if (better(value, code, best.value, best_enc)) {
            best = {decode(code), value, false};
            best_enc = code;
        }
    }
    return best;
}

}  // namespace detail

/// argmax over affine maps of sum_{z in G(l)} t(z): exhaustive for n <= 4 (ties to
/// the smallest AffineMap::encoding), seeded hill climbing for n = 5, 6.
inline AffineSearchResult best_affine_map(const CharTable &t, std::uint64_t seed = 0) {
    unsigned n = t.n;
    if (n > max_exhaustive_map_qubits) {
        return detail::hill_climb_affine(t, seed, 64);
    }
    size_t dim = t.dim();
    word linear_count = word{1} << (n * n);
    size_t chunks = std::min<size_t>(64, linear_count);
    std::vector<AffineSearchResult> partial(chunks);
    std::vector<word> partial_enc(chunks, ~word{0});
    parallel_for(0, chunks, [&](size_t c) {
        word lo = linear_count * c / chunks, hi = linear_count * (c + 1) / chunks;
        std::vector<word> image(dim);
        AffineSearchResult local{AffineMap{LinMap(n), 0}, -1, true};
        word local_enc = ~word{0};
        for (word code = lo; code < hi; code++) {
            LinMap m = LinMap::from_encoding(n, code);
            for (word y = 0; y < dim; y++) {
                image[y] = m.apply(y);
            }
            for (word shift = 0; shift < dim; shift++) {
                double v = 0;
                for (word y = 0; y < dim; y++) {
                    v += t.f[(y << n) | (image[y] ^ shift)];
                }
                word enc = code | (shift << (n * n));
                if (detail::better(v, enc, local.value, local_enc)) {
                    local = {AffineMap{m, shift}, v, true};
                    local_enc = enc;
                }
            }
        }
        partial[c] = local;
        partial_enc[c] = local_enc;
    });
    AffineSearchResult best = partial[0];
    word best_enc = partial_enc[0];
    for (size_t c = 1; c < chunks; c++) {
        if (detail::better(partial[c].value, partial_enc[c], best.value, best_enc)) {
            best = partial[c];
            best_enc = partial_enc[c];
        }
    }
    return best;
}

struct MapStage {
    LinMap map;
    double value = 0;  // sum over the graph
};

inline double stage_tolerance(const CharTable &t) {
    return 1e-9 * static_cast<double>(t.dim());
}

/// Linear part of an affine map; its graph sum can only grow.
inline MapStage drop_shift(const AffineMap &m, const CharTable &t) {
    require(m.dim() == t.n, "drop_shift: dimension mismatch");
    double before = graph_sum(t, m);
    double after = graph_sum(t, m.linear);
    ensure(after >= before - stage_tolerance(t),
           "drop_shift: removing the shift lowered the graph sum (sum over a subspace dominates its translates)");
    return {m.linear, after};
}

/// Symmetric l' agreeing with l on Y = ker(l + l^t).
///
/// In a basis P = [Y basis | complement], the columns of P^t l' P indexed by Y are
/// forced to those of P^t l P, the mirrored block follows by symmetry, and the
/// complement-complement block is chosen by exhaustive search (up to 16 free bits,
/// ties to the smallest encoding, so zero first); above that it is zero.
inline MapStage symmetrize_map(const LinMap &l, const CharTable &t) {
    unsigned n = l.dim();
    require(n == t.n, "symmetrize_map: dimension mismatch");
    double before = graph_sum(t, l);
    Subspace y_space = (l + l.transpose()).kernel();
    std::vector<word> p_cols(y_space.basis().begin(), y_space.basis().end());
    auto k = static_cast<unsigned>(p_cols.size());
    Subspace span = y_space;
    for (unsigned j = 0; j < n; j++) {
        if (span.insert(word{1} << j)) {
            p_cols.push_back(word{1} << j);
        }
    }
    LinMap p(n, p_cols);
    LinMap p_inv = p.inverse();
    LinMap a = p.transpose().compose(l).compose(p);

    LinMap fixed(n);
    for (unsigned j = 0; j < k; j++) {
        for (unsigned i = 0; i < n; i++) {
            fixed.set_entry(i, j, a.entry(i, j));
            fixed.set_entry(j, i, a.entry(i, j));
        }
    }
    unsigned c = n - k;
    unsigned free_bits = c * (c + 1) / 2;
    auto build = [&](word code) {
        LinMap s = fixed;
        unsigned b = 0;
        for (unsigned i = k; i < n; i++) {
            for (unsigned j = i; j < n; j++) {
                bool v = (code >> b++) & 1;
                s.set_entry(i, j, v);
                s.set_entry(j, i, v);
            }
        }
        return p_inv.transpose().compose(s).compose(p_inv);
    };
    word codes = free_bits <= 16 ? word{1} << free_bits : 1;
    LinMap best = build(0);
    double best_v = graph_sum(t, best);
    for (word code = 1; code < codes; code++) {
        LinMap cand = build(code);
        double v = graph_sum(t, cand);
        if (v > best_v + 1e-12 * std::max(1.0, best_v)) {
            best = cand;
            best_v = v;
        }
    }
    ensure(best.is_symmetric(), "symmetrize_map: completion is not symmetric");
    for (word y : y_space.basis()) {
        ensure(best.apply(y) == l.apply(y), "symmetrize_map: completion disagrees with l on ker(l + l^t)");
    }
    double n_d = static_cast<double>(t.dim());
    ensure(best_v >= before * before / n_d - stage_tolerance(t),
           "symmetrize_map: eta -> eta^2 law violated (sum over G(l') >= (sum over G(l))^2 / N)");
    return {best, best_v};
}

/// l' = l + v v^t with v = diag(l); zero diagonal, graph sum non-decreasing on real states.
inline MapStage zero_diagonal_map(const LinMap &l, const CharTable &t) {
    require(l.is_symmetric(), "zero_diagonal_map: input must be symmetric");
    require(l.dim() == t.n, "zero_diagonal_map: dimension mismatch");
    word v = l.diagonal();
    std::vector<word> cols = l.columns();
    for (unsigned j = 0; j < l.dim(); j++) {
        if ((v >> j) & 1) {
            cols[j] ^= v;
        }
    }
    LinMap out(l.dim(), cols);
    double before = graph_sum(t, l), after = graph_sum(t, out);
    ensure(after >= before - stage_tolerance(t),
           "zero_diagonal_map: clearing the diagonal lowered the graph sum (f(y, l(y)) <= f(y, l'(y)) for real states)");
    return {out, after};
}

/// q(x) = sum_{i<j} Q_ij x_i x_j + <linear, x> over F2.
struct QuadPoly {
    unsigned n = 0;
    std::vector<word> upper;  // row i holds the j > i with Q_ij = 1
    word linear = 0;

    bool operator()(word x) const {
        bool q = dot(linear, x);
        for (unsigned i = 0; i < n; i++) {
            if ((x >> i) & 1) {
                q ^= dot(upper[i], x);
            }
        }
        return q;
    }
    /// Full-support stabilizer N^{-1/2} sum_x (-1)^{q(x)} |x>.
    StabilizerState stabilizer() const {
        StabilizerState s;
        s.n = n;
        s.support = AffineSubspace(0, Subspace::full(n));
        s.q_upper = upper;
        s.q_linear = linear;
        return s;
    }
};

/// Upper-triangular part of a symmetric zero-diagonal map, the quadratic form whose
/// polarization is l.
inline QuadPoly quadratic_of(const LinMap &l) {
    QuadPoly q{l.dim(), std::vector<word>(l.dim(), 0), 0};
    for (unsigned i = 0; i < l.dim(); i++) {
        for (unsigned j = i + 1; j < l.dim(); j++) {
            if (l.entry(i, j)) {
                q.upper[i] |= word{1} << j;
            }
        }
    }
    return q;
}

struct QuadraticResult {
    QuadPoly q;
    double correlation = 0;  // |E[g (-1)^q]|
    word alpha = 0;
    double fourier4 = 0;     // sum_alpha hat(Hg)(alpha)^4
    double graph_mean = 0;   // (1/N) sum_y f(y, l(y))
};

/// With H(x) = (-1)^{sum_{i<j} l_ij x_i x_j}, picks alpha maximizing |hat(Hg)(alpha)|.
inline QuadraticResult extract_quadratic(const StateVector &g, const LinMap &l, const CharTable &t) {
    require(l.is_symmetric() && l.diagonal() == 0, "extract_quadratic: map must be symmetric with zero diagonal");
    require(g.is_real(0), "extract_quadratic: amplitudes must be real");
    require(g.n == l.dim() && t.n == g.n, "extract_quadratic: dimension mismatch");
    QuadraticResult r;
    r.q = quadratic_of(l);
    size_t dim = g.dim();
    std::vector<double> hg(dim);
    double mass = 0;
    for (word x = 0; x < dim; x++) {
        double gx = g.g[x].real();
        hg[x] = r.q(x) ? -gx : gx;
        mass += gx * gx;
    }
    mass /= static_cast<double>(dim);
    auto hat = walsh_hadamard<double>(hg);
    double best = -1, sum4 = 0;
    for (word a = 0; a < dim; a++) {
        double v = std::abs(hat[a]);
        sum4 += v * v * v * v;
        if (v > best + 1e-15) {
            best = v;
            r.alpha = a;
        }
    }
    r.q.linear = r.alpha;
    r.correlation = best;
    r.fourier4 = sum4;
    r.graph_mean = graph_sum(t, l) / static_cast<double>(dim);
    ensure(std::abs(sum4 - r.graph_mean) <= 1e-9 * std::max(1.0, r.graph_mean),
           "extract_quadratic: sum_alpha hat(Hg)(alpha)^4 != (1/N) sum_y f(y, l(y))");
    ensure(best * best * mass >= sum4 - 1e-12,
           "extract_quadratic: max |hat(Hg)|^2 sum hat(Hg)^2 fell below sum hat(Hg)^4");
    return r;
}

struct PipelineTrace {
    unsigned n = 0;
    double gamma = 0;
    double nu = 0;
    bool imaginary_part = false;
    CliffordCircuit balance_circuit;
    double balance_moment = 0;
    size_t balance_tries = 0;
    double max_row_sum = 0;
    AffineMap affine_map;
    bool map_search_exhaustive = true;
    LinMap linear_map, symmetric_map, zero_diagonal;
    double value_affine = 0, value_linear = 0, value_symmetric = 0, value_zero_diagonal = 0;  // graph sums / N
    QuadPoly q_poly;
    word alpha = 0;
    double correlation = 0;
    double fourier4 = 0;
    double final_overlap = 0;
    StabilizerState witness;
    // Worst-case guarantee gamma^{C2}/C1, for reference only.
    double theory_C2 = 4 * additive_K2 + 6;
    double theory_log10_C1 = 0;
    double theory_log10_guarantee = 0;
};

inline double theory_log10_C1() {
    return std::log10(6.0) + 2 * std::log10(additive_K1) + (2 * additive_K2 + 2) * std::log10(54.0) +
           (32 * additive_K2 + 48) * std::log10(2.0);
}

struct ExtractResult {
    StabilizerState stabilizer;
    double overlap = 0;
    PipelineTrace trace;
};

inline constexpr size_t default_balance_tries = 1000;

/// The constructive route from large U3 norm to a stabilizer witness:
/// split_real, balance, char_function, best_affine_map, drop_shift,
/// symmetrize_map, zero_diagonal_map, extract_quadratic; then s = C^dagger s'.
inline ExtractResult extract_stabilizer(const StateVector &state, std::uint64_t seed,
                                        size_t max_tries = default_balance_tries) {
    require(state.n >= 1 && state.n <= max_table_qubits, "extract_stabilizer: n must be in [1, 6]");
    require(state.is_normalized(1e-9), "extract_stabilizer: state must be normalized");
    PipelineTrace tr;
    tr.n = state.n;
    tr.gamma = gowers3(state);

    auto split = split_real(state);
    tr.nu = split.nu;
    tr.imaginary_part = split.imaginary;

    auto bal = balance(split.state, max_tries, seed);
    tr.balance_circuit = bal.circuit;
    tr.balance_moment = bal.moment;
    tr.balance_tries = bal.tries;

    auto t = char_function(bal.state);
    tr.max_row_sum = t.max_row_sum();
    ensure(tr.max_row_sum <= 3 + 1e-9, "extract_stabilizer: balanced table has a row sum above 3");
    double n_d = static_cast<double>(t.dim());

    auto aff = best_affine_map(t, seed);
    tr.affine_map = aff.map;
    tr.map_search_exhaustive = aff.exhaustive;
    tr.value_affine = aff.value / n_d;

    auto lin = drop_shift(aff.map, t);
    tr.linear_map = lin.map;
    tr.value_linear = lin.value / n_d;

    auto sym = symmetrize_map(lin.map, t);
    tr.symmetric_map = sym.map;
    tr.value_symmetric = sym.value / n_d;

    auto zd = zero_diagonal_map(sym.map, t);
    tr.zero_diagonal = zd.map;
    tr.value_zero_diagonal = zd.value / n_d;

    auto quad = extract_quadratic(bal.state, zd.map, t);
    tr.q_poly = quad.q;
    tr.alpha = quad.alpha;
    tr.correlation = quad.correlation;
    tr.fourier4 = quad.fourier4;

    auto s_prime = quad.q.stabilizer().to_statevector();
    auto s_vec = apply_clifford(bal.circuit.inverse(), s_prime);
    auto s = stabilizer_from_statevector(s_vec);
    ensure(s.has_value(), "extract_stabilizer: Clifford image of a quadratic phase state is not a stabilizer state");
    double overlap = overlap_sq(s->to_statevector(), state);
    ensure(overlap >= split.nu * quad.correlation * quad.correlation - 1e-9,
           "extract_stabilizer: overlap below nu * correlation^2 (real-coefficient splitting)");
    tr.final_overlap = overlap;
    tr.witness = *s;
    tr.theory_log10_C1 = theory_log10_C1();
    tr.theory_log10_guarantee = tr.gamma > 0 ? tr.theory_C2 * std::log10(tr.gamma) - tr.theory_log10_C1
                                             : -std::numeric_limits<double>::infinity();
    return {*s, overlap, tr};
}

}  // namespace stablab
