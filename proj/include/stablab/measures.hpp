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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "stablab/charfn.hpp"
#include "stablab/clifford.hpp"
#include "stablab/error.hpp"
#include "stablab/families.hpp"
#include "stablab/rng.hpp"
#include "stablab/states.hpp"

namespace stablab {

/// ||g||_{U^d}^{2^d} = E_{x, y_1..y_d} [Delta_{y_1} ... Delta_{y_d} g(x)], by direct summation.
inline double gowers_norm_direct(const StateVector &state, unsigned d) {
    require(d >= 1 && d <= 3, "gowers_norm_direct: d must be 1, 2 or 3");
    require(state.n >= 1 && state.n <= (d == 3 ? 4u : 6u), "gowers_norm_direct: n too large for brute force");
    const auto &g = state.g;
    size_t dim = g.size();
    size_t corners = size_t{1} << d;
    std::vector<word> ys(d, 0);
    cplx total = 0;
    size_t tuples = size_t{1} << (state.n * d);
    for (size_t t = 0; t < tuples; t++) {
        for (unsigned i = 0; i < d; i++) {
            ys[i] = (t >> (state.n * i)) & (dim - 1);
        }
        for (word x = 0; x < dim; x++) {
            cplx prod = 1;
            for (size_t c = 0; c < corners; c++) {
                word p = x;
                for (unsigned i = 0; i < d; i++) {
                    if ((c >> i) & 1) {
                        p ^= ys[i];
                    }
                }
                prod *= std::popcount(c) % 2 ? std::conj(g[p]) : g[p];
            }
            total += prod;
        }
    }
    total /= static_cast<double>(tuples) * static_cast<double>(dim);
    ensure(std::abs(total.imag()) <= 1e-10, "gowers_norm_direct: the Gowers average has a nonzero imaginary part");
    return total.real();
}

struct FidelityResult {
    double value = 0;
    size_t index = 0;  // position in enumerate_stabilizers(n)
    StabilizerState witness;
};

/// max_s |<s|phi>|^2 over every stabilizer state; ties go to the first in enumeration order.
inline FidelityResult stabilizer_fidelity(const StateVector &state) {
    require(state.n >= 1 && state.n <= max_enumeration_qubits, "stabilizer_fidelity: exhaustive search needs n <= 4");
    const auto &stabs = enumerate_stabilizers(state.n);
    auto phi = state.unit_amplitudes();
    FidelityResult best{-1, 0, {}};
    for (size_t i = 0; i < stabs.size(); i++) {
        auto s = stabilizer_unit_vector(state.n, i);
        cplx ip = 0;
        for (size_t x = 0; x < phi.size(); x++) {
            ip += std::conj(s[x]) * phi[x];
        }
        double v = std::norm(ip);
        if (v > best.value + 1e-12) {
            best.value = v;
            best.index = i;
        }
    }
    best.witness = stabs[best.index];
    return best;
}

/// Distance from the unit vector phi to the span of the given columns, by the
/// pseudo-inverse projection (singular values below 1e-10 dropped).
inline double projection_residual(const Eigen::MatrixXcd &columns, const Eigen::VectorXcd &phi) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(columns, Eigen::ComputeThinU);
    const auto &sv = svd.singularValues();
    Eigen::VectorXcd r = phi;
    for (Eigen::Index i = 0; i < sv.size(); i++) {
        if (sv[i] >= 1e-10) {
            auto u = svd.matrixU().col(i);
            r -= u * u.dot(phi);
        }
    }
    return r.norm();
}

namespace detail {

inline Eigen::VectorXcd unit_vector(const StateVector &s) {
    auto u = s.unit_amplitudes();
    return Eigen::Map<Eigen::VectorXcd>(u.data(), static_cast<Eigen::Index>(u.size()));
}

inline Eigen::MatrixXcd stabilizer_columns(unsigned n, const std::vector<size_t> &indices) {
    size_t dim = size_t{1} << n;
    Eigen::MatrixXcd m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(indices.size()));
    for (size_t j = 0; j < indices.size(); j++) {
        auto v = stabilizer_unit_vector(n, indices[j]);
        for (size_t x = 0; x < dim; x++) {
            m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(j)) = v[x];
        }
    }
    return m;
}

/// Advances idx to the next r-combination of [0, m) in lexicographic order.
inline bool next_combination(std::vector<size_t> &idx, size_t m) {
    size_t r = idx.size();
    for (size_t i = r; i-- > 0;) {
        if (idx[i] < m - r + i) {
            idx[i]++;
            for (size_t j = i + 1; j < r; j++) {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    return false;
}

inline std::vector<size_t> first_combination(size_t r) {
    std::vector<size_t> idx(r);
    for (size_t i = 0; i < r; i++) {
        idx[i] = i;
    }
    return idx;
}

/// First r-subset (lexicographic) whose span lies within tol of phi.
inline std::optional<std::vector<size_t>> find_subset(unsigned n, const Eigen::VectorXcd &phi, size_t r, double tol) {
    size_t m = enumerate_stabilizers(n).size();
    if (r > m) {
        return std::nullopt;
    }
    auto idx = first_combination(r);
    do {
        if (projection_residual(stabilizer_columns(n, idx), phi) <= tol) {
            return idx;
        }
    } while (next_combination(idx, m));
    return std::nullopt;
}

}  // namespace detail

struct RankResult {
    unsigned lower = 0;
    unsigned upper = 0;
    bool exact = false;
    std::vector<size_t> witness;  // indices into enumerate_stabilizers(n) achieving `upper`
    double residual = 0;

    unsigned value() const {
        ensure(exact, "stabilizer rank requested as a single value but only bounds are known");
        return upper;
    }
};

inline constexpr double exact_rank_tolerance = 1e-9;

/// chi_delta: fewest stabilizer states whose span is within delta of phi. Exact by
/// subset search for n <= 2; for n = 3 subsets of size <= 2 are checked exactly and
/// a greedy span gives the upper bound.
inline RankResult stabilizer_rank(const StateVector &state, double delta = 0) {
    require(delta >= 0, "stabilizer_rank: delta must be >= 0");
    require(state.n >= 1 && state.n <= 3, "stabilizer_rank: n must be <= 2 (exact) or 3 (bounds)");
    double tol = delta == 0 ? exact_rank_tolerance : delta;
    auto phi = detail::unit_vector(state.normalized());
    unsigned n = state.n;
    size_t dim = size_t{1} << n;
    unsigned exact_cap = n <= 2 ? static_cast<unsigned>(dim) : 2u;
    for (unsigned r = 1; r <= exact_cap; r++) {
        if (auto idx = detail::find_subset(n, phi, r, tol)) {
            double res = projection_residual(detail::stabilizer_columns(n, *idx), phi);
            return {r, r, true, *idx, res};
        }
    }
    ensure(n == 3, "stabilizer_rank: the stabilizer states span the whole space, so a subset of size <= 2^n must exist");
    // Greedy: add the state that most reduces the residual, smallest index on ties.
    size_t m = enumerate_stabilizers(n).size();
    std::vector<size_t> chosen;
    double res = 1;
    while (res > tol && chosen.size() < dim) {
        size_t best_i = 0;
        double best_res = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < m; i++) {
            if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) {
                continue;
            }
            auto trial = chosen;
            trial.push_back(i);
            double r = projection_residual(detail::stabilizer_columns(n, trial), phi);
            if (r < best_res - 1e-15) {
                best_res = r;
                best_i = i;
            }
        }
        chosen.push_back(best_i);
        res = best_res;
    }
    ensure(res <= tol, "stabilizer_rank: greedy span failed to reach the state");
    auto upper = static_cast<unsigned>(chosen.size());
    return {exact_cap + 1, upper, upper == exact_cap + 1, chosen, res};
}

struct GramResult {
    Eigen::MatrixXcd gram;
    double lambda_min = 0;
    bool singular = false;
};

inline constexpr double singular_threshold = 1e-9;

/// G_ij = <s_i|s_j> and its smallest eigenvalue.
inline GramResult gram_lambda_min(const std::vector<StateVector> &states) {
    require(!states.empty() && states.size() <= 8, "gram_lambda_min: need 1 <= k <= 8 states");
    auto k = static_cast<Eigen::Index>(states.size());
    Eigen::MatrixXcd g(k, k);
    for (Eigen::Index i = 0; i < k; i++) {
        for (Eigen::Index j = 0; j < k; j++) {
            g(i, j) = inner(states[static_cast<size_t>(i)], states[static_cast<size_t>(j)]);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
    double lmin = es.eigenvalues().minCoeff();
    ensure(lmin >= -1e-10, "gram_lambda_min: Gram matrix is not positive semidefinite");
    return {g, lmin, lmin < singular_threshold};
}

inline GramResult gram_lambda_min(const std::vector<StabilizerState> &states) {
    std::vector<StateVector> v;
    for (const auto &s : states) {
        v.push_back(s.to_statevector());
    }
    return gram_lambda_min(v);
}

/// If v == w^l 2^{-m/2} (or 0) with w = e^{2 pi i / roots}, returns (l, m); m == -1
/// encodes zero. roots = 4 is the i^l form; roots = 8 admits the e^{i pi/4} phases
/// that stabilizer overlaps such as <+|+i> = (1 + i)/2 actually take.
inline std::optional<std::pair<unsigned, int>> quantized_form(cplx v, double tol = 1e-10, unsigned roots = 4) {
    require(roots == 4 || roots == 8, "quantized_form: roots must be 4 or 8");
    double a = std::abs(v);
    if (a <= tol) {
        return std::pair<unsigned, int>{0, -1};
    }
    int m = static_cast<int>(std::lround(-2.0 * std::log2(a)));
    if (m < 0) {
        return std::nullopt;
    }
    double mag = std::pow(2.0, -m / 2.0);
    for (unsigned l = 0; l < roots; l++) {
        if (std::abs(v - std::polar(mag, 2 * std::numbers::pi * l / roots)) <= tol) {
            return std::pair<unsigned, int>{l, m};
        }
    }
    return std::nullopt;
}

inline bool is_quantized(cplx v, double tol = 1e-10, unsigned roots = 4) {
    return quantized_form(v, tol, roots).has_value();
}

enum class ScanMode { exhaustive, sampled, automatic };

inline ScanMode parse_scan_mode(const std::string &s) {
    if (s == "exhaustive") {
        return ScanMode::exhaustive;
    }
    if (s == "sampled") {
        return ScanMode::sampled;
    }
    if (s == "auto") {
        return ScanMode::automatic;
    }
    throw ValidationError("unknown scan mode '" + s + "' (expected exhaustive, sampled or auto)");
}

struct LambdaRow {
    unsigned k = 0;
    unsigned n = 0;
    double min_lambda = 0;
    std::vector<size_t> witness;
    bool exhaustive = false;
    size_t subsets = 0;  // Gram matrices examined
};

inline bool lambda_scan_in_budget(unsigned k, unsigned n) {
    return k == 1 || (k <= 3 && n <= 2) || (k == 2 && n <= 3);
}

/// min lambda_min over nonsingular Gram matrices of k distinct stabilizer states, for
/// every 1 <= k <= k_max and 1 <= n <= n_max.
inline std::vector<LambdaRow> lambda_star_scan(unsigned k_max, unsigned n_max, ScanMode mode, size_t trials = 20000,
                                               std::uint64_t seed = 0) {
    require(k_max >= 1 && k_max <= 8, "lambda_star_scan: k_max must be in [1, 8]");
    require(n_max >= 1 && n_max <= max_enumeration_qubits, "lambda_star_scan: n_max must be in [1, 4]");
    std::vector<LambdaRow> rows;
    for (unsigned k = 1; k <= k_max; k++) {
        for (unsigned n = 1; n <= n_max; n++) {
            bool in_budget = lambda_scan_in_budget(k, n);
            if (mode == ScanMode::exhaustive && !in_budget) {
                throw BudgetExceeded("lambda_star_scan: exhaustive scan of k=" + std::to_string(k) +
                                     ", n=" + std::to_string(n) + " exceeds the budget (use sampled or auto)");
            }
            bool exhaustive = mode == ScanMode::exhaustive || (mode == ScanMode::automatic && in_budget);
            size_t m = enumerate_stabilizers(n).size();
            if (k > m) {
                continue;
            }
            size_t dim = size_t{1} << n;
            // Pairwise inner products of all states, cached for this n.
            std::vector<cplx> ip(m * m);
            for (size_t a = 0; a < m; a++) {
                auto va = stabilizer_unit_vector(n, a);
                for (size_t b = a; b < m; b++) {
                    auto vb = stabilizer_unit_vector(n, b);
                    cplx s = 0;
                    for (size_t x = 0; x < dim; x++) {
                        s += std::conj(va[x]) * vb[x];
                    }
                    ip[a * m + b] = s;
                    ip[b * m + a] = std::conj(s);
                }
            }
            LambdaRow row{k, n, std::numeric_limits<double>::infinity(), {}, exhaustive, 0};
            Eigen::MatrixXcd g(k, k);
            auto consider = [&](const std::vector<size_t> &idx) {
                for (unsigned i = 0; i < k; i++) {
                    for (unsigned j = 0; j < k; j++) {
                        g(i, j) = ip[idx[i] * m + idx[j]];
                    }
                }
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g, Eigen::EigenvaluesOnly);
                double l = es.eigenvalues().minCoeff();
                row.subsets++;
                if (l >= singular_threshold && l < row.min_lambda - 1e-13) {
                    row.min_lambda = l;
                    row.witness = idx;
                }
            };
            if (exhaustive) {
                auto idx = detail::first_combination(k);
                do {
                    consider(idx);
                } while (detail::next_combination(idx, m));
            } else {
                require(trials >= 1, "lambda_star_scan: sampled mode needs trials >= 1");
                for (size_t t = 0; t < trials; t++) {
                    auto rng = derived_rng(seed, t, (k << 8) | n);
                    std::vector<size_t> idx;
                    while (idx.size() < k) {
                        size_t c = std::uniform_int_distribution<size_t>(0, m - 1)(rng);
                        if (std::find(idx.begin(), idx.end(), c) == idx.end()) {
                            idx.push_back(c);
                        }
                    }
                    std::sort(idx.begin(), idx.end());
                    consider(idx);
                }
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

struct MeasureReport {
    unsigned n = 0;
    double gowers3_pow8 = 0;
    double fidelity = 0;
    size_t fidelity_witness = 0;
    StabilizerState fidelity_state;
    RankResult rank;
};

inline MeasureReport measure_all(const StateVector &state, double delta = 0) {
    MeasureReport r;
    r.n = state.n;
    r.gowers3_pow8 = gowers3(state);
    auto f = stabilizer_fidelity(state);
    r.fidelity = f.value;
    r.fidelity_witness = f.index;
    r.fidelity_state = f.witness;
    r.rank = stabilizer_rank(state, delta);
    return r;
}

struct RelationsRow {
    std::string label;
    unsigned n = 0;
    unsigned chi = 0;
    double one_minus_f = 0;
    double one_minus_u3 = 0;
};

struct RelationsCheck {
    std::string name;
    bool ok = false;
    std::string detail;
};

struct CounterexampleRow {
    unsigned n = 0;
    unsigned chi_phi = 0;
    unsigned chi_psi = 0;
    double fidelity = 0;
};

struct ConjectureProbe {
    unsigned k = 0;
    double min_fidelity = 0;
    double two_to_minus_k = 0;
};

struct RelationsReport {
    std::vector<RelationsRow> rows;
    std::map<unsigned, double> bound_by_chi;  // b(k) = max 1-F among states with chi <= k
    std::vector<CounterexampleRow> counterexamples;
    std::vector<ConjectureProbe> probes;
    std::vector<RelationsCheck> checks;

    bool all_ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const auto &c) { return c.ok; });
    }
};

/// (|0> / 2) + (sqrt 3 / 2)|phi'>, where phi' is phi with its |0> component removed, so
/// the overlap with |0> is exactly 1/4.
inline StateVector counterexample_state(const StateVector &phi) {
    StateVector p = phi;
    p.g[0] = 0;
    p = p.normalized();
    double scale = std::sqrt(static_cast<double>(p.dim()));
    for (auto &a : p.g) {
        a *= std::sqrt(3.0) / 2;
    }
    p.g[0] += 0.5 * scale;
    return p;
}

/// Per-state (chi, 1-F, 1-U3) and the implications among the three measures.
inline RelationsReport relations_experiment(const std::vector<std::pair<std::string, StateVector>> &corpus,
                                            std::uint64_t seed) {
    RelationsReport rep;
    bool forward_ok = true, stab_ok = true;
    std::string forward_detail, stab_detail;
    for (const auto &[label, raw] : corpus) {
        require(raw.n >= 1 && raw.n <= 2, "relations_experiment: states must have n <= 2");
        auto s = raw.normalized();
        RelationsRow row{label, s.n, 0, 0, 0};
        double f = stabilizer_fidelity(s).value;
        double u3 = gowers3(s);
        row.chi = stabilizer_rank(s).value();
        row.one_minus_f = std::max(0.0, 1 - f);
        row.one_minus_u3 = std::max(0.0, 1 - u3);
        rep.rows.push_back(row);
        if (u3 < std::pow(f, 4) - 1e-9) {
            forward_ok = false;
            forward_detail = label;
        }
        if (row.chi == 1 && (row.one_minus_f > 1e-9 || row.one_minus_u3 > 1e-9)) {
            stab_ok = false;
            stab_detail = label;
        }
    }
    unsigned max_chi = 0;
    for (const auto &r : rep.rows) {
        max_chi = std::max(max_chi, r.chi);
    }
    for (unsigned k = 1; k <= max_chi; k++) {
        double b = 0, min_f = 1;
        bool any = false;
        for (const auto &r : rep.rows) {
            if (r.chi <= k) {
                b = std::max(b, r.one_minus_f);
                min_f = std::min(min_f, 1 - r.one_minus_f);
                any = true;
            }
        }
        if (any) {
            rep.bound_by_chi[k] = b;
            rep.probes.push_back({k, min_f, std::pow(2.0, -static_cast<double>(k))});
        }
    }
    bool monotone = true;
    double prev = 0;
    for (const auto &[k, b] : rep.bound_by_chi) {
        monotone = monotone && b >= prev;
        prev = b;
    }
    rep.checks.push_back({"chi_1_is_stabilizer", stab_ok, stab_detail});
    rep.checks.push_back({"gowers_fidelity_floor", forward_ok, forward_detail});
    rep.checks.push_back({"fidelity_bound_monotone_in_chi", monotone, ""});
    bool cx_ok = true;
    for (unsigned n = 1; n <= 2; n++) {
        auto base = haar_state(n, derived_seed(seed, n, 0xc0));
        auto phi = counterexample_state(base);
        StateVector ortho = base;
        ortho.g[0] = 0;
        ortho = ortho.normalized();
        CounterexampleRow cr;
        cr.n = n;
        cr.chi_phi = stabilizer_rank(ortho).value();
        cr.chi_psi = stabilizer_rank(phi).value();
        cr.fidelity = stabilizer_fidelity(phi).value;
        cx_ok = cx_ok && cr.fidelity >= 0.25 - 1e-12 && cr.chi_psi + 1 >= cr.chi_phi;
        rep.counterexamples.push_back(cr);
    }
    rep.checks.push_back({"counterexample_fidelity_at_least_quarter", cx_ok, ""});
    return rep;
}

}  // namespace stablab
