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

#include <cmath>
#include <span>
#include <vector>

#include "stablab/error.hpp"
#include "stablab/gf2.hpp"
#include "stablab/parallel.hpp"
#include "stablab/states.hpp"

namespace stablab {

inline constexpr unsigned max_table_qubits = 6;

/// A real function on F2^{2n}, indexed by the packed symplectic vector (y << n) | alpha.
struct CharTable {
    unsigned n = 0;
    std::vector<double> f;

    CharTable() = default;
    CharTable(unsigned qubits, std::vector<double> values) : n(qubits), f(std::move(values)) {
        require(qubits >= 1 && qubits <= max_table_qubits, "characteristic tables are limited to 1 <= n <= 6");
        require(f.size() == (size_t{1} << (2 * qubits)), "characteristic table length must be 4^n");
    }

    size_t dim() const {
        return size_t{1} << n;
    }
    double operator[](word z) const {
        return f[z];
    }
    double at(word y, word alpha) const {
        return f[(y << n) | alpha];
    }
    double row_sum(word y) const {
        double s = 0;
        for (word a = 0; a < dim(); a++) {
            s += at(y, a);
        }
        return s;
    }
    double max_row_sum() const {
        double m = 0;
        for (word y = 0; y < dim(); y++) {
            m = std::max(m, row_sum(y));
        }
        return m;
    }
    /// (1/N) sum_z f(z).
    double mean_over_n() const {
        double s = 0;
        for (double v : f) {
            s += v;
        }
        return s / static_cast<double>(dim());
    }
};

/// Tiny negative values from rounding are zeroed; anything below -1e-12 is a bug.
inline void clamp_nonnegative(std::vector<double> &values, const char *what) {
    for (double &v : values) {
        if (v < 0) {
            ensure(v >= -1e-12, std::string(what) + ": table value below -1e-12, nonnegativity violated");
            v = 0;
        }
    }
}

/// f(y, alpha) = |<phi| X^y Z^alpha |phi>|^2 = |hat(Delta_y g)(alpha)|^2, one transform per y.
inline CharTable char_function(const StateVector &state) {
    require(state.n >= 1 && state.n <= max_table_qubits, "char_function: n must be in [1, 6]");
    require(state.is_normalized(1e-9), "char_function: state must be normalized");
    size_t dim = state.dim();
    std::vector<double> f(dim * dim);
    parallel_for(0, dim, [&](size_t y) {
        auto d = phase_derivative(state.g, y);
        fwht_inplace(std::span<cplx>(d));
        double k = 1.0 / static_cast<double>(dim);
        for (size_t a = 0; a < dim; a++) {
            f[(y << state.n) | a] = std::norm(d[a] * k);
        }
    });
    clamp_nonnegative(f, "char_function");
    return CharTable(state.n, std::move(f));
}

/// z -> (1/N) sum_{z'} (-1)^{[z, z']} t(z').
inline CharTable symplectic_fourier(const CharTable &t) {
    std::vector<double> a = t.f;
    fwht_inplace(std::span<double>(a));
    std::vector<double> out(a.size());
    double k = 1.0 / static_cast<double>(t.dim());
    for (word z = 0; z < a.size(); z++) {
        out[z] = a[swap_halves(t.n, z)] * k;
    }
    CharTable r;
    r.n = t.n;
    r.f = std::move(out);
    return r;
}

/// Law of the Bell-difference outcome: q = f * f over F2^{2n}.
struct BellDistribution {
    unsigned n = 0;
    std::vector<double> q;

    double total() const {
        double s = 0;
        for (double v : q) {
            s += v;
        }
        return s;
    }
};

/// q(z) = 4^{-n} sum_w t(w) t(z + w).
inline BellDistribution bell_diff_distribution(const CharTable &t) {
    auto q = convolve<double>(t.f, t.f);
    clamp_nonnegative(q, "bell_diff_distribution");
    return {t.n, std::move(q)};
}

/// sum_z q(z) f(z).
inline double exact_R(const CharTable &t, const BellDistribution &q) {
    double s = 0;
    for (size_t z = 0; z < t.f.size(); z++) {
        s += q.q[z] * t.f[z];
    }
    return s;
}

inline double exact_R(const CharTable &t) {
    return exact_R(t, bell_diff_distribution(t));
}

inline double exact_R(const StateVector &state) {
    return exact_R(char_function(state));
}

/// ||phi||^8_{U3} = (1/N) sum_z f(z)^2.
inline double gowers3(const CharTable &t) {
    double s = 0;
    for (double v : t.f) {
        s += v * v;
    }
    return s / static_cast<double>(t.dim());
}

inline double gowers3(const StateVector &state) {
    return gowers3(char_function(state));
}

}  // namespace stablab
