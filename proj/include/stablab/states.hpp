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
#include <complex>
#include <span>
#include <vector>

#include "stablab/error.hpp"
#include "stablab/gf2.hpp"

namespace stablab {

using cplx = std::complex<double>;

inline constexpr unsigned max_dense_qubits = 12;

/// Dense amplitudes in the g-convention: |phi> = N^{-1/2} sum_x g(x) |x>, N = 2^n.
/// A normalized state has E_x |g(x)|^2 = 1; the uniform superposition has g == 1.
struct StateVector {
    unsigned n = 0;
    std::vector<cplx> g;

    StateVector() = default;
    StateVector(unsigned qubits, std::vector<cplx> values) : n(qubits), g(std::move(values)) {
        require(qubits <= max_dense_qubits, "dense states are limited to 12 qubits");
        require(g.size() == (size_t{1} << qubits), "amplitude table length must be 2^n");
    }

    /// Builds from ordinary unit-vector amplitudes <x|phi>.
    static StateVector from_unit(unsigned qubits, std::span<const cplx> amplitudes) {
        std::vector<cplx> g(amplitudes.begin(), amplitudes.end());
        double scale = std::sqrt(static_cast<double>(g.size()));
        for (auto &a : g) {
            a *= scale;
        }
        return StateVector(qubits, std::move(g));
    }

    size_t dim() const {
        return g.size();
    }
    /// <x|phi>.
    cplx amplitude(word x) const {
        return g[x] / std::sqrt(static_cast<double>(g.size()));
    }
    std::vector<cplx> unit_amplitudes() const {
        std::vector<cplx> out(g);
        double scale = 1.0 / std::sqrt(static_cast<double>(g.size()));
        for (auto &a : out) {
            a *= scale;
        }
        return out;
    }
    /// <phi|phi> = E_x |g(x)|^2.
    double norm_sq() const {
        double s = 0;
        for (const auto &a : g) {
            s += std::norm(a);
        }
        return s / static_cast<double>(g.size());
    }
    bool is_normalized(double tol = 1e-12) const {
        return std::abs(norm_sq() - 1.0) <= tol;
    }
    StateVector normalized() const {
        double s = norm_sq();
        require(s > 0, "cannot normalize the zero vector");
        StateVector out = *this;
        double k = 1.0 / std::sqrt(s);
        for (auto &a : out.g) {
            a *= k;
        }
        return out;
    }
    bool is_real(double tol = 0) const {
        for (const auto &a : g) {
            if (std::abs(a.imag()) > tol) {
                return false;
            }
        }
        return true;
    }
};

/// <a|b> = E_x conj(g_a(x)) g_b(x).
inline cplx inner(const StateVector &a, const StateVector &b) {
    require(a.n == b.n, "inner product qubit count mismatch");
    cplx s = 0;
    for (size_t x = 0; x < a.g.size(); x++) {
        s += std::conj(a.g[x]) * b.g[x];
    }
    return s / static_cast<double>(a.g.size());
}

inline double overlap_sq(const StateVector &a, const StateVector &b) {
    return std::norm(inner(a, b));
}

inline bool is_power_of_two(size_t len) {
    return len != 0 && (len & (len - 1)) == 0;
}

inline unsigned log2_exact(size_t len) {
    require(is_power_of_two(len), "table length must be a power of two");
    return static_cast<unsigned>(std::countr_zero(len));
}

/// In-place unnormalized butterfly: a(w) <- sum_x (-1)^{<w,x>} a(x).
template <typename T>
void fwht_inplace(std::span<T> a) {
    require(is_power_of_two(a.size()), "Walsh-Hadamard length must be a power of two");
    for (size_t h = 1; h < a.size(); h <<= 1) {
        for (size_t i = 0; i < a.size(); i += 2 * h) {
            for (size_t j = i; j < i + h; j++) {
                T u = a[j];
                T v = a[j + h];
                a[j] = u + v;
                a[j + h] = u - v;
            }
        }
    }
}

/// Fourier transform with expectation normalization:
/// hat g(alpha) = E_x (-1)^{<alpha,x>} g(x).
template <typename T>
std::vector<T> walsh_hadamard(std::span<const T> g) {
    std::vector<T> out(g.begin(), g.end());
    fwht_inplace(std::span<T>(out));
    double k = 1.0 / static_cast<double>(out.size());
    for (auto &v : out) {
        v *= k;
    }
    return out;
}

/// Inverse of walsh_hadamard: g(x) = sum_alpha (-1)^{<alpha,x>} hat g(alpha).
template <typename T>
std::vector<T> walsh_hadamard_inverse(std::span<const T> hat) {
    std::vector<T> out(hat.begin(), hat.end());
    fwht_inplace(std::span<T>(out));
    return out;
}

/// Delta_y g(x) = g(x) conj(g(x + y)).
inline std::vector<cplx> phase_derivative(std::span<const cplx> g, word y) {
    require(is_power_of_two(g.size()), "phase_derivative: table length must be a power of two");
    require(y < g.size(), "phase_derivative: shift has bits beyond n");
    std::vector<cplx> out(g.size());
    for (size_t x = 0; x < g.size(); x++) {
        out[x] = g[x] * std::conj(g[x ^ y]);
    }
    return out;
}

/// (f * g)(x) = E_y f(y) g(x + y), through the transform.
template <typename T>
std::vector<T> convolve(std::span<const T> f, std::span<const T> g) {
    require(f.size() == g.size(), "convolve: length mismatch");
    std::vector<T> a(f.begin(), f.end()), b(g.begin(), g.end());
    fwht_inplace(std::span<T>(a));
    fwht_inplace(std::span<T>(b));
    for (size_t i = 0; i < a.size(); i++) {
        a[i] *= b[i];
    }
    fwht_inplace(std::span<T>(a));
    double k = 1.0 / (static_cast<double>(a.size()) * static_cast<double>(a.size()));
    for (auto &v : a) {
        v *= k;
    }
    return a;
}

}  // namespace stablab
