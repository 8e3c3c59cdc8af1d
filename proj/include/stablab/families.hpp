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
#include <numbers>
#include <optional>
#include <random>
#include <string>

#include "stablab/clifford.hpp"
#include "stablab/error.hpp"
#include "stablab/rng.hpp"
#include "stablab/states.hpp"

namespace stablab {

enum class FamilyKind { basis, uniform, haar, t_tensor, stabilizer, interpolate };

inline std::string family_name(FamilyKind k) {
    switch (k) {
        case FamilyKind::basis:
            return "basis";
        case FamilyKind::uniform:
            return "uniform";
        case FamilyKind::haar:
            return "haar";
        case FamilyKind::t_tensor:
            return "t_tensor";
        case FamilyKind::stabilizer:
            return "stabilizer";
        case FamilyKind::interpolate:
            return "interpolate";
    }
    return "?";
}

inline FamilyKind parse_family(const std::string &s) {
    for (auto k : {FamilyKind::basis, FamilyKind::uniform, FamilyKind::haar, FamilyKind::t_tensor,
                   FamilyKind::stabilizer, FamilyKind::interpolate}) {
        if (family_name(k) == s) {
            return k;
        }
    }
    throw ValidationError("unknown state family '" + s + "'");
}

struct FamilySpec {
    FamilyKind kind = FamilyKind::uniform;
    unsigned n = 1;
    word x0 = 0;                            // basis
    std::uint64_t seed = 0;                 // haar, interpolate
    std::optional<StabilizerState> stab;    // stabilizer, interpolate
    double eps = 0;                         // interpolate

    static FamilySpec basis(unsigned n, word x0) {
        FamilySpec s;
        s.kind = FamilyKind::basis;
        s.n = n;
        s.x0 = x0;
        return s;
    }
    static FamilySpec uniform(unsigned n) {
        FamilySpec s;
        s.kind = FamilyKind::uniform;
        s.n = n;
        return s;
    }
    static FamilySpec haar(unsigned n, std::uint64_t seed) {
        FamilySpec s;
        s.kind = FamilyKind::haar;
        s.n = n;
        s.seed = seed;
        return s;
    }
    static FamilySpec t_tensor(unsigned n) {
        FamilySpec s;
        s.kind = FamilyKind::t_tensor;
        s.n = n;
        return s;
    }
    static FamilySpec stabilizer(StabilizerState st) {
        FamilySpec s;
        s.kind = FamilyKind::stabilizer;
        s.n = st.n;
        s.stab = std::move(st);
        return s;
    }
    static FamilySpec interpolate(StabilizerState st, std::uint64_t seed, double eps) {
        FamilySpec s;
        s.kind = FamilyKind::interpolate;
        s.n = st.n;
        s.stab = std::move(st);
        s.seed = seed;
        s.eps = eps;
        return s;
    }
};

/// Haar-random state: i.i.d. complex standard normals, normalized as a unit vector.
inline StateVector haar_state(unsigned n, std::uint64_t seed) {
    require(n >= 1 && n <= max_dense_qubits, "haar: n out of range");
    Rng rng(seed);
    std::normal_distribution<double> normal;
    std::vector<cplx> u(size_t{1} << n);
    double s = 0;
    for (auto &a : u) {
        double re = normal(rng);
        double im = normal(rng);
        a = {re, im};
        s += std::norm(a);
    }
    double k = 1.0 / std::sqrt(s);
    for (auto &a : u) {
        a *= k;
    }
    return StateVector::from_unit(n, u);
}

/// |T>^{(x) n} with |T> = (|0> + e^{i pi/4}|1>)/sqrt 2.
inline StateVector t_tensor_state(unsigned n) {
    require(n >= 1 && n <= max_dense_qubits, "t_tensor: n out of range");
    std::vector<cplx> g(size_t{1} << n);
    cplx w = std::polar(1.0, std::numbers::pi / 4);
    for (word x = 0; x < g.size(); x++) {
        g[x] = std::pow(w, std::popcount(x));
    }
    return StateVector(n, std::move(g));
}

inline StateVector make_state(const FamilySpec &spec) {
    require(spec.n >= 1 && spec.n <= max_dense_qubits, "make_state: n must be in [1, 12]");
    size_t dim = size_t{1} << spec.n;
    switch (spec.kind) {
        case FamilyKind::basis: {
            require(spec.x0 < dim, "basis: x0 has bits beyond n");
            std::vector<cplx> g(dim, 0.0);
            g[spec.x0] = std::sqrt(static_cast<double>(dim));
            return StateVector(spec.n, std::move(g));
        }
        case FamilyKind::uniform:
            return StateVector(spec.n, std::vector<cplx>(dim, 1.0));
        case FamilyKind::haar:
            return haar_state(spec.n, spec.seed);
        case FamilyKind::t_tensor:
            return t_tensor_state(spec.n);
        case FamilyKind::stabilizer:
            require(spec.stab.has_value(), "stabilizer family needs stabilizer data");
            return spec.stab->to_statevector();
        case FamilyKind::interpolate: {
            require(spec.stab.has_value(), "interpolate family needs stabilizer data");
            require(spec.eps >= 0 && spec.eps <= 1, "interpolate: eps must be in [0, 1]");
            auto s = spec.stab->to_statevector();
            auto h = haar_state(spec.n, spec.seed);
            if (spec.eps == 0) {
                return s;
            }
            if (spec.eps == 1) {
                return h;
            }
            double a = std::sqrt(1 - spec.eps), b = std::sqrt(spec.eps);
            for (size_t x = 0; x < dim; x++) {
                s.g[x] = a * s.g[x] + b * h.g[x];
            }
            return s.normalized();
        }
    }
    throw ValidationError("make_state: unknown family");
}

}  // namespace stablab
