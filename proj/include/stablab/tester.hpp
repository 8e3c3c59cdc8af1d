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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stablab/charfn.hpp"
#include "stablab/clifford.hpp"
#include "stablab/error.hpp"
#include "stablab/families.hpp"
#include "stablab/measures.hpp"
#include "stablab/parallel.hpp"
#include "stablab/rng.hpp"
#include "stablab/states.hpp"

namespace stablab {

struct ShotRecord {
    word z = 0;  // packed (y << n) | alpha
    bool same_bit = false;
};

/// Inverse-CDF sampler for the Bell-difference law plus the W_z agreement coin.
class BellSampler {
   public:
    explicit BellSampler(const StateVector &state) : table_(char_function(state)), law_(bell_diff_distribution(table_)) {
        cdf_.resize(law_.q.size());
        double acc = 0;
        for (size_t z = 0; z < law_.q.size(); z++) {
            acc += law_.q[z];
            cdf_[z] = acc;
        }
        ensure(std::abs(acc - 1) <= 1e-9, "BellSampler: Bell-difference law does not sum to 1");
    }

    const CharTable &table() const {
        return table_;
    }
    const BellDistribution &law() const {
        return law_;
    }
    unsigned n() const {
        return table_.n;
    }

    ShotRecord shot(std::uint64_t seed, std::uint64_t index) const {
        ShotStream rng(seed, index, 0xbe11);
        double u = rng.uniform() * cdf_.back();
        auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        word z = static_cast<word>(std::min<size_t>(it - cdf_.begin(), cdf_.size() - 1));
        while (law_.q[z] <= 0 && z > 0) {
            z--;  // never land on a zero-probability cell through rounding
        }
        double p_same = 0.5 * (1 + std::min(1.0, table_.f[z]));
        return {z, rng.uniform() < p_same};
    }

    std::vector<ShotRecord> sample(size_t shots, std::uint64_t seed) const {
        std::vector<ShotRecord> out(shots);
        parallel_for(0, shots, [&](size_t i) { out[i] = shot(seed, i); });
        return out;
    }

    /// 2 * (fraction of agreeing shots) - 1.
    double estimate_R(size_t shots, std::uint64_t seed) const {
        require(shots >= 1, "estimate_R: shots must be >= 1");
        std::vector<std::uint8_t> same(shots);
        parallel_for(0, shots, [&](size_t i) { same[i] = shot(seed, i).same_bit; });
        size_t k = 0;
        for (auto s : same) {
            k += s;
        }
        return 2.0 * static_cast<double>(k) / static_cast<double>(shots) - 1.0;
    }

   private:
    CharTable table_;
    BellDistribution law_;
    std::vector<double> cdf_;
};

inline std::vector<ShotRecord> bell_difference_sample(const StateVector &state, size_t shots, std::uint64_t seed) {
    return BellSampler(state).sample(shots, seed);
}

inline double estimate_R(const StateVector &state, size_t shots, std::uint64_t seed) {
    return BellSampler(state).estimate_R(shots, seed);
}

/// Physical Bell-difference protocol on explicit copies, for n <= 2.
///
/// A pair of copies measured in the Bell basis {(W_z (x) I)|Phi+>} gives z with
/// probability |<Phi_z|phi phi>|^2; two independent pairs give z = z1 + z2. Two
/// more copies are measured in the eigenbasis of the Hermitian W_z, and the coin
/// reports whether the two eigenvalues agree.
class FourCopySimulator {
   public:
    static constexpr unsigned max_qubits = 2;

    explicit FourCopySimulator(const StateVector &state) : state_(state.normalized()) {
        require(state.n >= 1 && state.n <= max_qubits, "FourCopySimulator: n must be 1 or 2");
        unsigned n = state.n;
        size_t dim = state.dim();
        auto phi = state_.unit_amplitudes();
        // Two-copy state, copy A in the low n bits.
        std::vector<cplx> pair(dim * dim);
        for (size_t a = 0; a < dim; a++) {
            for (size_t b = 0; b < dim; b++) {
                pair[a | (b << n)] = phi[a] * phi[b];
            }
        }
        pair_law_.assign(dim * dim, 0);
        for (word z = 0; z < dim * dim; z++) {
            auto sz = SympVec::unpack(n, z);
            // (W_z (x) I)|Phi+> with |Phi+> = N^{-1/2} sum_x |x>|x>.
            cplx ip = 0;
            cplx pre = i_power(static_cast<unsigned>(std::popcount(sz.y & sz.alpha)));
            for (word x = 0; x < dim; x++) {
                cplx amp = pre * (dot(x, sz.alpha) ? -1.0 : 1.0) / std::sqrt(static_cast<double>(dim));
                word a = x ^ sz.y, b = x;
                ip += std::conj(amp) * pair[a | (b << n)];
            }
            pair_law_[z] = std::norm(ip);
        }
        diff_law_.assign(dim * dim, 0);
        for (word z1 = 0; z1 < dim * dim; z1++) {
            for (word z2 = 0; z2 < dim * dim; z2++) {
                diff_law_[z1 ^ z2] += pair_law_[z1] * pair_law_[z2];
            }
        }
        agree_.assign(dim * dim, 0);
        for (word z = 0; z < dim * dim; z++) {
            double plus = plus_probability(z);
            agree_[z] = plus * plus + (1 - plus) * (1 - plus);
        }
    }

    const std::vector<double> &pair_law() const {
        return pair_law_;
    }
    const std::vector<double> &difference_law() const {
        return diff_law_;
    }
    /// Probability that two W_z eigenvalue measurements agree.
    double agreement(word z) const {
        return agree_[z];
    }
    /// sum_z Pr[z] * (2 Pr[agree | z] - 1).
    double exact_R() const {
        double s = 0;
        for (size_t z = 0; z < diff_law_.size(); z++) {
            s += diff_law_[z] * (2 * agree_[z] - 1);
        }
        return s;
    }

    ShotRecord shot(std::uint64_t seed, std::uint64_t index) const {
        ShotStream rng(seed, index, 0xf0c4);
        word z1 = draw(pair_law_, rng.uniform());
        word z2 = draw(pair_law_, rng.uniform());
        word z = z1 ^ z2;
        double plus = plus_probability(z);
        bool e1 = rng.uniform() < plus;
        bool e2 = rng.uniform() < plus;
        return {z, e1 == e2};
    }

    std::vector<ShotRecord> sample(size_t shots, std::uint64_t seed) const {
        std::vector<ShotRecord> out(shots);
        for (size_t i = 0; i < shots; i++) {
            out[i] = shot(seed, i);
        }
        return out;
    }

   private:
    /// ||(I + W_z)/2 |phi>||^2.
    double plus_probability(word z) const {
        auto sz = SympVec::unpack(state_.n, z);
        auto w = apply_weyl(state_, sz);
        StateVector proj = state_;
        for (size_t x = 0; x < proj.g.size(); x++) {
            proj.g[x] = 0.5 * (state_.g[x] + w.g[x]);
        }
        return std::clamp(proj.norm_sq(), 0.0, 1.0);
    }

    static word draw(const std::vector<double> &law, double u) {
        double acc = 0;
        for (size_t z = 0; z < law.size(); z++) {
            acc += law[z];
            if (u < acc) {
                return z;
            }
        }
        for (size_t z = law.size(); z-- > 0;) {
            if (law[z] > 0) {
                return z;
            }
        }
        return 0;
    }

    StateVector state_;
    std::vector<double> pair_law_, diff_law_, agree_;
};

struct TestDecision {
    double r_hat = 0;
    double threshold = 0;
    bool close = false;  // "close" / "low-rank" when r_hat >= threshold
    size_t shots = 0;
    std::uint64_t seed = 0;
};

/// Default tolerant-test threshold eps1^8 / 2.
inline double default_tolerant_threshold(double eps1) {
    return std::pow(eps1, 8) / 2;
}

inline TestDecision tolerant_test(const StateVector &state, double eps1, double eps2, size_t shots, std::uint64_t seed,
                                  std::optional<double> threshold = std::nullopt) {
    require(eps2 > 0 && eps2 < eps1 && eps1 <= 1, "tolerant_test: need 0 < eps2 < eps1 <= 1");
    require(shots >= 1, "tolerant_test: shots must be >= 1");
    double tau = threshold.value_or(default_tolerant_threshold(eps1));
    double r = estimate_R(state, shots, seed);
    return {r, tau, r >= tau, shots, seed};
}

struct CalibrationEntry {
    unsigned n = 0;
    unsigned k = 0;
    double tau = 0;
    double median_low_rank = 0;
    double median_haar = 0;
    double training_error = 0;
    size_t corpus_size = 0;
    size_t shots = 0;
    std::uint64_t seed = 0;
};

struct Calibration {
    std::map<std::pair<unsigned, unsigned>, CalibrationEntry> entries;

    const CalibrationEntry &at(unsigned n, unsigned k) const {
        auto it = entries.find({n, k});
        require(it != entries.end(),
                "no calibrated threshold for n=" + std::to_string(n) + ", k=" + std::to_string(k) + " (run calibrate)");
        return it->second;
    }
};

/// Random combination of k distinct stabilizer states with complex Gaussian weights.
inline StateVector low_rank_state(unsigned n, unsigned k, std::uint64_t seed) {
    require(n >= 1 && n <= max_enumeration_qubits, "low_rank_state: n must be in [1, 4]");
    const auto &stabs = enumerate_stabilizers(n);
    require(k >= 1 && k <= stabs.size(), "low_rank_state: k out of range");
    Rng rng(seed);
    std::vector<size_t> idx;
    while (idx.size() < k) {
        size_t c = std::uniform_int_distribution<size_t>(0, stabs.size() - 1)(rng);
        if (std::find(idx.begin(), idx.end(), c) == idx.end()) {
            idx.push_back(c);
        }
    }
    std::normal_distribution<double> normal;
    size_t dim = size_t{1} << n;
    std::vector<cplx> g(dim, 0.0);
    for (size_t i : idx) {
        cplx c{normal(rng), normal(rng)};
        auto v = stabilizer_unit_vector(n, i);
        for (size_t x = 0; x < dim; x++) {
            g[x] += c * v[x];
        }
    }
    auto s = StateVector::from_unit(n, g);
    require(s.norm_sq() > 1e-12, "low_rank_state: degenerate combination");
    return s.normalized();
}

/// Noisy stabilizer sqrt(1-eps)|s> + sqrt(eps)|haar>, normalized, with s and eps drawn
/// from the seed (eps uniform in [eps_lo, eps_hi]).
inline StateVector noisy_stabilizer_state(unsigned n, std::uint64_t seed, double eps_lo, double eps_hi) {
    const auto &stabs = enumerate_stabilizers(n);
    Rng rng(seed);
    size_t i = std::uniform_int_distribution<size_t>(0, stabs.size() - 1)(rng);
    double eps = std::uniform_real_distribution<double>(eps_lo, eps_hi)(rng);
    return make_state(FamilySpec::interpolate(stabs[i], rng(), eps));
}

/// Class-median midpoint threshold separating random chi <= k states from Haar states.
inline CalibrationEntry calibrate(unsigned n, unsigned k, std::uint64_t seed, size_t corpus_size = 100,
                                  size_t shots = 10000) {
    require(n >= 1 && n <= max_enumeration_qubits, "calibrate: n must be in [1, 4]");
    require(k >= 1, "calibrate: k must be >= 1");
    require(corpus_size >= 1 && shots >= 1, "calibrate: corpus size and shots must be >= 1");
    std::vector<double> low(corpus_size), haar(corpus_size);
    for (size_t i = 0; i < corpus_size; i++) {
        auto ls = low_rank_state(n, k, derived_seed(seed, i, 0x10));
        low[i] = estimate_R(ls, shots, derived_seed(seed, i, 0x11));
        auto hs = haar_state(n, derived_seed(seed, i, 0x20));
        haar[i] = estimate_R(hs, shots, derived_seed(seed, i, 0x21));
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        size_t m = v.size();
        return m % 2 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
    };
    CalibrationEntry e;
    e.n = n;
    e.k = k;
    e.median_low_rank = median(low);
    e.median_haar = median(haar);
    e.tau = 0.5 * (e.median_low_rank + e.median_haar);
    size_t errors = 0;
    for (size_t i = 0; i < corpus_size; i++) {
        errors += low[i] < e.tau;
        errors += haar[i] >= e.tau;
    }
    e.training_error = static_cast<double>(errors) / static_cast<double>(2 * corpus_size);
    e.corpus_size = corpus_size;
    e.shots = shots;
    e.seed = seed;
    return e;
}

inline TestDecision rank_vs_haar_test(const StateVector &state, unsigned k, size_t shots, std::uint64_t seed,
                                      const Calibration &cal) {
    require(k >= 1, "rank_vs_haar_test: k must be >= 1");
    require(shots >= 1, "rank_vs_haar_test: shots must be >= 1");
    double tau = cal.at(state.n, k).tau;
    double r = estimate_R(state, shots, seed);
    return {r, tau, r >= tau, shots, seed};
}

}  // namespace stablab
