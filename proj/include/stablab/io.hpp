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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "stablab/clifford.hpp"
#include "stablab/error.hpp"
#include "stablab/gf2.hpp"
#include "stablab/states.hpp"
#include "stablab/tester.hpp"

namespace stablab {

using json = nlohmann::ordered_json;

inline constexpr double state_file_norm_tolerance = 1e-6;

/// {"n": n, "amplitudes": [[re, im], ...]} with unit-vector amplitudes <x|phi>.
inline json state_to_json(const StateVector &s) {
    json amps = json::array();
    for (const auto &a : s.unit_amplitudes()) {
        amps.push_back({a.real(), a.imag()});
    }
    return json{{"n", s.n}, {"amplitudes", std::move(amps)}};
}

inline StateVector state_from_json(const json &j, bool renormalize = false) {
    try {
        require(j.is_object(), "state file must hold a JSON object");
        require(j.contains("n") && j.contains("amplitudes"), "state file needs \"n\" and \"amplitudes\"");
        auto n = j.at("n").get<unsigned>();
        require(n >= 1 && n <= max_dense_qubits, "state file: n must be in [1, 12]");
        const auto &amps = j.at("amplitudes");
        require(amps.is_array() && amps.size() == (size_t{1} << n), "state file: expected 2^n amplitudes");
        std::vector<cplx> u;
        double norm = 0;
        for (const auto &a : amps) {
            require(a.is_array() && a.size() == 2, "state file: each amplitude must be [re, im]");
            cplx c{a[0].get<double>(), a[1].get<double>()};
            u.push_back(c);
            norm += std::norm(c);
        }
        if (!renormalize) {
            require(std::abs(std::sqrt(norm) - 1) <= state_file_norm_tolerance,
                    "state file: vector norm deviates from 1 by more than 1e-6 (pass --renormalize to accept)");
        }
        return StateVector::from_unit(n, u).normalized();
    } catch (const json::exception &e) {
        throw ValidationError(std::string("malformed state file: ") + e.what());
    }
}

inline StateVector load_state(const std::string &path, bool renormalize = false) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open state file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception &e) {
        throw ValidationError("malformed state file '" + path + "': " + e.what());
    }
    return state_from_json(j, renormalize);
}

/// {"n", "offset", "basis", "ell", "Q_upper"}; Q_upper row i is a bit string whose
/// entry j > i is Q_ij and whose diagonal entry i carries the linear part of Q.
inline json stabilizer_to_json(const StabilizerState &s) {
    json basis = json::array();
    for (word b : s.support.direction.basis()) {
        basis.push_back(bits_to_string(b, s.n));
    }
    json rows = json::array();
    for (unsigned i = 0; i < s.n; i++) {
        word r = s.q_upper[i] | (((s.q_linear >> i) & 1) << i);
        rows.push_back(bits_to_string(r, s.n));
    }
    return json{{"n", s.n},
                {"offset", bits_to_string(s.support.offset, s.n)},
                {"basis", std::move(basis)},
                {"ell", bits_to_string(s.ell, s.n)},
                {"Q_upper", std::move(rows)}};
}

inline StabilizerState stabilizer_from_json(const json &j) {
    try {
        StabilizerState s;
        s.n = j.at("n").get<unsigned>();
        require(s.n >= 1 && s.n <= max_dense_qubits, "stabilizer JSON: n out of range");
        auto bits = [&](const json &v) {
            auto str = v.get<std::string>();
            require(str.size() == s.n, "stabilizer JSON: bit string length must equal n");
            return bits_from_string(str);
        };
        Subspace dir(s.n);
        for (const auto &b : j.at("basis")) {
            dir.insert(bits(b));
        }
        s.support = AffineSubspace(bits(j.at("offset")), dir);
        s.ell = bits(j.at("ell"));
        const auto &rows = j.at("Q_upper");
        require(rows.size() == s.n, "stabilizer JSON: Q_upper needs n rows");
        s.q_upper.assign(s.n, 0);
        for (unsigned i = 0; i < s.n; i++) {
            word r = bits(rows[i]);
            require((r & low_mask(i)) == 0, "stabilizer JSON: Q_upper must be upper triangular");
            s.q_linear |= r & (word{1} << i);
            s.q_upper[i] = r & ~low_mask(i + 1);
        }
        s.validate();
        return s;
    } catch (const json::exception &e) {
        throw ValidationError(std::string("malformed stabilizer JSON: ") + e.what());
    }
}

inline json circuit_to_json(const CliffordCircuit &c) {
    return json{{"n", c.n}, {"gates", c.gate_strings()}};
}

inline json linmap_to_json(const LinMap &m) {
    return m.row_strings();
}

/// Writes to a temporary sibling and renames over the target.
inline void write_file_atomic(const std::string &path, const std::string &content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), "cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        require(static_cast<bool>(out), "write failed for '" + tmp.string() + "'");
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    require(!ec, "cannot rename '" + tmp.string() + "' to '" + path + "': " + ec.message());
}

inline std::string format_double(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    return s.str();
}

/// CSV with '#'-prefixed header lines (config, version) before the column row.
inline std::string csv_document(const std::vector<std::string> &comments, const std::vector<std::string> &columns,
                                const std::vector<std::vector<std::string>> &rows) {
    std::ostringstream out;
    for (const auto &c : comments) {
        out << "# " << c << "\n";
    }
    for (size_t i = 0; i < columns.size(); i++) {
        out << (i ? "," : "") << columns[i];
    }
    out << "\n";
    for (const auto &r : rows) {
        for (size_t i = 0; i < r.size(); i++) {
            out << (i ? "," : "") << r[i];
        }
        out << "\n";
    }
    return out.str();
}

inline json calibration_entry_to_json(const CalibrationEntry &e) {
    return json{{"n", e.n},
                {"k", e.k},
                {"tau", e.tau},
                {"median_low_rank", e.median_low_rank},
                {"median_haar", e.median_haar},
                {"training_error", e.training_error},
                {"corpus_size", e.corpus_size},
                {"shots", e.shots},
                {"seed", e.seed}};
}

inline Calibration calibration_from_json(const json &j) {
    try {
        Calibration cal;
        for (const auto &e : j.at("thresholds")) {
            CalibrationEntry c;
            c.n = e.at("n").get<unsigned>();
            c.k = e.at("k").get<unsigned>();
            c.tau = e.at("tau").get<double>();
            c.median_low_rank = e.value("median_low_rank", 0.0);
            c.median_haar = e.value("median_haar", 0.0);
            c.training_error = e.value("training_error", 0.0);
            c.corpus_size = e.value("corpus_size", size_t{0});
            c.shots = e.value("shots", size_t{0});
            c.seed = e.value("seed", std::uint64_t{0});
            cal.entries[{c.n, c.k}] = c;
        }
        return cal;
    } catch (const json::exception &e) {
        throw ValidationError(std::string("malformed thresholds file: ") + e.what());
    }
}

inline Calibration load_calibration(const std::string &path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open thresholds file '" + path + "'");
    try {
        return calibration_from_json(json::parse(in));
    } catch (const json::exception &e) {
        throw ValidationError("malformed thresholds file '" + path + "': " + e.what());
    }
}

}  // namespace stablab
