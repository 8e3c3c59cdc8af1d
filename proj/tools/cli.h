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

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "stablab/stablab.hpp"

#ifndef STABLAB_VERSION
#define STABLAB_VERSION "unknown"
#endif
#ifndef STABLAB_DATA_DIR
#define STABLAB_DATA_DIR "data"
#endif

namespace stablab::cli {

enum ExitCode { exit_ok = 0, exit_validation = 2, exit_invariant = 3 };

struct Options {
    std::string command;
    // state source
    std::string state_file;
    bool renormalize = false;
    std::string family;
    unsigned n = 1;
    std::string x0;
    std::uint64_t family_seed = 0;
    double eps = 0;
    std::string stab_file;
    // run
    std::uint64_t seed = 0;
    unsigned threads = 1;
    std::string out;
    std::string trace;
    unsigned d = 3;
    double delta = 0;
    size_t shots = 10000;
    double eps1 = 0.9;
    double eps2 = 0.1;
    std::optional<double> threshold;
    unsigned k = 2;
    unsigned k_max = 2;
    unsigned n_max = 2;
    std::string mode = "auto";
    size_t trials = 20000;
    std::string thresholds = std::string(STABLAB_DATA_DIR) + "/thresholds.json";
    size_t corpus = 100;
    std::vector<unsigned> cal_n{4};
    std::vector<unsigned> cal_k{2};
    size_t max_tries = default_balance_tries;
};

inline json config_json(const Options &o) {
    json c{{"command", o.command}, {"seed", o.seed}};
    if (!o.state_file.empty()) {
        c["state"] = o.state_file;
        c["renormalize"] = o.renormalize;
    }
    if (!o.family.empty()) {
        c["family"] = o.family;
        c["n"] = o.n;
        if (!o.x0.empty()) {
            c["x0"] = o.x0;
        }
        c["family_seed"] = o.family_seed;
        c["eps"] = o.eps;
        if (!o.stab_file.empty()) {
            c["stab"] = o.stab_file;
        }
    }
    if (o.command == "gowers") {
        c["d"] = o.d;
    } else if (o.command == "rank" || o.command == "measures") {
        c["delta"] = o.delta;
    } else if (o.command == "bell-sim") {
        c["shots"] = o.shots;
    } else if (o.command == "tolerant-test") {
        c["eps1"] = o.eps1;
        c["eps2"] = o.eps2;
        c["shots"] = o.shots;
        if (o.threshold) {
            c["threshold"] = *o.threshold;
        }
    } else if (o.command == "rank-vs-haar") {
        c["k"] = o.k;
        c["shots"] = o.shots;
        c["thresholds"] = o.thresholds;
    } else if (o.command == "gram-scan") {
        c["k_max"] = o.k_max;
        c["n_max"] = o.n_max;
        c["mode"] = o.mode;
        c["trials"] = o.trials;
    } else if (o.command == "calibrate") {
        c["n"] = o.cal_n;
        c["k"] = o.cal_k;
        c["corpus"] = o.corpus;
        c["shots"] = o.shots;
    } else if (o.command == "extract-stabilizer" || o.command == "doubling") {
        c["max_tries"] = o.max_tries;
    }
    return c;
}

inline StateVector resolve_state(const Options &o) {
    require(o.state_file.empty() != o.family.empty(), "give exactly one of --state or --family");
    if (!o.state_file.empty()) {
        return load_state(o.state_file, o.renormalize);
    }
    FamilySpec spec;
    auto kind = parse_family(o.family);
    switch (kind) {
        case FamilyKind::basis: {
            word x = 0;
            if (!o.x0.empty()) {
                require(o.x0.size() == o.n, "--x0 must be a bit string of length n");
                x = bits_from_string(o.x0);
            }
            spec = FamilySpec::basis(o.n, x);
            break;
        }
        case FamilyKind::uniform:
            spec = FamilySpec::uniform(o.n);
            break;
        case FamilyKind::haar:
            spec = FamilySpec::haar(o.n, o.family_seed);
            break;
        case FamilyKind::t_tensor:
            spec = FamilySpec::t_tensor(o.n);
            break;
        case FamilyKind::stabilizer:
        case FamilyKind::interpolate: {
            require(!o.stab_file.empty(), "--family " + o.family + " needs --stab file.json");
            std::ifstream in(o.stab_file);
            require(static_cast<bool>(in), "cannot open stabilizer file '" + o.stab_file + "'");
            json j;
            try {
                j = json::parse(in);
            } catch (const json::exception &e) {
                throw ValidationError("malformed stabilizer file: " + std::string(e.what()));
            }
            auto st = stabilizer_from_json(j);
            spec = kind == FamilyKind::stabilizer ? FamilySpec::stabilizer(st)
                                                  : FamilySpec::interpolate(st, o.family_seed, o.eps);
            break;
        }
    }
    return make_state(spec);
}

inline std::string version() {
    return STABLAB_VERSION;
}

/// Primary output goes to --out (atomically, with a timestamp sidecar) or to stdout.
inline void emit(const Options &o, const std::string &content, std::ostream &out) {
    if (o.out.empty()) {
        out << content;
        return;
    }
    write_file_atomic(o.out, content);
    auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    json meta{{"artifact", o.out}, {"created_utc", stamp}, {"version", version()}};
    write_file_atomic(o.out + ".meta.json", meta.dump(2) + "\n");
}

inline std::string json_document(const Options &o, json result) {
    json doc{{"version", version()}, {"config", config_json(o)}, {"result", std::move(result)}};
    return doc.dump(2) + "\n";
}

inline std::vector<std::string> csv_header(const Options &o) {
    return {"version: " + version(), "config: " + config_json(o).dump()};
}

inline json rank_json(const RankResult &r) {
    json j{{"exact", r.exact}, {"lower", r.lower}, {"upper", r.upper}, {"witness", r.witness}, {"residual", r.residual}};
    if (r.exact) {
        j["rank"] = r.upper;
    }
    return j;
}

inline json trace_json(const PipelineTrace &t) {
    return json{{"n", t.n},
                {"gamma", t.gamma},
                {"nu", t.nu},
                {"part", t.imaginary_part ? "imaginary" : "real"},
                {"balance_circuit", circuit_to_json(t.balance_circuit)},
                {"balance_moment", t.balance_moment},
                {"balance_tries", t.balance_tries},
                {"max_row_sum", t.max_row_sum},
                {"affine_map", {{"matrix", linmap_to_json(t.affine_map.linear)},
                                {"shift", bits_to_string(t.affine_map.shift, t.n)}}},
                {"map_search_exhaustive", t.map_search_exhaustive},
                {"linear_map", linmap_to_json(t.linear_map)},
                {"symmetric_map", linmap_to_json(t.symmetric_map)},
                {"zero_diagonal_map", linmap_to_json(t.zero_diagonal)},
                {"best_map_value", {{"affine", t.value_affine},
                                    {"linear", t.value_linear},
                                    {"symmetric", t.value_symmetric},
                                    {"zero_diagonal", t.value_zero_diagonal}}},
                {"q_poly", {{"upper", [&] {
                                 json rows = json::array();
                                 for (word r : t.q_poly.upper) {
                                     rows.push_back(bits_to_string(r, t.n));
                                 }
                                 return rows;
                             }()},
                            {"linear", bits_to_string(t.q_poly.linear, t.n)}}},
                {"alpha", bits_to_string(t.alpha, t.n)},
                {"correlation", t.correlation},
                {"fourier4", t.fourier4},
                {"final_overlap", t.final_overlap},
                {"witness", stabilizer_to_json(t.witness)},
                {"theory", {{"C2", t.theory_C2},
                            {"log10_C1", t.theory_log10_C1},
                            {"log10_guarantee", t.theory_log10_guarantee}}}};
}

/// States for the relations report: a Bloch-sphere grid, stabilizers, T-type
/// states, random low-rank combinations and Haar states, all with n <= 2.
inline std::vector<std::pair<std::string, StateVector>> relations_corpus(std::uint64_t seed) {
    std::vector<std::pair<std::string, StateVector>> corpus;
    for (int a = 0; a <= 4; a++) {
        for (int b = 0; b < 4; b++) {
            double theta = std::numbers::pi * a / 4, phi = std::numbers::pi * b / 2;
            std::vector<cplx> u{std::cos(theta / 2), std::polar(std::sin(theta / 2), phi)};
            corpus.emplace_back("bloch_" + std::to_string(a) + "_" + std::to_string(b),
                                StateVector::from_unit(1, u));
        }
    }
    corpus.emplace_back("T", t_tensor_state(1));
    corpus.emplace_back("T^2", t_tensor_state(2));
    for (unsigned i = 0; i < 10; i++) {
        corpus.emplace_back("low_rank_2_" + std::to_string(i), low_rank_state(2, 2, derived_seed(seed, i, 0x1)));
        corpus.emplace_back("haar_2_" + std::to_string(i), haar_state(2, derived_seed(seed, i, 0x2)));
    }
    return corpus;
}

inline int dispatch(const Options &o, std::ostream &out) {
    const std::string &c = o.command;
    if (c == "charfn") {
        auto t = char_function(resolve_state(o));
        std::vector<std::vector<std::string>> rows;
        for (word z = 0; z < t.f.size(); z++) {
            rows.push_back({bits_to_string(z >> t.n, t.n), bits_to_string(z & low_mask(t.n), t.n),
                            format_double(t.f[z])});
        }
        emit(o, csv_document(csv_header(o), {"y_bits", "alpha_bits", "f_value"}, rows), out);
    } else if (c == "gowers") {
        auto s = resolve_state(o);
        json r{{"n", s.n}, {"d", o.d}};
        if (o.d == 3) {
            r["gowers3_table"] = gowers3(s);
        }
        r["gowers_direct"] = gowers_norm_direct(s, o.d);
        emit(o, json_document(o, r), out);
    } else if (c == "measures") {
        auto s = resolve_state(o);
        require(s.n <= max_enumeration_qubits, "measures: fidelity is exhaustive and needs n <= 4");
        json r{{"n", s.n}, {"gowers3", gowers3(s)}};
        auto f = stabilizer_fidelity(s);
        r["fidelity"] = f.value;
        r["fidelity_witness"] = {{"index", f.index}, {"state", stabilizer_to_json(f.witness)}};
        if (s.n <= 3) {
            auto rk = stabilizer_rank(s, o.delta);
            r["rank"] = rk.exact ? json(rk.upper) : json{{"lower", rk.lower}, {"upper", rk.upper}};
            r["rank_witness"] = rk.witness;
        } else {
            r["rank"] = nullptr;
        }
        emit(o, json_document(o, r), out);
    } else if (c == "rank") {
        emit(o, json_document(o, rank_json(stabilizer_rank(resolve_state(o), o.delta))), out);
    } else if (c == "fidelity") {
        auto f = stabilizer_fidelity(resolve_state(o));
        emit(o, json_document(o, {{"fidelity", f.value}, {"index", f.index}, {"witness", stabilizer_to_json(f.witness)}}),
             out);
    } else if (c == "gram-scan") {
        auto rows = lambda_star_scan(o.k_max, o.n_max, parse_scan_mode(o.mode), o.trials, o.seed);
        std::vector<std::vector<std::string>> table;
        for (const auto &r : rows) {
            std::string w;
            for (size_t i = 0; i < r.witness.size(); i++) {
                w += (i ? " " : "") + std::to_string(r.witness[i]);
            }
            table.push_back({std::to_string(r.k), std::to_string(r.n), format_double(r.min_lambda), w,
                             r.exhaustive ? "exhaustive" : "sampled", std::to_string(r.subsets)});
        }
        emit(o, csv_document(csv_header(o), {"k", "n", "min_lambda", "witness", "mode", "subsets"}, table), out);
    } else if (c == "extract-stabilizer") {
        auto s = resolve_state(o);
        auto res = extract_stabilizer(s, o.seed, o.max_tries);
        if (!o.trace.empty()) {
            write_file_atomic(o.trace, json_document(o, trace_json(res.trace)));
        }
        emit(o, json_document(o, {{"overlap", res.overlap}, {"witness", stabilizer_to_json(res.stabilizer)}}), out);
    } else if (c == "bell-sim") {
        auto s = resolve_state(o);
        auto shots = bell_difference_sample(s, o.shots, o.seed);
        std::vector<std::vector<std::string>> rows;
        for (const auto &r : shots) {
            rows.push_back({bits_to_string(r.z >> s.n, s.n), bits_to_string(r.z & low_mask(s.n), s.n),
                            r.same_bit ? "1" : "0"});
        }
        emit(o, csv_document(csv_header(o), {"y_bits", "alpha_bits", "same_bit"}, rows), out);
    } else if (c == "tolerant-test") {
        require(o.eps2 > 0 && o.eps2 < o.eps1 && o.eps1 <= 1, "tolerant-test: need 0 < eps2 < eps1 <= 1");
        auto d = tolerant_test(resolve_state(o), o.eps1, o.eps2, o.shots, o.seed, o.threshold);
        emit(o, json_document(o, {{"R_hat", d.r_hat}, {"threshold", d.threshold},
                                  {"verdict", d.close ? "close" : "far"}, {"shots", d.shots}, {"seed", d.seed}}),
             out);
    } else if (c == "rank-vs-haar") {
        auto cal = load_calibration(o.thresholds);
        auto d = rank_vs_haar_test(resolve_state(o), o.k, o.shots, o.seed, cal);
        emit(o, json_document(o, {{"R_hat", d.r_hat}, {"threshold", d.threshold},
                                  {"verdict", d.close ? "low-rank" : "haar"}, {"shots", d.shots}, {"seed", d.seed}}),
             out);
    } else if (c == "calibrate") {
        json entries = json::array();
        for (unsigned n : o.cal_n) {
            for (unsigned k : o.cal_k) {
                entries.push_back(calibration_entry_to_json(calibrate(n, k, o.seed, o.corpus, o.shots)));
            }
        }
        json doc{{"version", version()}, {"config", config_json(o)}, {"thresholds", entries}};
        emit(o, doc.dump(2) + "\n", out);
    } else if (c == "relations") {
        auto rep = relations_experiment(relations_corpus(o.seed), o.seed);
        json rows = json::array();
        for (const auto &r : rep.rows) {
            rows.push_back({{"label", r.label}, {"n", r.n}, {"chi", r.chi}, {"one_minus_F", r.one_minus_f},
                            {"one_minus_U3", r.one_minus_u3}});
        }
        json bounds = json::array();
        for (const auto &[k, b] : rep.bound_by_chi) {
            bounds.push_back({{"chi", k}, {"max_one_minus_F", b}});
        }
        json cx = json::array();
        for (const auto &r : rep.counterexamples) {
            cx.push_back({{"n", r.n}, {"chi_phi", r.chi_phi}, {"chi_psi", r.chi_psi}, {"fidelity", r.fidelity}});
        }
        json probes = json::array();
        for (const auto &p : rep.probes) {
            probes.push_back({{"k", p.k}, {"min_fidelity", p.min_fidelity}, {"two_to_minus_k", p.two_to_minus_k}});
        }
        json checks = json::array();
        for (const auto &ch : rep.checks) {
            checks.push_back({{"name", ch.name}, {"ok", ch.ok}, {"detail", ch.detail}});
        }
        emit(o, json_document(o, {{"rows", rows}, {"bounds", bounds}, {"counterexamples", cx},
                                  {"conjecture_probe", probes}, {"checks", checks}}),
             out);
    } else if (c == "doubling") {
        auto s = resolve_state(o);
        double gamma = gowers3(s);
        auto split = split_real(s);
        auto bal = balance(split.state, o.max_tries, o.seed);
        auto t = char_function(bal.state);
        double delta = gowers3(bal.state);
        delta = delta * delta / 6;
        auto zeta = sample_zeta(t, delta, o.seed);
        auto pts = zeta_support(t, zeta.zeta, delta);
        json r{{"gamma", gamma}, {"delta", delta}, {"L_value", zeta.L_value},
               {"L_lower_bound", zeta_L_lower_bound(t, delta)}, {"support_size", pts.size()}};
        if (!pts.empty()) {
            auto ds = doubling_stats(pts);
            r["energy"] = ds.energy;
            r["doubling_ratio"] = ds.ratio;
            auto v = AffineSubspace(0, Subspace::span(2 * t.n, pts));
            auto cover = cover_affine_map(pts, v, t.n);
            r["cover"] = {{"matrix", linmap_to_json(cover.map.linear)},
                          {"shift", bits_to_string(cover.map.shift, t.n)},
                          {"count", cover.count},
                          {"bound", cover.bound}};
        }
        emit(o, json_document(o, r), out);
    } else {
        throw ValidationError("unknown command '" + c + "'");
    }
    return exit_ok;
}

inline std::uint64_t default_seed() {
    const char *env = std::getenv("STABLAB_SEED");
    if (env == nullptr || *env == '\0') {
        return 0;
    }
    try {
        size_t used = 0;
        auto v = std::stoull(env, &used, 0);
        require(used == std::string(env).size(), "");
        return v;
    } catch (...) {
        throw ValidationError("STABLAB_SEED must be an unsigned integer");
    }
}

/// Runs `body`, mapping library errors to exit codes and messages on `err`.
template <class Body>
int guarded(Body &&body, std::ostream &err, const std::string &usage) {
    try {
        return body();
    } catch (const BudgetExceeded &e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    } catch (const ValidationError &e) {
        err << "error: " << e.what() << "\n\n" << usage;
        return exit_validation;
    } catch (const InvariantViolation &e) {
        err << "internal consistency failure: " << e.what() << "\n";
        return exit_invariant;
    }
}

/// Parses argv and runs one subcommand. Returns the process exit code.
inline int run_cli(int argc, const char *const *argv, std::ostream &out = std::cout, std::ostream &err = std::cerr) {
    Options o;
    CLI::App app{"stab-lab: stabilizer-complexity measures, witness extraction and Bell-difference testing"};
    app.set_version_flag("--version", version());
    app.require_subcommand(1);
    try {
        o.seed = default_seed();
    } catch (const ValidationError &e) {
        err << "error: " << e.what() << "\n";
        return exit_validation;
    }

    auto add_common = [&](CLI::App *s) {
        s->add_option("--seed", o.seed, "master seed (default $STABLAB_SEED or 0)");
        s->add_option("--threads", o.threads, "worker threads (0 = all cores)");
        s->add_option("--out", o.out, "output path (default stdout)");
    };
    auto add_state = [&](CLI::App *s) {
        s->add_option("--state", o.state_file, "state JSON in the unit-vector convention");
        s->add_flag("--renormalize", o.renormalize, "accept and renormalize state files with norm != 1");
        s->add_option("--family", o.family, "basis | uniform | haar | t_tensor | stabilizer | interpolate");
        s->add_option("--n", o.n, "qubit count for --family");
        s->add_option("--x0", o.x0, "basis family bit string");
        s->add_option("--family-seed", o.family_seed, "seed for haar / interpolate");
        s->add_option("--eps", o.eps, "interpolation weight in [0, 1]");
        s->add_option("--stab", o.stab_file, "stabilizer JSON for stabilizer / interpolate");
    };
    std::vector<CLI::App *> subs;
    auto sub = [&](const std::string &name, const std::string &help, bool state) {
        auto s = app.add_subcommand(name, help);
        add_common(s);
        if (state) {
            add_state(s);
        }
        subs.push_back(s);
        return s;
    };

    sub("charfn", "dump the characteristic table f(y, alpha) as CSV", true);
    sub("gowers", "Gowers U^d norm (2^d-th power) by tables and brute force", true)
        ->add_option("--d", o.d, "order d in {1, 2, 3}");
    sub("measures", "Gowers-3 norm, stabilizer fidelity and stabilizer rank", true)
        ->add_option("--delta", o.delta, "approximate-rank tolerance");
    sub("rank", "stabilizer rank by exhaustive subset search", true)->add_option("--delta", o.delta, "tolerance");
    sub("fidelity", "exhaustive stabilizer fidelity", true);
    auto gram = sub("gram-scan", "minimum nonsingular Gram eigenvalue over stabilizer k-subsets", false);
    gram->add_option("--k", o.k_max, "largest subset size");
    gram->add_option("--nmax", o.n_max, "largest qubit count");
    gram->add_option("--mode", o.mode, "exhaustive | sampled | auto");
    gram->add_option("--trials", o.trials, "samples per (k, n) in sampled mode");
    auto ex = sub("extract-stabilizer", "run the witness pipeline", true);
    ex->add_option("--trace", o.trace, "write the pipeline trace JSON here");
    ex->add_option("--max-tries", o.max_tries, "balancing attempts");
    sub("bell-sim", "simulate Bell-difference shots", true)->add_option("--shots", o.shots, "number of shots");
    auto tol = sub("tolerant-test", "decide F >= eps1 versus F <= eps2", true);
    tol->add_option("--eps1", o.eps1, "close-case fidelity");
    tol->add_option("--eps2", o.eps2, "far-case fidelity");
    tol->add_option("--shots", o.shots, "number of shots");
    tol->add_option("--threshold", o.threshold, "override the eps1^8/2 threshold");
    auto rvh = sub("rank-vs-haar", "decide low stabilizer rank versus Haar random", true);
    rvh->add_option("--k", o.k, "rank bound");
    rvh->add_option("--shots", o.shots, "number of shots");
    rvh->add_option("--thresholds", o.thresholds, "calibrated thresholds JSON");
    auto cal = sub("calibrate", "calibrate rank-vs-Haar thresholds", false);
    cal->add_option("--n", o.cal_n, "qubit counts");
    cal->add_option("--k", o.cal_k, "rank bounds");
    cal->add_option("--corpus", o.corpus, "states per class");
    cal->add_option("--shots", o.shots, "shots per state");
    sub("relations", "chi / fidelity / Gowers relations on n <= 2 states", false);
    sub("doubling", "zeta sample, doubling statistics and covering map", true)
        ->add_option("--max-tries", o.max_tries, "balancing attempts");

    CLI::App *active = nullptr;
    try {
        app.parse(argc, argv);
        for (auto *s : subs) {
            if (s->parsed()) {
                active = s;
                o.command = s->get_name();
            }
        }
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_validation;
    }
    return guarded([&] {
        set_threads(o.threads);
        return dispatch(o, out);
    }, err, active ? active->help() : app.help());
}

}  // namespace stablab::cli
