// Copyright 2026 The smplocc Authors
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

// Seeded experiments, result tables and summaries.
//
// Every experiment draws instance i from Rng(seed).split(i), so rows do not depend on
// execution order. Result tables are CSV with the fixed header
//   experiment,instance,seed,metric,value,relation,bound,pass
// and numbers printed with 12 significant digits. Relation is one of "<=", ">=", "=="
// (checked rows) or "info" (reported only, empty bound).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "smplocc/errors.hpp"
#include "smplocc/fingerprints.hpp"
#include "smplocc/linalg.hpp"
#include "smplocc/measurements.hpp"
#include "smplocc/protocols/equality.hpp"
#include "smplocc/protocols/hidden_matching.hpp"
#include "smplocc/protocols/locc.hpp"
#include "smplocc/random.hpp"
#include "smplocc/rng.hpp"
#include "smplocc/transforms/hybrid.hpp"
#include "smplocc/transforms/newman.hpp"
#include "smplocc/transforms/replace_message.hpp"
#include "smplocc/transforms/union_bound.hpp"
#include "smplocc/transforms/value_table.hpp"

namespace smplocc {

/// Floating-point slack on analytic inequality bounds (not on tolerance checks).
inline constexpr double kRoundoff = 1e-12;

struct ExperimentConfig {
    std::string id;
    std::map<std::string, std::string> params;  // overrides of the experiment defaults
    std::uint64_t seed = 1;
    std::string out;
};

struct ResultRow {
    std::string experiment;
    std::size_t instance = 0;
    std::uint64_t seed = 0;
    std::string metric;
    double value = 0.0;
    std::string relation = "info";
    double bound = std::numeric_limits<double>::quiet_NaN();
    bool pass = true;

    [[nodiscard]] bool checked() const { return relation != "info"; }
};

struct ResultTable {
    std::string experiment;
    std::uint64_t seed = 0;
    std::vector<ResultRow> rows;

    [[nodiscard]] bool all_pass() const {
        return std::all_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.pass; });
    }
    [[nodiscard]] std::vector<const ResultRow*> find(const std::string& metric) const {
        std::vector<const ResultRow*> out;
        for (const auto& r : rows) {
            if (r.metric == metric) {
                out.push_back(&r);
            }
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// Parameters.

/// Default parameters of every experiment; configs may only override these keys.
inline const std::map<std::string, std::map<std::string, std::string>>& experiment_defaults() {
    static const std::map<std::string, std::map<std::string, std::string>> defaults = {
        {"fingerprint-eq", {{"n", "8"}, {"k", "5"}, {"pairs", "100"}, {"exhaustive_n", "4"}}},
        {"swap-check", {{"pairs", "100"}, {"max_dim", "16"}}},
        {"ambainis-eq", {{"n", "6"}, {"samples", "200"}}},
        {"hm", {{"n", "8"}}},
        {"drhm", {{"n", "4"}, {"hm_n", "8"}}},
        {"ratio", {{"chains", "200"}, {"max_dim", "8"}, {"max_length", "6"}}},
        {"clamp-sim", {{"protocols", "100"}, {"deltas", "0.01,0.05"}, {"draws", "1000"}, {"max_qubits", "3"}}},
        {"both-replaced", {{"protocols", "100"}, {"deltas", "0.001,0.01"}, {"draws", "1000"}, {"max_qubits", "3"}}},
        {"pm-sim", {{"povms", "200"}, {"max_dim", "4"}, {"max_outcomes", "6"}, {"states", "50"}}},
        {"locc1-hybrid", {{"protocols", "50"}, {"n", "3"}, {"max_qubits", "3"}}},
        {"newman", {{"n", "6"}, {"hashes", "3"}, {"delta", "0.125"}, {"seeds", "10"}, {"retries", "10"}}},
        {"replace", {{"q", "2"}, {"r", "5"}, {"delta", "0.45"}, {"c", "3"}, {"instances", "50"}, {"min_fraction", "0.9"}}},
        {"union-bound", {{"chains", "200"}, {"max_k", "5"}, {"max_delta", "0.05"}, {"max_dim", "8"}}},
    };
    return defaults;
}

inline std::vector<std::string> experiment_ids() {
    std::vector<std::string> ids;
    for (const auto& [id, d] : experiment_defaults()) {
        ids.push_back(id);
    }
    return ids;
}

class Params {
public:
    explicit Params(const ExperimentConfig& cfg) {
        const auto& all = experiment_defaults();
        auto it = all.find(cfg.id);
        if (it == all.end()) {
            throw ContractViolation("unknown experiment id: " + cfg.id);
        }
        values_ = it->second;
        for (const auto& [k, v] : cfg.params) {
            if (!values_.count(k)) {
                throw ContractViolation("unknown parameter for " + cfg.id + ": " + k);
            }
            values_[k] = v;
        }
    }

    [[nodiscard]] std::size_t size(const std::string& key) const {
        const std::string& s = values_.at(key);
        std::size_t pos = 0;
        long long v = 0;
        try {
            v = std::stoll(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != s.size() || v < 0) {
            throw ContractViolation("parameter " + key + " must be a nonnegative integer, got '" + s + "'");
        }
        return static_cast<std::size_t>(v);
    }

    [[nodiscard]] double real(const std::string& key) const { return parse_real(key, values_.at(key)); }

    [[nodiscard]] std::vector<double> reals(const std::string& key) const {
        std::vector<double> out;
        std::stringstream ss(values_.at(key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            out.push_back(parse_real(key, item));
        }
        if (out.empty()) {
            throw ContractViolation("parameter " + key + " is empty");
        }
        return out;
    }

private:
    static double parse_real(const std::string& key, const std::string& s) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != s.size() || !std::isfinite(v)) {
            throw ContractViolation("parameter " + key + " must be a number, got '" + s + "'");
        }
        return v;
    }

    std::map<std::string, std::string> values_;
};

/// Reads "key = value" lines; '#' starts a comment. The keys "seed" and "out" set the
/// corresponding config fields, every other key is an experiment parameter.
inline void apply_config_text(ExperimentConfig& cfg, const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    std::size_t lineno = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    while (std::getline(ss, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.resize(hash);
        }
        line = trim(line);
        if (line.empty()) {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ContractViolation("config line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ContractViolation("config line " + std::to_string(lineno) + ": empty key");
        }
        if (key == "seed") {
            try {
                cfg.seed = std::stoull(value);
            } catch (const std::exception&) {
                throw ContractViolation("config line " + std::to_string(lineno) + ": bad seed");
            }
        } else if (key == "out") {
            cfg.out = value;
        } else {
            cfg.params[key] = value;
        }
    }
}

inline void apply_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ContractViolation("cannot read config file " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    apply_config_text(cfg, buf.str());
}

// ---------------------------------------------------------------------------
// Row recording.

namespace detail {

class Recorder {
public:
    Recorder(std::string experiment, std::uint64_t seed) : table_{std::move(experiment), seed, {}} {}

    void info(std::size_t inst, const std::string& metric, double value) {
        add(inst, metric, value, "info", std::numeric_limits<double>::quiet_NaN(), true);
    }
    void le(std::size_t inst, const std::string& metric, double value, double bound) {
        add(inst, metric, value, "<=", bound, value <= bound);
    }
    void ge(std::size_t inst, const std::string& metric, double value, double bound) {
        add(inst, metric, value, ">=", bound, value >= bound);
    }
    void eq(std::size_t inst, const std::string& metric, double value, double bound) {
        add(inst, metric, value, "==", bound, value == bound);
    }

    ResultTable finish() {
        std::stable_sort(table_.rows.begin(), table_.rows.end(),
                         [](const ResultRow& a, const ResultRow& b) { return a.instance < b.instance; });
        return std::move(table_);
    }

private:
    void add(std::size_t inst, const std::string& metric, double value, const char* rel, double bound, bool pass) {
        table_.rows.push_back(ResultRow{table_.experiment, inst, table_.seed, metric, value, rel, bound,
                                        pass && std::isfinite(value)});
    }

    ResultTable table_;
};

inline Bits random_bits(std::size_t n, Rng& rng) {
    Bits b(n);
    for (auto& v : b) {
        v = static_cast<std::uint8_t>(rng.coin());
    }
    return b;
}

/// Dimension 2^k with k uniform in [1, max_qubits].
inline Eigen::Index random_qubit_dim(std::size_t max_qubits, Rng& rng) {
    return Eigen::Index{1} << (1 + rng.below(max_qubits));
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        m = std::max(m, std::abs(a[i] - b[i]));
    }
    return m;
}

// ---------------------------------------------------------------------------
// Experiments.

inline ResultTable run_fingerprint_eq(const ExperimentConfig& cfg, const Params& p) {
    Recorder rec(cfg.id, cfg.seed);
    const Rng root(cfg.seed);
    const std::size_t n = p.size("n");
    const std::size_t k = p.size("k");
    const std::size_t pairs = p.size("pairs");
    require(n >= 1 && n <= 12, "fingerprint-eq: n must be in [1, 12]");
    const FingerprintEqProtocol single(hadamard_code(n), 1);
    const FingerprintEqProtocol many(hadamard_code(n), k);
    const double target_k = std::pow(5.0 / 8.0, static_cast<double>(k));
    for (std::size_t i = 0; i < pairs; ++i) {
        Rng rng = root.split(i);
        const Bits x = random_bits(n, rng);
        Bits y = random_bits(n, rng);
        while (y == x) {
            y = random_bits(n, rng);
        }
        rec.le(i, "accept_equal_dev", std::abs(many.accept_prob(x, x) - 1.0), 1e-9);
        rec.info(i, "accept_single", single.accept_prob(x, y));
        rec.le(i, "accept_single_dev", std::abs(single.accept_prob(x, y) - 5.0 / 8.0), 1e-9);
        rec.info(i, "accept_k", many.accept_prob(x, y));
        rec.le(i, "accept_k_dev", std::abs(many.accept_prob(x, y) - target_k), 1e-9);
        rec.le(i, "circuit_dev", std::abs(single.accept_prob_by_circuit(x, y) - 5.0 / 8.0), 1e-9);
    }
    const std::size_t en = p.size("exhaustive_n");
    if (en > 0) {
        require(en <= 8, "fingerprint-eq: exhaustive_n must be at most 8");
        const FingerprintEqProtocol s1(hadamard_code(en), 1);
        const FingerprintEqProtocol sk(hadamard_code(en), k);
        double worst_eq = 0.0;
        double worst_1 = 0.0;
        double worst_k = 0.0;
        for (std::uint64_t a = 0; a < (std::uint64_t{1} << en); ++a) {
            for (std::uint64_t b = 0; b < (std::uint64_t{1} << en); ++b) {
                const Bits x = bits_from_int(a, en);
                const Bits y = bits_from_int(b, en);
                if (a == b) {
                    worst_eq = std::max(worst_eq, std::abs(sk.accept_prob(x, y) - 1.0));
                } else {
                    worst_1 = std::max(worst_1, std::abs(s1.accept_prob(x, y) - 5.0 / 8.0));
                    worst_k = std::max(worst_k, std::abs(sk.accept_prob(x, y) - target_k));
                }
            }
        }
        rec.le(pairs, "exhaustive_equal_dev", worst_eq, 1e-9);
        rec.le(pairs, "exhaustive_single_dev", worst_1, 1e-9);
        rec.le(pairs, "exhaustive_k_dev", worst_k, 1e-9);
    }
    return rec.finish();
}

inline ResultTable run_swap_check(const ExperimentConfig& cfg, const Params& p) {
    Recorder rec(cfg.id, cfg.seed);
    const Rng root(cfg.seed);
    const std::size_t max_dim = p.size("max_dim");
    require(max_dim >= 2, "swap-check: max_dim must be at least 2");
    for (std::size_t i = 0; i < p.size("pairs"); ++i) {
        Rng rng = root.split(i);
        const auto d = static_cast<Eigen::Index>(2 + rng.below(max_dim - 1));
        const Ket a = random::ket(d, rng);
        const Ket b = random::ket(d, rng);
        const double formula = swap_accept_prob(std::abs(a.inner(b)));
        rec.le(i, "circuit_vs_formula", std::abs(swap_circuit_sim(a, b) - formula), 1e-9);
    }
    return rec.finish();
}

inline ResultTable run_ambainis_eq(const ExperimentConfig& cfg, const Params& p) {
    Recorder rec(cfg.id, cfg.seed);
    Rng rng = Rng(cfg.seed).split(0);
    const std::size_t n = p.size("n");
    require(n >= 1 && n <= 10, "ambainis-eq: n must be in [1, 10]");
    const AmbainisEqProtocol proto(n, 1, rng);
    const double rel = proto.code().relative_distance();
    double min_margin = 1.0;
    double worst_equal = 0.0;
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
        const Bits x = bits_from_int(a, n);
        worst_equal = std::max(worst_equal, std::abs(proto.accept_prob(x, x) - 1.0));
        for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
            if (a != b) {
                min_margin = std::min(min_margin, proto.reject_prob_single(x, bits_from_int(b, n)) - rel);
            }
        }
    }
    rec.info(0, "relative_distance", rel);
    rec.ge(0, "min_reject_minus_distance", min_margin, 0.0);
    rec.le(0, "accept_equal_dev", worst_equal, 0.0);
    rec.info(0, "message_bits_per_rep", static_cast<double>(proto.message_bits_per_rep()));
    std::size_t rejected_equal = 0;
    for (std::size_t s = 0; s < p.size("samples"); ++s) {
        const Bits x = random_bits(n, rng);
        rejected_equal += proto.run(x, x, rng) ? 0 : 1;
    }
    rec.le(0, "sampled_equal_rejections", static_cast<double>(rejected_equal), 0.0);
    return rec.finish();
}

/// Exhaustive zero-error check of the one-way protocol at size n over every input and
/// every family matching; rows go to instance = matching index + offset.
inline void hm_rows(Recorder& rec, std::size_t n, std::size_t offset) {
    require(n >= 2 && n <= 12 && is_power_of_two(n), "hm: n must be a power of two in [2, 12]");
    const MatchingFamily fam = matching_family(static_cast<std::uint32_t>(n));
    for (std::size_t mi = 0; mi < fam.size(); ++mi) {
        const Matching& m = fam.matchings[mi];
        double worst_error = 0.0;
        double worst_edge = 0.0;
        for (std::uint64_t xv = 0; xv < (std::uint64_t{1} << n); ++xv) {
            const Bits x = bits_from_int(xv, n);
            const auto dist = hm_protocol(static_cast<std::uint32_t>(n), x, m);
            double err = 0.0;
            std::map<Edge, double> per_edge;
            for (const auto& [t, pr] : dist) {
                if (!hm_tuple_correct(t, x, m)) {
                    err += pr;
                }
                per_edge[{t.i, t.j}] += pr;
            }
            worst_error = std::max(worst_error, err);
            for (const auto& e : m) {
                worst_edge = std::max(worst_edge, std::abs(per_edge[e] - 2.0 / static_cast<double>(n)));
            }
        }
        rec.le(offset + mi, "hm_error_mass", worst_error, 1e-12);
        rec.le(offset + mi, "hm_edge_uniformity_dev", worst_edge, 1e-9);
    }
}

inline ResultTable run_hm(const ExperimentConfig& cfg, const Params& p) {
    Recorder rec(cfg.id, cfg.seed);
    hm_rows(rec, p.size("n"), 0);
    return rec.finish();
}

inline ResultTable run_drhm(const ExperimentConfig& cfg, const Params& p) {
    Recorder rec(cfg.id, cfg.seed);
    const std::size_t n = p.size("n");
    require(n >= 2 && n <= 8 && is_power_of_two(n), "drhm: n must be a power of two in [2, 8]");
    const MatchingFamily fam = matching_family(static_cast<std::uint32_t>(n));
    const DrhmLayout lay = drhm_layout(fam);
    const LoccProtocol multi = drhm_locc_protocol(fam);
    const LoccProtocol binary = drhm_two_value_rounds(fam);
    const std::size_t expected_rounds = 2 * ceil_log2(n) + 2 * ceil_log2(n - 1);
    rec.eq(0, "two_value_round_count", static_cast<double>(binary.steps()), static_cast<double>(expected_rounds));
    rec.eq(0, "two_value_all_binary", binary.two_value() ? 1.0 : 0.0, 1.0);
    rec.info(0, "message_qubits_total", static_cast<double>(lay.message_qubits_total()));
    std::size_t inst = 1;
    for (std::size_t m1 = 0; m1 < fam.size(); ++m1) {
        for (std::size_t m2 = 0; m2 < fam.size(); ++m2, ++inst) {
            double err_multi = 0.0;
            double err_binary = 0.0;
            double tv = 0.0;
            double mass = 0.0;
            for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
                for (std::uint64_t b = 0; b < (std::uint64_t{1} << n); ++b) {
                    const DrhmInputs in{bits_from_int(a, n), bits_from_int(b, n), m1, m2};
                    const DrhmMessages msg = drhm_messages(fam, in);
                    const auto d1 = run_locc_exact(multi, msg.alice, msg.bob).outputs(multi);
                    const auto d2 = run_locc_exact(binary, msg.alice, msg.bob).outputs(binary);
                    double e1 = 0.0;
                    double e2 = 0.0;
                    double t1 = 0.0;
                    for (const auto& [o, pr] : d1) {
                        e1 += drhm_output_correct(o, fam, in) ? 0.0 : pr;
                        t1 += pr;
                    }
                    for (const auto& [o, pr] : d2) {
                        e2 += drhm_output_correct(o, fam, in) ? 0.0 : pr;
                    }
                    double diff = 0.0;
                    for (const auto& [o, pr] : d1) {
                        auto it = d2.find(o);
                        diff += std::abs(pr - (it == d2.end() ? 0.0 : it->second));
                    }
                    for (const auto& [o, pr] : d2) {
                        if (!d1.count(o)) {
                            diff += std::abs(pr);
                        }
                    }
                    err_multi = std::max(err_multi, e1);
                    err_binary = std::max(err_binary, e2);
                    tv = std::max(tv, diff / 2.0);
                    mass = std::max(mass, std::abs(t1 - 1.0));
                }
            }
            rec.le(inst, "drhm_error_mass", err_multi, 1e-12);
            rec.le(inst, "two_value_error_mass", err_binary, 1e-12);
            rec.le(inst, "distribution_tv", tv, 1e-9);
            rec.le(inst, "total_mass_dev", mass, 1e-9);
        }
    }
    const std::size_t hm_n = p.size("hm_n");
    if (hm_n > 0) {
        hm_rows(rec, hm_n, inst);
    }
    return rec.finish();
}

inline ResultTable run_ratio(const ExperimentConfig& cfg, const Params& p) {
    Recorder rec(cfg.id, cfg.seed);
    const Rng root(cfg.seed);
    const std::size_t max_dim = p.size("max_dim");
    const std::size_t max_len = p.size("max_length");
    require(max_dim >= 2 && max_len >= 1, "ratio: max_dim >= 2 and max_length >= 1 required");
    for (std::size_t i = 0; i < p.size("chains"); ++i) {
        Rng rng = root.split(i);
        const auto d = static_cast<Eigen::Index>(2 + rng.below(max_dim - 1));
        const std::size_t len = 1 + rng.below(max_len);
        std::vector<Matrix> chain;
        for (std::size_t s = 0; s < len; ++s) {
            chain.push_back(random::instrument_kraus(d, 2, rng)[rng.below(2)]);
        }
        const DensityMatrix rho = random::density(d, rng);
        const auto v = chain_values(chain, rho);
        rec.info(i, "min_value", *std::min_element(v.begin(), v.end()));
        rec.le(i, "ratio_vs_sequential",
               max_abs_diff(ratio_conditionals(chain, rho), sequential_conditionals(chain, rho)), 1e-9);
    }
    return rec.finish();
}

/// Random 2-value protocol for the table experiments: r = 1 + (i mod 3) rounds, side
/// dimensions 2^k with k <= max_qubits.
struct TableInstance {
    LoccProtocol proto;
    DensityMatrix rho_a;
    DensityMatrix rho_b;
};

inline TableInstance table_instance(Rng& rng, std::size_t i, std::size_t max_qubits) {
    const std::size_t r = 1 + i % 3;
    const Eigen::Index da = random_qubit_dim(max_qubits, rng);
    const Eigen::Index db = random_qubit_dim(max_qubits, rng);
    LoccProtocol proto = random_two_value_protocol(da, db, r, rng);
    DensityMatrix ra = random::density(da, rng);
    DensityMatrix rb = random::density(db, rng);
    return {std::move(proto), std::move(ra), std::move(rb)};
}

inline Perturbation draw_pattern(std::size_t draw) {
    switch (draw) {
        case 0:
            return Perturbation::AllPlus;
        case 1:
            return Perturbation::AllMinus;
        case 2:
            return Perturbation::Alternating;
        default:
            return draw % 2 == 0 ? Perturbation::Uniform : Perturbation::RandomSign;
    }
}

inline std::string delta_tag(double delta) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", delta);
    return buf;
}

inline ResultTable run_clamp_sim(const ExperimentConfig& cfg, const Params& p) {
    Recorder rec(cfg.id, cfg.seed);
    const Rng root(cfg.seed);
    const auto deltas = p.reals("deltas");
    const std::size_t draws = p.size("draws");
    for (std::size_t i = 0; i < p.size("protocols"); ++i) {
        Rng rng = root.split(i);
        const TableInstance ti = table_instance(rng, i, p.size("max_qubits"));
        const std::size_t r = ti.proto.rounds();
        const double truth = run_locc_exact(ti.proto, ti.rho_a, ti.rho_b).acceptance(ti.proto);
        const ValueTable ta = value_table(ti.proto, Side::A, ti.rho_a);
        const ValueTable tb = value_table(ti.proto, Side::B, ti.rho_b);
        rec.info(i, "rounds", static_cast<double>(r));
        rec.le(i, "table_consistency", std::max(ta.consistency_defect(), tb.consistency_defect()), 1e-9);
        rec.le(i, "exact_table_dev", std::abs(simulate_from_tables(ta, tb) - truth), 1e-9);
        const ClampedTable exact_clamped = clamp_table(ta);
        rec.le(i, "clamp_unperturbed_dev", std::abs(simulate_from_tables(exact_clamped, tb) - truth), 1e-9);
        for (double delta : deltas) {
            require(delta >= 0.0, "clamp-sim: deltas must be nonnegative");
            const std::string tag = "@" + delta_tag(delta);
            double worst_error = 0.0;
            double worst_excess = -std::numeric_limits<double>::infinity();
            double worst_idem = 0.0;
            double worst_independent = 0.0;
            for (std::size_t draw = 0; draw < draws; ++draw) {
                const ValueTable noisy = perturb(ta, delta, draw_pattern(draw), rng);
                const ClampedTable ct = clamp_table(noisy);
                worst_error = std::max(worst_error, std::abs(simulate_from_tables(ct, tb) - truth));
                worst_excess = std::max(worst_excess, clamp_depth_excess(ta, ct, delta));
                const ClampedTable again = clamp_table(ct.table);
                for (const auto& [h, v] : again.table.values) {
                    const auto& w = ct.table.values.at(h);
                    worst_idem = std::max({worst_idem, std::abs(v[0] - w[0]), std::abs(v[1] - w[1])});
                }
                const ClampedTable alt = clamp_table(noisy, ClampRule::Independent);
                worst_independent =
                    std::max(worst_independent, std::abs(simulate_from_tables(alt, tb) - truth));
            }
            const double bound = r == 1 ? 2.0 * delta : single_replaced_bound(r, delta);
            rec.le(i, "max_sim_error" + tag, worst_error, bound + kRoundoff);
            rec.le(i, "max_depth_excess" + tag, worst_excess, kRoundoff);
            rec.le(i, "clamp_idempotence" + tag, worst_idem, 1e-15);
            rec.info(i, "max_sim_error_independent_rule" + tag, worst_independent);
        }
    }
    return rec.finish();
}

inline ResultTable run_both_replaced(const ExperimentConfig& cfg, const Params& p) {
    Recorder rec(cfg.id, cfg.seed);
    const Rng root(cfg.seed);
    const auto deltas = p.reals("deltas");
    const std::size_t draws = p.size("draws");
    for (std::size_t i = 0; i < p.size("protocols"); ++i) {
        Rng rng = root.split(i);
        const TableInstance ti = table_instance(rng, i, p.size("max_qubits"));
        const std::size_t r = ti.proto.rounds();
        const double truth = run_locc_exact(ti.proto, ti.rho_a, ti.rho_b).acceptance(ti.proto);
        const ValueTable ta = value_table(ti.proto, Side::A, ti.rho_a);
        const ValueTable tb = value_table(ti.proto, Side::B, ti.rho_b);
        rec.info(i, "rounds", static_cast<double>(r));
        rec.le(i, "exact_table_dev", std::abs(simulate_both_replaced(ta, tb) - truth), 1e-9);
        rec.le(i, "zero_perturbation_dev",
               std::abs(simulate_both_replaced(clamp_table(ta), clamp_table(tb)) - truth), 1e-9);
        for (double delta : deltas) {
            require(delta >= 0.0, "both-replaced: deltas must be nonnegative");
            const std::string tag = "@" + delta_tag(delta);
            double worst = 0.0;
            for (std::size_t draw = 0; draw < draws; ++draw) {
                const Perturbation kind = draw_pattern(draw);
                const ClampedTable ca = clamp_table(perturb(ta, delta, kind, rng));
                const ClampedTable cb = clamp_table(perturb(tb, delta, kind, rng));
                worst = std::max(worst, std::abs(simulate_both_replaced(ca, cb) - truth));
            }
            const double rr = static_cast<double>(r);
            rec.le(i, "max_error" + tag, worst, both_replaced_envelope(r, delta) + kRoundoff);
            rec.info(i, "claimed_order" + tag, std::ldexp(1.0, static_cast<int>(2 * r)) * rr * rr * delta * delta);
        }
    }
    return rec.finish();
}

inline ResultTable run_pm_sim(const ExperimentConfig& cfg, const Params& p) {
    Recorder rec(cfg.id, cfg.seed);
    const Rng root(cfg.seed);
    const std::size_t max_dim = p.size("max_dim");
    const std::size_t max_out = p.size("max_outcomes");
    require(max_dim >= 2 && max_out >= 2, "pm-sim: max_dim and max_outcomes must be at least 2");
    for (std::size_t i = 0; i < p.size("povms"); ++i) {
        Rng rng = root.split(i);
        const auto d = static_cast<Eigen::Index>(2 + rng.below(max_dim - 1));
        const std::size_t k = 2 + rng.below(max_out - 1);
        const Povm povm(random::povm_effects(d, k, rng));
        const PmSimulation dil = naimark_dilate(povm);
        dil.validate();
        const Matrix e = random::effect(d, rng);
        const PmSimulation layered = pm_simulate_two_outcome(e);
        layered.validate();
        const Povm pair({e, Matrix::Identity(d, d) - e});
        double worst_dil = 0.0;
        double worst_layer = 0.0;
        for (std::size_t s = 0; s < p.size("states"); ++s) {
            const DensityMatrix rho = random::density(d, rng);
            worst_dil = std::max(worst_dil, max_abs_diff(dil.probabilities(rho), povm.probabilities(rho)));
            worst_layer = std::max(worst_layer, max_abs_diff(layered.probabilities(rho), pair.probabilities(rho)));
        }
        rec.le(i, "naimark_dev", worst_dil, 1e-10);
        rec.le(i, "layered_dev", worst_layer, 1e-10);
        rec.info(i, "ancilla_dim", static_cast<double>(dil.ancilla_dim()));
        rec.info(i, "layered_branches", static_cast<double>(layered.branches.size()));
    }
    return rec.finish();
}

inline ResultTable run_locc1_hybrid(const ExperimentConfig& cfg, const Params& p) {
    Recorder rec(cfg.id, cfg.seed);
    const Rng root(cfg.seed);
    const std::size_t n = p.size("n");
    require(n >= 1 && n <= 4, "locc1-hybrid: n must be in [1, 4]");
    const std::size_t inputs = std::size_t{1} << n;
    const std::size_t count = p.size("protocols");
    for (std::size_t i = 0; i < count; ++i) {
        Rng rng = root.split(i);
        const Eigen::Index da = random_qubit_dim(p.size("max_qubits"), rng);
        const Eigen::Index db = random_qubit_dim(p.size("max_qubits"), rng);
        const std::size_t ka = 2 + rng.below(3);
        const std::size_t kb = 2 + rng.below(2);
        const OneWayLoccProtocol proto = random_one_way_protocol(da, db, ka, kb, rng);
        const Dilation how = (ka == 2 && i % 2 == 1) ? Dilation::Layered : Dilation::Naimark;
        const HybridProtocol hyb = locc1_to_hybrid(proto, how);
        std::vector<DensityMatrix> rho;
        std::vector<DensityMatrix> sigma;
        for (std::size_t x = 0; x < inputs; ++x) {
            rho.push_back(random::density(da, rng));
            sigma.push_back(random::density(db, rng));
        }
        double worst = 0.0;
        for (std::size_t x = 0; x < inputs; ++x) {
            for (std::size_t y = 0; y < inputs; ++y) {
                worst = std::max(worst, max_output_deviation(proto.distribution(rho[x], sigma[y]),
                                                             hyb.distribution(rho[x], sigma[y])));
            }
        }
        rec.le(i, "max_outcome_dev", worst, 1e-9);
        rec.info(i, "layered", how == Dilation::Layered ? 1.0 : 0.0);
        rec.info(i, "outcome_bits", static_cast<double>(hyb.outcome_bits()));
        rec.info(i, "branch_bits", static_cast<double>(hyb.branch_bits()));
        rec.eq(i, "classical_bits", static_cast<double>(hyb.classical_bits()),
               static_cast<double>(hyb.outcome_bits() + hyb.branch_bits()));
    }
    // Incoherent one-way setting: a fixed receiver POVM, output a function of (m, y).
    {
        Rng rng = root.split(count);
        const Eigen::Index d = random_qubit_dim(p.size("max_qubits"), rng);
        const std::size_t k = 2 + rng.below(3);
        const OneWayLoccProtocol proto = incoherent_one_way(
            Povm(random::povm_effects(d, k, rng)), inputs,
            [](std::size_t m, std::size_t y) { return static_cast<std::int64_t>((m + y) % 2); });
        const HybridProtocol hyb = locc1_to_hybrid(proto);
        double worst = 0.0;
        for (std::size_t x = 0; x < inputs; ++x) {
            const DensityMatrix rho = random::density(d, rng);
            for (std::size_t y = 0; y < inputs; ++y) {
                const DensityMatrix sy = DensityMatrix::from_ket(
                    Ket::basis(static_cast<Eigen::Index>(inputs), static_cast<Eigen::Index>(y)));
                worst = std::max(worst, max_output_deviation(proto.distribution(rho, sy), hyb.distribution(rho, sy)));
            }
        }
        rec.le(count, "incoherent_max_outcome_dev", worst, 1e-9);
        rec.info(count, "incoherent_classical_bits", static_cast<double>(hyb.classical_bits()));
    }
    return rec.finish();
}

inline ResultTable run_newman(const ExperimentConfig& cfg, const Params& p) {
    Recorder rec(cfg.id, cfg.seed);
    const Rng root(cfg.seed);
    const HashingEqProtocol proto(p.size("n"), p.size("hashes"));
    const double delta = p.real("delta");
    const double eps = proto.epsilon();
    const std::size_t seeds = p.size("seeds");
    require(seeds >= 1, "newman: need at least one seed");
    std::size_t first_ok = 0;
    for (std::size_t i = 0; i < seeds; ++i) {
        Rng rng = root.split(i);
        const auto d = newman_derandomize(proto, eps, delta, rng, p.size("retries"));
        first_ok += d.attempts == 1 ? 1 : 0;
        rec.info(i, "t", static_cast<double>(d.t()));
        rec.info(i, "attempts", static_cast<double>(d.attempts));
        rec.le(i, "max_error", d.max_error, eps + delta);
        rec.info(i, "randomness_bits", static_cast<double>(d.randomness_bits()));
        rec.info(i, "alice_classical_bits", static_cast<double>(proto.alice_bits() + d.randomness_bits()));
        // The referee's computational-basis readout agrees with the classical shortcut.
        double worst = 0.0;
        for (std::size_t s = 0; s < 16; ++s) {
            const std::size_t x = rng.below(proto.x_count());
            const std::size_t y = rng.below(proto.y_count());
            const auto& c = d.coins[rng.below(d.t())];
            worst = std::max(worst, std::abs(proto.accept_prob_quantum(x, y, c) - proto.accept_prob(x, y, c)));
        }
        rec.le(i, "readout_dev", worst, 1e-12);
    }
    rec.info(seeds, "expected_t", static_cast<double>(newman_sample_count(proto.x_count(), proto.y_count(), delta)));
    rec.ge(seeds, "first_sample_rate", static_cast<double>(first_ok) / static_cast<double>(seeds), 0.9);
    return rec.finish();
}

/// Effects for the replacement experiment: even b random, odd b concentrated near the
/// top eigenvector of ρ so that some b start out bad.
inline std::vector<Matrix> replace_effects(const DensityMatrix& rho, std::size_t count, Rng& rng) {
    const Eigen::Index d = rho.dim();
    const Matrix top = projector(hermitian_eig(rho.matrix()).vectors.front());
    const Matrix id = Matrix::Identity(d, d);
    std::vector<Matrix> eff;
    for (std::size_t b = 0; b < count; ++b) {
        if (b % 2 == 0) {
            eff.push_back(random::effect(d, rng));
        } else {
            eff.push_back(rng.uniform(0.7, 1.0) * top + rng.uniform(0.0, 0.2) * (id - top));
        }
    }
    return eff;
}

inline ResultTable run_replace(const ExperimentConfig& cfg, const Params& p) {
    Recorder rec(cfg.id, cfg.seed);
    const Rng root(cfg.seed);
    const std::size_t q = p.size("q");
    const std::size_t r = p.size("r");
    const std::size_t c = p.size("c");
    const double delta = p.real("delta");
    require(q >= 1 && r >= 1 && q * r <= 10 && c <= 8, "replace: need q, r >= 1, rq <= 10, c <= 8");
    const std::size_t instances = p.size("instances");
    require(instances >= 1, "replace: need at least one instance");
    std::size_t within = 0;
    for (std::size_t i = 0; i < instances; ++i) {
        Rng rng = root.split(i);
        const DensityMatrix rho = random::density(Eigen::Index{1} << q, rng);
        const std::vector<Matrix> eff = replace_effects(rho, std::size_t{1} << c, rng);
        try {
            const RoundTripReport rep = replace_round_trip(rho, eff, delta, r);
            const ReplaceMessage& msg = rep.message;
            double worst = 0.0;
            for (std::size_t b = 0; b < eff.size(); ++b) {
                worst = std::max(worst, std::abs(rep.estimates[b] - rho.expectation(eff[b])));
            }
            within += worst <= delta ? 1 : 0;
            rec.info(i, "degenerate", 0.0);
            rec.le(i, "sequence_dev", rep.max_state_deviation, 1e-10);
            rec.info(i, "t", static_cast<double>(msg.t()));
            rec.le(i, "t_vs_bound", static_cast<double>(msg.t()), std::floor(msg.params.t_bound()));
            rec.info(i, "max_estimate_error", worst);
            rec.info(i, "payload_bits", static_cast<double>(msg.payload_bits()));
            const ReplaceMessage back = deserialize_replace_message(serialize(msg));
            rec.eq(i, "serialization_round_trip", back.pairs == msg.pairs ? 1.0 : 0.0, 1.0);
            if (msg.t() > 0) {
                rec.le(i, "standalone_replay_dev", max_abs_diff(reconstruct_estimates(back, eff), rep.estimates),
                       1e-12);
            }
        } catch (const DegenerateError&) {
            rec.info(i, "degenerate", 1.0);
        }
    }
    const ReplaceParams params = make_replace_params(q, r, std::size_t{1} << c, delta);
    rec.info(instances, "t_bound", params.t_bound());
    rec.info(instances, "implied_constant", params.implied_constant());
    rec.ge(instances, "fraction_within_delta", static_cast<double>(within) / static_cast<double>(instances),
           p.real("min_fraction"));
    return rec.finish();
}

inline ResultTable run_union_bound(const ExperimentConfig& cfg, const Params& p) {
    Recorder rec(cfg.id, cfg.seed);
    const Rng root(cfg.seed);
    const std::size_t max_k = p.size("max_k");
    const std::size_t max_dim = p.size("max_dim");
    const double max_delta = p.real("max_delta");
    require(max_k >= 1 && max_dim >= 2 && max_delta > 0.0, "union-bound: invalid parameters");
    std::size_t rejected = 0;
    for (std::size_t i = 0; i < p.size("chains"); ++i) {
        Rng rng = root.split(i);
        const std::size_t k = 1 + i % max_k;
        const auto d = static_cast<Eigen::Index>(2 + rng.below(max_dim - 1));
        const double delta = rng.uniform(0.0, max_delta);
        const DensityMatrix rho = random::density(d, rng);
        const auto chain = random_union_chain(rho, k, delta, rng);
        try {
            const UnionBoundResult res = union_bound_check(chain, rho, delta);
            rec.info(i, "delta", delta);
            rec.ge(i, "all_success", res.all_success, res.bound - kRoundoff);
        } catch (const HypothesisRejected&) {
            ++rejected;
        }
    }
    rec.info(p.size("chains"), "rejected_instances", static_cast<double>(rejected));
    return rec.finish();
}

}  // namespace detail

/// Runs one experiment; unknown ids or parameters raise ContractViolation.
inline ResultTable run_experiment(const ExperimentConfig& cfg) {
    const Params params(cfg);
    using Runner = ResultTable (*)(const ExperimentConfig&, const Params&);
    static const std::map<std::string, Runner> runners = {
        {"fingerprint-eq", detail::run_fingerprint_eq}, {"swap-check", detail::run_swap_check},
        {"ambainis-eq", detail::run_ambainis_eq},       {"hm", detail::run_hm},
        {"drhm", detail::run_drhm},                     {"ratio", detail::run_ratio},
        {"clamp-sim", detail::run_clamp_sim},           {"both-replaced", detail::run_both_replaced},
        {"pm-sim", detail::run_pm_sim},                 {"locc1-hybrid", detail::run_locc1_hybrid},
        {"newman", detail::run_newman},                 {"replace", detail::run_replace},
        {"union-bound", detail::run_union_bound},
    };
    return runners.at(cfg.id)(cfg, params);
}

// ---------------------------------------------------------------------------
// Output.

inline std::string format_number(double v) {
    if (std::isnan(v)) {
        return "";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::string to_csv(const ResultTable& t) {
    std::string out = "experiment,instance,seed,metric,value,relation,bound,pass\n";
    for (const auto& r : t.rows) {
        out += r.experiment + "," + std::to_string(r.instance) + "," + std::to_string(r.seed) + "," + r.metric + "," +
               format_number(r.value) + "," + r.relation + "," + format_number(r.bound) + "," +
               (r.pass ? "1" : "0") + "\n";
    }
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw ResourceError("cannot write " + path);
    }
    f << text;
}

struct ExperimentSummary {
    std::string experiment;
    std::size_t rows = 0;
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::vector<ResultRow> violations;

    [[nodiscard]] bool pass() const { return failures == 0; }
};

inline ExperimentSummary summarize(const ResultTable& t) {
    ExperimentSummary s{t.experiment, t.rows.size(), 0, 0, {}};
    for (const auto& r : t.rows) {
        s.checks += r.checked() ? 1 : 0;
        if (!r.pass) {
            ++s.failures;
            s.violations.push_back(r);
        }
    }
    return s;
}

inline std::string summary_text(const std::vector<ResultTable>& tables) {
    std::string out;
    for (const auto& t : tables) {
        const ExperimentSummary s = summarize(t);
        out += (s.pass() ? "PASS " : "FAIL ") + s.experiment + " rows=" + std::to_string(s.rows) +
               " checks=" + std::to_string(s.checks) + " failures=" + std::to_string(s.failures) + "\n";
        for (const auto& v : s.violations) {
            out += "  violation experiment=" + v.experiment + " instance=" + std::to_string(v.instance) +
                   " metric=" + v.metric + " value=" + format_number(v.value) + " " + v.relation + " bound=" +
                   format_number(v.bound) + "\n";
        }
    }
    return out;
}

/// Plot data: one line per row with x = instance, y = value, series = experiment:metric.
inline std::string plot_csv(const std::vector<ResultTable>& tables) {
    std::string out = "x,y,series\n";
    for (const auto& t : tables) {
        for (const auto& r : t.rows) {
            out += std::to_string(r.instance) + "," + format_number(r.value) + "," + r.experiment + ":" + r.metric +
                   "\n";
        }
    }
    return out;
}

/// Writes <prefix>.summary.txt and <prefix>.plot.csv; returns true iff every row passed.
inline bool emit_summary(const std::vector<ResultTable>& tables, const std::string& prefix) {
    write_text(prefix + ".summary.txt", summary_text(tables));
    write_text(prefix + ".plot.csv", plot_csv(tables));
    return std::all_of(tables.begin(), tables.end(), [](const ResultTable& t) { return t.all_pass(); });
}

}  // namespace smplocc
