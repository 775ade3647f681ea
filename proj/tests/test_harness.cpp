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

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "smplocc/harness/experiments.hpp"

namespace smplocc {
namespace {

ExperimentConfig config(const std::string& id, std::map<std::string, std::string> params, std::uint64_t seed = 1) {
    return ExperimentConfig{id, std::move(params), seed, ""};
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string item;
    while (std::getline(ss, item, sep)) {
        out.push_back(item);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

TEST(Harness, KnownIds) {
    const auto ids = experiment_ids();
    const std::set<std::string> have(ids.begin(), ids.end());
    for (const char* id : {"fingerprint-eq", "ambainis-eq", "hm", "drhm", "ratio", "clamp-sim", "replace",
                           "both-replaced", "locc1-hybrid", "newman", "union-bound", "swap-check", "pm-sim"}) {
        EXPECT_TRUE(have.count(id)) << id;
    }
    EXPECT_EQ(have.size(), 13u);
}

TEST(Harness, FingerprintTableCarriesExactValue) {
    const ResultTable t = run_experiment(config("fingerprint-eq", {{"pairs", "5"}, {"exhaustive_n", "0"}}));
    const auto rows = t.find("accept_k");
    ASSERT_EQ(rows.size(), 5u);
    for (const auto* r : rows) {
        EXPECT_NEAR(r->value, std::pow(5.0 / 8.0, 5.0), 1e-9);
    }
    EXPECT_TRUE(t.all_pass());
}

TEST(Harness, SameConfigSameBytes) {
    const auto cfg = config("clamp-sim", {{"protocols", "4"}, {"draws", "20"}}, 7);
    const std::string a = to_csv(run_experiment(cfg));
    const std::string b = to_csv(run_experiment(cfg));
    EXPECT_EQ(a, b);
    const std::string c = to_csv(run_experiment(config("clamp-sim", {{"protocols", "4"}, {"draws", "20"}}, 8)));
    EXPECT_NE(a, c);
}

TEST(Harness, ZeroDeltaGivesZeroError) {
    const ResultTable t = run_experiment(config("clamp-sim", {{"protocols", "6"}, {"draws", "10"}, {"deltas", "0"}}));
    for (const auto& r : t.rows) {
        if (r.metric.rfind("max_sim_error", 0) == 0) {
            EXPECT_LE(r.value, 1e-9) << r.metric;
        }
    }
    EXPECT_TRUE(t.all_pass());
}

TEST(Harness, CsvShape) {
    const ResultTable t = run_experiment(config("union-bound", {{"chains", "10"}}));
    std::stringstream ss(to_csv(t));
    std::string line;
    std::getline(ss, line);
    EXPECT_EQ(line, "experiment,instance,seed,metric,value,relation,bound,pass");
    std::size_t count = 0;
    std::size_t last_instance = 0;
    while (std::getline(ss, line)) {
        const auto cols = split(line, ',');
        ASSERT_EQ(cols.size(), 8u) << line;
        EXPECT_EQ(cols[0], "union-bound");
        const std::size_t inst = std::stoul(cols[1]);
        EXPECT_GE(inst, last_instance);
        last_instance = inst;
        const std::set<std::string> rel = {"<=", ">=", "==", "info"};
        EXPECT_TRUE(rel.count(cols[5]));
        EXPECT_EQ(cols[6].empty(), cols[5] == "info");
        EXPECT_TRUE(cols[7] == "0" || cols[7] == "1");
        ++count;
    }
    EXPECT_EQ(count, t.rows.size());
}

TEST(Harness, NumberFormatting) {
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
    EXPECT_EQ(format_number(std::nan("")), "");
}

TEST(Harness, UsageErrors) {
    EXPECT_THROW(run_experiment(config("no-such-experiment", {})), ContractViolation);
    EXPECT_THROW(run_experiment(config("hm", {{"bogus", "1"}})), ContractViolation);
    EXPECT_THROW(run_experiment(config("hm", {{"n", "eight"}})), ContractViolation);
    EXPECT_THROW(run_experiment(config("hm", {{"n", "6"}})), ContractViolation);
    EXPECT_THROW(run_experiment(config("clamp-sim", {{"deltas", "0.1,x"}})), ContractViolation);
}

TEST(Harness, ConfigText) {
    ExperimentConfig cfg{"replace", {}, 1, ""};
    apply_config_text(cfg, "# comment\n seed = 42\nout=/tmp/x.csv\n\ninstances = 3 # trailing\n");
    EXPECT_EQ(cfg.seed, 42u);
    EXPECT_EQ(cfg.out, "/tmp/x.csv");
    EXPECT_EQ(cfg.params.at("instances"), "3");
    EXPECT_THROW(apply_config_text(cfg, "instances 3\n"), ContractViolation);
    EXPECT_THROW(apply_config_text(cfg, "= 3\n"), ContractViolation);
    EXPECT_THROW(apply_config_text(cfg, "seed = abc\n"), ContractViolation);
}

TEST(Harness, SummaryNamesViolations) {
    ResultTable t{"demo", 3, {}};
    t.rows.push_back(ResultRow{"demo", 0, 3, "err", 0.5, "<=", 0.25, false});
    t.rows.push_back(ResultRow{"demo", 1, 3, "err", 0.1, "<=", 0.25, true});
    t.rows.push_back(ResultRow{"demo", 1, 3, "note", 7.0, "info", std::nan(""), true});
    const ExperimentSummary s = summarize(t);
    EXPECT_EQ(s.rows, 3u);
    EXPECT_EQ(s.checks, 2u);
    EXPECT_EQ(s.failures, 1u);
    const std::string text = summary_text({t});
    EXPECT_NE(text.find("FAIL demo"), std::string::npos);
    EXPECT_NE(text.find("instance=0"), std::string::npos);
    EXPECT_NE(text.find("value=0.5"), std::string::npos);
    EXPECT_NE(text.find("bound=0.25"), std::string::npos);

    const auto dir = std::filesystem::temp_directory_path() / "smplocc_harness_test";
    std::filesystem::create_directories(dir);
    const std::string prefix = (dir / "demo").string();
    EXPECT_FALSE(emit_summary({t}, prefix));
    EXPECT_EQ(read_file(prefix + ".summary.txt"), text);
    const std::string plot = read_file(prefix + ".plot.csv");
    EXPECT_EQ(plot.rfind("x,y,series\n", 0), 0u);
    EXPECT_EQ(std::count(plot.begin(), plot.end(), '\n'), 4);
    t.rows.erase(t.rows.begin());
    EXPECT_TRUE(emit_summary({t}, prefix));
}

TEST(Harness, SummaryAggregatesMatchRows) {
    const ResultTable t = run_experiment(config("pm-sim", {{"povms", "5"}, {"states", "3"}}));
    const ExperimentSummary s = summarize(t);
    std::size_t checks = 0;
    std::size_t failures = 0;
    for (const auto& r : t.rows) {
        checks += r.relation != "info" ? 1 : 0;
        const bool ok = r.relation == "<=" ? r.value <= r.bound
                        : r.relation == ">=" ? r.value >= r.bound
                        : r.relation == "==" ? r.value == r.bound
                                             : true;
        EXPECT_EQ(ok, r.pass);
        failures += ok ? 0 : 1;
    }
    EXPECT_EQ(s.checks, checks);
    EXPECT_EQ(s.failures, failures);
}

TEST(Harness, SmallRunsOfEveryExperimentPass) {
    const std::map<std::string, std::map<std::string, std::string>> small = {
        {"fingerprint-eq", {{"pairs", "3"}, {"n", "4"}}},
        {"swap-check", {{"pairs", "5"}}},
        {"ambainis-eq", {{"n", "4"}, {"samples", "10"}}},
        {"hm", {{"n", "4"}}},
        {"drhm", {{"n", "2"}, {"hm_n", "0"}}},
        {"ratio", {{"chains", "5"}}},
        {"clamp-sim", {{"protocols", "3"}, {"draws", "5"}}},
        {"both-replaced", {{"protocols", "3"}, {"draws", "5"}}},
        {"pm-sim", {{"povms", "3"}, {"states", "2"}}},
        {"locc1-hybrid", {{"protocols", "3"}, {"n", "1"}}},
        {"newman", {{"n", "3"}, {"seeds", "2"}, {"delta", "0.3"}}},
        {"replace", {{"q", "1"}, {"r", "3"}, {"instances", "3"}, {"delta", "0.3"}, {"c", "2"}, {"min_fraction", "0"}}},
        {"union-bound", {{"chains", "5"}}},
    };
    for (const auto& [id, params] : small) {
        const ResultTable t = run_experiment(config(id, params));
        EXPECT_FALSE(t.rows.empty()) << id;
        EXPECT_TRUE(t.all_pass()) << id << "\n" << summary_text({t});
    }
}

}  // namespace
}  // namespace smplocc
