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

// sim <experiment-id> [--param value]... --seed S --out PATH [--config FILE]
//
// Writes PATH (result CSV), PATH.summary.txt and PATH.plot.csv. Exit status is 0 when
// every check passes, 1 when some check fails and 2 on usage errors.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smplocc/harness/experiments.hpp"

namespace {

constexpr int kUsageError = 2;

// Extras arrive as "--key value" or "--key=value".
void apply_overrides(smplocc::ExperimentConfig& cfg, const std::vector<std::string>& extras) {
    for (std::size_t i = 0; i < extras.size(); ++i) {
        const std::string& tok = extras[i];
        if (tok.rfind("--", 0) != 0 || tok.size() <= 2) {
            throw smplocc::ContractViolation("unexpected argument: " + tok);
        }
        std::string key = tok.substr(2);
        std::string value;
        const auto eq = key.find('=');
        if (eq != std::string::npos) {
            value = key.substr(eq + 1);
            key.resize(eq);
        } else {
            if (i + 1 >= extras.size()) {
                throw smplocc::ContractViolation("missing value for --" + key);
            }
            value = extras[++i];
        }
        cfg.params[key] = value;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Seeded SMP/LOCC experiments"};
    app.allow_extras();

    std::string id;
    std::string config_path;
    std::string out;
    std::uint64_t seed = 0;
    bool list = false;
    app.add_option("experiment", id, "Experiment id");
    auto* seed_opt = app.add_option("--seed", seed, "Root seed");
    app.add_option("--out", out, "Result CSV path");
    app.add_option("--config", config_path, "key = value file; command-line values win");
    app.add_flag("--list", list, "Print the experiment ids and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kUsageError;
    }

    if (list) {
        for (const auto& e : smplocc::experiment_ids()) {
            std::printf("%s\n", e.c_str());
        }
        return 0;
    }

    smplocc::ExperimentConfig cfg;
    cfg.id = id;
    try {
        if (!config_path.empty()) {
            smplocc::apply_config_file(cfg, config_path);
        }
        apply_overrides(cfg, app.remaining());
        if (seed_opt->count() > 0) {
            cfg.seed = seed;
        }
        if (!out.empty()) {
            cfg.out = out;
        }
        if (cfg.id.empty()) {
            throw smplocc::ContractViolation("missing experiment id (see --list)");
        }
        if (cfg.out.empty()) {
            throw smplocc::ContractViolation("missing --out");
        }
        if (seed_opt->count() == 0 && config_path.empty()) {
            throw smplocc::ContractViolation("missing --seed");
        }
    } catch (const smplocc::ContractViolation& e) {
        std::fprintf(stderr, "sim: %s\n", e.what());
        return kUsageError;
    }

    try {
        const smplocc::ResultTable table = smplocc::run_experiment(cfg);
        smplocc::write_text(cfg.out, smplocc::to_csv(table));
        const bool ok = smplocc::emit_summary({table}, cfg.out);
        std::fputs(smplocc::summary_text({table}).c_str(), stdout);
        return ok ? 0 : 1;
    } catch (const smplocc::ContractViolation& e) {
        std::fprintf(stderr, "sim: %s\n", e.what());
        return kUsageError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "sim: %s\n", e.what());
        return 1;
    }
}
