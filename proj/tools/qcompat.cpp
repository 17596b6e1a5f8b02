// Copyright 2026 The qcompat Authors
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

// qcompat: batch front end for compatibility analysis of parameterized states.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qcompat/acceptance.hpp"

namespace {

template <class T>
std::optional<T> opt_if(const CLI::Option *o, const T &v) {
    return o->count() ? std::optional<T>(v) : std::nullopt;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Compatibility analysis for multiparameter quantum estimation"};
    app.set_version_flag("--version", std::string(QCOMPAT_VERSION));
    app.require_subcommand(1);

    std::string json_out, csv_out;
    double tol = 0.0;

    // analyze
    auto *analyze = app.add_subcommand("analyze", "Fisher quantities, X rank and #L at points");
    qcompat::AnalyzeOptions ao;
    std::string points_file, at;
    analyze->add_option("model", ao.model, "Model file or bundled:NAME")->required();
    auto *points_opt = analyze->add_option("--points", points_file, "File of points (JSON or CSV rows)");
    auto *at_opt = analyze->add_option("--at", at, "Single point x1,x2,...");
    auto *a_json = analyze->add_option("--json", json_out, "Write the report here ('-' for stdout)");
    auto *a_tol = analyze->add_option("--tol", tol, "Override the base tolerance");

    // scan
    auto *scan = app.add_subcommand("scan", "Sample a parameter box and record rank(X) and strata");
    qcompat::ScanCommandOptions so;
    std::uint64_t seed = 0;
    std::string region;
    scan->add_option("model", so.model, "Model file or bundled:NAME")->required();
    scan->add_option("--n", so.n, "Number of samples")->check(CLI::PositiveNumber);
    auto *s_seed = scan->add_option("--seed", seed, "Seed (else QCOMPAT_SEED, else the model's seed)");
    auto *s_region = scan->add_option("--region", region, "Box lo:hi,lo:hi,...");
    auto *s_json = scan->add_option("--json", json_out, "Write the report here ('-' for stdout)");
    auto *s_csv = scan->add_option("--csv", csv_out, "Write per-sample rows here ('-' for stdout)");
    auto *s_tol = scan->add_option("--tol", tol, "Override the base tolerance");
    scan->add_flag("--include-center", so.include_center, "Also evaluate the box midpoint");

    // bound
    auto *bound = app.add_subcommand("bound", "Per-stratum table and the overall #x bound");
    qcompat::BoundCommandOptions bo;
    bound->add_option("model", bo.model, "Model file or bundled:NAME")->required();
    auto *b_json = bound->add_option("--json", json_out, "Write the report here ('-' for stdout)");
    auto *b_tol = bound->add_option("--tol", tol, "Override the base tolerance");

    // verify
    auto *verify = app.add_subcommand("verify", "Run the acceptance suite");
    qcompat::VerifyOptions vo;
    verify->add_option("--seed", vo.seed, "Seed for the randomized checks");
    auto *v_json = verify->add_option("--json", json_out, "Write the summary here ('-' for stdout)");

    // presets
    auto *presets = app.add_subcommand("presets", "List built-in algebras and bundled models");
    auto *p_json = presets->add_option("--json", json_out, "Write the list here ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : qcompat::kExitInput;
    }

    if (analyze->parsed()) {
        ao.points_file = opt_if(points_opt, points_file);
        ao.at = opt_if(at_opt, at);
        ao.json_out = opt_if(a_json, json_out);
        ao.tol = opt_if(a_tol, tol);
        return qcompat::cmd_analyze(ao, std::cout, std::cerr);
    }
    if (scan->parsed()) {
        so.seed = opt_if(s_seed, seed);
        so.region = opt_if(s_region, region);
        so.json_out = opt_if(s_json, json_out);
        so.csv_out = opt_if(s_csv, csv_out);
        so.tol = opt_if(s_tol, tol);
        return qcompat::cmd_scan(so, std::cout, std::cerr);
    }
    if (bound->parsed()) {
        bo.json_out = opt_if(b_json, json_out);
        bo.tol = opt_if(b_tol, tol);
        return qcompat::cmd_bound(bo, std::cout, std::cerr);
    }
    if (verify->parsed()) {
        vo.json_out = opt_if(v_json, json_out);
        return qcompat::cmd_verify(vo, std::cout, std::cerr);
    }
    return qcompat::cmd_presets(std::cout, std::cerr, opt_if(p_json, json_out));
}
