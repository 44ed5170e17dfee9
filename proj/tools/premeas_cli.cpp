// Copyright 2026 The premeas Authors
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


#include "premeas/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

int run_command(const std::string &path, const premeas::RunOptions &opts, const std::string &out_path) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "cannot read " << path << "\n";
        return 2;
    }
    premeas::json doc;
    try {
        doc = premeas::json::parse(in);
    } catch (const premeas::json::parse_error &e) {
        std::cerr << "schema error at /: not valid JSON: " << e.what() << "\n";
        return 2;
    }
    const premeas::RunResult r = premeas::run_scenario(doc, opts);
    (r.exit_code == 2 ? std::cerr : std::cout) << r.text;
    if (!out_path.empty()) {
        std::ofstream out(out_path, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write " << out_path << "\n";
            return 2;
        }
        out << r.report.dump(2) << "\n";
    }
    return r.exit_code;
}

int fixtures_command(const std::string &dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    for (const auto &[name, doc] : premeas::fixture_catalog()) {
        const auto path = std::filesystem::path(dir) / name;
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            std::cerr << "cannot write " << path.string() << "\n";
            return 2;
        }
        out << doc.dump(2) << "\n";
        std::cout << path.string() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Unitary premeasurement toolkit"};
    app.require_subcommand(1);

    std::string scenario;
    std::string out_path;
    premeas::RunOptions opts;
    std::uint64_t seed = 0;
    int trials = 0;
    auto *run = app.add_subcommand("run", "Run a scenario file and report");
    run->add_option("scenario", scenario, "Scenario JSON file")->required();
    run->add_flag("--strict", opts.strict, "Treat indeterminate verdicts as failures");
    auto *seed_opt = run->add_option("--seed", seed, "Seed for the random sampling layer");
    run->add_option("--out", out_path, "Write the structured report to this file");
    run->add_option("--tol", opts.tol_scale, "Scale the operator and vector tolerances")
        ->check(CLI::PositiveNumber);
    auto *trials_opt =
        run->add_option("--trials", trials, "Random inputs per sampled criterion (default 50)")->check(CLI::NonNegativeNumber);
    run->add_flag("--timing", opts.timing, "Include wall time in the structured report");

    std::string outdir;
    auto *fx = app.add_subcommand("fixtures", "Write the canonical fixture scenarios");
    fx->add_option("outdir", outdir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    if (*seed_opt) {
        opts.seed = seed;
    }
    if (*trials_opt) {
        opts.trials = trials;
    }
    if (*run) {
        return run_command(scenario, opts, out_path);
    }
    return fixtures_command(outdir);
}
