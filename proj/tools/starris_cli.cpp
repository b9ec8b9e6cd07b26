// SPDX-License-Identifier: Apache-2.0
//
// starris: Green's-function channel model for metasurface RIS and STAR-RIS
// Copyright (C) 2026 The starris authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// starris command-line front end
//   starris run <scenario> [--out DIR] [--seed N] [--quadrature-density N] [--beta-magnitude V]
//   starris validate <scenario>
//   starris list-experiments
// Exit codes: 0 success, 2 validation failure, 3 runtime error.

#include <starris/scenario.hpp>

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <fstream>
#include <iostream>
#include <sstream>

namespace
{
    constexpr int exit_ok = 0;
    constexpr int exit_validation = 2;
    constexpr int exit_runtime = 3;

    std::string read_file(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    std::string sha256_hex(const std::string &data)
    {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
            throw starris::scenario::RuntimeFailure("SHA-256 digest failed");
        static const char *hex = "0123456789abcdef";
        std::string s;
        for (unsigned int i = 0; i < len; ++i)
            s += hex[md[i] >> 4], s += hex[md[i] & 15];
        return s;
    }

    void print_issues(const starris::scenario::ValidationFailure &e, const std::string &path)
    {
        for (const auto &i : e.issues())
            std::cerr << path << ": " << i.text() << '\n';
    }
} // namespace

int main(int argc, char **argv)
{
    namespace sc = starris::scenario;

    CLI::App app{"starris: Green's-function channel experiments for metasurface RIS and STAR-RIS"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sc::version));

    std::string run_path, out_dir = "out";
    std::uint64_t seed_v = 0;
    double density_v = 0.0, beta_v = 0.0;
    CLI::App *run = app.add_subcommand("run", "run the experiment described by a scenario file");
    run->add_option("scenario", run_path, "scenario file")->required();
    run->add_option("--out", out_dir, "output directory")->capture_default_str();
    CLI::Option *seed_opt = run->add_option("--seed", seed_v, "random seed override");
    CLI::Option *density_opt = run->add_option("--quadrature-density", density_v, "quadrature samples per wavelength override");
    CLI::Option *beta_opt = run->add_option("--beta-magnitude", beta_v, "Green's-function prefactor magnitude |beta| override [ohm/m]");

    std::string validate_path;
    CLI::App *val = app.add_subcommand("validate", "check a scenario file without running it");
    val->add_option("scenario", validate_path, "scenario file")->required();

    CLI::App *list = app.add_subcommand("list-experiments", "print the supported experiment kinds");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? exit_ok : exit_validation;
    }

    if (list->parsed())
    {
        for (const auto &x : sc::experiments)
            std::cout << x.name << "\t" << x.summary << '\n';
        return exit_ok;
    }

    if (val->parsed())
    {
        try
        {
            const sc::ScenarioConfig cfg = sc::parse_scenario(validate_path);
            std::cout << validate_path << ": ok (" << cfg.name << ")\n";
            return exit_ok;
        }
        catch (const sc::ValidationFailure &e)
        {
            print_issues(e, validate_path);
            return exit_validation;
        }
    }

    std::optional<std::uint64_t> seed;
    std::optional<double> density, beta;
    if (seed_opt->count())
        seed = seed_v;
    if (density_opt->count())
        density = density_v;
    if (beta_opt->count())
        beta = beta_v;

    sc::ScenarioConfig cfg;
    try
    {
        cfg = sc::parse_scenario(run_path);
        sc::apply(cfg, {seed, density, beta});
    }
    catch (const sc::ValidationFailure &e)
    {
        print_issues(e, run_path);
        return exit_validation;
    }

    try
    {
        sc::RunResult res = sc::run_experiment(cfg);

        nlohmann::ordered_json manifest;
        manifest["tool"] = "starris";
        manifest["version"] = std::string(sc::version);
        manifest["experiment"] = cfg.name;
        manifest["scenario"] = std::filesystem::path(run_path).filename().string();
        manifest["config_sha256"] = sha256_hex(read_file(run_path));
        manifest["seed"] = cfg.seed;
        manifest["overrides"] = nlohmann::ordered_json::object();
        if (seed)
            manifest["overrides"]["seed"] = *seed;
        if (density)
            manifest["overrides"]["quadrature_density"] = *density;
        if (beta)
            manifest["overrides"]["beta_magnitude"] = *beta;
        manifest["outputs"] = nlohmann::ordered_json::array();
        for (const auto &f : res.files)
            manifest["outputs"].push_back(f.name);
        res.files.push_back({"run_manifest.json", manifest.dump(2) + "\n"});

        sc::write_outputs(out_dir, res.files);
        for (const auto &n : res.notes)
            std::cout << n << '\n';
        std::cout << "wrote " << res.files.size() << " files to " << out_dir << '\n';
        return exit_ok;
    }
    catch (const std::exception &e)
    {
        std::cerr << run_path << ": runtime error: " << e.what() << '\n';
        return exit_runtime;
    }
}
