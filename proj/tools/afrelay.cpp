// SPDX-License-Identifier: Apache-2.0
//
// afrelay: amplify-and-forward space-time coded relay network workbench
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


// afrelay: run simulation and analysis sweeps, write CSV curves and summary.json.
//
// Exit status: 0 success, 1 runtime failure, 2 invalid configuration, 3 unsupported request.

#include <afrelay/experiment.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace
{

std::vector<std::string> split_list(const std::vector<std::string> &items)
{
    std::vector<std::string> out;
    for (const auto &item : items)
    {
        std::stringstream ss(item);
        for (std::string s; std::getline(ss, s, ',');)
            if (!s.empty())
                out.push_back(s);
    }
    return out;
}

} // namespace

int main(int argc, char **argv)
{
    using namespace afrelay;

    CLI::App app{"Amplify-and-forward relay network SER/BER sweeps"};
    app.set_version_flag("--version", std::string(version));
    std::string config_path, preset_name, snr, out;
    std::vector<std::string> schemes, outputs;
    std::vector<double> targets;
    long trials = 0, min_errors = 0;
    std::uint64_t seed = 0;
    int workers = 0;
    bool quiet = false;
    app.add_option("--config", config_path, "JSON experiment file")->check(CLI::ExistingFile);
    app.add_option("--preset", preset_name, "fig2, fig3 or fig4");
    app.add_option("--scheme", schemes, "dstc, opp-relay, full-opp, opp-source (comma list allowed)");
    app.add_option("--outputs", outputs, "simulated, exact, asymptotic, upper_bound, mgf (comma list allowed)");
    app.add_option("--snr-db", snr, "SNR grid start:step:stop in dB");
    app.add_option("--trials", trials, "maximum T-blocks per SNR point");
    app.add_option("--min-errors", min_errors, "symbol errors per SNR point before stopping");
    app.add_option("--seed", seed, "RNG seed");
    app.add_option("--workers", workers, "simulation threads");
    app.add_option("--target-ber", targets, "BER levels for gain comparisons");
    app.add_option("--out", out, "output directory");
    app.add_flag("-q,--quiet", quiet, "no progress output");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp &e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForVersion &e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError &e)
    {
        app.exit(e);
        return 2;
    }

    try
    {
        ExperimentSpec spec;
        if (!preset_name.empty())
            spec = preset(preset_name);
        if (!config_path.empty())
        {
            std::ifstream is(config_path);
            nlohmann::json j;
            try
            {
                is >> j;
            }
            catch (const nlohmann::json::parse_error &e)
            {
                throw ConfigError("config", std::string("invalid JSON: ") + e.what());
            }
            from_json(j, spec);
        }
        if (!schemes.empty())
        {
            spec.schemes.clear();
            for (const auto &s : split_list(schemes))
                spec.schemes.push_back(scheme_from_string(s));
        }
        if (!outputs.empty())
        {
            spec.outputs.clear();
            for (const auto &o : split_list(outputs))
                spec.outputs.push_back(provenance_from_string(o));
        }
        if (!snr.empty())
            spec.snr_db_grid = parse_snr_range(snr);
        if (app.count("--trials"))
            spec.max_trials = trials;
        if (app.count("--min-errors"))
            spec.min_errors = min_errors;
        if (app.count("--seed"))
            spec.seed = seed;
        if (app.count("--workers"))
            spec.workers = workers;
        if (!targets.empty())
            spec.target_ber = targets;
        if (!out.empty())
            spec.out_path = out;
        if (spec.snr_db_grid.empty())
            throw ConfigError("snr_db", "no SNR grid given (use --snr-db, a config file or a preset)");

        const auto summary = run_experiment(spec, quiet ? nullptr : &std::clog);
        for (const auto &g : summary["gains"])
            if (!g["gain_db"].is_null() && !quiet)
                std::cout << "gain at BER " << g["target_ber"].get<double>() << ": " << g["candidate"].get<std::string>()
                          << " over " << g["reference"].get<std::string>() << " = " << g["gain_db"].get<double>()
                          << " dB\n";
        return 0;
    }
    catch (const ConfigError &e)
    {
        std::cerr << "afrelay: invalid configuration, field '" << e.field() << "': " << e.what() << '\n';
        return 2;
    }
    catch (const CapabilityError &e)
    {
        std::cerr << "afrelay: unsupported: " << e.what() << '\n';
        return 3;
    }
    catch (const std::exception &e)
    {
        std::cerr << "afrelay: " << e.what() << '\n';
        return 1;
    }
}
