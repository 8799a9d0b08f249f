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


#ifndef AFRELAY_EXPERIMENT_HPP
#define AFRELAY_EXPERIMENT_HPP

#include "analysis.hpp"
#include "errors.hpp"
#include "montecarlo.hpp"
#include "network.hpp"
#include "powerctl.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace afrelay
{

inline constexpr const char *version = "0.1.0";

inline Provenance provenance_from_string(const std::string &s)
{
    for (auto p : {Provenance::simulated, Provenance::exact, Provenance::asymptotic, Provenance::upper_bound,
                   Provenance::mgf})
        if (to_string(p) == s)
            return p;
    throw ConfigError("outputs", "unknown output '" + s + "'");
}

// One experiment = every (config, scheme) pair, each producing the requested outputs.
struct ExperimentSpec
{
    std::vector<NetworkConfig> configs{NetworkConfig::uniform(2, 2, 1)};
    std::vector<SchemeId> schemes{SchemeId::DstcUniform};
    ModulationSpec modulation = modulation_constants(ModulationFamily::MPSK, 2);
    std::vector<double> snr_db_grid;
    long min_errors = 200;
    long max_trials = 2000000;
    std::uint64_t seed = 1;
    int workers = 1;
    std::vector<Provenance> outputs{Provenance::simulated};
    std::string out_path = "results";
    std::vector<double> target_ber{1e-4};
    int mgf_samples = 100000;

    SimPlan plan(const NetworkConfig &config, SchemeId scheme) const
    {
        SimPlan p;
        p.config = config;
        p.scheme = scheme;
        p.modulation = modulation;
        p.snr_db_grid = snr_db_grid;
        p.min_errors = min_errors;
        p.max_trials = max_trials;
        p.seed = seed;
        p.workers = workers;
        return p;
    }

    void validate() const
    {
        if (configs.empty())
            throw ConfigError("config", "no network configuration given");
        if (schemes.empty())
            throw ConfigError("scheme", "no scheme given");
        if (outputs.empty())
            throw ConfigError("outputs", "at least one output must be requested");
        if (out_path.empty())
            throw ConfigError("out", "output directory must not be empty");
        for (double t : target_ber)
            if (!(t > 0.0 && t < 1.0))
                throw ConfigError("target_ber", "entries must lie in (0, 1)");
        if (mgf_samples < 1)
            throw ConfigError("mgf_samples", "must be >= 1");
        for (const auto &c : configs)
            plan(c, schemes.front()).validate();
    }
};

// "a:b:c" -> a, a+b, ..., up to c inclusive
inline std::vector<double> parse_snr_range(const std::string &s)
{
    double a = 0, b = 0, c = 0;
    char tail = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf%c", &a, &b, &c, &tail) != 3 || !(b > 0) || c < a)
        throw ConfigError("snr_db", "expected start:step:stop with step > 0 and stop >= start, got '" + s + "'");
    std::vector<double> out;
    const long n = std::lround(std::floor((c - a) / b + 1e-9));
    for (long i = 0; i <= n; ++i)
        out.push_back(a + i * b);
    return out;
}

inline void to_json(nlohmann::json &j, const ExperimentSpec &e)
{
    std::vector<std::string> schemes, outputs;
    for (auto s : e.schemes)
        schemes.push_back(to_string(s));
    for (auto o : e.outputs)
        outputs.push_back(to_string(o));
    j = nlohmann::json{{"configs", e.configs},
                       {"schemes", schemes},
                       {"modulation", {{"family", to_string(e.modulation.family)},
                                       {"M", e.modulation.M},
                                       {"c", e.modulation.c},
                                       {"g", e.modulation.g}}},
                       {"snr_db", e.snr_db_grid},
                       {"min_errors", e.min_errors},
                       {"max_trials", e.max_trials},
                       {"seed", e.seed},
                       {"workers", e.workers},
                       {"outputs", outputs},
                       {"out", e.out_path},
                       {"target_ber", e.target_ber},
                       {"mgf_samples", e.mgf_samples}};
}

// Missing keys keep the values already in `e`. Accepts "config" (object) or "configs" (list),
// "scheme" or "schemes", and "snr_db" as a list or a "start:step:stop" string.
inline void from_json(const nlohmann::json &j, ExperimentSpec &e)
{
    if (!j.is_object())
        throw ConfigError("config", "experiment file must hold a JSON object");
    auto as_string = [](const nlohmann::json &v, const char *key) {
        if (!v.is_string())
            throw ConfigError(key, "must be a string");
        return v.get<std::string>();
    };
    auto string_list = [&](const char *key) {
        std::vector<std::string> out;
        const auto &v = j.at(key);
        if (v.is_array())
            for (const auto &x : v)
                out.push_back(as_string(x, key));
        else
            out.push_back(as_string(v, key));
        return out;
    };
    auto integer = [&](const char *key, auto &out) {
        if (!j.contains(key))
            return;
        if (!j.at(key).is_number_integer())
            throw ConfigError(key, "must be an integer");
        out = j.at(key).get<std::remove_reference_t<decltype(out)>>();
    };

    if (j.contains("config"))
        e.configs = {j.at("config").get<NetworkConfig>()};
    if (j.contains("configs"))
    {
        if (!j.at("configs").is_array())
            throw ConfigError("configs", "must be a list of objects");
        e.configs.clear();
        for (const auto &c : j.at("configs"))
            e.configs.push_back(c.get<NetworkConfig>());
    }
    for (const char *key : {"scheme", "schemes"})
        if (j.contains(key))
        {
            e.schemes.clear();
            for (const auto &s : string_list(key))
                e.schemes.push_back(scheme_from_string(s));
        }
    if (j.contains("modulation"))
    {
        const auto &m = j.at("modulation");
        if (!m.is_object())
            throw ConfigError("modulation", "must be an object with family and M");
        auto family = e.modulation.family;
        int M = e.modulation.M;
        if (m.contains("family"))
            family = modulation_family_from_string(as_string(m.at("family"), "modulation.family"));
        if (m.contains("M"))
        {
            if (!m.at("M").is_number_integer())
                throw ConfigError("M", "must be an integer");
            M = m.at("M").get<int>();
        }
        e.modulation = modulation_constants(family, M);
    }
    if (j.contains("snr_db"))
    {
        const auto &v = j.at("snr_db");
        if (v.is_string())
            e.snr_db_grid = parse_snr_range(v.get<std::string>());
        else if (v.is_array())
        {
            e.snr_db_grid.clear();
            for (const auto &x : v)
            {
                if (!x.is_number())
                    throw ConfigError("snr_db", "entries must be numbers");
                e.snr_db_grid.push_back(x.get<double>());
            }
        }
        else
            throw ConfigError("snr_db", "must be a list or a start:step:stop string");
    }
    integer("min_errors", e.min_errors);
    integer("max_trials", e.max_trials);
    integer("seed", e.seed);
    integer("workers", e.workers);
    integer("mgf_samples", e.mgf_samples);
    if (j.contains("outputs"))
    {
        e.outputs.clear();
        for (const auto &s : string_list("outputs"))
            e.outputs.push_back(provenance_from_string(s));
    }
    if (j.contains("out"))
        e.out_path = as_string(j.at("out"), "out");
    if (j.contains("target_ber"))
    {
        const auto &v = j.at("target_ber");
        e.target_ber.clear();
        for (const auto &x : v.is_array() ? v : nlohmann::json::array({v}))
        {
            if (!x.is_number())
                throw ConfigError("target_ber", "entries must be numbers");
            e.target_ber.push_back(x.get<double>());
        }
    }
}

inline ExperimentSpec preset(const std::string &name)
{
    ExperimentSpec e;
    if (name == "fig2")
    {
        e.configs = {NetworkConfig::uniform(2, 2, 1)};
        e.schemes = all_schemes();
        e.snr_db_grid = parse_snr_range("0:2:32");
    }
    else if (name == "fig3")
    {
        e.configs = {NetworkConfig::uniform(2, 2, 1), NetworkConfig::uniform(2, 2, 2)};
        e.schemes = {SchemeId::OpportunisticRelay, SchemeId::FullOpportunism};
        e.outputs = {Provenance::simulated, Provenance::exact};
        e.snr_db_grid = parse_snr_range("0:2:24");
    }
    else if (name == "fig4")
    {
        e.configs = {NetworkConfig::uniform(2, 1, 1), NetworkConfig::uniform(2, 1, 2), NetworkConfig::uniform(4, 1, 1)};
        e.schemes = {SchemeId::DstcUniform, SchemeId::OpportunisticRelay};
        e.snr_db_grid = parse_snr_range("0:2:30");
        e.target_ber = {1e-2, 1e-4};
    }
    else
        throw ConfigError("preset", "unknown preset '" + name + "' (expected fig2, fig3 or fig4)");
    return e;
}

inline std::string run_label(const NetworkConfig &c, SchemeId s)
{
    return to_string(s) + "_R" + std::to_string(c.num_relays) + "_Ns" + std::to_string(c.src_antennas) + "_Nd" +
           std::to_string(c.dst_antennas);
}

// Throws CapabilityError for any analytic output the scheme/shape does not support, before any work is done.
inline void check_capabilities(const ExperimentSpec &e)
{
    const auto con = make_constellation(e.modulation);
    for (const auto &c : e.configs)
    {
        const auto cb = build_codebook(c.src_antennas, c.num_relays, c.block_len);
        for (auto s : e.schemes)
            for (auto o : e.outputs)
            {
                const std::string where = " (" + run_label(c, s) + ")";
                switch (o)
                {
                case Provenance::simulated:
                    detail::require_decodable(con, cb.T);
                    break;
                case Provenance::exact:
                    if (s != SchemeId::OpportunisticRelay && s != SchemeId::FullOpportunism)
                        throw CapabilityError("exact SER is available for opp-relay and full-opp only" + where);
                    break;
                case Provenance::asymptotic:
                    if (s == SchemeId::OpportunisticRelay)
                        break;
                    if (s == SchemeId::FullOpportunism && c.src_antennas < c.dst_antennas)
                        break;
                    throw CapabilityError("asymptotic SER needs opp-relay, or full-opp with Ns < Nd" + where);
                case Provenance::upper_bound:
                    if (s != SchemeId::OpportunisticRelay || c.src_antennas != c.dst_antennas)
                        throw CapabilityError("upper bound needs opp-relay with Ns = Nd" + where);
                    break;
                case Provenance::mgf:
                    if (s != SchemeId::OpportunisticSource)
                        throw CapabilityError("MGF SER is available for opp-source only" + where);
                    break;
                }
            }
    }
}

inline SerCurve analytic_curve(const ExperimentSpec &e, const NetworkConfig &config, SchemeId scheme, Provenance o)
{
    SerCurve curve;
    curve.provenance = o;
    for (double db : e.snr_db_grid)
    {
        const auto c = with_snr_db(config, db);
        double v = 0.0;
        switch (o)
        {
        case Provenance::exact:
            v = scheme == SchemeId::OpportunisticRelay
                    ? ser_exact_opportunistic(GammaRatioParams::from_config(c), e.modulation)
                    : ser_exact_full_opportunism(ZetaParams::from_config(c), e.modulation);
            break;
        case Provenance::asymptotic:
            v = std::min(1.0, ser_asymptotic(c, e.modulation, scheme));
            break;
        case Provenance::upper_bound:
            v = ser_upper_bound_equal_antennas(c, e.modulation);
            break;
        case Provenance::mgf:
            v = ser_mgf_opportunistic_source(c, e.modulation, e.mgf_samples, e.seed).value;
            break;
        case Provenance::simulated:
            throw ContractError("analytic_curve: simulated is not an analytic output");
        }
        curve.points.push_back({db, v, 0.0});
    }
    return curve;
}

// ------------------------------------------------------------------------
// CSV
// ------------------------------------------------------------------------

inline constexpr const char *csv_header = "snr_db,value,ci_halfwidth,provenance,scheme,R,Ns,Nd,M,family";

struct CsvCurve
{
    SerCurve curve;
    SchemeId scheme = SchemeId::DstcUniform;
    int R = 0, Ns = 0, Nd = 0, M = 0;
    ModulationFamily family = ModulationFamily::MPSK;
};

inline std::string format_g12(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline void write_csv(std::ostream &os, const SerCurve &curve, SchemeId scheme, const NetworkConfig &c,
                      const ModulationSpec &mod)
{
    os << csv_header << '\n';
    for (const auto &p : curve.points)
        os << format_g12(p.snr_db) << ',' << format_g12(p.value) << ',' << format_g12(p.ci_halfwidth) << ','
           << to_string(curve.provenance) << ',' << to_string(scheme) << ',' << c.num_relays << ','
           << c.src_antennas << ',' << c.dst_antennas << ',' << mod.M << ',' << to_string(mod.family) << '\n';
}

inline CsvCurve read_csv(std::istream &is)
{
    std::string line;
    if (!std::getline(is, line) || line != csv_header)
        throw ContractError("read_csv: missing or unexpected header");
    CsvCurve out;
    bool first = true;
    while (std::getline(is, line))
    {
        if (line.empty())
            continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');)
            cells.push_back(cell);
        if (cells.size() != 10)
            throw ContractError("read_csv: expected 10 columns in '" + line + "'");
        out.curve.points.push_back({std::stod(cells[0]), std::stod(cells[1]), std::stod(cells[2])});
        if (first)
        {
            out.curve.provenance = provenance_from_string(cells[3]);
            out.scheme = scheme_from_string(cells[4]);
            out.R = std::stoi(cells[5]);
            out.Ns = std::stoi(cells[6]);
            out.Nd = std::stoi(cells[7]);
            out.M = std::stoi(cells[8]);
            out.family = modulation_family_from_string(cells[9]);
            first = false;
        }
    }
    return out;
}

// SNR (dB) where the curve first falls to `target`, interpolating log10(value) linearly in dB.
inline std::optional<double> snr_at_error_rate(const SerCurve &curve, double target)
{
    const auto &p = curve.points;
    for (std::size_t i = 1; i < p.size(); ++i)
    {
        if (p[i - 1].value >= target && p[i].value <= target)
        {
            // a zero count cannot be interpolated in log scale; report the grid point
            if (p[i].value <= 0.0 || p[i - 1].value == p[i].value)
                return p[i].snr_db;
            const double a = std::log10(p[i - 1].value), b = std::log10(p[i].value), t = std::log10(target);
            return p[i - 1].snr_db + (a - t) / (a - b) * (p[i].snr_db - p[i - 1].snr_db);
        }
    }
    return std::nullopt;
}

// ------------------------------------------------------------------------
// Runner
// ------------------------------------------------------------------------

inline nlohmann::json diversity_entry(const SerCurve &curve)
{
    try
    {
        return estimate_diversity_order(curve);
    }
    catch (const ContractError &)
    {
        return nullptr;
    }
}

// Writes one CSV per (config, scheme, output) into e.out_path plus summary.json, and returns the summary.
inline nlohmann::json run_experiment(const ExperimentSpec &e, std::ostream *log = nullptr)
{
    e.validate();
    check_capabilities(e);
    namespace fs = std::filesystem;
    fs::create_directories(e.out_path);

    nlohmann::json summary{{"version", version}, {"spec", e}, {"runs", nlohmann::json::array()}};
    struct Done
    {
        std::string label;
        SerCurve ber;
    };
    std::vector<Done> simulated;

    auto emit = [&](const std::string &name, const SerCurve &curve, SchemeId s, const NetworkConfig &c) {
        const auto path = fs::path(e.out_path) / name;
        std::ofstream os(path);
        if (!os)
            throw std::runtime_error("cannot write " + path.string());
        write_csv(os, curve, s, c, e.modulation);
        if (!os)
            throw std::runtime_error("write failed for " + path.string());
        return path.filename().string();
    };

    for (const auto &c : e.configs)
        for (auto s : e.schemes)
        {
            const auto label = run_label(c, s);
            nlohmann::json run{{"label", label}, {"scheme", to_string(s)}, {"config", c}, {"outputs", nlohmann::json::object()}};
            for (auto o : e.outputs)
            {
                if (log)
                    *log << label << ": " << to_string(o) << std::endl;
                nlohmann::json entry;
                SerCurve curve;
                if (o == Provenance::simulated)
                {
                    const auto r = run_sim(e.plan(c, s));
                    curve = r.curve;
                    entry["ber_file"] = emit(label + "_simulated_ber.csv", r.ber_curve, s, c);
                    entry["trials_used"] = r.trials_used;
                    entry["symbol_errors"] = r.symbol_errors;
                    entry["wall_time_s"] = r.wall_time;
                    simulated.push_back({label, r.ber_curve});
                }
                else
                    curve = analytic_curve(e, c, s, o);
                entry["file"] = emit(label + "_" + to_string(o) + ".csv", curve, s, c);
                entry["diversity_order"] = diversity_entry(curve);
                run["outputs"][to_string(o)] = entry;
            }
            summary["runs"].push_back(run);
        }

    // gain of `candidate` over `reference`: SNR the reference needs minus SNR the candidate needs
    nlohmann::json gains = nlohmann::json::array();
    for (double target : e.target_ber)
        for (std::size_t i = 0; i < simulated.size(); ++i)
            for (std::size_t k = 0; k < simulated.size(); ++k)
            {
                if (i == k)
                    continue;
                const auto a = snr_at_error_rate(simulated[i].ber, target);
                const auto b = snr_at_error_rate(simulated[k].ber, target);
                gains.push_back({{"target_ber", target},
                                 {"reference", simulated[i].label},
                                 {"candidate", simulated[k].label},
                                 {"gain_db", a && b ? nlohmann::json(*a - *b) : nlohmann::json(nullptr)}});
            }
    summary["gains"] = gains;

    std::ofstream js(fs::path(e.out_path) / "summary.json");
    js << summary.dump(2) << '\n';
    if (!js)
        throw std::runtime_error("cannot write summary.json");
    return summary;
}

} // namespace afrelay

#endif
