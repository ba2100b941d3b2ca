// Batch CLI: exact FJRW/Landau-Ginzburg computations driven by a JSON config.
//
//   fjrw <command> --config <file> [--out <file>]
//
// Exit codes: 0 success, 1 failed verification/check, 2 invalid input.
#include "fjrw/invariants.hpp"
#include "fjrw/json_io.hpp"
#include "fjrw/verification.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace {

using fjrw::Json;

struct JobConfig {
    fjrw::MarkingSetPtr markings;
    int dmax = 0;
    std::string command;
    Json payload;
};

const std::set<std::string> kCommands{
    "ext-invariant",  "amplitude", "chamber-build",    "chamber-check",    "potential",
    "period",         "verify",    "wallcross-apply",  "wallcross-connect"};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

JobConfig load_config(const std::string& path, const std::string& cli_command)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file '" + path + "'");
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }

    std::vector<std::string> violations;
    auto need_int = [&](const char* key, int low) {
        if (!j.contains(key) || !j[key].is_number_integer()) {
            violations.push_back(std::string("missing integer field '") + key + "'");
            return low;
        }
        const int v = j[key].get<int>();
        if (v < low)
            violations.push_back(std::string("field '") + key + "' must be >= " +
                                 std::to_string(low));
        return v;
    };

    JobConfig config;
    const int r = need_int("r", 2);
    const int s = need_int("s", 2);
    config.dmax = j.contains("dmax") ? need_int("dmax", 0) : 0;

    std::vector<fjrw::Marking> ms;
    std::set<int> labels;
    if (j.contains("markings")) {
        if (!j["markings"].is_array())
            violations.push_back("'markings' must be an array");
        else
            for (const Json& m : j["markings"]) {
                fjrw::Marking mk;
                try {
                    mk = {m.at("label").get<int>(), m.at("a").get<int>(), m.at("b").get<int>()};
                } catch (const std::exception&) {
                    violations.push_back("marking records need integer label/a/b: " + m.dump());
                    continue;
                }
                if (mk.label <= 0)
                    violations.push_back("labels must be positive: " + m.dump());
                else if (!labels.insert(mk.label).second)
                    violations.push_back("duplicate label " + std::to_string(mk.label));
                if (mk.a < 0 || mk.a > r - 1)
                    violations.push_back("twist a out of range [0," + std::to_string(r - 1) +
                                         "] at label " + std::to_string(mk.label));
                if (mk.b < 0 || mk.b > s - 1)
                    violations.push_back("twist b out of range [0," + std::to_string(s - 1) +
                                         "] at label " + std::to_string(mk.label));
                ms.push_back(mk);
            }
    }

    config.command = j.value("command", cli_command);
    if (!kCommands.count(config.command))
        violations.push_back("unknown command '" + config.command + "'");
    else if (config.command != cli_command)
        violations.push_back("config command '" + config.command +
                             "' disagrees with the invoked command '" + cli_command + "'");
    config.payload = j.value("payload", Json::object());

    if (!violations.empty()) {
        std::string all = "invalid config:";
        for (const std::string& v : violations)
            all += "\n  - " + v;
        throw ConfigError(all);
    }
    config.markings = fjrw::make_marking_set({r, s}, std::move(ms));
    return config;
}

fjrw::ChamberIndex payload_chamber(const JobConfig& config, const char* key = "chamber")
{
    if (config.payload.contains(key))
        return fjrw::chamber_from_json(config.payload.at(key));
    return fjrw::build_minimal_chamber(config.markings, config.dmax);
}

fjrw::SignConvention payload_convention(const JobConfig& config)
{
    const std::string name = config.payload.value("convention", "openms");
    if (name == "openms")
        return fjrw::SignConvention::OpenMS;
    if (name == "mirrora")
        return fjrw::SignConvention::MirrorA;
    throw ConfigError("unknown convention '" + name + "' (use \"openms\" or \"mirrora\")");
}

Json axiom_report_json(const fjrw::AxiomReport& report)
{
    Json violations = Json::array();
    for (const fjrw::AxiomViolation& v : report.violations) {
        Json rec = fjrw::cell_json(v.cell, 0);
        rec.erase("p");
        rec["condition"] = v.condition;
        rec["detail"] = v.detail;
        violations.push_back(std::move(rec));
    }
    return Json{{"pass", report.pass()}, {"violations", violations}};
}

// Returns (document, exit code).
std::pair<Json, int> run(const JobConfig& config)
{
    using namespace fjrw;

    if (config.command == "amplitude") {
        std::vector<int> J;
        for (const Json& l : config.payload.at("J"))
            J.push_back(l.get<int>());
        DescendentVector d;
        if (config.payload.contains("d"))
            for (auto it = config.payload["d"].begin(); it != config.payload["d"].end(); ++it)
                d[std::stoi(it.key())] = it.value().get<int>();
        const ChamberIndex nu = payload_chamber(config);
        return {Json{{"A", to_json(amplitude(nu, J, d))}}, 0};
    }

    if (config.command == "ext-invariant") {
        std::vector<ClosedInsertion> ins;
        for (const Json& t : config.payload.at("insertions"))
            ins.push_back({t.at("a").get<int>(), t.at("b").get<int>(), t.value("d", 0)});
        const Rational value =
            ext_invariant(config.markings->params(), ins, payload_convention(config));
        return {Json{{"value", to_json(value)}}, 0};
    }

    if (config.command == "chamber-build")
        return {to_json(build_minimal_chamber(config.markings, config.dmax)), 0};

    if (config.command == "chamber-check") {
        const ChamberIndex nu = payload_chamber(config);
        const AxiomReport report = check_axioms(nu);
        return {axiom_report_json(report), report.pass() ? 0 : 1};
    }

    if (config.command == "potential") {
        const ChamberIndex nu = payload_chamber(config);
        if (config.payload.value("symmetric", false))
            return {to_json(build_potential_sym(nu)), 0};
        return {to_json(build_potential(nu)), 0};
    }

    if (config.command == "period") {
        const ChamberIndex nu = payload_chamber(config);
        const bool symmetric = config.payload.value("symmetric", false);
        auto table_json = [&](const auto& table) {
            Json out = Json::object();
            for (const auto& [cycle, series] : table)
                out[std::to_string(cycle.a) + "," + std::to_string(cycle.b)] = to_json(series);
            return out;
        };
        if (config.payload.contains("cycle")) {
            const CycleLabel cycle{config.payload["cycle"].at("a").get<int>(),
                                   config.payload["cycle"].at("b").get<int>()};
            const Json series = symmetric
                                    ? to_json(period_integral(build_potential_sym(nu), cycle))
                                    : to_json(period_integral(build_potential(nu), cycle));
            return {Json{{"series", series}}, 0};
        }
        const bool extended = config.payload.value("extended", false);
        Json table;
        if (symmetric)
            table = extended ? table_json(period_table_extended(build_potential_sym(nu)))
                             : table_json(period_table(build_potential_sym(nu)));
        else
            table = extended ? table_json(period_table_extended(build_potential(nu)))
                             : table_json(period_table(build_potential(nu)));
        return {Json{{"table", table}}, 0};
    }

    if (config.command == "wallcross-apply") {
        const ChamberIndex nu = payload_chamber(config);
        const GroupElement g =
            group_from_json(*config.markings, config.payload.at("group"));
        return {to_json(act_on_chamber(g, nu)), 0};
    }

    if (config.command == "wallcross-connect") {
        const ChamberIndex from = payload_chamber(config, "from");
        if (!config.payload.contains("to"))
            throw ConfigError("wallcross-connect needs payload field 'to'");
        const ChamberIndex to = chamber_from_json(config.payload.at("to"));
        return {to_json(connect(from, to)), 0};
    }

    if (config.command == "verify") {
        int jobs = 1;
        if (const char* env = std::getenv("FJRW_JOBS"))
            jobs = std::max(1, std::atoi(env));
        const auto results = run_acceptance(jobs);
        Json criteria = Json::array();
        bool pass = true;
        for (const auto& r : results) {
            pass = pass && r.pass;
            criteria.push_back(Json{{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
            std::cerr << (r.pass ? "PASS " : "FAIL ") << r.name << " (" << r.seconds << "s)\n";
        }
        return {Json{{"criteria", criteria}, {"pass", pass}}, pass ? 0 : 1};
    }

    throw ConfigError("unhandled command '" + config.command + "'");
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact computation engine for open/closed FJRW theory of x^r + y^s"};
    app.require_subcommand(1);

    std::string config_path, out_path;
    std::vector<CLI::App*> subs;
    for (const std::string& name : kCommands) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON job configuration")->required();
        sub->add_option("--out", out_path, "write the JSON result here instead of stdout");
        subs.push_back(sub);
    }
    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const JobConfig config = load_config(config_path, command);
        const auto [document, code] = run(config);
        const std::string text = document.dump(2) + "\n";
        if (out_path.empty()) {
            std::cout << text;
        } else {
            std::ofstream out(out_path);
            if (!out)
                throw ConfigError("cannot open output file '" + out_path + "'");
            out << text;
        }
        return code;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
