#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ivfsmc/errors.hpp"
#include "ivfsmc/ident_data.hpp"
#include "ivfsmc/identification.hpp"
#include "ivfsmc/report.hpp"
#include "ivfsmc/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace ivfsmc;

namespace {

// Quotes are escaped so the line stays parseable as key=value pairs.
void error_line(const std::string& code, const std::string& message) {
    std::string m;
    for (char ch : message) {
        if (ch == '"' || ch == '\\') m += '\\';
        m += ch == '\n' ? ' ' : ch;
    }
    std::cerr << "error code=" << code << " message=\"" << m << "\"\n";
}

void write_text(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path);
    out << text;
    if (!out) throw IoError("cannot write " + path.string());
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

// Models come from a directory written by `identify`, or are identified on
// the fly from the scenario seed.
class ModelSource {
public:
    explicit ModelSource(std::optional<fs::path> dir) : dir_(std::move(dir)) {}

    std::array<TSModel, 3> get(ControllerKind kind, std::uint64_t seed) {
        const ModelKind mk = model_kind_for(kind);
        if (dir_) return load_attitude_models(mk, *dir_);
        auto it = cache_.find(seed);
        if (it == cache_.end()) it = cache_.emplace(seed, identify_seed(seed)).first;
        return attitude_models(it->second, mk);
    }

private:
    std::optional<fs::path> dir_;
    std::map<std::uint64_t, IdentificationReport> cache_;
};

void save_run(const ScenarioConfig& cfg, const ScenarioResult& r, const fs::path& dir) {
    fs::create_directories(dir);
    write_text(dir / "config.json", to_json(cfg).dump(2) + "\n");
    write_text(dir / "metrics.json", r.metrics.to_json().dump(2) + "\n");
    r.log.write_csv(dir / "log.csv");
}

void print_metrics(const RunMetrics& m) {
    std::cout << m.scenario << " " << m.controller << " disturbance=" << m.disturbance << " steps=" << m.steps;
    if (m.aborted) std::cout << " aborted t=" << m.abort_time << " code=" << m.abort_code;
    std::cout << '\n';
    for (const auto& c : m.channels) std::cout << "  " << c.name << " mse=" << c.mse << " rmse=" << c.rmse << '\n';
}

void write_reports(const std::vector<RunMetrics>& runs, const fs::path& out) {
    const ComparisonReport rep = compare_report(runs);
    write_text(out / "comparison.json", rep.to_json().dump(2) + "\n");
    write_text(out / "comparison.txt", rep.table());
    std::cout << rep.table();

    std::set<std::string> tests, controllers;
    for (const auto& r : runs) {
        tests.insert(r.disturbance);
        controllers.insert(r.controller);
    }
    if (tests.size() > 1 && controllers.size() == 2) {
        const DisturbanceGrid grid = disturbance_grid(runs);
        write_text(out / "grid.json", grid.to_json().dump(2) + "\n");
        write_text(out / "grid.txt", grid.table());
        std::cout << '\n' << grid.table();
    }
}

ScenarioConfig base_scenario(const json& j) {
    if (j.is_string()) {
        const std::string s = j.get<std::string>();
        if (s == "attitude") return ScenarioConfig::attitude_default();
        if (s == "position") return ScenarioConfig::position_default();
        throw InvalidArgument("sweep: base must be \"attitude\", \"position\" or a scenario object");
    }
    return scenario_from_json(j);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Interval type-2 fuzzy sliding-mode quadrotor control: identification and simulation"};
    app.require_subcommand(1);

    // generate-data
    IdentConfig gen_cfg;
    fs::path gen_out = "data";
    auto* gen = app.add_subcommand("generate-data", "Simulate excitation runs and write ident_<axis>.csv");
    gen->add_option("--seed", gen_cfg.seed, "RNG seed")->capture_default_str();
    gen->add_option("--out", gen_out, "Output directory")->capture_default_str();
    gen->add_option("--n-ident", gen_cfg.n_ident)->capture_default_str();
    gen->add_option("--n-valid", gen_cfg.n_valid)->capture_default_str();
    gen->add_option("--dt", gen_cfg.dt)->capture_default_str();
    gen->add_option("--noise-frac", gen_cfg.noise_frac)->capture_default_str();

    // identify
    std::uint64_t id_seed = 1;
    std::optional<fs::path> id_data;
    fs::path id_out = "models";
    ModelBuildConfig build_cfg;
    auto* ident = app.add_subcommand("identify", "Build type-1 and interval models and the RMSE table");
    ident->add_option("--seed", id_seed, "Clustering seed, and data seed when --data is absent")->capture_default_str();
    ident->add_option("--data", id_data, "Directory with ident_<axis>.csv (generated when absent)");
    ident->add_option("--out", id_out, "Output directory")->capture_default_str();
    ident->add_option("--clusters", build_cfg.clustering.clusters)->capture_default_str();
    ident->add_option("--fuzziness", build_cfg.clustering.fuzziness)->capture_default_str();

    // simulate
    std::optional<fs::path> sim_config, sim_models;
    std::string sim_scenario = "attitude";
    std::optional<std::string> sim_controller, sim_disturbance;
    std::optional<std::uint64_t> sim_seed;
    fs::path sim_out = "run";
    bool sim_wf_bound = false;
    auto* sim = app.add_subcommand("simulate", "Run one closed-loop scenario");
    sim->add_option("--config", sim_config, "Scenario config (JSON)");
    sim->add_option("--scenario", sim_scenario, "Built-in scenario when --config is absent")
        ->check(CLI::IsMember({"attitude", "position"}))
        ->capture_default_str();
    sim->add_option("--controller", sim_controller, "Override the controller")->check(CLI::IsMember({"t1fc", "ivfc"}));
    sim->add_option("--disturbance", sim_disturbance, "Override the disturbance spec");
    sim->add_option("--seed", sim_seed, "Override the identification seed");
    sim->add_option("--models", sim_models, "Directory written by identify");
    sim->add_option("--out", sim_out, "Output directory")->capture_default_str();
    sim->add_flag("--wf-from-validation", sim_wf_bound,
                  "Set the attitude Wf per axis to the model's max validation error");

    // compare
    std::vector<fs::path> cmp_inputs;
    fs::path cmp_out = "report";
    auto* cmp = app.add_subcommand("compare", "Tabulate metrics.json files side by side");
    cmp->add_option("metrics", cmp_inputs, "metrics.json files")->required()->check(CLI::ExistingFile);
    cmp->add_option("--out", cmp_out, "Output directory")->capture_default_str();

    // sweep
    fs::path sweep_config;
    std::optional<fs::path> sweep_models;
    fs::path sweep_out = "sweep";
    auto* sweep = app.add_subcommand("sweep", "Run a grid of controllers x disturbances x seeds");
    sweep->add_option("--config", sweep_config, "Sweep grid (JSON)")->required()->check(CLI::ExistingFile);
    sweep->add_option("--models", sweep_models, "Directory written by identify");
    sweep->add_option("--out", sweep_out, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        error_line("usage", e.what());
        return 2;
    }

    try {
        if (*gen) {
            const IdentData d = generate_ident_data(gen_cfg);
            for (const auto& set : d.sets) {
                const fs::path p = gen_out / ident_file_name(set.axis);
                write_ident_csv(set, gen_cfg.dt, p);
                std::cout << p.string() << " noise_sigma=" << set.noise_sigma << '\n';
            }
            if (d.retries > 0) std::cout << "damped retries: " << d.retries << '\n';
        } else if (*ident) {
            IdentificationReport rep;
            if (id_data) {
                IdentData d;
                for (int i = 0; i < 3; ++i) {
                    const Axis axis = static_cast<Axis>(i);
                    d.sets[static_cast<std::size_t>(i)] = read_ident_csv(axis, *id_data / ident_file_name(axis));
                }
                build_cfg.clustering.seed = id_seed;
                rep = run_identification(d, build_cfg);
            } else {
                rep = identify_seed(id_seed, {}, build_cfg);
            }
            write_identification(rep, id_out);
            std::cout << rep.table();
        } else if (*sim) {
            ScenarioConfig cfg = sim_config ? load_scenario(*sim_config)
                                 : sim_scenario == "position" ? ScenarioConfig::position_default()
                                                              : ScenarioConfig::attitude_default();
            if (sim_controller) cfg.controller = controller_kind_from_string(*sim_controller);
            if (sim_disturbance) cfg.disturbance = DisturbanceSpec::parse(*sim_disturbance);
            if (sim_seed) cfg.seed = *sim_seed;
            if (sim_wf_bound) {
                const IdentificationReport rep = identify_seed(cfg.seed);
                cfg.gains.attitude.Wf_axis = approximation_bounds(rep, model_kind_for(cfg.controller));
            }
            cfg.validate();
            ModelSource models(sim_models);
            const ScenarioResult r = run_scenario(cfg, models.get(cfg.controller, cfg.seed));
            save_run(cfg, r, sim_out);
            print_metrics(r.metrics);
            if (r.metrics.aborted) {
                error_line(r.metrics.abort_code, r.metrics.abort_reason);
                return 1;
            }
        } else if (*cmp) {
            std::vector<RunMetrics> runs;
            for (const auto& p : cmp_inputs) runs.push_back(RunMetrics::from_json(read_json(p)));
            write_reports(runs, cmp_out);
        } else if (*sweep) {
            const json grid = read_json(sweep_config);
            const ScenarioConfig base = base_scenario(grid.value("base", json("attitude")));
            const auto controllers = grid.value("controllers", std::vector<std::string>{"ivfc", "t1fc"});
            const auto disturbances = grid.value("disturbances", std::vector<std::string>{"none"});
            const auto seeds = grid.value("seeds", std::vector<std::uint64_t>{base.seed});
            ModelSource models(sweep_models);
            std::vector<RunMetrics> runs;
            bool any_aborted = false;
            for (std::uint64_t seed : seeds) {
                for (std::size_t k = 0; k < disturbances.size(); ++k) {
                    for (const auto& ctl : controllers) {
                        ScenarioConfig cfg = base;
                        cfg.seed = seed;
                        cfg.controller = controller_kind_from_string(ctl);
                        cfg.disturbance = DisturbanceSpec::parse(disturbances[k]);
                        cfg.validate();
                        const ScenarioResult r = run_scenario(cfg, models.get(cfg.controller, seed));
                        save_run(cfg, r, sweep_out / (ctl + "_test" + std::to_string(k + 1) + "_seed" +
                                                      std::to_string(seed)));
                        print_metrics(r.metrics);
                        any_aborted = any_aborted || r.metrics.aborted;
                        runs.push_back(r.metrics);
                    }
                }
            }
            write_reports(runs, sweep_out);
            if (any_aborted) {
                error_line("run_aborted", "at least one sweep run aborted; see its metrics.json");
                return 1;
            }
        }
    } catch (const Error& e) {
        error_line(e.code(), e.what());
        return 1;
    } catch (const std::exception& e) {
        error_line("internal", e.what());
        return 1;
    }
    return 0;
}
