// Command-line front end: scenario generation, placement solving, placement
// evaluation, experiment reproduction, and instance validation.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "hcache/delay.hpp"
#include "hcache/greedy.hpp"
#include "hcache/io.hpp"
#include "hcache/model.hpp"
#include "hcache/oracle.hpp"
#include "hcache/pipage.hpp"
#include "hcache/placement_lp.hpp"
#include "hcache/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitScope = 3;   // budget or special-case scope violations
constexpr int kExitSolver = 4;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string join_args(int argc, char** argv) {
    std::string out;
    for (int i = 0; i < argc; ++i) {
        if (i) out += " ";
        out += argv[i];
    }
    return out;
}

std::string digest_of(const std::string& text) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(hcache::fnv1a64(text)));
    return buf;
}

void write_manifest(const std::string& path, const std::string& command_line,
                    const std::string& config_text, std::vector<std::uint64_t> seeds,
                    std::vector<hcache::PhaseTiming> phases) {
    hcache::RunManifest manifest;
    manifest.tool_version = hcache::kToolVersion;
    manifest.command_line = command_line;
    manifest.config_digest = digest_of(config_text);
    manifest.seeds = std::move(seeds);
    manifest.phases = std::move(phases);
    hcache::save_manifest(path, manifest);
}

int cmd_generate(const std::string& config_path, const std::string& out_dir,
                 std::uint64_t seed_override, bool has_seed_override,
                 const std::string& command_line) {
    hcache::ScenarioFileConfig config = hcache::load_scenario_config(config_path);
    if (!config.has_helper_count) {
        throw hcache::ConfigError(config_path + ": missing required field 'helper_count'");
    }
    std::uint64_t seed = has_seed_override ? seed_override : config.seed;
    const auto& e = config.experiment;

    auto t0 = Clock::now();
    hcache::SpacingCalibration cal =
        hcache::calibrate_spacing(e.geometry, config.helper_count);
    hcache::Scenario scenario;
    scenario.geometry = e.geometry;
    scenario.geometry.grid_spacing_m = cal.spacing_m;
    scenario.geometry.grid_alignment = cal.alignment;
    scenario.radio = e.radio;
    scenario.helpers = hcache::grid_helpers(scenario.geometry);
    scenario.users = hcache::sample_users(scenario.geometry, e.user_count, seed);
    scenario.seed = seed;

    hcache::Popularity popularity = hcache::zipf_popularity(e.file_count, e.zipf_gamma);
    hcache::FileLibrary library(e.file_count, e.file_size_bits);
    hcache::BuiltInstance built =
        hcache::build_instance(scenario, library, popularity, e.cache_size);
    for (const auto& w : built.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& w : built.instance.warnings()) std::cerr << "warning: " << w << "\n";

    std::filesystem::create_directories(out_dir);
    hcache::save_scenario(out_dir + "/scenario.json", scenario);
    hcache::save_instance(out_dir + "/instance.json", built.instance);
    write_manifest(out_dir + "/manifest.json", command_line, hcache::read_text_file(config_path),
                   {seed}, {{"generate", seconds_since(t0)}});
    std::cout << "generated scenario with " << scenario.helpers.size() << " helpers ("
              << built.instance.helper_count() << " active), " << e.user_count << " users -> "
              << out_dir << "\n";
    return kExitOk;
}

int cmd_solve(const std::string& instance_path, const std::string& algorithm,
              const std::string& out_path, double budget, const std::string& command_line) {
    hcache::ProblemInstance instance = hcache::load_instance(instance_path);
    auto violations = hcache::validate(instance);
    if (!violations.empty()) {
        std::cerr << "error: instance fails validation (" << violations.front().invariant << ": "
                  << violations.front().detail << ")\n";
        return kExitConfig;
    }

    const double bs_delay = hcache::bs_only_total_delay(instance);
    auto t0 = Clock::now();
    double savings = 0.0;
    double delay = 0.0;

    if (algorithm == "greedy") {
        hcache::GreedyResult result = hcache::greedy_place(instance);
        savings = result.trace.final_objective();
        delay = bs_delay - savings;
        hcache::save_placement(out_path, result.placement);
    } else if (algorithm == "coded") {
        hcache::CodedSolveResult result = hcache::solve_coded(instance);
        if (result.status != hcache::LpStatus::kOptimal) {
            std::cerr << "error: coded solve " << hcache::to_string(result.status) << "\n";
            return kExitSolver;
        }
        delay = result.objective;
        savings = bs_delay - delay;
        hcache::save_placement(out_path, result.placement);
    } else if (algorithm == "lp-pipage") {
        if (!hcache::is_special_case(instance)) {
            std::cerr << "error: lp-pipage requires the uniform-helper-delay special case "
                         "(every non-BS edge sharing one delay below all BS delays)\n";
            return kExitScope;
        }
        hcache::SpecialCaseInstance sc = hcache::make_special_case(instance);
        hcache::LpPipageResult result = hcache::lp_pipage_solve(sc);
        if (result.status != hcache::LpStatus::kOptimal) {
            std::cerr << "error: coverage LP " << hcache::to_string(result.status) << "\n";
            return kExitSolver;
        }
        savings = hcache::uncoded_objective(instance, result.placement);
        delay = bs_delay - savings;
        hcache::save_placement(out_path, result.placement);
    } else if (algorithm == "exact") {
        try {
            hcache::ExactResult result = hcache::exact_uncoded(instance, budget);
            savings = result.optimal_value;
            delay = bs_delay - savings;
            hcache::save_placement(out_path, result.optimal_placements.front());
        } catch (const hcache::OracleBudgetError& e) {
            std::cerr << "error: " << e.what() << "\n";
            return kExitScope;
        }
    } else {
        std::cerr << "error: unknown algorithm '" << algorithm << "'\n";
        return kExitConfig;
    }

    double elapsed = seconds_since(t0);
    write_manifest(out_path + ".manifest.json", command_line,
                   hcache::read_text_file(instance_path), {}, {{algorithm, elapsed}});
    std::printf("%s: savings=%.12g s/bit, total_delay=%.12g s/bit, wall=%.3fs\n", algorithm.c_str(),
                savings, delay, elapsed);
    return kExitOk;
}

int cmd_evaluate(const std::string& instance_path, const std::string& placement_path) {
    hcache::ProblemInstance instance = hcache::load_instance(instance_path);
    hcache::AnyPlacement placement = hcache::load_placement(placement_path);
    const double bs_delay = hcache::bs_only_total_delay(instance);
    if (std::holds_alternative<hcache::UncodedPlacement>(placement)) {
        const auto& x = std::get<hcache::UncodedPlacement>(placement);
        double savings = hcache::uncoded_objective(instance, x);
        std::printf("uncoded placement: savings=%.12g s/bit, total_delay=%.12g s/bit, "
                    "avg_rate=%.12g bit/s\n",
                    savings, bs_delay - savings, hcache::average_download_rate(instance, x));
    } else {
        const auto& rho = std::get<hcache::CodedPlacement>(placement);
        double delay = hcache::coded_objective(instance, rho);
        std::printf("coded placement: savings=%.12g s/bit, total_delay=%.12g s/bit, "
                    "avg_rate=%.12g bit/s\n",
                    bs_delay - delay, delay, hcache::average_download_rate(instance, rho));
    }
    return kExitOk;
}

int cmd_validate(const std::string& instance_path) {
    hcache::ProblemInstance instance = hcache::load_instance(instance_path);
    auto violations = hcache::validate(instance);
    for (const auto& w : instance.warnings()) std::cout << "warning: " << w << "\n";
    if (violations.empty()) {
        std::cout << "instance ok: F=" << instance.file_count() << " H=" << instance.helper_count()
                  << " U=" << instance.user_count() << " M=" << instance.cache_size()
                  << " d=" << instance.max_degree() << "\n";
        return kExitOk;
    }
    for (const auto& v : violations) {
        std::cout << "violation: " << v.invariant << ": " << v.detail << "\n";
    }
    return kExitConfig;
}

int cmd_experiment(const std::string& kind_name, const std::string& config_path,
                   const std::string& out_dir, double scale, int threads_override,
                   const std::string& command_line) {
    hcache::ExperimentKind kind;
    std::string csv_name;
    if (kind_name == "helpers") {
        kind = hcache::ExperimentKind::kHelpersSweep;
        csv_name = "fig4";
    } else if (kind_name == "users") {
        kind = hcache::ExperimentKind::kUsersSweep;
        csv_name = "fig5";
    } else if (kind_name == "mobility") {
        kind = hcache::ExperimentKind::kMobility;
        csv_name = "fig6";
    } else {
        std::cerr << "error: unknown experiment kind '" << kind_name << "'\n";
        return kExitConfig;
    }

    std::string config_text = hcache::read_text_file(config_path);
    hcache::ExperimentConfig config = hcache::load_scenario_config(config_path).experiment;
    if (scale != 1.0) config = hcache::scaled_config(config, scale);
    if (threads_override > 0) config.threads = threads_override;

    auto t0 = Clock::now();
    hcache::ExperimentResult result = hcache::run_experiment(kind, config);
    double elapsed = seconds_since(t0);

    std::filesystem::create_directories(out_dir);
    hcache::write_text_file(out_dir + "/" + csv_name + ".csv",
                            hcache::experiment_rows_csv(result.rows));
    hcache::write_text_file(out_dir + "/" + csv_name + "_summary.csv",
                            hcache::experiment_summary_csv(result.summaries));
    write_manifest(out_dir + "/manifest.json", command_line, config_text, config.seeds,
                   {{kind_name, elapsed}});

    for (const auto& s : result.summaries) {
        std::printf("%s param=%g scheme=%-16s mean=%.6g bit/s (stddev %.3g, n=%d)\n",
                    s.experiment.c_str(), s.param, s.scheme.c_str(), s.mean_rate_bps,
                    s.stddev_rate_bps, s.samples);
    }
    std::printf("experiment %s finished in %.1fs -> %s\n", kind_name.c_str(), elapsed,
                out_dir.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cache placement optimization for helper-assisted wireless networks"};
    app.require_subcommand(1);
    const std::string command_line = join_args(argc, argv);

    std::string config_path, instance_path, placement_path, out_path = "out";
    std::string algorithm = "greedy", kind = "helpers";
    double budget = 1e7, scale = 1.0;
    int threads = 0;
    std::uint64_t seed = 0;

    auto* generate = app.add_subcommand("generate", "compile a scenario config into an instance");
    generate->add_option("--config", config_path, "scenario config JSON")->required();
    generate->add_option("--out", out_path, "output directory");
    auto* seed_opt = generate->add_option("--seed", seed, "override the config seed");

    auto* solve = app.add_subcommand("solve", "run a placement algorithm on an instance");
    solve->add_option("--instance", instance_path, "instance JSON")->required();
    solve->add_option("--algorithm", algorithm, "greedy|coded|lp-pipage|exact");
    solve->add_option("--out", out_path, "placement output path");
    solve->add_option("--budget", budget, "exact-solver enumeration budget");

    auto* evaluate = app.add_subcommand("evaluate", "evaluate a placement file on an instance");
    evaluate->add_option("--instance", instance_path, "instance JSON")->required();
    evaluate->add_option("--placement", placement_path, "placement JSON")->required();

    auto* experiment = app.add_subcommand("experiment", "run a sweep and write CSV tables");
    experiment->add_option("--kind", kind, "helpers|users|mobility");
    experiment->add_option("--config", config_path, "experiment config JSON")->required();
    experiment->add_option("--out", out_path, "output directory");
    experiment->add_option("--scale", scale, "shrink F, M, U and seed count by this factor");
    experiment->add_option("--threads", threads, "max worker threads (0 = all cores)");

    auto* validate = app.add_subcommand("validate", "check instance invariants");
    validate->add_option("--instance", instance_path, "instance JSON")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (generate->parsed()) {
            return cmd_generate(config_path, out_path, seed, seed_opt->count() > 0, command_line);
        }
        if (solve->parsed()) {
            std::string out = out_path == "out" ? "placement.json" : out_path;
            return cmd_solve(instance_path, algorithm, out, budget, command_line);
        }
        if (evaluate->parsed()) return cmd_evaluate(instance_path, placement_path);
        if (experiment->parsed()) {
            return cmd_experiment(kind, config_path, out_path, scale, threads, command_line);
        }
        if (validate->parsed()) return cmd_validate(instance_path);
    } catch (const hcache::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const hcache::OracleBudgetError& e) {
        std::cerr << "budget error: " << e.what() << "\n";
        return kExitScope;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return kExitSolver;
    }
    return kExitOk;
}
