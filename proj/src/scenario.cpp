#include "hcache/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "hcache/delay.hpp"
#include "hcache/greedy.hpp"
#include "hcache/rng.hpp"
#include "hcache/threading.hpp"

namespace hcache {

namespace {

bool in_disk(double x, double y, double radius) {
    return x * x + y * y <= radius * radius;
}

// Squared grid-point norms in units of (spacing/2)^2: (2i)^2 + (2j)^2 for the
// vertex-centered grid, (2i+1)^2 + (2j+1)^2 for the cell-centered one. The
// point count inside a disk only changes when (2R/s)^2 crosses one of these.
std::vector<std::pair<long long, int>> norm_histogram(GridAlignment alignment, long long max_norm) {
    std::map<long long, int> hist;
    const long long limit = static_cast<long long>(std::sqrt(static_cast<double>(max_norm))) + 2;
    for (long long i = -limit; i <= limit; ++i) {
        for (long long j = -limit; j <= limit; ++j) {
            long long a = alignment == GridAlignment::kVertexCentered ? 2 * i : 2 * i + 1;
            long long b = alignment == GridAlignment::kVertexCentered ? 2 * j : 2 * j + 1;
            long long n = a * a + b * b;
            if (n <= max_norm) ++hist[n];
        }
    }
    return {hist.begin(), hist.end()};
}

// Achievable (count, spacing) plateaus for one alignment, by ascending count.
struct Plateau {
    int count;
    double spacing;  // a spacing realizing exactly `count` points
};

std::vector<Plateau> plateaus_for(const CellGeometry& geometry, GridAlignment alignment,
                                  int up_to_count) {
    // Enough norms that the cumulative count passes the target comfortably.
    long long max_norm = 16;
    std::vector<std::pair<long long, int>> hist;
    int cumulative = 0;
    for (;;) {
        hist = norm_histogram(alignment, max_norm);
        cumulative = 0;
        for (auto& [n, c] : hist) cumulative += c;
        if (cumulative > up_to_count + 4) break;
        max_norm *= 4;
    }
    std::vector<Plateau> out;
    cumulative = 0;
    for (std::size_t k = 0; k < hist.size(); ++k) {
        cumulative += hist[k].second;
        double lo = static_cast<double>(hist[k].first);
        double hi = k + 1 < hist.size() ? static_cast<double>(hist[k + 1].first) : lo + 2.0;
        // spacing with (2R/s)^2 in [lo, hi): take the midpoint for slack.
        double target = (lo + hi) / 2.0;
        double spacing = 2.0 * geometry.cell_radius_m / std::sqrt(target);
        out.push_back({cumulative, spacing});
    }
    return out;
}

}  // namespace

std::vector<Point> grid_helpers(const CellGeometry& geometry) {
    if (!(geometry.grid_spacing_m > 0.0) || !(geometry.cell_radius_m > 0.0)) {
        throw std::invalid_argument("grid_helpers: nonpositive spacing or radius");
    }
    const double s = geometry.grid_spacing_m;
    const double R = geometry.cell_radius_m;
    const double offset = geometry.grid_alignment == GridAlignment::kCellCentered ? 0.5 : 0.0;
    const long long k = static_cast<long long>(std::floor(R / s)) + 2;
    std::vector<Point> out;
    for (long long j = -k; j <= k; ++j) {
        for (long long i = -k; i <= k; ++i) {
            double x = (static_cast<double>(i) + offset) * s;
            double y = (static_cast<double>(j) + offset) * s;
            if (in_disk(x, y, R)) out.push_back({x, y});
        }
    }
    return out;
}

SpacingCalibration calibrate_spacing(const CellGeometry& geometry, int target_count) {
    if (target_count < 1) throw std::invalid_argument("calibrate_spacing: target must be >= 1");
    GridAlignment first = geometry.grid_alignment;
    GridAlignment second = first == GridAlignment::kVertexCentered
                               ? GridAlignment::kCellCentered
                               : GridAlignment::kVertexCentered;
    int nearest_below = 0, nearest_above = 0;
    for (GridAlignment alignment : {first, second}) {
        for (const auto& p : plateaus_for(geometry, alignment, target_count)) {
            if (p.count == target_count) {
                CellGeometry check = geometry;
                check.grid_spacing_m = p.spacing;
                check.grid_alignment = alignment;
                if (static_cast<int>(grid_helpers(check).size()) != target_count) {
                    throw std::logic_error("calibrate_spacing: plateau self-check failed");
                }
                return {p.spacing, alignment};
            }
            if (p.count < target_count) nearest_below = std::max(nearest_below, p.count);
            if (p.count > target_count && (nearest_above == 0 || p.count < nearest_above)) {
                nearest_above = p.count;
            }
        }
    }
    throw std::invalid_argument("calibrate_spacing: no grid alignment yields exactly " +
                                std::to_string(target_count) + " helpers; nearest achievable are " +
                                std::to_string(nearest_below) + " and " +
                                std::to_string(nearest_above));
}

std::vector<Point> sample_users(const CellGeometry& geometry, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_users: n must be >= 1");
    const double R = geometry.cell_radius_m;
    CounterRng rng(seed);
    std::vector<Point> out(n);
    for (int i = 0; i < n; ++i) {
        for (std::uint64_t attempt = 0;; ++attempt) {
            std::uint64_t counter = (static_cast<std::uint64_t>(i) << 24) | (attempt << 1);
            double x = (2.0 * rng.uniform(rng_stream::kUserPosition, counter) - 1.0) * R;
            double y = (2.0 * rng.uniform(rng_stream::kUserPosition, counter | 1) - 1.0) * R;
            if (in_disk(x, y, R)) {
                out[i] = {x, y};
                break;
            }
        }
    }
    return out;
}

std::vector<Point> random_walk(const Scenario& scenario, const MobilityConfig& mobility,
                               std::uint64_t seed) {
    if (mobility.steps < 0 || !(mobility.step_length_m > 0.0)) {
        throw std::invalid_argument("random_walk: bad mobility config");
    }
    const double R = scenario.geometry.cell_radius_m;
    CounterRng rng(seed);
    std::vector<Point> out = scenario.users;
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (int t = 0; t < mobility.steps; ++t) {
            std::uint64_t counter = (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint32_t>(t);
            int dir = static_cast<int>(rng.below(rng_stream::kRandomWalk, counter, 4));
            double dx = dir == 0 ? mobility.step_length_m : dir == 1 ? -mobility.step_length_m : 0.0;
            double dy = dir == 2 ? mobility.step_length_m : dir == 3 ? -mobility.step_length_m : 0.0;
            double nx = out[i].x + dx;
            double ny = out[i].y + dy;
            if (in_disk(nx, ny, R)) {
                out[i].x = nx;
                out[i].y = ny;
            }
            // else: stay for this step
        }
    }
    return out;
}

BuiltInstance build_instance(const Scenario& scenario, const FileLibrary& library,
                             const Popularity& popularity, int cache_size) {
    const int U = static_cast<int>(scenario.users.size());
    const int sites = static_cast<int>(scenario.helpers.size());
    if (U < 1) throw std::invalid_argument("build_instance: scenario has no users");

    const double range = scenario.geometry.helper_range_m;
    std::vector<std::vector<int>> site_users(sites);
    for (int s = 0; s < sites; ++s) {
        for (int u = 0; u < U; ++u) {
            double dx = scenario.helpers[s].x - scenario.users[u].x;
            double dy = scenario.helpers[s].y - scenario.users[u].y;
            if (dx * dx + dy * dy <= range * range) site_users[s].push_back(u);
        }
    }

    const double bs_rate =
        scenario.radio.bs_spectral_eff_bps_hz * scenario.radio.bs_bandwidth_hz / U;
    const double omega0 = 1.0 / bs_rate;

    std::vector<std::string> warnings;
    std::vector<int> helper_site;
    std::vector<double> helper_delay;
    for (int s = 0; s < sites; ++s) {
        if (site_users[s].empty()) continue;  // rate undefined without users
        double rate = scenario.radio.helper_spectral_eff_bps_hz * scenario.radio.helper_bandwidth_hz /
                      static_cast<double>(site_users[s].size());
        double omega = 1.0 / rate;
        if (omega > omega0) {
            // Overloaded helper: serving through it would be slower than the
            // base station, which the delay model forbids. Drop its links.
            warnings.push_back("helper site " + std::to_string(s) + " dropped: per-user delay " +
                               std::to_string(omega) + " exceeds BS delay " + std::to_string(omega0));
            continue;
        }
        helper_site.push_back(s);
        helper_delay.push_back(omega);
    }

    const int H = static_cast<int>(helper_site.size());
    std::vector<std::pair<int, int>> edges;
    for (int h = 1; h <= H; ++h) {
        for (int u : site_users[helper_site[h - 1]]) edges.push_back({h, u});
    }
    ConnectivityGraph graph(H, U, std::move(edges));

    DelayMatrix delays(H, U);
    for (int u = 0; u < U; ++u) delays.at(kBaseStation, u) = omega0;
    delays.omega_infinity = omega_infinity_for(delays);
    for (int h = 1; h <= H; ++h) {
        for (int u = 0; u < U; ++u) {
            delays.at(h, u) = graph.has_edge(h, u) ? helper_delay[h - 1] : delays.omega_infinity;
        }
    }

    BuiltInstance built{
        ProblemInstance(library, popularity, std::move(graph), std::move(delays), cache_size),
        std::move(helper_site), std::move(warnings)};
    return built;
}

double average_download_rate(const ProblemInstance& instance, const UncodedPlacement& x) {
    double total = 0.0;
    for (int u = 0; u < instance.user_count(); ++u) {
        total += 1.0 / uncoded_user_delay(instance, x, u);
    }
    return total / instance.user_count();
}

double average_download_rate(const ProblemInstance& instance, const CodedPlacement& rho) {
    double total = 0.0;
    for (int u = 0; u < instance.user_count(); ++u) {
        total += 1.0 / coded_user_delay(instance, rho, u);
    }
    return total / instance.user_count();
}

double average_download_rate_bs_only(const ProblemInstance& instance) {
    return average_download_rate(instance,
                                 UncodedPlacement(instance.file_count(), instance.helper_count()));
}

UncodedPlacement translate_placement(const UncodedPlacement& x, const BuiltInstance& from,
                                     const BuiltInstance& to) {
    std::map<int, int> site_to_target;  // scenario site -> helper id in `to`
    for (int h = 1; h <= to.instance.helper_count(); ++h) {
        site_to_target[to.helper_site[h - 1]] = h;
    }
    UncodedPlacement out(to.instance.file_count(), to.instance.helper_count());
    for (int h = 1; h <= from.instance.helper_count(); ++h) {
        auto it = site_to_target.find(from.helper_site[h - 1]);
        if (it == site_to_target.end()) continue;  // site lost all users
        for (int f = 0; f < x.file_count(); ++f) {
            if (x.at(f, h)) out.set(f, it->second, true);
        }
    }
    return out;
}

std::string to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::kHelpersSweep: return "helpers_sweep";
        case ExperimentKind::kUsersSweep: return "users_sweep";
        case ExperimentKind::kMobility: return "mobility";
    }
    return "unknown";
}

ExperimentConfig scaled_config(const ExperimentConfig& config, double factor) {
    if (!(factor > 0.0 && factor <= 1.0)) {
        throw std::invalid_argument("scale factor must be in (0, 1]");
    }
    auto shrink = [factor](int v) { return std::max(1, static_cast<int>(std::lround(v * factor))); };
    ExperimentConfig out = config;
    out.file_count = shrink(config.file_count);
    out.cache_size = shrink(config.cache_size);
    out.user_count = shrink(config.user_count);
    for (int& u : out.user_counts) u = shrink(u);
    std::size_t keep = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::lround(config.seeds.size() * factor)));
    out.seeds.resize(std::min(out.seeds.size(), keep));
    return out;
}

namespace {

struct Cell {
    double param;
    std::uint64_t seed;
    std::vector<std::pair<std::string, double>> scheme_rates;
};

void summarize(ExperimentResult& result, const std::string& experiment) {
    std::map<std::pair<double, std::string>, std::vector<double>> groups;
    std::vector<std::pair<double, std::string>> order;
    for (const auto& row : result.rows) {
        auto key = std::make_pair(row.param, row.scheme);
        if (groups.find(key) == groups.end()) order.push_back(key);
        groups[key].push_back(row.avg_rate_bps);
    }
    for (const auto& key : order) {
        const auto& rates = groups[key];
        double mean = 0.0;
        for (double r : rates) mean += r;
        mean /= rates.size();
        double var = 0.0;
        for (double r : rates) var += (r - mean) * (r - mean);
        double stddev = rates.size() > 1 ? std::sqrt(var / (rates.size() - 1)) : 0.0;
        result.summaries.push_back({experiment, key.first, key.second, mean, stddev,
                                    static_cast<int>(rates.size())});
    }
}

}  // namespace

ExperimentResult run_experiment(ExperimentKind kind, const ExperimentConfig& config) {
    const Popularity popularity = zipf_popularity(config.file_count, config.zipf_gamma);
    const FileLibrary library(config.file_count, config.file_size_bits);

    struct CellSpec {
        int helper_target;
        int user_count;
        std::uint64_t seed;
        double param;
    };
    std::vector<CellSpec> specs;
    switch (kind) {
        case ExperimentKind::kHelpersSweep:
        case ExperimentKind::kMobility:
            for (int target : config.helper_counts) {
                for (auto seed : config.seeds) {
                    specs.push_back({target, config.user_count, seed, static_cast<double>(target)});
                }
            }
            break;
        case ExperimentKind::kUsersSweep:
            for (int users : config.user_counts) {
                for (auto seed : config.seeds) {
                    specs.push_back({config.users_sweep_helper_count, users, seed,
                                     static_cast<double>(users)});
                }
            }
            break;
    }

    // Calibrate each distinct helper target once up front.
    std::map<int, SpacingCalibration> calibrations;
    for (const auto& spec : specs) {
        if (!calibrations.count(spec.helper_target)) {
            calibrations[spec.helper_target] = calibrate_spacing(config.geometry, spec.helper_target);
        }
    }

    std::vector<Cell> cells(specs.size());
    parallel_for(static_cast<int>(specs.size()), config.threads, [&](int c) {
        const auto& spec = specs[c];
        CellGeometry geometry = config.geometry;
        const auto& cal = calibrations.at(spec.helper_target);
        geometry.grid_spacing_m = cal.spacing_m;
        geometry.grid_alignment = cal.alignment;

        Scenario scenario;
        scenario.geometry = geometry;
        scenario.radio = config.radio;
        scenario.helpers = grid_helpers(geometry);
        scenario.users = sample_users(geometry, spec.user_count, spec.seed);
        scenario.seed = spec.seed;

        Cell& cell = cells[c];
        cell.param = spec.param;
        cell.seed = spec.seed;

        if (kind == ExperimentKind::kMobility) {
            BuiltInstance before = build_instance(scenario, library, popularity, config.cache_size);
            UncodedPlacement agnostic = greedy_place(before.instance).placement;

            Scenario after_scenario = scenario;
            after_scenario.users = random_walk(scenario, config.mobility, spec.seed);
            BuiltInstance after =
                build_instance(after_scenario, library, popularity, config.cache_size);
            UncodedPlacement adaptive = greedy_place(after.instance).placement;
            UncodedPlacement carried = translate_placement(agnostic, before, after);

            cell.scheme_rates.push_back(
                {"bs_only", average_download_rate_bs_only(after.instance)});
            cell.scheme_rates.push_back(
                {"greedy_agnostic", average_download_rate(after.instance, carried)});
            cell.scheme_rates.push_back(
                {"greedy_adaptive", average_download_rate(after.instance, adaptive)});
        } else {
            BuiltInstance built = build_instance(scenario, library, popularity, config.cache_size);
            cell.scheme_rates.push_back({"bs_only", average_download_rate_bs_only(built.instance)});
            UncodedPlacement greedy = greedy_place(built.instance).placement;
            cell.scheme_rates.push_back({"greedy", average_download_rate(built.instance, greedy)});
            CodedSolveResult coded = solve_coded(built.instance);
            if (coded.status != LpStatus::kOptimal) {
                throw std::runtime_error("run_experiment: coded solve " + to_string(coded.status));
            }
            cell.scheme_rates.push_back(
                {"coded", average_download_rate(built.instance, coded.placement)});
        }
    });

    ExperimentResult result;
    const std::string name = to_string(kind);
    for (const auto& cell : cells) {
        for (const auto& [scheme, rate] : cell.scheme_rates) {
            result.rows.push_back({name, cell.param, cell.seed, scheme, rate});
        }
    }
    summarize(result, name);
    return result;
}

}  // namespace hcache
