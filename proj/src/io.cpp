#include "hcache/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace hcache {

using nlohmann::json;

const char* const kToolVersion = "0.1.0";

namespace {

json parse_file(const std::string& path, const char* expected_format) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    if (expected_format && j.value("format", "") != expected_format) {
        throw ConfigError(path + ": expected format '" + std::string(expected_format) + "', got '" +
                          j.value("format", "<missing>") + "'");
    }
    return j;
}

void dump_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << j.dump(2) << "\n";
}

template <typename T>
T require(const json& j, const char* field, const std::string& context) {
    if (!j.contains(field)) throw ConfigError(context + ": missing required field '" + field + "'");
    try {
        return j.at(field).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(context + ": field '" + field + "' has the wrong type");
    }
}

// Delays round-trip exactly: 17 significant digits reproduce any double.
std::string double_to_text(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double text_to_double(const json& j, const char* field, const std::string& context) {
    auto v = require<json>(j, field, context);
    if (v.is_string()) return std::strtod(v.get<std::string>().c_str(), nullptr);
    if (v.is_number()) return v.get<double>();
    throw ConfigError(context + ": field '" + std::string(field) + "' must be a number or string");
}

}  // namespace

void save_instance(const std::string& path, const ProblemInstance& instance) {
    json j;
    j["format"] = "hcache-instance";
    j["version"] = 1;
    j["library"] = {{"file_count", instance.file_count()},
                    {"file_size_bits", instance.library().file_size_bits}};
    j["cache_size"] = instance.cache_size();

    if (instance.popularity().zipf_gamma >= 0.0) {
        j["popularity"] = {{"zipf_gamma", double_to_text(instance.popularity().zipf_gamma)}};
    } else {
        json probs = json::array();
        for (double p : instance.popularity().probs) probs.push_back(double_to_text(p));
        j["popularity"] = {{"probs", probs}};
    }

    j["graph"] = {{"helper_count", instance.helper_count()},
                  {"user_count", instance.user_count()}};
    json edges = json::array();
    for (auto [h, u] : instance.graph().edge_list()) edges.push_back({h, u + 1});
    j["graph"]["edges"] = edges;

    // Sparse (h, u, omega) list: the base-station row plus one entry per
    // edge; everything else defaults to omega_infinity.
    json entries = json::array();
    for (int u = 0; u < instance.user_count(); ++u) {
        entries.push_back({0, u + 1, double_to_text(instance.delays().bs_delay(u))});
    }
    for (auto [h, u] : instance.graph().edge_list()) {
        entries.push_back({h, u + 1, double_to_text(instance.delays().at(h, u))});
    }
    j["delays"] = {{"default", double_to_text(instance.delays().omega_infinity)},
                   {"entries", entries}};
    dump_file(path, j);
}

ProblemInstance load_instance(const std::string& path) {
    json j = parse_file(path, "hcache-instance");
    const std::string ctx = path;

    json lib = require<json>(j, "library", ctx);
    FileLibrary library(require<int>(lib, "file_count", ctx + ".library"),
                        require<long long>(lib, "file_size_bits", ctx + ".library"));

    json pop = require<json>(j, "popularity", ctx);
    Popularity popularity;
    if (pop.contains("zipf_gamma")) {
        popularity = zipf_popularity(library.file_count, text_to_double(pop, "zipf_gamma", ctx));
    } else {
        json probs = require<json>(pop, "probs", ctx + ".popularity");
        std::vector<double> values;
        for (const auto& p : probs) {
            values.push_back(p.is_string() ? std::strtod(p.get<std::string>().c_str(), nullptr)
                                           : p.get<double>());
        }
        popularity = popularity_from_vector(std::move(values));
    }

    json graph_j = require<json>(j, "graph", ctx);
    const int H = require<int>(graph_j, "helper_count", ctx + ".graph");
    const int U = require<int>(graph_j, "user_count", ctx + ".graph");
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : require<json>(graph_j, "edges", ctx + ".graph")) {
        if (!e.is_array() || e.size() != 2) throw ConfigError(ctx + ": malformed edge entry");
        edges.push_back({e[0].get<int>(), e[1].get<int>() - 1});
    }
    ConnectivityGraph graph(H, U, edges);

    json delays_j = require<json>(j, "delays", ctx);
    DelayMatrix delays(H, U);
    delays.omega_infinity = text_to_double(delays_j, "default", ctx + ".delays");
    for (int h = 1; h <= H; ++h) {
        for (int u = 0; u < U; ++u) delays.at(h, u) = delays.omega_infinity;
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& e : require<json>(delays_j, "entries", ctx + ".delays")) {
        if (!e.is_array() || e.size() != 3) throw ConfigError(ctx + ": malformed delay entry");
        int h = e[0].get<int>();
        int u = e[1].get<int>() - 1;
        if (h < 0 || h > H || u < 0 || u >= U) {
            throw ConfigError(ctx + ": delay entry indices out of range");
        }
        if (!seen.insert({h, u}).second) throw ConfigError(ctx + ": duplicate delay entry");
        double w = e[2].is_string() ? std::strtod(e[2].get<std::string>().c_str(), nullptr)
                                    : e[2].get<double>();
        delays.at(h, u) = w;
    }
    for (int u = 0; u < U; ++u) {
        if (!seen.count({0, u})) {
            throw ConfigError(ctx + ": missing base-station delay for user " + std::to_string(u + 1));
        }
    }

    return ProblemInstance(library, std::move(popularity), std::move(graph), std::move(delays),
                           require<int>(j, "cache_size", ctx));
}

namespace {

json point_list(const std::vector<Point>& points) {
    json out = json::array();
    for (const auto& p : points) out.push_back({double_to_text(p.x), double_to_text(p.y)});
    return out;
}

std::vector<Point> parse_points(const json& j, const std::string& ctx) {
    std::vector<Point> out;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2) throw ConfigError(ctx + ": malformed point");
        auto get = [&](const json& v) {
            return v.is_string() ? std::strtod(v.get<std::string>().c_str(), nullptr)
                                 : v.get<double>();
        };
        out.push_back({get(e[0]), get(e[1])});
    }
    return out;
}

}  // namespace

void save_scenario(const std::string& path, const Scenario& scenario) {
    json j;
    j["format"] = "hcache-scenario";
    j["version"] = 1;
    j["geometry"] = {
        {"cell_radius_m", double_to_text(scenario.geometry.cell_radius_m)},
        {"helper_range_m", double_to_text(scenario.geometry.helper_range_m)},
        {"grid_spacing_m", double_to_text(scenario.geometry.grid_spacing_m)},
        {"grid_alignment",
         scenario.geometry.grid_alignment == GridAlignment::kVertexCentered ? "vertex" : "cell"}};
    j["radio"] = {{"bs_bandwidth_hz", double_to_text(scenario.radio.bs_bandwidth_hz)},
                  {"bs_spectral_eff_bps_hz", double_to_text(scenario.radio.bs_spectral_eff_bps_hz)},
                  {"helper_bandwidth_hz", double_to_text(scenario.radio.helper_bandwidth_hz)},
                  {"helper_spectral_eff_bps_hz",
                   double_to_text(scenario.radio.helper_spectral_eff_bps_hz)}};
    j["seed"] = scenario.seed;
    j["helpers"] = point_list(scenario.helpers);
    j["users"] = point_list(scenario.users);
    dump_file(path, j);
}

Scenario load_scenario(const std::string& path) {
    json j = parse_file(path, "hcache-scenario");
    Scenario s;
    json g = require<json>(j, "geometry", path);
    s.geometry.cell_radius_m = text_to_double(g, "cell_radius_m", path);
    s.geometry.helper_range_m = text_to_double(g, "helper_range_m", path);
    s.geometry.grid_spacing_m = text_to_double(g, "grid_spacing_m", path);
    s.geometry.grid_alignment = require<std::string>(g, "grid_alignment", path) == "cell"
                                    ? GridAlignment::kCellCentered
                                    : GridAlignment::kVertexCentered;
    json r = require<json>(j, "radio", path);
    s.radio.bs_bandwidth_hz = text_to_double(r, "bs_bandwidth_hz", path);
    s.radio.bs_spectral_eff_bps_hz = text_to_double(r, "bs_spectral_eff_bps_hz", path);
    s.radio.helper_bandwidth_hz = text_to_double(r, "helper_bandwidth_hz", path);
    s.radio.helper_spectral_eff_bps_hz = text_to_double(r, "helper_spectral_eff_bps_hz", path);
    s.seed = require<std::uint64_t>(j, "seed", path);
    s.helpers = parse_points(require<json>(j, "helpers", path), path);
    s.users = parse_points(require<json>(j, "users", path), path);
    return s;
}

void save_placement(const std::string& path, const UncodedPlacement& x) {
    json j;
    j["format"] = "hcache-placement";
    j["type"] = "uncoded";
    j["file_count"] = x.file_count();
    j["helper_count"] = x.helper_count();
    json entries = json::array();
    for (auto [f, h] : x.entries()) entries.push_back({f + 1, h});
    j["entries"] = entries;
    dump_file(path, j);
}

void save_placement(const std::string& path, const CodedPlacement& rho) {
    json j;
    j["format"] = "hcache-placement";
    j["type"] = "coded";
    j["file_count"] = rho.file_count();
    j["helper_count"] = rho.helper_count();
    json entries = json::array();
    for (int f = 0; f < rho.file_count(); ++f) {
        for (int h = 1; h <= rho.helper_count(); ++h) {
            if (rho.at(f, h) != 0.0) entries.push_back({f + 1, h, double_to_text(rho.at(f, h))});
        }
    }
    j["entries"] = entries;
    dump_file(path, j);
}

AnyPlacement load_placement(const std::string& path) {
    json j = parse_file(path, "hcache-placement");
    const int F = require<int>(j, "file_count", path);
    const int H = require<int>(j, "helper_count", path);
    const std::string type = require<std::string>(j, "type", path);
    if (type == "uncoded") {
        UncodedPlacement x(F, H);
        for (const auto& e : require<json>(j, "entries", path)) {
            x.set(e[0].get<int>() - 1, e[1].get<int>(), true);
        }
        return x;
    }
    if (type == "coded") {
        CodedPlacement rho(F, H);
        for (const auto& e : require<json>(j, "entries", path)) {
            double v = e[2].is_string() ? std::strtod(e[2].get<std::string>().c_str(), nullptr)
                                        : e[2].get<double>();
            rho.set(e[0].get<int>() - 1, e[1].get<int>(), v);
        }
        return rho;
    }
    throw ConfigError(path + ": unknown placement type '" + type + "'");
}

ScenarioFileConfig load_scenario_config(const std::string& path) {
    json j = parse_file(path, nullptr);
    ScenarioFileConfig config;
    ExperimentConfig& e = config.experiment;

    static const std::set<std::string> known = {
        "format", "version", "cell_radius_m", "helper_range_m", "bs_bandwidth_hz",
        "bs_spectral_eff_bps_hz", "helper_bandwidth_hz", "helper_spectral_eff_bps_hz",
        "file_count", "file_size_bits", "cache_size", "zipf_gamma", "user_count",
        "helper_count", "helper_counts", "user_counts", "users_sweep_helper_count",
        "mobility", "seeds", "seed", "threads"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key())) throw ConfigError(path + ": unknown field '" + it.key() + "'");
    }

    auto opt_double = [&](const char* field, double fallback) {
        return j.contains(field) ? text_to_double(j, field, path) : fallback;
    };
    auto opt_int = [&](const char* field, int fallback) {
        if (!j.contains(field)) return fallback;
        if (!j.at(field).is_number_integer()) {
            throw ConfigError(path + ": field '" + std::string(field) + "' must be an integer");
        }
        return j.at(field).get<int>();
    };

    e.geometry.cell_radius_m = opt_double("cell_radius_m", e.geometry.cell_radius_m);
    e.geometry.helper_range_m = opt_double("helper_range_m", e.geometry.helper_range_m);
    e.radio.bs_bandwidth_hz = opt_double("bs_bandwidth_hz", e.radio.bs_bandwidth_hz);
    e.radio.bs_spectral_eff_bps_hz =
        opt_double("bs_spectral_eff_bps_hz", e.radio.bs_spectral_eff_bps_hz);
    e.radio.helper_bandwidth_hz = opt_double("helper_bandwidth_hz", e.radio.helper_bandwidth_hz);
    e.radio.helper_spectral_eff_bps_hz =
        opt_double("helper_spectral_eff_bps_hz", e.radio.helper_spectral_eff_bps_hz);
    e.file_count = opt_int("file_count", e.file_count);
    if (j.contains("file_size_bits")) e.file_size_bits = j.at("file_size_bits").get<long long>();
    e.cache_size = opt_int("cache_size", e.cache_size);
    e.zipf_gamma = opt_double("zipf_gamma", e.zipf_gamma);
    e.user_count = opt_int("user_count", e.user_count);
    e.users_sweep_helper_count = opt_int("users_sweep_helper_count", e.users_sweep_helper_count);
    e.threads = opt_int("threads", e.threads);
    if (j.contains("helper_counts")) {
        e.helper_counts = j.at("helper_counts").get<std::vector<int>>();
        if (e.helper_counts.empty()) throw ConfigError(path + ": helper_counts must be nonempty");
    }
    if (j.contains("user_counts")) {
        e.user_counts = j.at("user_counts").get<std::vector<int>>();
        if (e.user_counts.empty()) throw ConfigError(path + ": user_counts must be nonempty");
    }
    if (j.contains("mobility")) {
        const json& m = j.at("mobility");
        if (m.contains("steps")) e.mobility.steps = m.at("steps").get<int>();
        if (m.contains("step_length_m")) e.mobility.step_length_m = text_to_double(m, "step_length_m", path);
    }
    if (j.contains("seeds")) {
        e.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
        if (e.seeds.empty()) throw ConfigError(path + ": seeds must be nonempty");
    }
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("helper_count")) {
        config.helper_count = opt_int("helper_count", 0);
        config.has_helper_count = true;
    }
    return config;
}

std::string experiment_rows_csv(const std::vector<ExperimentRow>& rows) {
    std::ostringstream out;
    out << "experiment,param,seed,scheme,avg_rate_bps\n";
    for (const auto& r : rows) {
        out << r.experiment << "," << double_to_text(r.param) << "," << r.seed << "," << r.scheme
            << "," << double_to_text(r.avg_rate_bps) << "\n";
    }
    return out.str();
}

std::string experiment_summary_csv(const std::vector<ExperimentSummary>& summaries) {
    std::ostringstream out;
    out << "experiment,param,scheme,mean_avg_rate_bps,stddev_avg_rate_bps,samples\n";
    for (const auto& s : summaries) {
        out << s.experiment << "," << double_to_text(s.param) << "," << s.scheme << ","
            << double_to_text(s.mean_rate_bps) << "," << double_to_text(s.stddev_rate_bps) << ","
            << s.samples << "\n";
    }
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path);
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

void save_manifest(const std::string& path, const RunManifest& manifest) {
    json j;
    j["format"] = "hcache-manifest";
    j["tool_version"] = manifest.tool_version;
    j["command_line"] = manifest.command_line;
    j["config_digest"] = manifest.config_digest;
    j["seeds"] = manifest.seeds;
    json phases = json::array();
    for (const auto& p : manifest.phases) {
        phases.push_back({{"name", p.name}, {"seconds", p.seconds}});
    }
    j["phases"] = phases;
    dump_file(path, j);
}

}  // namespace hcache
