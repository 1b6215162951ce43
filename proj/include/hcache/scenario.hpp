#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hcache/model.hpp"
#include "hcache/placement_lp.hpp"

namespace hcache {

// Square-grid alignment relative to the cell center: either a grid point sits
// on the center, or the center falls mid-cell. Both are regular grids; some
// helper counts are only reachable by one of them.
enum class GridAlignment { kVertexCentered, kCellCentered };

struct CellGeometry {
    double cell_radius_m = 350.0;
    double helper_range_m = 70.0;
    double grid_spacing_m = 100.0;
    GridAlignment grid_alignment = GridAlignment::kVertexCentered;
};

struct RadioConfig {
    double bs_bandwidth_hz = 20e6;
    double bs_spectral_eff_bps_hz = 3.0;
    double helper_bandwidth_hz = 20e6;
    double helper_spectral_eff_bps_hz = 5.0;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
};

struct MobilityConfig {
    int steps = 800;
    double step_length_m = 2.0;
};

struct Scenario {
    CellGeometry geometry;
    RadioConfig radio;
    std::vector<Point> helpers;
    std::vector<Point> users;
    std::uint64_t seed = 0;
};

// Grid points of the geometry's alignment inside the cell disk, row-major
// bottom-left to top-right. Deterministic.
std::vector<Point> grid_helpers(const CellGeometry& geometry);

struct SpacingCalibration {
    double spacing_m = 0.0;
    GridAlignment alignment = GridAlignment::kVertexCentered;
};

// Spacing whose grid has exactly `target_count` points in the disk. Tries the
// geometry's alignment first, then the other one; throws with the nearest
// achievable counts when neither alignment can hit the target.
SpacingCalibration calibrate_spacing(const CellGeometry& geometry, int target_count);

// n points uniform on the cell disk by rejection from the bounding square;
// counter-based draws keyed by (seed, user, attempt).
std::vector<Point> sample_users(const CellGeometry& geometry, int n, std::uint64_t seed);

// Per-user independent lattice walk: `steps` moves of step_length_m in a
// uniformly random principal direction; moves that would leave the disk are
// skipped (the user stays put for that step).
std::vector<Point> random_walk(const Scenario& scenario, const MobilityConfig& mobility,
                               std::uint64_t seed);

struct BuiltInstance {
    ProblemInstance instance;
    // instance helper h (1..H) -> index into scenario.helpers
    std::vector<int> helper_site;
    std::vector<std::string> warnings;
};

// Compiles geometry into a problem instance: edges within helper range, link
// delays from per-station rate = spectral efficiency x bandwidth / connected
// users. Helper edges slower than the base station are dropped with a
// warning, helpers left without users are removed.
BuiltInstance build_instance(const Scenario& scenario, const FileLibrary& library,
                             const Popularity& popularity, int cache_size);

// Mean over users of 1 / expected per-bit delay.
double average_download_rate(const ProblemInstance& instance, const UncodedPlacement& x);
double average_download_rate(const ProblemInstance& instance, const CodedPlacement& rho);
double average_download_rate_bs_only(const ProblemInstance& instance);

// Re-indexes a placement from one built instance onto another sharing the
// same helper sites (columns for sites absent in `to` are dropped).
UncodedPlacement translate_placement(const UncodedPlacement& x, const BuiltInstance& from,
                                     const BuiltInstance& to);

enum class ExperimentKind { kHelpersSweep, kUsersSweep, kMobility };

std::string to_string(ExperimentKind kind);

struct ExperimentConfig {
    CellGeometry geometry;
    RadioConfig radio;
    int file_count = 1000;
    long long file_size_bits = 8'000'000'000;  // 1 GB video files
    int cache_size = 100;
    double zipf_gamma = 0.56;
    int user_count = 300;
    std::vector<int> helper_counts = {25, 32, 45};
    std::vector<int> user_counts = {300, 450, 600};
    int users_sweep_helper_count = 32;
    MobilityConfig mobility;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    int threads = 0;  // 0 = all cores
};

// Shrinks file count, cache size, user counts and seed count by `factor`
// (minimum 1 each); helper counts are geometric and stay.
ExperimentConfig scaled_config(const ExperimentConfig& config, double factor);

struct ExperimentRow {
    std::string experiment;
    double param = 0.0;
    std::uint64_t seed = 0;
    std::string scheme;
    double avg_rate_bps = 0.0;
};

struct ExperimentSummary {
    std::string experiment;
    double param = 0.0;
    std::string scheme;
    double mean_rate_bps = 0.0;
    double stddev_rate_bps = 0.0;
    int samples = 0;
};

struct ExperimentResult {
    std::vector<ExperimentRow> rows;           // one row per (param, seed, scheme)
    std::vector<ExperimentSummary> summaries;  // mean +- sample stddev over seeds
};

// helpers_sweep / users_sweep: BS-only, greedy and coded average rates per
// swept parameter and seed. mobility: greedy placed on the initial graph
// (agnostic) versus greedy re-placed after the walk (adaptive), both
// evaluated on the post-walk graph. Cells run in parallel and are
// individually deterministic.
ExperimentResult run_experiment(ExperimentKind kind, const ExperimentConfig& config);

}  // namespace hcache
