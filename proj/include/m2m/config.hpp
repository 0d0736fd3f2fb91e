#pragma once

// Run configuration: JSON ingestion with unit strings, scenario generation,
// slice construction and result CSV emission.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "m2m/core_model.hpp"
#include "m2m/pomdp.hpp"
#include "m2m/simulator.hpp"
#include "m2m/solver.hpp"

namespace m2m {

/// Every quantity is stored in base SI units: Hz, W, bits, cycles, s, m.
struct RunConfig {
    // Topology
    std::size_t inp_count = 3;
    std::size_t total_devices = 50;
    std::size_t virtual_networks = 5;
    std::size_t rb_per_network = 5;
    std::size_t rb_enb = 2;  ///< the remaining rb_per_network - rb_enb RBs serve the coordinator
    std::size_t rb_backhaul = 1;
    double region_radius_m = 1000.0;
    double pathloss_exponent = 4.0;
    double min_distance_m = 1.0;
    double unit_gain_distance_m = 1000.0;

    // Radio
    double access_bandwidth_hz = 5e6;
    double backhaul_bandwidth_hz = 10e6;
    double tx_power_w = 0.1;
    double sense_power_w = 0.01;
    double noise_power_w = 1e-3;
    double backhaul_noise_power_w = 1e-3;
    std::size_t cochannel_interferers = 1;
    bool contention = false;

    // Task and computing
    double packet_bits = 2.0 * 8 * 1024 * 1024;
    double task_input_bits = 420.0 * 8 * 1024;
    double task_cycles = 1e9;
    double cpu_local_hz = 0.5e9;
    double cpu_coordinator_hz = 1e9;
    double cpu_mec_hz = 100e9;
    bool coordinator_backhaul_hop = false;

    // RB occupancy and sensing
    double p_stay_idle = 0.8;
    double p_idle_to_busy = 0.2;
    double p_busy_to_idle = 0.85;
    double p_stay_busy = 0.15;
    double false_obs_sensed = 0.1;
    double false_obs_unsensed = 0.1;
    ObservationModel observation_model = ObservationModel::Symmetric;

    // Cost
    double zeta = 0.5;
    double eta = 0.5;
    double sense_time_s = 1e-3;
    /// Joules per local CPU cycle; empty means derived from cpu_local_hz.
    std::optional<double> cycle_energy_j;

    // Simulation
    std::size_t focus_slice = 0;
    std::size_t mtc_count = 5;
    std::size_t slots_per_frame = 100;
    std::size_t frames = 10;
    bool reset_each_frame = false;

    // Solver
    std::size_t horizon = 100;
    double grid_step = 0.01;
    std::optional<SolveMode> solve_mode;  ///< empty picks by RB count

    // Run
    std::uint64_t seed = 1;
    std::string output_dir = ".";
    std::vector<PolicyKind> policies{PolicyKind::Pomdp, PolicyKind::CoordinatorOnly, PolicyKind::LocalOnly};
    std::vector<double> sweep_cycles{2e8, 4e8, 6e8, 8e8, 1e9, 1.2e9, 1.4e9, 1.6e9, 1.8e9, 2e9};
    std::vector<std::size_t> sweep_mtcs{5, 15};

    /// Throws ConfigError naming the first offending key.
    void validate() const;
    bool operator==(const RunConfig&) const = default;

    double effective_cycle_energy() const;
    RbProcess rb_process() const;
    FrameConfig frame_config() const;
    SolveOptions solve_options() const;
    /// Device count of each slice in slice order. The focus slice holds at
    /// least mtc_count + 1 devices so that every active device fits.
    std::vector<std::size_t> slice_sizes() const;
};

/// Missing keys keep their defaults; unknown keys and bad values throw
/// ConfigError. Quantities accept a bare number in base units or a string
/// such as "5 MHz", "100 mW", "20 dBm", "420 KB" (1 KB = 1024 bytes),
/// "1000 Megacycles", "1 ms" or "1 km".
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_text(const std::string& text);
/// Throws IoError when the file cannot be read.
RunConfig load_config(const std::filesystem::path& path);

/// Full document with every key; quantities are written with units.
nlohmann::ordered_json to_json(const RunConfig& config);

/// Converts "<number> <unit>" for the dimension of `key`.
double parse_quantity(const std::string& key, const nlohmann::json& value);

inline constexpr const char* kSeedEnv = "M2M_SEED";
inline constexpr const char* kOutputDirEnv = "M2M_OUTPUT_DIR";

/// Applies M2M_SEED and M2M_OUTPUT_DIR when set.
void apply_env_overrides(RunConfig& config);

/// Uniform positions in the disc around the eNodeB, contiguous device ids per
/// slice, and a coordinator elected in every slice. Pure in (config, seed).
Scenario generate_scenario(const RunConfig& config, std::uint64_t seed);

/// Model of the focus slice of `scenario`.
SliceModel build_slice(const RunConfig& config, const Scenario& scenario);

/// Axis values in base units: cycles, or active device counts.
std::vector<double> sweep_grid(const RunConfig& config, SweepAxis axis);
/// Builds the focus slice for one axis value. The cycles axis keeps one
/// scenario; the MTC axis regenerates it because slice sizes change.
SliceFactory make_slice_factory(const RunConfig& config, SweepAxis axis);

/// Sweep driven entirely by the config.
std::vector<ResultRow> run_sweep(const RunConfig& config, SweepAxis axis);

void write_results(std::ostream& out, std::span<const ResultRow> rows);
/// Throws IoError when the file cannot be written.
void emit_results(std::span<const ResultRow> rows, const std::filesystem::path& path);

}  // namespace m2m
