#pragma once

// Per-slot execution time and energy for each computing placement, and the
// weighted scalar cost that combines them.

namespace m2m {

struct ComputingTask {
    double input_bits = 0.0;  ///< offloaded data
    double cycles = 0.0;      ///< CPU cycles to finish the task
};

enum class Placement { LocalDevice, Coordinator, MecServer };

struct SlotCosts {
    double exec_time_s = 0.0;
    double energy_j = 0.0;
    double scalar_cost = 0.0;
};

/// Time and energy are in seconds and joules, so the weights carry the
/// normalization between the two.
struct CostWeights {
    double zeta = 0.5;
    double eta = 0.5;
    double sense_time_s = 1e-3;
    double cycle_energy_j = 2.5e-12;

    void validate() const;
};

struct CpuCapabilities {
    double local_hz = 0.5e9;
    double coordinator_hz = 1e9;
    double mec_hz = 100e9;
};

/// Rates of the links a slot can use. Only the one matching the placement is read.
struct LinkRates {
    double to_coordinator_bps = 0.0;
    double to_enb_bps = 0.0;
};

enum class AccessMode { None, SenseOnly, SenseAndTransmit };

/// Energy per cycle with the CPU frequency taken in GHz: 1e-11 * F_GHz^2.
double default_cycle_energy(double cpu_hz) noexcept;

/// Throws InfeasibleSlot when a remote placement has no usable rate.
double exec_time(Placement placement, const ComputingTask& task, const CpuCapabilities& cpus, const LinkRates& rates);

double tx_time(double packet_bits, double rate_bps);

double access_energy(AccessMode mode, double sense_power_w, double tx_power_w, double sense_time_s, double tx_time_s);

double compute_energy(Placement placement, const ComputingTask& task, double cycle_energy_j, double tx_power_w,
                      const LinkRates& rates);

double total_energy(double access_j, double compute_j) noexcept;

double slot_cost(const CostWeights& weights, double exec_time_s, double energy_j) noexcept;

}  // namespace m2m
