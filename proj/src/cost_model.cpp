#include "m2m/cost_model.hpp"

#include <cmath>
#include <stdexcept>

#include "m2m/errors.hpp"

namespace m2m {

namespace {

double offload_time(double bits, double rate_bps, const char* link) {
    if (bits == 0.0) return 0.0;
    if (!(rate_bps > 0)) throw InfeasibleSlot(std::string("zero rate on the ") + link + " link");
    return bits / rate_bps;
}

}  // namespace

void CostWeights::validate() const {
    if (zeta < 0 || zeta > 1) throw ConfigError("zeta", "must lie in [0, 1]");
    if (eta < 0 || eta > 1) throw ConfigError("eta", "must lie in [0, 1]");
    if (std::abs(zeta + eta - 1.0) > 1e-9) throw ConfigError("zeta", "zeta + eta must equal 1");
    if (!(sense_time_s >= 0)) throw ConfigError("sense_time", "must be nonnegative");
    if (!(cycle_energy_j >= 0)) throw ConfigError("cycle_energy", "must be nonnegative");
}

double default_cycle_energy(double cpu_hz) noexcept {
    const double ghz = cpu_hz * 1e-9;
    return 1e-11 * ghz * ghz;
}

double exec_time(Placement placement, const ComputingTask& task, const CpuCapabilities& cpus, const LinkRates& rates) {
    switch (placement) {
        case Placement::LocalDevice:
            return task.cycles / cpus.local_hz;
        case Placement::Coordinator:
            return offload_time(task.input_bits, rates.to_coordinator_bps, "coordinator") +
                   task.cycles / cpus.coordinator_hz;
        case Placement::MecServer:
            return offload_time(task.input_bits, rates.to_enb_bps, "eNodeB") + task.cycles / cpus.mec_hz;
    }
    throw std::logic_error("unknown placement");
}

double tx_time(double packet_bits, double rate_bps) { return offload_time(packet_bits, rate_bps, "access"); }

double access_energy(AccessMode mode, double sense_power_w, double tx_power_w, double sense_time_s, double tx_time_s) {
    switch (mode) {
        case AccessMode::None:
            return 0.0;
        case AccessMode::SenseOnly:
            return sense_power_w * sense_time_s;
        case AccessMode::SenseAndTransmit:
            return tx_power_w * tx_time_s + sense_power_w * sense_time_s;
    }
    throw std::logic_error("unknown access mode");
}

double compute_energy(Placement placement, const ComputingTask& task, double cycle_energy_j, double tx_power_w,
                      const LinkRates& rates) {
    switch (placement) {
        case Placement::LocalDevice:
            return cycle_energy_j * task.cycles;
        case Placement::Coordinator:
            return tx_power_w * offload_time(task.input_bits, rates.to_coordinator_bps, "coordinator");
        case Placement::MecServer:
            return tx_power_w * offload_time(task.input_bits, rates.to_enb_bps, "eNodeB");
    }
    throw std::logic_error("unknown placement");
}

double total_energy(double access_j, double compute_j) noexcept { return access_j + compute_j; }

double slot_cost(const CostWeights& weights, double exec_time_s, double energy_j) noexcept {
    return weights.zeta * exec_time_s + weights.eta * energy_j;
}

}  // namespace m2m
