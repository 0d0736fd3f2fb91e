#pragma once

// Topology, channel gains, coordinator election and link rates for a
// virtualized cellular slice serving machine-type devices.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace m2m {

enum class RbState : std::uint8_t { Idle = 0, Busy = 1 };

struct Position {
    double x_m = 0.0;
    double y_m = 0.0;
};

double distance(Position a, Position b) noexcept;

struct MtcDevice {
    std::size_t id = 0;
    Position position;
    double tx_power_w = 0.1;
    double sense_power_w = 0.01;
    double cpu_hz = 0.5e9;
    double packet_bits = 0.0;
};

/// One slice: its devices, elected coordinator and resource-block split.
/// RB indices [0, rb_enb) serve eNodeB access, [rb_enb, rb_enb + rb_coord)
/// serve coordinator access.
struct VirtualNetwork {
    std::size_t id = 0;
    std::vector<MtcDevice> devices;
    std::size_t coordinator = 0;  ///< device id, must be a member
    double coordinator_cpu_hz = 1e9;
    double mec_cpu_hz = 100e9;
    std::size_t rb_enb = 0;
    std::size_t rb_coord = 0;
    std::size_t rb_backhaul = 1;
    double rb_bandwidth_access_hz = 5e6;
    double rb_bandwidth_backhaul_hz = 10e6;
    double noise_access_w = 1e-3;
    double noise_backhaul_w = 1e-3;

    std::size_t rb_count() const noexcept { return rb_enb + rb_coord; }
    const MtcDevice& device(std::size_t device_id) const;
    std::vector<std::size_t> member_ids() const;
    /// Members other than the coordinator, in id order.
    std::vector<std::size_t> ue_ids() const;
    void validate() const;
};

/// Distance power law gain = (max(d, min_distance) / reference_distance)^-exponent.
struct PathlossModel {
    double exponent = 4.0;
    double min_distance_m = 1.0;
    double reference_distance_m = 1.0;

    double gain(double distance_m) const;
    void validate() const;
};

/// Linear channel gains for every device of a scenario.
class ChannelGains {
public:
    ChannelGains() = default;
    ChannelGains(std::size_t devices, std::size_t rb_count, std::size_t backhaul_rb_count);

    std::size_t device_count() const noexcept { return devices_; }
    std::size_t rb_count() const noexcept { return rbs_; }
    std::size_t backhaul_rb_count() const noexcept { return backhaul_rbs_; }

    double device_to_device(std::size_t a, std::size_t b) const { return d2d_.at(a * devices_ + b); }
    double& device_to_device(std::size_t a, std::size_t b) { return d2d_.at(a * devices_ + b); }
    double device_to_enb(std::size_t device, std::size_t rb) const { return d2e_.at(device * rbs_ + rb); }
    double& device_to_enb(std::size_t device, std::size_t rb) { return d2e_.at(device * rbs_ + rb); }
    /// Gain of `device` towards the eNodeB on a dedicated backhaul RB.
    double backhaul(std::size_t device, std::size_t rb) const { return bh_.at(device * backhaul_rbs_ + rb); }
    double& backhaul(std::size_t device, std::size_t rb) { return bh_.at(device * backhaul_rbs_ + rb); }

    bool operator==(const ChannelGains&) const = default;

private:
    std::size_t devices_ = 0;
    std::size_t rbs_ = 0;
    std::size_t backhaul_rbs_ = 0;
    std::vector<double> d2d_;
    std::vector<double> d2e_;
    std::vector<double> bh_;
};

struct Scenario {
    std::size_t inp_count = 3;
    std::size_t total_devices = 50;
    std::vector<VirtualNetwork> networks;
    PathlossModel pathloss;
    double region_radius_m = 1000.0;
    Position enb_position;
    std::vector<Position> positions;  ///< indexed by device id
    ChannelGains gains;
    std::uint64_t rng_seed = 0;

    std::size_t virtual_network_count() const noexcept { return networks.size(); }
    void validate() const;
};

/// Pure function of its inputs. The diagonal of the device-to-device matrix is
/// left at zero; it never enters a coordinator mean.
ChannelGains derive_gains(const PathlossModel& model, std::span<const Position> devices, Position enb,
                          std::size_t rb_count, std::size_t backhaul_rb_count);

/// Member with the largest mean gain to the other members. Ties go to the
/// lowest id; a singleton slice elects its only member.
std::size_t select_coordinator(const ChannelGains& gains, std::span<const std::size_t> members);

struct Interferer {
    double power_w = 0.0;
    double gain = 0.0;
};

/// Shannon rate of an access RB. Interferers only count in the busy state.
double uplink_rate(double bandwidth_hz, double tx_power_w, double gain, std::span<const Interferer> interferers,
                   double noise_w, RbState state);

/// Coordinator to eNodeB rate over a dedicated, interference-free RB.
double backhaul_rate(double bandwidth_hz, double tx_power_w, double gain, double noise_w);

}  // namespace m2m
