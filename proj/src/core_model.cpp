#include "m2m/core_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "m2m/errors.hpp"

namespace m2m {

double distance(Position a, Position b) noexcept { return std::hypot(a.x_m - b.x_m, a.y_m - b.y_m); }

const MtcDevice& VirtualNetwork::device(std::size_t device_id) const {
    auto it = std::find_if(devices.begin(), devices.end(), [&](const MtcDevice& d) { return d.id == device_id; });
    if (it == devices.end())
        throw std::out_of_range("device " + std::to_string(device_id) + " is not in network " + std::to_string(id));
    return *it;
}

std::vector<std::size_t> VirtualNetwork::member_ids() const {
    std::vector<std::size_t> ids;
    ids.reserve(devices.size());
    for (const auto& d : devices) ids.push_back(d.id);
    return ids;
}

std::vector<std::size_t> VirtualNetwork::ue_ids() const {
    std::vector<std::size_t> ids;
    for (const auto& d : devices)
        if (d.id != coordinator) ids.push_back(d.id);
    return ids;
}

void VirtualNetwork::validate() const {
    if (devices.empty()) throw ConfigError("network", "a virtual network needs at least one device");
    if (rb_count() == 0) throw ConfigError("rb_per_network", "a virtual network needs at least one RB");
    if (rb_backhaul == 0) throw ConfigError("rb_backhaul", "must be at least 1");
    bool has_coordinator = false;
    for (const auto& d : devices) {
        if (!(d.tx_power_w > 0)) throw ConfigError("tx_power", "must be positive");
        if (!(d.cpu_hz > 0)) throw ConfigError("cpu_local", "must be positive");
        if (!(d.packet_bits > 0)) throw ConfigError("packet_size", "must be positive");
        has_coordinator = has_coordinator || d.id == coordinator;
    }
    if (!has_coordinator) throw ConfigError("network", "coordinator is not a member of its network");
    if (!(coordinator_cpu_hz > 0)) throw ConfigError("cpu_coordinator", "must be positive");
    if (!(mec_cpu_hz > 0)) throw ConfigError("cpu_mec", "must be positive");
    if (!(rb_bandwidth_access_hz > 0)) throw ConfigError("access_bandwidth", "must be positive");
    if (!(rb_bandwidth_backhaul_hz > 0)) throw ConfigError("backhaul_bandwidth", "must be positive");
    if (!(noise_access_w > 0)) throw ConfigError("noise_power", "must be positive");
    if (!(noise_backhaul_w > 0)) throw ConfigError("backhaul_noise_power", "must be positive");
}

double PathlossModel::gain(double distance_m) const {
    return std::pow(std::max(distance_m, min_distance_m) / reference_distance_m, -exponent);
}

void PathlossModel::validate() const {
    if (!(exponent > 0)) throw ConfigError("pathloss_exponent", "must be positive");
    if (!(min_distance_m > 0)) throw ConfigError("min_distance", "must be positive");
    if (!(reference_distance_m > 0)) throw ConfigError("unit_gain_distance", "must be positive");
}

ChannelGains::ChannelGains(std::size_t devices, std::size_t rb_count, std::size_t backhaul_rb_count)
    : devices_(devices),
      rbs_(rb_count),
      backhaul_rbs_(backhaul_rb_count),
      d2d_(devices * devices, 0.0),
      d2e_(devices * rb_count, 0.0),
      bh_(devices * backhaul_rb_count, 0.0) {}

void Scenario::validate() const {
    if (inp_count == 0) throw ConfigError("inp_count", "must be at least 1");
    if (total_devices == 0) throw ConfigError("total_devices", "must be at least 1");
    if (networks.empty()) throw ConfigError("virtual_networks", "must be at least 1");
    std::size_t members = 0;
    for (const auto& net : networks) {
        net.validate();
        members += net.devices.size();
    }
    if (members > total_devices) throw ConfigError("total_devices", "slices hold more devices than exist");
    pathloss.validate();
}

ChannelGains derive_gains(const PathlossModel& model, std::span<const Position> devices, Position enb,
                          std::size_t rb_count, std::size_t backhaul_rb_count) {
    model.validate();
    const std::size_t n = devices.size();
    ChannelGains gains(n, rb_count, backhaul_rb_count);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            const double g = model.gain(distance(devices[a], devices[b]));
            gains.device_to_device(a, b) = g;
            gains.device_to_device(b, a) = g;
        }
        const double to_enb = model.gain(distance(devices[a], enb));
        for (std::size_t r = 0; r < rb_count; ++r) gains.device_to_enb(a, r) = to_enb;
        for (std::size_t r = 0; r < backhaul_rb_count; ++r) gains.backhaul(a, r) = to_enb;
    }
    return gains;
}

std::size_t select_coordinator(const ChannelGains& gains, std::span<const std::size_t> members) {
    if (members.empty()) throw std::invalid_argument("select_coordinator: empty member set");
    if (members.size() == 1) return members.front();

    std::size_t best = members.front();
    double best_mean = -1.0;
    for (std::size_t x : members) {
        double sum = 0.0;
        for (std::size_t y : members)
            if (y != x) sum += gains.device_to_device(x, y);
        const double mean = sum / static_cast<double>(members.size() - 1);
        if (mean > best_mean || (mean == best_mean && x < best)) {
            best = x;
            best_mean = mean;
        }
    }
    return best;
}

double uplink_rate(double bandwidth_hz, double tx_power_w, double gain, std::span<const Interferer> interferers,
                   double noise_w, RbState state) {
    if (!(bandwidth_hz > 0)) throw std::invalid_argument("uplink_rate: bandwidth must be positive");
    if (!(noise_w > 0)) throw std::invalid_argument("uplink_rate: noise must be positive");
    double denominator = noise_w;
    if (state == RbState::Busy)
        for (const auto& i : interferers) denominator += i.power_w * i.gain;
    return bandwidth_hz * std::log2(1.0 + tx_power_w * gain / denominator);
}

double backhaul_rate(double bandwidth_hz, double tx_power_w, double gain, double noise_w) {
    if (!(bandwidth_hz > 0)) throw std::invalid_argument("backhaul_rate: bandwidth must be positive");
    if (!(noise_w > 0)) throw std::invalid_argument("backhaul_rate: noise must be positive");
    return bandwidth_hz * std::log2(1.0 + tx_power_w * gain / noise_w);
}

}  // namespace m2m
