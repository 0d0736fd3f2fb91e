#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "m2m/cost_model.hpp"
#include "m2m/pomdp.hpp"

namespace m2m {

/// Everything about one device needed to price a composite action.
struct DeviceCostContext {
    ComputingTask task;
    CpuCapabilities cpus;
    CostWeights weights;
    double tx_power_w = 0.1;
    double sense_power_w = 0.01;
    double packet_bits = 0.0;
    /// Charge the coordinator to eNodeB backhaul leg on coordinator placement.
    bool coordinator_backhaul_hop = false;
    double backhaul_bps = 0.0;
};

/// Time, energy and weighted cost of one slot. Sleep computes locally with no
/// access energy. The packet goes over the link named by the access decision,
/// the task input over the link of the placement. Throws InfeasibleSlot.
SlotCosts evaluate_action(const CompositeAction& action, const DeviceCostContext& ctx, const LinkRates& rates);

/// Immediate cost of every action of enumerate_actions(rb_count), given the
/// true state of the sensed RB.
class ActionCostTable {
public:
    ActionCostTable() = default;
    explicit ActionCostTable(std::size_t rb_count);

    std::size_t rb_count() const noexcept { return rb_count_; }
    std::size_t action_count() const noexcept { return costs_.size(); }

    double cost(std::size_t action, RbState state) const { return costs_.at(action)[static_cast<int>(state)]; }
    void set(std::size_t action, RbState state, double value) { costs_.at(action)[static_cast<int>(state)] = value; }

    /// Cost averaged over the sensed RB being idle with probability `p_idle`.
    double expected(std::size_t action, double p_idle) const;

    bool operator==(const ActionCostTable&) const = default;

private:
    std::size_t rb_count_ = 0;
    std::vector<std::array<double, 2>> costs_;
};

/// Prices every action with the rates each RB offers when idle and when busy.
/// Infeasible entries become +infinity.
ActionCostTable tabulate_costs(const DeviceCostContext& ctx, std::span<const LinkRates> idle_rates,
                               std::span<const LinkRates> busy_rates);

}  // namespace m2m
