#include "m2m/decision_costs.hpp"

#include <limits>
#include <stdexcept>

#include "m2m/errors.hpp"

namespace m2m {

SlotCosts evaluate_action(const CompositeAction& action, const DeviceCostContext& ctx, const LinkRates& rates) {
    if (!action.consistent()) throw std::invalid_argument("evaluate_action: inconsistent action " + to_string(action));

    const Placement placement = action.placement();
    double time = exec_time(placement, ctx.task, ctx.cpus, rates);
    if (placement == Placement::Coordinator && ctx.coordinator_backhaul_hop)
        time += ctx.task.input_bits == 0.0 ? 0.0 : tx_time(ctx.task.input_bits, ctx.backhaul_bps);

    double transmit_s = 0.0;
    if (action.access == Access::Enb) transmit_s = tx_time(ctx.packet_bits, rates.to_enb_bps);
    if (action.access == Access::Coordinator) transmit_s = tx_time(ctx.packet_bits, rates.to_coordinator_bps);

    const double access_j = access_energy(action.access_mode(), ctx.sense_power_w, ctx.tx_power_w,
                                          ctx.weights.sense_time_s, transmit_s);
    const double compute_j = compute_energy(placement, ctx.task, ctx.weights.cycle_energy_j, ctx.tx_power_w, rates);

    SlotCosts costs;
    costs.exec_time_s = time;
    costs.energy_j = total_energy(access_j, compute_j);
    costs.scalar_cost = slot_cost(ctx.weights, costs.exec_time_s, costs.energy_j);
    return costs;
}

ActionCostTable::ActionCostTable(std::size_t rb_count)
    : rb_count_(rb_count), costs_(1 + kActionsPerRb * rb_count, std::array<double, 2>{0.0, 0.0}) {}

double ActionCostTable::expected(std::size_t action, double p_idle) const {
    const auto& c = costs_.at(action);
    if (c[0] == c[1]) return c[0];
    // Keep 0 * inf out of the sum when the belief is certain.
    if (p_idle == 1.0) return c[0];
    if (p_idle == 0.0) return c[1];
    return p_idle * c[0] + (1.0 - p_idle) * c[1];
}

ActionCostTable tabulate_costs(const DeviceCostContext& ctx, std::span<const LinkRates> idle_rates,
                               std::span<const LinkRates> busy_rates) {
    if (idle_rates.size() != busy_rates.size())
        throw std::invalid_argument("tabulate_costs: idle and busy rates must cover the same RBs");
    const std::size_t rbs = idle_rates.size();
    ActionCostTable table(rbs);
    const auto actions = enumerate_actions(rbs);
    for (std::size_t i = 0; i < actions.size(); ++i) {
        for (RbState state : {RbState::Idle, RbState::Busy}) {
            const auto& action = actions[i];
            const LinkRates rates = action.sense ? (state == RbState::Idle ? idle_rates[*action.sense]
                                                                          : busy_rates[*action.sense])
                                                 : LinkRates{};
            double value = std::numeric_limits<double>::infinity();
            try {
                value = evaluate_action(action, ctx, rates).scalar_cost;
            } catch (const InfeasibleSlot&) {
            }
            table.set(i, state, value);
        }
    }
    return table;
}

}  // namespace m2m
