#include "m2m/pomdp.hpp"

#include <cmath>
#include <stdexcept>

#include "m2m/errors.hpp"

namespace m2m {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

double RbProcess::transition(RbState from, RbState to) const noexcept {
    if (from == RbState::Idle) return to == RbState::Idle ? p_stay_idle : p_idle_to_busy;
    return to == RbState::Idle ? p_busy_to_idle : p_stay_busy;
}

void RbProcess::validate() const {
    for (double p : {p_stay_idle, p_idle_to_busy, p_busy_to_idle, p_stay_busy})
        if (!is_probability(p)) throw ConfigError("transition", "probabilities must lie in [0, 1]");
    if (std::abs(p_stay_idle + p_idle_to_busy - 1.0) > 1e-9)
        throw ConfigError("p_stay_idle", "p_stay_idle + p_idle_to_busy must equal 1");
    if (std::abs(p_busy_to_idle + p_stay_busy - 1.0) > 1e-9)
        throw ConfigError("p_busy_to_idle", "p_busy_to_idle + p_stay_busy must equal 1");
    if (!(false_obs_sensed >= 0.0 && false_obs_sensed < 1.0))
        throw ConfigError("false_obs_sensed", "must lie in [0, 1)");
    if (!(false_obs_unsensed >= 0.0 && false_obs_unsensed < 1.0))
        throw ConfigError("false_obs_unsensed", "must lie in [0, 1)");
    if (p_busy_to_idle + p_idle_to_busy == 0.0)
        throw ConfigError("transition", "chain never leaves its initial state; stationary split undefined");
}

bool CompositeAction::consistent() const noexcept {
    if (!sense) return access == Access::None && compute == Compute::Local;
    switch (compute) {
        case Compute::Local:
            return true;
        case Compute::Mec:
            return access == Access::Enb;
        case Compute::Coordinator:
            return access == Access::Coordinator;
    }
    return false;
}

Placement CompositeAction::placement() const noexcept {
    switch (compute) {
        case Compute::Mec:
            return Placement::MecServer;
        case Compute::Coordinator:
            return Placement::Coordinator;
        case Compute::Local:
            break;
    }
    return Placement::LocalDevice;
}

AccessMode CompositeAction::access_mode() const noexcept {
    if (!sense) return AccessMode::None;
    return access == Access::None ? AccessMode::SenseOnly : AccessMode::SenseAndTransmit;
}

std::string to_string(const CompositeAction& action) {
    if (!action.sense) return "sleep";
    static constexpr const char* kAccess[] = {"none", "enb", "coordinator"};
    static constexpr const char* kCompute[] = {"local", "mec", "coordinator"};
    return "sense=" + std::to_string(*action.sense + 1) + " access=" + kAccess[static_cast<int>(action.access)] +
           " compute=" + kCompute[static_cast<int>(action.compute)];
}

double predict(double idle, const RbProcess& proc) noexcept {
    return idle * proc.p_stay_idle + (1.0 - idle) * proc.p_busy_to_idle;
}

double observation_prob(const RbProcess& proc, bool sensed, RbState truth, RbState observed) noexcept {
    if (!sensed) return observed == RbState::Idle ? proc.false_obs_unsensed : 1.0 - proc.false_obs_unsensed;
    if (proc.observation_model == ObservationModel::Literal)
        return observed == RbState::Idle ? proc.false_obs_sensed : 1.0 - proc.false_obs_sensed;
    return observed == truth ? 1.0 - proc.false_obs_sensed : proc.false_obs_sensed;
}

double observation_likelihood(double idle, const RbProcess& proc, RbState observed) noexcept {
    const double p = predict(idle, proc);
    return p * observation_prob(proc, true, RbState::Idle, observed) +
           (1.0 - p) * observation_prob(proc, true, RbState::Busy, observed);
}

double sensed_posterior(double idle, const RbProcess& proc, RbState observed) {
    const double p = predict(idle, proc);
    const double idle_mass = p * observation_prob(proc, true, RbState::Idle, observed);
    const double busy_mass = (1.0 - p) * observation_prob(proc, true, RbState::Busy, observed);
    const double evidence = idle_mass + busy_mass;
    if (!(evidence > 0.0)) throw DegenerateUpdate("observation has zero probability under the current belief");
    return idle_mass / evidence;
}

Belief belief_update(const Belief& belief, const CompositeAction& action, const std::optional<Observation>& obs,
                     std::span<const RbProcess> procs) {
    if (procs.size() != belief.rb_count())
        throw std::invalid_argument("belief_update: one RbProcess per RB required");
    if (action.sense.has_value() != obs.has_value() || (obs && obs->rb != *action.sense))
        throw std::invalid_argument("belief_update: observation must be present exactly for the sensed RB");
    if (action.sense && *action.sense >= belief.rb_count())
        throw std::out_of_range("belief_update: sensed RB out of range");

    Belief next;
    next.idle.resize(belief.rb_count());
    for (std::size_t r = 0; r < belief.rb_count(); ++r) {
        if (obs && obs->rb == r)
            next.idle[r] = sensed_posterior(belief.idle[r], procs[r], obs->state);
        else
            next.idle[r] = predict(belief.idle[r], procs[r]);
    }
    return next;
}

std::vector<CompositeAction> enumerate_actions(std::size_t rb_count) {
    std::vector<CompositeAction> actions;
    actions.reserve(1 + kActionsPerRb * rb_count);
    actions.push_back(CompositeAction::sleep());
    for (std::size_t r = 0; r < rb_count; ++r) {
        actions.push_back({r, Access::None, Compute::Local});
        actions.push_back({r, Access::Enb, Compute::Local});
        actions.push_back({r, Access::Enb, Compute::Mec});
        actions.push_back({r, Access::Coordinator, Compute::Local});
        actions.push_back({r, Access::Coordinator, Compute::Coordinator});
    }
    return actions;
}

std::vector<CompositeAction> enumerate_actions(const VirtualNetwork& net) { return enumerate_actions(net.rb_count()); }

std::size_t action_index(const CompositeAction& action, std::size_t rb_count) {
    if (!action.consistent()) throw std::invalid_argument("action_index: inconsistent action");
    if (!action.sense) return 0;
    if (*action.sense >= rb_count) throw std::out_of_range("action_index: RB out of range");
    std::size_t offset = 0;
    if (action.access == Access::Enb) offset = action.compute == Compute::Mec ? 2 : 1;
    if (action.access == Access::Coordinator) offset = action.compute == Compute::Coordinator ? 4 : 3;
    return 1 + *action.sense * kActionsPerRb + offset;
}

}  // namespace m2m
