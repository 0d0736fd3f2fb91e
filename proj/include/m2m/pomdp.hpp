#pragma once

// Resource-block occupancy as a partially observed process: composite
// actions, per-RB Markov chains, noisy sensing and Bayes belief updates.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "m2m/core_model.hpp"
#include "m2m/cost_model.hpp"

namespace m2m {

/// How sensing outcomes relate to the true RB state.
enum class ObservationModel {
    /// Sensed RB: reported state is flipped with probability false_obs_sensed.
    /// Unsensed RB: reports idle with probability false_obs_unsensed whatever the truth.
    Symmetric,
    /// Both branches state independent: idle is reported with probability
    /// false_obs_sensed (sensed) or false_obs_unsensed (unsensed). Nothing is learned.
    Literal,
};

struct RbProcess {
    double p_stay_idle = 0.8;
    double p_idle_to_busy = 0.2;
    double p_busy_to_idle = 0.85;
    double p_stay_busy = 0.15;
    double false_obs_sensed = 0.1;
    double false_obs_unsensed = 0.1;
    ObservationModel observation_model = ObservationModel::Symmetric;

    /// Long-run probability of the idle state.
    double stationary_idle() const noexcept { return p_busy_to_idle / (p_busy_to_idle + p_idle_to_busy); }
    double transition(RbState from, RbState to) const noexcept;
    void validate() const;
    bool operator==(const RbProcess&) const = default;
};

enum class Access : std::uint8_t { None = 0, Enb = 1, Coordinator = 2 };
enum class Compute : std::uint8_t { Local = 0, Mec = 1, Coordinator = 2 };

struct CompositeAction {
    std::optional<std::size_t> sense;  ///< 0-based RB index, empty = sleep
    Access access = Access::None;
    Compute compute = Compute::Local;

    static CompositeAction sleep() noexcept { return {}; }
    bool is_sleep() const noexcept { return !sense.has_value(); }
    bool consistent() const noexcept;
    Placement placement() const noexcept;
    AccessMode access_mode() const noexcept;

    auto operator<=>(const CompositeAction&) const = default;
};

std::string to_string(const CompositeAction& action);

/// Probability that each RB is idle. Entries are independent marginals.
struct Belief {
    std::vector<double> idle;

    std::size_t rb_count() const noexcept { return idle.size(); }
    bool operator==(const Belief&) const = default;
};

struct Observation {
    std::size_t rb = 0;
    RbState state = RbState::Idle;

    bool operator==(const Observation&) const = default;
};

/// One step of the chain applied to P(idle).
double predict(double idle, const RbProcess& proc) noexcept;

double observation_prob(const RbProcess& proc, bool sensed, RbState truth, RbState observed) noexcept;

/// Posterior P(idle) of a sensed RB after predicting one step and seeing
/// `observed`. Throws DegenerateUpdate when the observation has zero probability.
double sensed_posterior(double idle, const RbProcess& proc, RbState observed);

/// Probability of seeing `observed` on a sensed RB whose prior is `idle`.
double observation_likelihood(double idle, const RbProcess& proc, RbState observed) noexcept;

/// Bayes update of every RB. The observation must name the sensed RB, and
/// must be absent for the sleep action. Unsensed RBs are predicted only.
Belief belief_update(const Belief& belief, const CompositeAction& action, const std::optional<Observation>& obs,
                     std::span<const RbProcess> procs);

/// All consistent actions: sleep first, then for each RB in order:
/// sense only, eNodeB+local, eNodeB+MEC, coordinator+local, coordinator+coordinator.
std::vector<CompositeAction> enumerate_actions(std::size_t rb_count);
std::vector<CompositeAction> enumerate_actions(const VirtualNetwork& net);

/// Position of `action` in enumerate_actions order.
std::size_t action_index(const CompositeAction& action, std::size_t rb_count);

inline constexpr std::size_t kActionsPerRb = 5;

}  // namespace m2m
