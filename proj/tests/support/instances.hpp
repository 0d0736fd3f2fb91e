#pragma once

// Small instances shared by unit and acceptance tests, plus direct
// textbook formulas used as independent references.

#include <cmath>
#include <vector>

#include "m2m/decision_costs.hpp"
#include "m2m/pomdp.hpp"
#include "m2m/solver.hpp"

namespace m2m::testing {

inline constexpr double kAlphaBits = 420.0 * 8 * 1024;
inline constexpr double kPacketBits = 2.0 * 8 * 1024 * 1024;
inline constexpr double kCycles = 1e9;

/// Shannon rate written out directly, log base 2 via natural logs.
inline double shannon(double bandwidth, double signal, double interference_plus_noise) {
    return bandwidth * std::log(1.0 + signal / interference_plus_noise) / std::log(2.0);
}

/// Idle and busy rates of a unit-gain device with one unit-gain interferer.
inline double unit_idle_rate() { return shannon(5e6, 0.1, 1e-3); }
inline double unit_busy_rate() { return shannon(5e6, 0.1, 0.1 + 1e-3); }

inline DeviceCostContext default_context(double cycles = kCycles) {
    DeviceCostContext ctx;
    ctx.task = {kAlphaBits, cycles};
    ctx.cpus = {0.5e9, 1e9, 100e9};
    ctx.weights = {0.5, 0.5, 1e-3, 2.5e-12};
    ctx.tx_power_w = 0.1;
    ctx.sense_power_w = 0.01;
    ctx.packet_bits = kPacketBits;
    return ctx;
}

/// Unit gains on every RB, one busy-state interferer, default chain.
inline SolverModel unit_gain_model(std::size_t rbs, double cycles = kCycles, RbProcess proc = {}) {
    const double idle = unit_idle_rate();
    const double busy = unit_busy_rate();
    std::vector<LinkRates> idle_rates(rbs, LinkRates{idle, idle});
    std::vector<LinkRates> busy_rates(rbs, LinkRates{busy, busy});
    SolverModel model;
    model.processes.assign(rbs, proc);
    model.costs = tabulate_costs(default_context(cycles), idle_rates, busy_rates);
    return model;
}

/// One Bayes step for a single RB written as the double sum over (i, j).
inline double direct_posterior(double prior_idle, const RbProcess& p, bool sensed, RbState observed) {
    const double pi[2] = {prior_idle, 1.0 - prior_idle};
    const double trans[2][2] = {{p.p_stay_idle, p.p_idle_to_busy}, {p.p_busy_to_idle, p.p_stay_busy}};
    auto b = [&](int j) {
        if (!sensed) return observed == RbState::Idle ? p.false_obs_unsensed : 1.0 - p.false_obs_unsensed;
        const bool match = (j == 0) == (observed == RbState::Idle);
        return match ? 1.0 - p.false_obs_sensed : p.false_obs_sensed;
    };
    double numerator = 0.0;
    double denominator = 0.0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const double mass = pi[i] * trans[i][j] * b(j);
            denominator += mass;
            if (j == 0) numerator += mass;
        }
    }
    return numerator / denominator;
}

}  // namespace m2m::testing
