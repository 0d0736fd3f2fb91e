#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "m2m/config.hpp"
#include "m2m/errors.hpp"
#include "m2m/simulator.hpp"

using namespace m2m;

namespace {

RunConfig small_config() {
    RunConfig cfg;
    cfg.mtc_count = 3;
    cfg.slots_per_frame = 20;
    cfg.frames = 2;
    cfg.horizon = 20;
    cfg.grid_step = 0.02;
    return cfg;
}

SliceModel slice_for(const RunConfig& cfg) { return build_slice(cfg, generate_scenario(cfg, cfg.seed)); }

SimulationResult run(const RunConfig& cfg, PolicyKind kind, bool trace = false) {
    const auto model = slice_for(cfg);
    const auto policies = make_policies(model, kind, cfg.mtc_count, cfg.solve_options(), cfg.seed);
    return simulate(model, policies, cfg.frame_config(), trace);
}

std::size_t mtc_index(const SliceModel& model, std::size_t device_id) {
    const auto& ids = model.ue_ids();
    return static_cast<std::size_t>(std::find(ids.begin(), ids.end(), device_id) - ids.begin());
}

}  // namespace

TEST(Simulate, LocalOnlyMatchesClosedForm) {
    const auto cfg = small_config();
    const auto result = run(cfg, PolicyKind::LocalOnly);
    // 2 s of local compute and 1e9 cycles at 2.5e-12 J each.
    const double per_slot = 0.5 * 2.0 + 0.5 * 2.5e-3;
    ASSERT_EQ(result.metrics.frames.size(), 2u);
    for (const auto& f : result.metrics.frames) {
        EXPECT_NEAR(f.mean_cost, per_slot, 1e-12);
        EXPECT_NEAR(f.total_cost, per_slot * 3 * 20, 1e-9);
        EXPECT_NEAR(f.mean_time_s, 2.0, 1e-12);
        EXPECT_NEAR(f.mean_energy_j, 2.5e-3, 1e-15);
    }
}

TEST(Simulate, ZeroDevicesGiveZeroCost) {
    auto cfg = small_config();
    cfg.mtc_count = 0;
    const auto result = run(cfg, PolicyKind::CoordinatorOnly);
    for (const auto& f : result.metrics.frames) {
        EXPECT_EQ(f.total_cost, 0.0);
        EXPECT_EQ(f.mean_cost, 0.0);
    }
}

TEST(Simulate, DeterministicInSeed) {
    const auto cfg = small_config();
    const auto a = run(cfg, PolicyKind::Pomdp, true);
    const auto b = run(cfg, PolicyKind::Pomdp, true);
    std::ostringstream sa, sb;
    write_trace_csv(sa, a.trace);
    write_trace_csv(sb, b.trace);
    EXPECT_EQ(sa.str(), sb.str());
    for (std::size_t f = 0; f < a.metrics.frames.size(); ++f)
        EXPECT_EQ(a.metrics.frames[f].total_cost, b.metrics.frames[f].total_cost);

    auto other = cfg;
    other.seed = 2;
    const auto c = run(other, PolicyKind::Pomdp, true);
    std::ostringstream sc;
    write_trace_csv(sc, c.trace);
    EXPECT_NE(sa.str(), sc.str());
}

TEST(Simulate, FrameTotalsEqualTraceSums) {
    const auto cfg = small_config();
    for (auto kind : {PolicyKind::Pomdp, PolicyKind::CoordinatorOnly, PolicyKind::RandomSense}) {
        const auto result = run(cfg, kind, true);
        for (const auto& f : result.metrics.frames) {
            double cost = 0.0, time = 0.0, energy = 0.0;
            std::size_t records = 0;
            for (const auto& s : result.trace) {
                if (s.frame != f.frame) continue;
                for (const auto& r : s.records) {
                    cost += r.costs.scalar_cost;
                    time += r.costs.exec_time_s;
                    energy += r.costs.energy_j;
                    ++records;
                }
            }
            EXPECT_EQ(records, cfg.mtc_count * cfg.slots_per_frame);
            EXPECT_NEAR(f.total_cost, cost, 1e-9 * cost);
            EXPECT_NEAR(f.total_time_s, time, 1e-9 * time);
            EXPECT_NEAR(f.total_energy_j, energy, 1e-9 * energy + 1e-15);
            EXPECT_NEAR(f.mean_cost, f.total_cost / static_cast<double>(records), 1e-12 * f.mean_cost);
        }
    }
}

TEST(Simulate, TraceCostsMatchIndependentPricing) {
    const auto cfg = small_config();
    const auto model = slice_for(cfg);
    const auto policies = make_policies(model, PolicyKind::RandomSense, cfg.mtc_count, cfg.solve_options(), cfg.seed);
    const auto result = simulate(model, policies, cfg.frame_config(), true);
    std::size_t checked = 0;
    for (const auto& s : result.trace) {
        for (const auto& r : s.records) {
            const std::size_t i = mtc_index(model, r.mtc_id);
            ASSERT_LT(i, cfg.mtc_count);
            const auto expected = evaluate_action(r.action, model.cost_context(i), r.rates);
            EXPECT_DOUBLE_EQ(r.costs.scalar_cost, expected.scalar_cost);
            EXPECT_DOUBLE_EQ(r.costs.exec_time_s, expected.exec_time_s);
            EXPECT_DOUBLE_EQ(r.costs.energy_j, expected.energy_j);
            EXPECT_EQ(r.obs.has_value(), r.action.sense.has_value());
            if (r.action.access != Access::None) {
                const double rate = model.access_rate(i, *r.action.sense, r.action.access, s.truth[*r.action.sense], {});
                const double used = r.action.access == Access::Enb ? r.rates.to_enb_bps : r.rates.to_coordinator_bps;
                EXPECT_DOUBLE_EQ(used, rate);
            }
            ++checked;
        }
    }
    EXPECT_EQ(checked, cfg.mtc_count * cfg.slots_per_frame * cfg.frames);
}

TEST(Simulate, RejectsMismatchedPolicies) {
    const auto cfg = small_config();
    const auto model = slice_for(cfg);
    auto policies = make_policies(model, PolicyKind::Pomdp, cfg.mtc_count, cfg.solve_options(), cfg.seed);
    auto frame = cfg.frame_config();
    frame.slots_per_frame = cfg.horizon + 1;
    EXPECT_THROW(SliceSimulator(model, policies, frame), ConfigError);
    policies.pop_back();
    EXPECT_THROW(SliceSimulator(model, policies, cfg.frame_config()), ConfigError);
    auto too_many = cfg.frame_config();
    too_many.mtc_count = model.ue_ids().size() + 1;
    EXPECT_ANY_THROW(simulate(model, std::vector<Policy>(too_many.mtc_count), too_many));
}

TEST(RbChain, StationaryOccupancy) {
    const RbProcess p;
    const std::vector<RbProcess> procs{p};
    std::vector<RbState> state{RbState::Idle};
    const std::size_t steps = 200000;
    std::size_t busy = 0, from_idle = 0, idle_to_busy = 0;
    for (std::uint64_t t = 0; t < steps; ++t) {
        const auto next = evolve_rb_states(state, procs, 42, t);
        if (state[0] == RbState::Idle) {
            ++from_idle;
            if (next[0] == RbState::Busy) ++idle_to_busy;
        }
        state = next;
        if (state[0] == RbState::Busy) ++busy;
    }
    const double pi_busy = 0.2 / 1.05;
    const double lambda = 1.0 - 0.2 - 0.85;
    const double se = std::sqrt(pi_busy * (1 - pi_busy) / steps * (1 + lambda) / (1 - lambda));
    EXPECT_NEAR(static_cast<double>(busy) / steps, pi_busy, 3 * se);
    EXPECT_NEAR(static_cast<double>(idle_to_busy) / from_idle, 0.2, 0.005);
}

TEST(RbChain, DrawsAreCounterBased) {
    const std::vector<RbProcess> procs(4, RbProcess{});
    const std::vector<RbState> state(4, RbState::Busy);
    EXPECT_EQ(evolve_rb_states(state, procs, 9, 1234), evolve_rb_states(state, procs, 9, 1234));
}

TEST(SliceModel, ContentionOnlyLowersRates) {
    auto cfg = small_config();
    cfg.contention = true;
    const auto model = slice_for(cfg);
    const std::vector<std::size_t> others{1, 2};
    for (std::size_t rb = 0; rb < model.rb_count(); ++rb) {
        for (Access target : {Access::Enb, Access::Coordinator}) {
            for (RbState truth : {RbState::Idle, RbState::Busy}) {
                const double alone = model.access_rate(0, rb, target, truth, {});
                EXPECT_LE(model.access_rate(0, rb, target, truth, others), alone);
            }
            EXPECT_LE(model.access_rate(0, rb, target, RbState::Busy, {}), model.access_rate(0, rb, target, RbState::Idle, {}));
        }
    }
}

TEST(SliceModel, SolverViewIsRotated) {
    const auto model = slice_for(small_config());
    const auto m0 = model.solver_model(0);
    EXPECT_EQ(m0.rb_count(), model.rb_count());
    EXPECT_EQ(model.rb_view_offset(1), 1u);
    EXPECT_EQ(model.rb_view_offset(model.rb_count()), 0u);
}

TEST(Sweep, ShapeAndOrder) {
    auto cfg = small_config();
    cfg.sweep_cycles = {4e8, 1.6e9};
    const auto rows = run_sweep(cfg, SweepAxis::Cycles);
    ASSERT_EQ(rows.size(), 2u * cfg.policies.size() * cfg.frames);
    EXPECT_EQ(rows.front().axis, 4e8);
    EXPECT_EQ(rows.back().axis, 1.6e9);
    EXPECT_EQ(rows.front().policy, "pomdp");
    EXPECT_EQ(rows[1].frame, 1u);
}

TEST(Sweep, CostsGrowWithCycles) {
    auto cfg = small_config();
    cfg.sweep_cycles = {2e8, 8e8, 1.4e9, 2e9};
    cfg.frames = 1;
    const auto rows = run_sweep(cfg, SweepAxis::Cycles);
    for (const auto& policy : {"pomdp", "coordinator_only", "local_only"}) {
        double previous = -1.0;
        for (const auto& r : rows) {
            if (r.policy != policy) continue;
            EXPECT_GT(r.mean_cost, previous) << policy;
            previous = r.mean_cost;
        }
    }
}

TEST(Sweep, PomdpBeatsBaselinesFromMediumTasks) {
    auto cfg = small_config();
    cfg.mtc_count = 5;
    cfg.slots_per_frame = 100;
    cfg.horizon = 100;
    cfg.grid_step = 0.01;
    cfg.frames = 3;
    cfg.sweep_cycles = {1e9, 2e9};
    const auto rows = run_sweep(cfg, SweepAxis::Cycles);
    for (double axis : cfg.sweep_cycles) {
        double mean[3] = {0, 0, 0};
        for (const auto& r : rows) {
            if (r.axis != axis) continue;
            const int idx = r.policy == "pomdp" ? 0 : r.policy == "coordinator_only" ? 1 : 2;
            mean[idx] += r.mean_cost / static_cast<double>(cfg.frames);
        }
        EXPECT_LT(mean[0], mean[1]);
        EXPECT_LT(mean[1], mean[2]);
    }
}

TEST(Sweep, PerDeviceCostDoesNotDropWithMoreDevices) {
    auto cfg = small_config();
    cfg.policies = {PolicyKind::CoordinatorOnly};
    cfg.sweep_mtcs = {5, 15};
    cfg.slots_per_frame = 50;
    cfg.horizon = 50;
    cfg.frames = 1;
    const auto rows = run_sweep(cfg, SweepAxis::Mtcs);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_LE(rows[0].mean_cost, rows[1].mean_cost);
}

TEST(Sweep, RejectsFractionalDeviceCounts) {
    const auto cfg = small_config();
    const std::vector<double> grid{2.5};
    const std::vector<PolicyKind> kinds{PolicyKind::LocalOnly};
    EXPECT_THROW(sweep(make_slice_factory(cfg, SweepAxis::Cycles), SweepAxis::Mtcs, grid, kinds, cfg.frame_config(),
                       cfg.solve_options()),
                 ConfigError);
    EXPECT_THROW(parse_sweep_axis("bandwidth"), ConfigError);
}

TEST(FormatNumber, RoundTripsAndIsShort) {
    EXPECT_EQ(format_number(0.5), "0.5");
    EXPECT_EQ(format_number(1e9), "1e+09");
    EXPECT_EQ(format_number(250), "250");
    EXPECT_EQ(format_number(1.00125), "1.00125");
    for (double x : {0.1, 1.0 / 3.0, 6.0345e-2, 123456789.123}) EXPECT_EQ(std::stod(format_number(x)), x);
}
