#pragma once

// Slot-by-slot simulation of one slice: hidden RB chains, noisy sensing,
// per-device policies, contention on shared RBs, and cost bookkeeping.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "m2m/core_model.hpp"
#include "m2m/cost_model.hpp"
#include "m2m/decision_costs.hpp"
#include "m2m/pomdp.hpp"
#include "m2m/rng.hpp"
#include "m2m/solver.hpp"

namespace m2m {

struct SliceParams {
    ComputingTask task;
    CostWeights weights;
    /// Transmitters assumed on an RB the chain reports busy. Each contributes
    /// the median gain of the other slice devices towards the receiver.
    std::size_t cochannel_interferers = 1;
    bool coordinator_backhaul_hop = false;
    /// Also count simulated devices that transmit on the same RB in the same
    /// slot as interferers. Off by default: the busy state of the RB chain
    /// already stands for the other devices' traffic.
    bool contention = false;
};

/// The slice under study: topology, gains, RB chains and pricing inputs.
/// Active devices are the non-coordinator members in id order.
class SliceModel {
public:
    SliceModel(VirtualNetwork network, ChannelGains gains, std::vector<RbProcess> processes, SliceParams params);

    const VirtualNetwork& network() const noexcept { return network_; }
    const ChannelGains& gains() const noexcept { return gains_; }
    const std::vector<RbProcess>& processes() const noexcept { return processes_; }
    const SliceParams& params() const noexcept { return params_; }
    std::size_t rb_count() const noexcept { return processes_.size(); }
    /// Devices that can be simulated, i.e. every non-coordinator member.
    const std::vector<std::size_t>& ue_ids() const noexcept { return ue_; }

    DeviceCostContext cost_context(std::size_t mtc) const;

    /// Rate of device `mtc` on `rb` towards `target`. `contenders` are the
    /// other device indices transmitting on the same RB in the same slot.
    double access_rate(std::size_t mtc, std::size_t rb, Access target, RbState truth,
                       std::span<const std::size_t> contenders) const;

    /// Single-device pricing used by the solver. RB indices are rotated by
    /// rb_view_offset(mtc) so that identical devices prefer different RBs.
    SolverModel solver_model(std::size_t mtc) const;
    std::size_t rb_view_offset(std::size_t mtc) const noexcept { return mtc % rb_count(); }

private:
    Interferer background(std::size_t mtc, std::size_t rb, Access target) const;
    double signal_gain(std::size_t mtc, std::size_t rb, Access target) const;
    double gain_towards(std::size_t device, std::size_t rb, Access target) const;

    VirtualNetwork network_;
    ChannelGains gains_;
    std::vector<RbProcess> processes_;
    SliceParams params_;
    std::vector<std::size_t> ue_;
    double backhaul_bps_ = 0.0;
};

struct FrameConfig {
    std::size_t slots_per_frame = 100;
    std::size_t frames = 1;
    std::uint64_t rng_seed = 1;
    std::size_t mtc_count = 0;
    /// Redraw RB states and reset beliefs at each frame boundary.
    bool reset_each_frame = false;

    void validate() const;
};

struct MtcSlotRecord {
    std::size_t mtc_id = 0;  ///< device id
    CompositeAction action;  ///< physical RB indices
    std::optional<Observation> obs;
    Placement placement = Placement::LocalDevice;
    LinkRates rates;
    SlotCosts costs;
};

struct SlotTrace {
    std::size_t frame = 0;
    std::size_t slot = 0;
    std::vector<RbState> truth;
    std::vector<MtcSlotRecord> records;

    /// Bit r set when RB r is busy.
    std::uint64_t truth_bitmask() const noexcept;
};

struct FrameMetrics {
    std::size_t frame = 0;
    double total_cost = 0.0;
    double mean_cost = 0.0;  ///< per device per slot
    double total_time_s = 0.0;
    double total_energy_j = 0.0;
    double mean_time_s = 0.0;
    double mean_energy_j = 0.0;
    std::vector<double> per_mtc_cost;
};

struct Metrics {
    std::vector<FrameMetrics> frames;
};

/// Next state of every RB. Draws come from (seed, RB index, global slot).
std::vector<RbState> evolve_rb_states(std::span<const RbState> states, std::span<const RbProcess> procs,
                                      std::uint64_t seed, std::uint64_t global_slot);

/// Runs consecutive frames. The RB chains and device beliefs continue across
/// frames unless FrameConfig::reset_each_frame is set.
class SliceSimulator {
public:
    SliceSimulator(const SliceModel& model, std::vector<Policy> policies, FrameConfig config);

    struct FrameResult {
        FrameMetrics metrics;
        std::vector<SlotTrace> trace;
    };

    FrameResult run_frame(bool keep_trace = true);

private:
    void reset_state(std::uint64_t draw);
    CompositeAction decide(std::size_t mtc, std::size_t slot) const;

    const SliceModel* model_;
    std::vector<Policy> policies_;
    FrameConfig config_;
    std::vector<DeviceCostContext> contexts_;
    std::vector<RbState> truth_;
    std::vector<Belief> beliefs_;
    std::uint64_t global_slot_ = 0;
    std::size_t frame_ = 0;
};

struct SimulationResult {
    Metrics metrics;
    std::vector<SlotTrace> trace;
};

/// Runs config.frames frames from a fresh state; deterministic in its inputs.
SimulationResult simulate(const SliceModel& model, const std::vector<Policy>& policies, const FrameConfig& config,
                          bool keep_trace = false);

struct SolveOptions {
    std::size_t horizon = 100;
    double grid_step = 0.01;
    std::optional<SolveMode> mode;
};

/// One policy per active device. POMDP policies are solved per device on its
/// own rates; baselines are shared.
std::vector<Policy> make_policies(const SliceModel& model, PolicyKind kind, std::size_t mtc_count,
                                  const SolveOptions& options, std::uint64_t seed);

enum class SweepAxis { Cycles, Mtcs };

std::string to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(const std::string& name);

struct ResultRow {
    double axis = 0.0;
    std::string policy;
    std::size_t frame = 0;
    double mean_cost = 0.0;
    double total_cost = 0.0;
    double mean_time_s = 0.0;
    double mean_energy_j = 0.0;
};

/// Builds the slice for one axis value, e.g. a new task size or slice size.
using SliceFactory = std::function<SliceModel(double axis_value)>;

/// One row per (axis value, policy, frame) in that nesting order. On the MTC
/// axis the value also sets FrameConfig::mtc_count. POMDP policies are solved
/// again only when a device's pricing differs from one already solved.
std::vector<ResultRow> sweep(const SliceFactory& factory, SweepAxis axis, std::span<const double> grid,
                             std::span<const PolicyKind> policies, const FrameConfig& frame_config,
                             const SolveOptions& options);

/// Trace CSV, one row per (frame, slot, device), header included.
void write_trace_csv(std::ostream& out, std::span<const SlotTrace> trace);

/// Shortest round-trip-safe text for a double, independent of the C locale.
std::string format_number(double value);

}  // namespace m2m
