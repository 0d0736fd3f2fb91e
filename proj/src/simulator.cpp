#include "m2m/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <future>
#include <mutex>
#include <ostream>
#include <stdexcept>

#include "m2m/errors.hpp"
#include "m2m/summation.hpp"

namespace m2m {

SliceModel::SliceModel(VirtualNetwork network, ChannelGains gains, std::vector<RbProcess> processes,
                       SliceParams params)
    : network_(std::move(network)), gains_(std::move(gains)), processes_(std::move(processes)), params_(params) {
    network_.validate();
    params_.weights.validate();
    if (processes_.size() != network_.rb_count())
        throw ConfigError("rb_per_network", "one RB process per RB of the slice is required");
    for (const auto& p : processes_) p.validate();
    if (!(params_.task.input_bits >= 0) || !(params_.task.cycles > 0))
        throw ConfigError("task_cycles", "task needs positive cycles and nonnegative input");
    for (const auto& d : network_.devices)
        if (d.id >= gains_.device_count()) throw ConfigError("network", "device without channel gains");
    if (gains_.rb_count() < network_.rb_count() || gains_.backhaul_rb_count() < 1)
        throw ConfigError("network", "channel gains do not cover every RB");
    ue_ = network_.ue_ids();

    const auto& coord = network_.device(network_.coordinator);
    backhaul_bps_ = backhaul_rate(network_.rb_bandwidth_backhaul_hz, coord.tx_power_w,
                                  gains_.backhaul(coord.id, 0), network_.noise_backhaul_w);
}

DeviceCostContext SliceModel::cost_context(std::size_t mtc) const {
    const auto& dev = network_.device(ue_.at(mtc));
    DeviceCostContext ctx;
    ctx.task = params_.task;
    ctx.cpus = {dev.cpu_hz, network_.coordinator_cpu_hz, network_.mec_cpu_hz};
    ctx.weights = params_.weights;
    ctx.tx_power_w = dev.tx_power_w;
    ctx.sense_power_w = dev.sense_power_w;
    ctx.packet_bits = dev.packet_bits;
    ctx.coordinator_backhaul_hop = params_.coordinator_backhaul_hop;
    ctx.backhaul_bps = backhaul_bps_;
    return ctx;
}

double SliceModel::gain_towards(std::size_t device, std::size_t rb, Access target) const {
    return target == Access::Enb ? gains_.device_to_enb(device, rb) : gains_.device_to_device(device, network_.coordinator);
}

double SliceModel::signal_gain(std::size_t mtc, std::size_t rb, Access target) const {
    return gain_towards(ue_.at(mtc), rb, target);
}

Interferer SliceModel::background(std::size_t mtc, std::size_t rb, Access target) const {
    const std::size_t self = ue_.at(mtc);
    std::vector<double> others;
    for (std::size_t other : ue_)
        if (other != self) others.push_back(gain_towards(other, rb, target));
    double gain = gain_towards(self, rb, target);
    if (!others.empty()) {
        std::sort(others.begin(), others.end());
        const std::size_t mid = others.size() / 2;
        gain = others.size() % 2 == 1 ? others[mid] : 0.5 * (others[mid - 1] + others[mid]);
    }
    const double power = static_cast<double>(params_.cochannel_interferers) * network_.device(self).tx_power_w;
    return {power, gain};
}

double SliceModel::access_rate(std::size_t mtc, std::size_t rb, Access target, RbState truth,
                               std::span<const std::size_t> contenders) const {
    if (target == Access::None) throw std::invalid_argument("access_rate: no access target");
    if (rb >= rb_count()) throw std::out_of_range("access_rate: RB out of range");
    const auto& dev = network_.device(ue_.at(mtc));

    std::vector<Interferer> interferers;
    interferers.reserve(contenders.size() + 1);
    if (truth == RbState::Busy) interferers.push_back(background(mtc, rb, target));
    for (std::size_t other : contenders) {
        if (other == mtc) continue;
        interferers.push_back({network_.device(ue_.at(other)).tx_power_w, gain_towards(ue_.at(other), rb, target)});
    }
    const RbState state = interferers.empty() ? RbState::Idle : RbState::Busy;
    return uplink_rate(network_.rb_bandwidth_access_hz, dev.tx_power_w, signal_gain(mtc, rb, target), interferers,
                       network_.noise_access_w, state);
}

SolverModel SliceModel::solver_model(std::size_t mtc) const {
    const std::size_t rbs = rb_count();
    const std::size_t offset = rb_view_offset(mtc);
    std::vector<LinkRates> idle(rbs);
    std::vector<LinkRates> busy(rbs);
    SolverModel model;
    for (std::size_t view = 0; view < rbs; ++view) {
        const std::size_t rb = (view + offset) % rbs;
        idle[view] = {access_rate(mtc, rb, Access::Coordinator, RbState::Idle, {}),
                      access_rate(mtc, rb, Access::Enb, RbState::Idle, {})};
        busy[view] = {access_rate(mtc, rb, Access::Coordinator, RbState::Busy, {}),
                      access_rate(mtc, rb, Access::Enb, RbState::Busy, {})};
        model.processes.push_back(processes_[rb]);
    }
    model.costs = tabulate_costs(cost_context(mtc), idle, busy);
    return model;
}

void FrameConfig::validate() const {
    if (slots_per_frame == 0) throw ConfigError("slots_per_frame", "must be at least 1");
    if (frames == 0) throw ConfigError("frames", "must be at least 1");
}

std::uint64_t SlotTrace::truth_bitmask() const noexcept {
    std::uint64_t mask = 0;
    for (std::size_t r = 0; r < truth.size() && r < 64; ++r)
        if (truth[r] == RbState::Busy) mask |= std::uint64_t{1} << r;
    return mask;
}

std::vector<RbState> evolve_rb_states(std::span<const RbState> states, std::span<const RbProcess> procs,
                                      std::uint64_t seed, std::uint64_t global_slot) {
    if (states.size() != procs.size()) throw std::invalid_argument("evolve_rb_states: one process per RB required");
    std::vector<RbState> next(states.size());
    for (std::size_t r = 0; r < states.size(); ++r) {
        const CounterRng rng(seed, StreamDomain::RbTransition, r);
        const double to_idle = procs[r].transition(states[r], RbState::Idle);
        next[r] = rng.uniform(global_slot) < to_idle ? RbState::Idle : RbState::Busy;
    }
    return next;
}

SliceSimulator::SliceSimulator(const SliceModel& model, std::vector<Policy> policies, FrameConfig config)
    : model_(&model), policies_(std::move(policies)), config_(config) {
    config_.validate();
    if (config_.mtc_count > model.ue_ids().size())
        throw ConfigError("mtc_count", "slice has only " + std::to_string(model.ue_ids().size()) + " devices");
    if (policies_.size() != config_.mtc_count) throw ConfigError("policies", "one policy per active device required");
    for (const auto& p : policies_) {
        if (p.rb_count() != model.rb_count()) throw ConfigError("policies", "policy RB count differs from the slice");
        if (p.kind() == PolicyKind::Pomdp && p.horizon() < config_.slots_per_frame)
            throw ConfigError("horizon", "POMDP policy horizon is shorter than the frame");
    }
    for (std::size_t i = 0; i < config_.mtc_count; ++i) contexts_.push_back(model.cost_context(i));
    reset_state(0);
}

void SliceSimulator::reset_state(std::uint64_t draw) {
    const auto& procs = model_->processes();
    truth_.resize(procs.size());
    Belief prior;
    for (std::size_t r = 0; r < procs.size(); ++r) {
        const CounterRng rng(config_.rng_seed, StreamDomain::RbInitial, r);
        truth_[r] = rng.uniform(draw) < procs[r].stationary_idle() ? RbState::Idle : RbState::Busy;
        prior.idle.push_back(procs[r].stationary_idle());
    }
    beliefs_.assign(config_.mtc_count, prior);
}

CompositeAction SliceSimulator::decide(std::size_t mtc, std::size_t slot) const {
    const Policy& policy = policies_[mtc];
    const DecisionContext ctx{slot, global_slot_, mtc};
    if (policy.kind() != PolicyKind::Pomdp) return policy.decide(ctx, beliefs_[mtc]);

    // The device's policy sees RBs in its rotated order.
    const std::size_t rbs = model_->rb_count();
    const std::size_t offset = model_->rb_view_offset(mtc);
    Belief view;
    view.idle.resize(rbs);
    for (std::size_t v = 0; v < rbs; ++v) view.idle[v] = beliefs_[mtc].idle[(v + offset) % rbs];
    CompositeAction action = policy.decide(ctx, view);
    if (action.sense) action.sense = (*action.sense + offset) % rbs;
    return action;
}

SliceSimulator::FrameResult SliceSimulator::run_frame(bool keep_trace) {
    if (config_.reset_each_frame && frame_ > 0) reset_state(frame_);

    const std::size_t mtcs = config_.mtc_count;
    const std::size_t rbs = model_->rb_count();
    const auto& procs = model_->processes();

    FrameResult result;
    result.metrics.frame = frame_;
    result.metrics.per_mtc_cost.assign(mtcs, 0.0);
    CompensatedSum cost_sum, time_sum, energy_sum;
    std::vector<CompensatedSum> per_mtc(mtcs);

    std::vector<CompositeAction> actions(mtcs);
    std::vector<std::vector<std::size_t>> on_rb(rbs);
    for (std::size_t k = 0; k < config_.slots_per_frame; ++k, ++global_slot_) {
        for (std::size_t i = 0; i < mtcs; ++i) actions[i] = decide(i, k);
        truth_ = evolve_rb_states(truth_, procs, config_.rng_seed, global_slot_);

        for (auto& list : on_rb) list.clear();
        for (std::size_t i = 0; i < mtcs; ++i)
            if (model_->params().contention && actions[i].sense && actions[i].access != Access::None)
                on_rb[*actions[i].sense].push_back(i);

        SlotTrace slot;
        if (keep_trace) {
            slot.frame = frame_;
            slot.slot = k;
            slot.truth = truth_;
            slot.records.reserve(mtcs);
        }
        for (std::size_t i = 0; i < mtcs; ++i) {
            const CompositeAction& a = actions[i];
            MtcSlotRecord rec;
            rec.mtc_id = model_->ue_ids()[i];
            rec.action = a;
            rec.placement = a.placement();
            if (a.sense && a.access != Access::None) {
                const std::size_t r = *a.sense;
                const double rate = model_->access_rate(i, r, a.access, truth_[r], on_rb[r]);
                if (a.access == Access::Enb)
                    rec.rates.to_enb_bps = rate;
                else
                    rec.rates.to_coordinator_bps = rate;
            }
            rec.costs = evaluate_action(a, contexts_[i], rec.rates);

            if (a.sense) {
                const std::size_t r = *a.sense;
                const CounterRng rng(config_.rng_seed, StreamDomain::Observation, i);
                const double p_idle = observation_prob(procs[r], true, truth_[r], RbState::Idle);
                rec.obs = Observation{r, rng.uniform(global_slot_) < p_idle ? RbState::Idle : RbState::Busy};
            }
            beliefs_[i] = belief_update(beliefs_[i], a, rec.obs, procs);

            cost_sum += rec.costs.scalar_cost;
            time_sum += rec.costs.exec_time_s;
            energy_sum += rec.costs.energy_j;
            per_mtc[i] += rec.costs.scalar_cost;
            if (keep_trace) slot.records.push_back(std::move(rec));
        }
        if (keep_trace) result.trace.push_back(std::move(slot));
    }

    auto& m = result.metrics;
    m.total_cost = cost_sum.value();
    m.total_time_s = time_sum.value();
    m.total_energy_j = energy_sum.value();
    const double samples = static_cast<double>(mtcs * config_.slots_per_frame);
    if (mtcs > 0) {
        m.mean_cost = m.total_cost / samples;
        m.mean_time_s = m.total_time_s / samples;
        m.mean_energy_j = m.total_energy_j / samples;
    }
    for (std::size_t i = 0; i < mtcs; ++i) m.per_mtc_cost[i] = per_mtc[i].value();
    ++frame_;
    return result;
}

SimulationResult simulate(const SliceModel& model, const std::vector<Policy>& policies, const FrameConfig& config,
                          bool keep_trace) {
    SliceSimulator sim(model, policies, config);
    SimulationResult out;
    for (std::size_t f = 0; f < config.frames; ++f) {
        auto frame = sim.run_frame(keep_trace);
        out.metrics.frames.push_back(std::move(frame.metrics));
        for (auto& s : frame.trace) out.trace.push_back(std::move(s));
    }
    return out;
}

namespace {

struct PolicyCache {
    std::mutex mutex;
    std::vector<std::pair<SolverModel, Policy>> entries;
};

Policy solve_cached(const SolverModel& model, const SolveOptions& options, PolicyCache* cache) {
    if (cache) {
        std::lock_guard lock(cache->mutex);
        for (const auto& [m, p] : cache->entries)
            if (m == model) return p;
    }
    const SolveMode mode = options.mode.value_or(default_solve_mode(model.rb_count()));
    Policy policy = value_iteration(model, options.horizon, options.grid_step, mode).first;
    if (cache) {
        std::lock_guard lock(cache->mutex);
        cache->entries.emplace_back(model, policy);
    }
    return policy;
}

std::vector<Policy> make_policies_impl(const SliceModel& model, PolicyKind kind, std::size_t mtc_count,
                                       const SolveOptions& options, std::uint64_t seed, PolicyCache* cache) {
    std::vector<Policy> out;
    out.reserve(mtc_count);
    if (kind != PolicyKind::Pomdp) {
        const Policy shared = baseline_policy(kind, model.network().rb_enb, model.network().rb_coord, seed);
        out.assign(mtc_count, shared);
        return out;
    }
    for (std::size_t i = 0; i < mtc_count; ++i) out.push_back(solve_cached(model.solver_model(i), options, cache));
    return out;
}

}  // namespace

std::vector<Policy> make_policies(const SliceModel& model, PolicyKind kind, std::size_t mtc_count,
                                  const SolveOptions& options, std::uint64_t seed) {
    PolicyCache cache;
    return make_policies_impl(model, kind, mtc_count, options, seed, &cache);
}

std::string to_string(SweepAxis axis) { return axis == SweepAxis::Cycles ? "cycles" : "mtcs"; }

SweepAxis parse_sweep_axis(const std::string& name) {
    if (name == "cycles") return SweepAxis::Cycles;
    if (name == "mtcs") return SweepAxis::Mtcs;
    throw ConfigError("axis", "expected 'cycles' or 'mtcs', got '" + name + "'");
}

std::vector<ResultRow> sweep(const SliceFactory& factory, SweepAxis axis, std::span<const double> grid,
                             std::span<const PolicyKind> policies, const FrameConfig& frame_config,
                             const SolveOptions& options) {
    if (grid.empty()) throw ConfigError("sweep", "axis grid is empty");
    PolicyCache cache;

    auto run_point = [&](double value) {
        FrameConfig cfg = frame_config;
        if (axis == SweepAxis::Mtcs) {
            if (value < 0 || value != static_cast<double>(static_cast<std::size_t>(value)))
                throw ConfigError("sweep_mtcs", "device counts must be nonnegative integers");
            cfg.mtc_count = static_cast<std::size_t>(value);
        }
        const SliceModel slice = factory(value);
        std::vector<ResultRow> rows;
        for (PolicyKind kind : policies) {
            const auto assigned = make_policies_impl(slice, kind, cfg.mtc_count, options, cfg.rng_seed, &cache);
            const auto result = simulate(slice, assigned, cfg);
            for (const auto& f : result.metrics.frames)
                rows.push_back({value, to_string(kind), f.frame, f.mean_cost, f.total_cost, f.mean_time_s,
                                f.mean_energy_j});
        }
        return rows;
    };

    std::vector<std::future<std::vector<ResultRow>>> pending;
    pending.reserve(grid.size());
    for (double value : grid) pending.push_back(std::async(std::launch::async, run_point, value));

    std::vector<ResultRow> rows;
    for (auto& f : pending) {
        auto part = f.get();
        rows.insert(rows.end(), part.begin(), part.end());
    }
    return rows;
}

std::string format_number(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

void write_trace_csv(std::ostream& out, std::span<const SlotTrace> trace) {
    out << "frame,slot,mtc_id,action_sense,action_access,action_compute,obs,rb_truth_bitmask,exec_time_s,energy_j,cost\n";
    for (const auto& slot : trace) {
        const auto mask = slot.truth_bitmask();
        for (const auto& rec : slot.records) {
            const auto sense = rec.action.sense ? *rec.action.sense + 1 : 0;
            const int obs = rec.obs ? static_cast<int>(rec.obs->state) : -1;
            out << std::to_string(slot.frame) << ',' << std::to_string(slot.slot) << ',' << std::to_string(rec.mtc_id)
                << ',' << std::to_string(sense) << ',' << std::to_string(static_cast<int>(rec.action.access)) << ','
                << std::to_string(static_cast<int>(rec.action.compute)) << ',' << std::to_string(obs) << ','
                << std::to_string(mask) << ',' << format_number(rec.costs.exec_time_s) << ','
                << format_number(rec.costs.energy_j) << ',' << format_number(rec.costs.scalar_cost) << '\n';
        }
    }
}

}  // namespace m2m
