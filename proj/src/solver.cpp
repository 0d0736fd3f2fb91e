#include "m2m/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "m2m/errors.hpp"
#include "m2m/rng.hpp"
#include "m2m/summation.hpp"

namespace m2m {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxExactNodes = 4'000'000;

std::size_t ipow(std::size_t base, std::size_t exp) {
    std::size_t out = 1;
    for (std::size_t i = 0; i < exp; ++i) {
        if (base != 0 && out > std::numeric_limits<std::size_t>::max() / base) return std::numeric_limits<std::size_t>::max();
        out *= base;
    }
    return out;
}

nlohmann::json number_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

double number_from(const nlohmann::json& j) { return j.is_null() ? kInf : j.get<double>(); }

nlohmann::json process_to_json(const RbProcess& p) {
    return {{"p_stay_idle", p.p_stay_idle},
            {"p_idle_to_busy", p.p_idle_to_busy},
            {"p_busy_to_idle", p.p_busy_to_idle},
            {"p_stay_busy", p.p_stay_busy},
            {"false_obs_sensed", p.false_obs_sensed},
            {"false_obs_unsensed", p.false_obs_unsensed},
            {"observation_model", p.observation_model == ObservationModel::Symmetric ? "symmetric" : "literal"}};
}

RbProcess process_from_json(const nlohmann::json& j) {
    RbProcess p;
    p.p_stay_idle = j.at("p_stay_idle").get<double>();
    p.p_idle_to_busy = j.at("p_idle_to_busy").get<double>();
    p.p_busy_to_idle = j.at("p_busy_to_idle").get<double>();
    p.p_stay_busy = j.at("p_stay_busy").get<double>();
    p.false_obs_sensed = j.at("false_obs_sensed").get<double>();
    p.false_obs_unsensed = j.at("false_obs_unsensed").get<double>();
    const auto model = j.at("observation_model").get<std::string>();
    if (model == "symmetric")
        p.observation_model = ObservationModel::Symmetric;
    else if (model == "literal")
        p.observation_model = ObservationModel::Literal;
    else
        throw ConfigError("observation_model", "unknown model '" + model + "'");
    return p;
}

/// Splits [0, n) over the available hardware threads. Each index is written
/// by exactly one worker, so results do not depend on the thread count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers = std::min<std::size_t>(std::max(1u, std::thread::hardware_concurrency()), n / 256 + 1);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w * n / workers; i < (w + 1) * n / workers; ++i) fn(i);
        });
    }
}

}  // namespace

void SolverModel::validate() const {
    if (processes.empty()) throw ConfigError("rb_per_network", "solver needs at least one RB");
    if (costs.rb_count() != processes.size())
        throw ConfigError("costs", "cost table and RB processes disagree on the RB count");
    for (const auto& p : processes) p.validate();
}

BeliefGrid::BeliefGrid(double step) : step_(step) {
    if (!(step > 0.0 && step <= 0.5)) throw ConfigError("grid_step", "must lie in (0, 0.5]");
    points_ = static_cast<std::size_t>(std::ceil(1.0 / step - 1e-9)) + 1;
}

double BeliefGrid::point(std::size_t i) const noexcept {
    return i + 1 >= points_ ? 1.0 : static_cast<double>(i) * step_;
}

std::pair<std::size_t, double> BeliefGrid::locate(double x) const noexcept {
    x = std::clamp(x, 0.0, 1.0);
    const auto cell = std::min(static_cast<std::size_t>(x / step_), points_ - 2);
    const double lo = point(cell);
    const double hi = point(cell + 1);
    return {cell, std::clamp((x - lo) / (hi - lo), 0.0, 1.0)};
}

std::string to_string(SolveMode mode) { return mode == SolveMode::Exact ? "exact" : "factored"; }

ValueFunction::ValueFunction(SolveMode mode, std::size_t horizon, BeliefGrid grid, std::vector<RbProcess> processes)
    : mode_(mode), horizon_(horizon), grid_(grid), processes_(std::move(processes)) {
    const std::size_t rbs = processes_.size();
    nodes_ = mode == SolveMode::Exact ? ipow(grid_.size(), rbs) : rbs * grid_.size();
    if (mode == SolveMode::Exact && nodes_ > kMaxExactNodes)
        throw ConfigError("grid_step", "exact belief grid too large; use the factored mode or a coarser step");
    values_.assign((horizon_ + 1) * nodes_, 0.0);
}

Belief ValueFunction::node_belief(std::size_t node) const {
    Belief b;
    const std::size_t n = grid_.size();
    if (mode_ == SolveMode::Exact) {
        b.idle.resize(processes_.size());
        for (std::size_t r = 0; r < processes_.size(); ++r) {
            b.idle[r] = grid_.point(node % n);
            node /= n;
        }
        return b;
    }
    for (const auto& p : processes_) b.idle.push_back(p.stationary_idle());
    b.idle.at(node / n) = grid_.point(node % n);
    return b;
}

double ValueFunction::axis_value(std::size_t k, std::size_t rb, double x) const {
    const auto [cell, w] = grid_.locate(x);
    const std::size_t base = k * nodes_ + rb * grid_.size() + cell;
    if (w == 0.0) return values_[base];
    if (w == 1.0) return values_[base + 1];
    return (1.0 - w) * values_[base] + w * values_[base + 1];
}

double ValueFunction::at(std::size_t k, const Belief& belief) const {
    if (k > horizon_) throw std::out_of_range("ValueFunction::at: slot beyond horizon");
    if (belief.rb_count() != processes_.size()) throw std::invalid_argument("ValueFunction::at: RB count mismatch");
    if (k == horizon_) return 0.0;

    if (mode_ == SolveMode::Factored) {
        double best = kInf;
        for (std::size_t r = 0; r < processes_.size(); ++r) best = std::min(best, axis_value(k, r, belief.idle[r]));
        return best;
    }

    const std::size_t rbs = processes_.size();
    const std::size_t n = grid_.size();
    std::vector<std::size_t> cell(rbs);
    std::vector<double> weight(rbs);
    for (std::size_t r = 0; r < rbs; ++r) std::tie(cell[r], weight[r]) = grid_.locate(belief.idle[r]);

    double total = 0.0;
    for (std::size_t corner = 0; corner < (std::size_t{1} << rbs); ++corner) {
        double w = 1.0;
        std::size_t node = 0;
        std::size_t stride = 1;
        for (std::size_t r = 0; r < rbs; ++r) {
            const bool upper = (corner >> r) & 1u;
            w *= upper ? weight[r] : 1.0 - weight[r];
            node += (cell[r] + (upper ? 1 : 0)) * stride;
            stride *= n;
        }
        if (w != 0.0) total += w * values_[k * nodes_ + node];
    }
    return total;
}

std::string to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::Pomdp:
            return "pomdp";
        case PolicyKind::LocalOnly:
            return "local_only";
        case PolicyKind::CoordinatorOnly:
            return "coordinator_only";
        case PolicyKind::MecAlways:
            return "mec_always";
        case PolicyKind::RandomSense:
            return "random_sense";
    }
    throw std::logic_error("unknown policy kind");
}

PolicyKind parse_policy_kind(const std::string& name) {
    for (auto kind : {PolicyKind::Pomdp, PolicyKind::LocalOnly, PolicyKind::CoordinatorOnly, PolicyKind::MecAlways,
                      PolicyKind::RandomSense})
        if (to_string(kind) == name) return kind;
    throw ConfigError("policies", "unknown policy '" + name + "'");
}

double Policy::action_value(std::size_t k, const Belief& belief, std::size_t action) const {
    if (!model_ || !value_) throw std::logic_error("action_value needs a solved POMDP policy");
    const auto& procs = model_->processes;
    Belief next;
    next.idle.resize(belief.rb_count());
    for (std::size_t r = 0; r < belief.rb_count(); ++r) next.idle[r] = predict(belief.idle[r], procs[r]);

    if (action == 0) return model_->costs.expected(0, 1.0) + value_->at(k + 1, next);

    const std::size_t rb = (action - 1) / kActionsPerRb;
    double total = model_->costs.expected(action, next.idle[rb]);
    for (RbState obs : {RbState::Idle, RbState::Busy}) {
        const double likelihood = observation_likelihood(belief.idle[rb], procs[rb], obs);
        if (likelihood <= 0.0) continue;
        next.idle[rb] = sensed_posterior(belief.idle[rb], procs[rb], obs);
        total += likelihood * value_->at(k + 1, next);
    }
    return total;
}

std::pair<std::size_t, double> Policy::argmin(std::size_t k, const Belief& belief) const {
    const auto& procs = model_->processes;
    const auto& costs = model_->costs;
    const std::size_t rbs = belief.rb_count();

    Belief predicted;
    predicted.idle.resize(rbs);
    for (std::size_t r = 0; r < rbs; ++r) predicted.idle[r] = predict(belief.idle[r], procs[r]);

    std::size_t best = 0;
    double best_value = costs.expected(0, 1.0) + value_->at(k + 1, predicted);
    Belief next = predicted;
    for (std::size_t r = 0; r < rbs; ++r) {
        // Every action sensing r shares the same observation branches.
        double continuation = 0.0;
        for (RbState obs : {RbState::Idle, RbState::Busy}) {
            const double likelihood = observation_likelihood(belief.idle[r], procs[r], obs);
            if (likelihood <= 0.0) continue;
            next.idle[r] = sensed_posterior(belief.idle[r], procs[r], obs);
            continuation += likelihood * value_->at(k + 1, next);
        }
        next.idle[r] = predicted.idle[r];
        for (std::size_t j = 0; j < kActionsPerRb; ++j) {
            const std::size_t a = 1 + r * kActionsPerRb + j;
            const double v = costs.expected(a, predicted.idle[r]) + continuation;
            if (v < best_value) {
                best_value = v;
                best = a;
            }
        }
    }
    return {best, best_value};
}

double Policy::value(std::size_t k, const Belief& belief) const {
    if (!value_) throw std::logic_error("value needs a solved POMDP policy");
    if (k >= value_->horizon()) return 0.0;
    return argmin(k, belief).second;
}

CompositeAction Policy::decide(const DecisionContext& ctx, const Belief& belief) const {
    switch (kind_) {
        case PolicyKind::LocalOnly:
            return CompositeAction::sleep();
        case PolicyKind::CoordinatorOnly:
            return {rb_enb_ + (ctx.global_slot + ctx.mtc) % rb_coord_, Access::Coordinator, Compute::Coordinator};
        case PolicyKind::MecAlways:
            return {(ctx.global_slot + ctx.mtc) % rb_enb_, Access::Enb, Compute::Mec};
        case PolicyKind::RandomSense: {
            const auto actions = enumerate_actions(rb_count_);
            const CounterRng rng(seed_, StreamDomain::PolicyChoice, ctx.mtc);
            const auto pick = static_cast<std::size_t>(rng.uniform(ctx.global_slot) * static_cast<double>(actions.size()));
            return actions[std::min(pick, actions.size() - 1)];
        }
        case PolicyKind::Pomdp:
            break;
    }
    if (ctx.slot >= horizon()) throw ConfigError("horizon", "slot index beyond the policy horizon");
    if (belief.rb_count() != rb_count_) throw std::invalid_argument("decide: belief has the wrong RB count");
    return enumerate_actions(rb_count_)[argmin(ctx.slot, belief).first];
}

SolveMode default_solve_mode(std::size_t rb_count) noexcept {
    return rb_count <= 2 ? SolveMode::Exact : SolveMode::Factored;
}

std::pair<Policy, ValueFunction> value_iteration(const SolverModel& model, std::size_t horizon, double grid_step) {
    return value_iteration(model, horizon, grid_step, default_solve_mode(model.rb_count()));
}

std::pair<Policy, ValueFunction> value_iteration(const SolverModel& model, std::size_t horizon, double grid_step,
                                                 SolveMode mode) {
    model.validate();
    if (horizon == 0) throw ConfigError("horizon", "must be at least 1");
    const BeliefGrid grid(grid_step);

    auto values = std::make_shared<ValueFunction>(mode, horizon, grid, model.processes);
    Policy policy;
    policy.kind_ = PolicyKind::Pomdp;
    policy.rb_count_ = model.rb_count();
    policy.model_ = std::make_shared<const SolverModel>(model);
    policy.value_ = values;

    const std::size_t nodes = values->nodes_per_layer();
    policy.table_.assign(horizon * nodes, 0);
    for (std::size_t k = horizon; k-- > 0;) {
        // Layer k + 1 is complete and read-only while layer k is filled.
        parallel_for(nodes, [&](std::size_t node) {
            const Belief b = values->node_belief(node);
            const auto [a, v] = policy.argmin(k, b);
            policy.table_[k * nodes + node] = static_cast<std::uint16_t>(a);
            values->node_value(k, node) = v;
        });
    }
    return {policy, *values};
}

Policy baseline_policy(PolicyKind kind, std::size_t rb_enb, std::size_t rb_coord, std::uint64_t seed) {
    if (kind == PolicyKind::Pomdp) throw std::invalid_argument("baseline_policy: POMDP policies come from value_iteration");
    if (kind == PolicyKind::CoordinatorOnly && rb_coord == 0)
        throw ConfigError("rb_enb", "coordinator_only needs at least one coordinator RB");
    if (kind == PolicyKind::MecAlways && rb_enb == 0)
        throw ConfigError("rb_enb", "mec_always needs at least one eNodeB RB");
    Policy p;
    p.kind_ = kind;
    p.rb_enb_ = rb_enb;
    p.rb_coord_ = rb_coord;
    p.rb_count_ = rb_enb + rb_coord;
    p.seed_ = seed;
    return p;
}

nlohmann::json Policy::to_json() const {
    nlohmann::json doc = {{"format", "m2m-policy"},
                          {"version", 1},
                          {"kind", to_string(kind_)},
                          {"rb_count", rb_count_},
                          {"rb_enb", rb_enb_},
                          {"rb_coord", rb_coord_},
                          {"seed", seed_}};
    if (kind_ != PolicyKind::Pomdp) return doc;

    doc["mode"] = to_string(value_->mode());
    doc["horizon"] = value_->horizon();
    doc["grid_step"] = value_->grid().step();
    auto& procs = doc["processes"] = nlohmann::json::array();
    for (const auto& p : model_->processes) procs.push_back(process_to_json(p));
    auto& costs = doc["costs"] = nlohmann::json::array();
    for (std::size_t a = 0; a < model_->costs.action_count(); ++a)
        costs.push_back({number_or_null(model_->costs.cost(a, RbState::Idle)),
                         number_or_null(model_->costs.cost(a, RbState::Busy))});
    auto& vals = doc["values"] = nlohmann::json::array();
    for (double v : value_->raw()) vals.push_back(number_or_null(v));
    doc["actions"] = table_;
    return doc;
}

Policy Policy::from_json(const nlohmann::json& doc) {
    try {
        if (doc.at("format").get<std::string>() != "m2m-policy") throw ConfigError("format", "not a policy document");
        if (doc.at("version").get<int>() != 1) throw ConfigError("version", "unsupported policy version");
        const PolicyKind kind = parse_policy_kind(doc.at("kind").get<std::string>());
        const auto rb_enb = doc.at("rb_enb").get<std::size_t>();
        const auto rb_coord = doc.at("rb_coord").get<std::size_t>();
        const auto seed = doc.at("seed").get<std::uint64_t>();
        if (kind != PolicyKind::Pomdp) return baseline_policy(kind, rb_enb, rb_coord, seed);

        SolverModel model;
        for (const auto& p : doc.at("processes")) model.processes.push_back(process_from_json(p));
        model.costs = ActionCostTable(model.processes.size());
        const auto& costs = doc.at("costs");
        if (costs.size() != model.costs.action_count()) throw ConfigError("costs", "wrong number of actions");
        for (std::size_t a = 0; a < costs.size(); ++a) {
            model.costs.set(a, RbState::Idle, number_from(costs[a].at(0)));
            model.costs.set(a, RbState::Busy, number_from(costs[a].at(1)));
        }
        model.validate();

        const auto mode = doc.at("mode").get<std::string>() == "exact" ? SolveMode::Exact : SolveMode::Factored;
        auto values = std::make_shared<ValueFunction>(mode, doc.at("horizon").get<std::size_t>(),
                                                      BeliefGrid(doc.at("grid_step").get<double>()), model.processes);
        const auto& vals = doc.at("values");
        if (vals.size() != values->raw().size()) throw ConfigError("values", "wrong number of values");
        for (std::size_t i = 0; i < vals.size(); ++i) values->raw()[i] = number_from(vals[i]);

        Policy p;
        p.kind_ = kind;
        p.rb_count_ = model.rb_count();
        p.rb_enb_ = rb_enb;
        p.rb_coord_ = rb_coord;
        p.seed_ = seed;
        p.model_ = std::make_shared<const SolverModel>(std::move(model));
        p.table_ = doc.at("actions").get<std::vector<std::uint16_t>>();
        if (p.table_.size() != values->horizon() * values->nodes_per_layer())
            throw ConfigError("actions", "wrong decision table size");
        p.value_ = std::move(values);
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("policy", e.what());
    }
}

ExhaustiveSolver::ExhaustiveSolver(SolverModel model, std::size_t horizon)
    : model_(std::move(model)), horizon_(horizon), states_(std::size_t{1} << model_.rb_count()) {
    model_.validate();
    if (horizon_ == 0) throw ConfigError("horizon", "must be at least 1");
    if (horizon_ > kOracleMaxHorizon || model_.rb_count() > kOracleMaxRbs)
        throw OracleSizeError("oracle handles at most " + std::to_string(kOracleMaxHorizon) + " slots and " +
                              std::to_string(kOracleMaxRbs) + " RBs");
    actions_ = enumerate_actions(model_.rb_count());
    transition_.assign(states_ * states_, 1.0);
    for (std::size_t from = 0; from < states_; ++from) {
        for (std::size_t to = 0; to < states_; ++to) {
            double p = 1.0;
            for (std::size_t r = 0; r < model_.rb_count(); ++r) {
                const auto a = static_cast<RbState>((from >> r) & 1u);
                const auto b = static_cast<RbState>((to >> r) & 1u);
                p *= model_.processes[r].transition(a, b);
            }
            transition_[from * states_ + to] = p;
        }
    }
}

ExhaustiveSolver::Joint ExhaustiveSolver::joint_from(const Belief& belief) const {
    if (belief.rb_count() != model_.rb_count()) throw std::invalid_argument("oracle: belief has the wrong RB count");
    Joint joint(states_, 1.0);
    for (std::size_t s = 0; s < states_; ++s)
        for (std::size_t r = 0; r < model_.rb_count(); ++r)
            joint[s] *= ((s >> r) & 1u) ? 1.0 - belief.idle[r] : belief.idle[r];
    return joint;
}

std::pair<double, std::size_t> ExhaustiveSolver::solve(std::size_t k, const Joint& prior) const {
    if (k == horizon_) return {0.0, 0};

    Joint predicted(states_, 0.0);
    for (std::size_t from = 0; from < states_; ++from)
        for (std::size_t to = 0; to < states_; ++to) predicted[to] += prior[from] * transition_[from * states_ + to];

    double best = model_.costs.cost(0, RbState::Idle) + solve(k + 1, predicted).first;
    std::size_t best_action = 0;

    for (std::size_t r = 0; r < model_.rb_count(); ++r) {
        double continuation = 0.0;
        for (RbState obs : {RbState::Idle, RbState::Busy}) {
            Joint posterior(states_);
            double evidence = 0.0;
            for (std::size_t s = 0; s < states_; ++s) {
                const auto truth = static_cast<RbState>((s >> r) & 1u);
                posterior[s] = predicted[s] * observation_prob(model_.processes[r], true, truth, obs);
                evidence += posterior[s];
            }
            if (evidence <= 0.0) continue;
            for (double& q : posterior) q /= evidence;
            continuation += evidence * solve(k + 1, posterior).first;
        }
        for (std::size_t j = 0; j < kActionsPerRb; ++j) {
            const std::size_t a = 1 + r * kActionsPerRb + j;
            double immediate = 0.0;
            for (std::size_t s = 0; s < states_; ++s) {
                if (predicted[s] == 0.0) continue;
                immediate += predicted[s] * model_.costs.cost(a, static_cast<RbState>((s >> r) & 1u));
            }
            const double v = immediate + continuation;
            if (v < best) {
                best = v;
                best_action = a;
            }
        }
    }
    return {best, best_action};
}

double ExhaustiveSolver::value(std::size_t k, const Belief& belief) const { return solve(k, joint_from(belief)).first; }

CompositeAction ExhaustiveSolver::decide(std::size_t k, const Belief& belief) const {
    if (k >= horizon_) throw ConfigError("horizon", "slot index beyond the oracle horizon");
    return actions_[solve(k, joint_from(belief)).second];
}

OracleResult brute_force_oracle(const SolverModel& model, std::size_t horizon, const Belief& initial) {
    const ExhaustiveSolver solver(model, horizon);
    return {solver.value(0, initial), solver.decide(0, initial)};
}

double simulate_episodes(const SolverModel& model, const DecisionRule& rule, const Belief& initial,
                         std::size_t horizon, std::size_t episodes, std::uint64_t seed) {
    model.validate();
    if (initial.rb_count() != model.rb_count()) throw std::invalid_argument("simulate_episodes: RB count mismatch");
    if (episodes == 0) return 0.0;
    const std::size_t rbs = model.rb_count();
    CompensatedSum total;
    std::vector<RbState> truth(rbs);
    for (std::size_t e = 0; e < episodes; ++e) {
        const CounterRng rng(seed, StreamDomain::Episode, e);
        for (std::size_t r = 0; r < rbs; ++r)
            truth[r] = rng.uniform(0, r) < initial.idle[r] ? RbState::Idle : RbState::Busy;
        Belief belief = initial;
        for (std::size_t k = 0; k < horizon; ++k) {
            const CompositeAction action = rule(k, belief);
            for (std::size_t r = 0; r < rbs; ++r) {
                const auto& p = model.processes[r];
                const double to_idle = p.transition(truth[r], RbState::Idle);
                truth[r] = rng.uniform(1 + k, 2 * r) < to_idle ? RbState::Idle : RbState::Busy;
            }
            std::optional<Observation> obs;
            if (action.sense) {
                const std::size_t r = *action.sense;
                const double p_idle = observation_prob(model.processes[r], true, truth[r], RbState::Idle);
                obs = Observation{r, rng.uniform(1 + k, 2 * r + 1) < p_idle ? RbState::Idle : RbState::Busy};
            }
            const std::size_t a = action_index(action, rbs);
            total += model.costs.cost(a, action.sense ? truth[*action.sense] : RbState::Idle);
            belief = belief_update(belief, action, obs, model.processes);
        }
    }
    return total.value() / static_cast<double>(episodes);
}

}  // namespace m2m
