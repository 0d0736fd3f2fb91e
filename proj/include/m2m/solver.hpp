#pragma once

// Finite-horizon policies over RB beliefs: grid value iteration, an exhaustive
// oracle for tiny instances, fixed baselines, and policy serialization.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "m2m/decision_costs.hpp"
#include "m2m/pomdp.hpp"

namespace m2m {

/// What a single device optimizes: its RB processes and its action prices.
struct SolverModel {
    std::vector<RbProcess> processes;
    ActionCostTable costs;

    std::size_t rb_count() const noexcept { return processes.size(); }
    void validate() const;
    bool operator==(const SolverModel&) const = default;
};

/// Evenly spaced points on [0, 1]; the last cell is shortened when 1/step is
/// not an integer.
class BeliefGrid {
public:
    BeliefGrid() = default;
    explicit BeliefGrid(double step);

    double step() const noexcept { return step_; }
    std::size_t size() const noexcept { return points_; }
    double point(std::size_t i) const noexcept;
    /// Cell containing x and the weight of its upper endpoint.
    std::pair<std::size_t, double> locate(double x) const noexcept;

private:
    double step_ = 0.5;
    std::size_t points_ = 3;
};

enum class SolveMode {
    /// Full grid over [0,1]^R with multilinear interpolation. Used for R <= 2.
    Exact,
    /// One grid axis per RB: that RB's belief varies, every other RB sits at
    /// its stationary marginal. The value of a full belief is the minimum over
    /// the per-RB axes.
    Factored,
};

std::string to_string(SolveMode mode);

/// W_k for k = 0..horizon on grid nodes; W_horizon is zero.
class ValueFunction {
public:
    ValueFunction() = default;
    ValueFunction(SolveMode mode, std::size_t horizon, BeliefGrid grid, std::vector<RbProcess> processes);

    SolveMode mode() const noexcept { return mode_; }
    std::size_t horizon() const noexcept { return horizon_; }
    const BeliefGrid& grid() const noexcept { return grid_; }
    std::size_t rb_count() const noexcept { return processes_.size(); }
    std::size_t nodes_per_layer() const noexcept { return nodes_; }

    /// Belief represented by a grid node.
    Belief node_belief(std::size_t node) const;

    double node_value(std::size_t k, std::size_t node) const { return values_.at(k * nodes_ + node); }
    double& node_value(std::size_t k, std::size_t node) { return values_.at(k * nodes_ + node); }

    /// Interpolated value at an arbitrary belief.
    double at(std::size_t k, const Belief& belief) const;

    const std::vector<double>& raw() const noexcept { return values_; }
    std::vector<double>& raw() noexcept { return values_; }

private:
    double axis_value(std::size_t k, std::size_t rb, double x) const;

    SolveMode mode_ = SolveMode::Exact;
    std::size_t horizon_ = 0;
    BeliefGrid grid_;
    std::vector<RbProcess> processes_;
    std::size_t nodes_ = 0;
    std::vector<double> values_;
};

enum class PolicyKind { Pomdp, LocalOnly, CoordinatorOnly, MecAlways, RandomSense };

std::string to_string(PolicyKind kind);
/// Accepts "pomdp", "local_only", "coordinator_only", "mec_always", "random_sense".
PolicyKind parse_policy_kind(const std::string& name);

struct DecisionContext {
    std::size_t slot = 0;          ///< index within the frame
    std::uint64_t global_slot = 0; ///< slots since the start of the run
    std::size_t mtc = 0;           ///< index among the active devices
};

class Policy {
public:
    Policy() = default;

    PolicyKind kind() const noexcept { return kind_; }
    std::size_t rb_count() const noexcept { return rb_count_; }
    /// Number of slots the decision table covers; 0 for stateless baselines.
    std::size_t horizon() const noexcept { return value_ ? value_->horizon() : 0; }
    const ValueFunction* value_function() const noexcept { return value_.get(); }
    const SolverModel* model() const noexcept { return model_.get(); }

    CompositeAction decide(const DecisionContext& ctx, const Belief& belief) const;

    /// Expected cost of `action` now plus the interpolated cost-to-go.
    double action_value(std::size_t k, const Belief& belief, std::size_t action) const;
    /// min over actions of action_value; zero at the horizon.
    double value(std::size_t k, const Belief& belief) const;

    /// Stored argmin for grid node `node` of slot k (POMDP kind only).
    std::size_t table_action(std::size_t k, std::size_t node) const { return table_.at(k * nodes() + node); }

    nlohmann::json to_json() const;
    static Policy from_json(const nlohmann::json& doc);

    friend std::pair<Policy, ValueFunction> value_iteration(const SolverModel&, std::size_t, double, SolveMode);
    friend Policy baseline_policy(PolicyKind, std::size_t, std::size_t, std::uint64_t);

private:
    std::size_t nodes() const noexcept { return value_ ? value_->nodes_per_layer() : 0; }
    std::pair<std::size_t, double> argmin(std::size_t k, const Belief& belief) const;

    PolicyKind kind_ = PolicyKind::LocalOnly;
    std::size_t rb_count_ = 0;
    std::size_t rb_enb_ = 0;
    std::size_t rb_coord_ = 0;
    std::uint64_t seed_ = 0;
    std::shared_ptr<const SolverModel> model_;
    std::shared_ptr<const ValueFunction> value_;
    std::vector<std::uint16_t> table_;
};

/// Picks Exact for one or two RBs, Factored otherwise.
SolveMode default_solve_mode(std::size_t rb_count) noexcept;

/// Backward induction from a zero terminal layer. Argmin ties go to the first
/// action in enumeration order. Throws ConfigError for horizon 0 or a grid
/// step outside (0, 0.5].
std::pair<Policy, ValueFunction> value_iteration(const SolverModel& model, std::size_t horizon, double grid_step,
                                                 SolveMode mode);
std::pair<Policy, ValueFunction> value_iteration(const SolverModel& model, std::size_t horizon, double grid_step);

/// Fixed policies. Round-robin baselines start at RB (mtc offset) of their
/// partition so devices spread over RBs.
Policy baseline_policy(PolicyKind kind, std::size_t rb_enb, std::size_t rb_coord, std::uint64_t seed);

inline constexpr std::size_t kOracleMaxHorizon = 5;
inline constexpr std::size_t kOracleMaxRbs = 2;

/// Exact optimum by enumerating every action and observation with a joint
/// belief over all 2^R RB state vectors. No grid, no factorization.
class ExhaustiveSolver {
public:
    ExhaustiveSolver(SolverModel model, std::size_t horizon);

    std::size_t horizon() const noexcept { return horizon_; }
    /// Optimal expected cost from slot k given independent per-RB marginals.
    double value(std::size_t k, const Belief& belief) const;
    CompositeAction decide(std::size_t k, const Belief& belief) const;

private:
    using Joint = std::vector<double>;

    Joint joint_from(const Belief& belief) const;
    std::pair<double, std::size_t> solve(std::size_t k, const Joint& prior) const;

    SolverModel model_;
    std::size_t horizon_;
    std::size_t states_;
    std::vector<double> transition_;  // states_ x states_, row = from
    std::vector<CompositeAction> actions_;
};

struct OracleResult {
    double expected_cost = 0.0;
    CompositeAction first_action;
};

/// Throws OracleSizeError beyond kOracleMaxHorizon slots or kOracleMaxRbs RBs.
OracleResult brute_force_oracle(const SolverModel& model, std::size_t horizon, const Belief& initial);

using DecisionRule = std::function<CompositeAction(std::size_t slot, const Belief& belief)>;

/// Mean realized cost of `rule` over independent single-device episodes.
/// Draws depend only on (seed, episode, slot), so two rules evaluated with
/// the same seed see identical RB trajectories and sensing noise.
double simulate_episodes(const SolverModel& model, const DecisionRule& rule, const Belief& initial,
                         std::size_t horizon, std::size_t episodes, std::uint64_t seed);

}  // namespace m2m
