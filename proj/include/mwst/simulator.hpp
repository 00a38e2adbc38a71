#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "mwst/configuration.hpp"
#include "mwst/protocol.hpp"
#include "mwst/topology.hpp"

namespace mwst {

enum class SchedulerKind : std::uint8_t {
    Synchronous,       // every enabled node acts
    RandomFairSubset,  // random nonempty subset, with a starvation bound of n steps
    RoundRobinSingle,  // next enabled node in cyclic id order
    AdversarialGreedy, // exploratory: one node per step, highest layer first
};

struct SchedulerSpec {
    SchedulerKind kind = SchedulerKind::Synchronous;
    std::uint64_t seed = 0;
};

std::string_view scheduler_name(SchedulerKind kind) noexcept;
/// Accepts "sync", "randfair", "rr", "adv".
std::optional<SchedulerKind> scheduler_from_name(std::string_view name) noexcept;

/// Picks the activated set for each step. Implementations may keep state
/// across calls (cursor, starvation counters, RNG).
class Scheduler {
public:
    virtual ~Scheduler() = default;
    /// `enabled` is sorted ascending and nonempty; `action_of(v)` is the
    /// enabled action of v. Returns a nonempty subset of `enabled`, sorted.
    virtual std::vector<NodeId> choose(std::span<const NodeId> enabled,
                                       std::span<const std::optional<ActionId>> action_of) = 0;
};

std::unique_ptr<Scheduler> make_scheduler(const SchedulerSpec& spec, std::uint32_t node_count);

struct StepRecord {
    std::vector<NodeId> enabled_before;
    std::vector<std::pair<NodeId, ActionId>> executed;
};

struct RoundSummary {
    std::uint32_t index = 0;  // 1-based
    std::uint64_t first_step = 0;
    std::uint64_t end_step = 0;  // exclusive
    std::uint32_t enabled_at_start = 0;
    std::array<std::uint32_t, 4> enabled_by_layer_at_start{};
    std::uint8_t layers_executed = 0;  // bit l-1 set when a layer-l action ran
};

struct RunOptions {
    std::uint64_t step_limit = 0;
    /// Keep per-step records (activated nodes, enabled sets). Round summaries
    /// are always kept.
    bool full_trace = false;
};

struct Trace {
    bool converged = false;
    std::uint64_t steps = 0;
    /// Completed rounds. A round cut off by the step limit is not counted.
    std::uint32_t rounds = 0;
    std::vector<RoundSummary> round_log;
    std::vector<StepRecord> step_log;     // only with full_trace
    std::vector<NodeId> final_enabled;    // enabled nodes in the final configuration
    Configuration final_config;

    /// Rounds in which at least one layer-l action executed (index l-1).
    std::array<std::uint32_t, 4> layer_running_time{};
    /// Last round in which a layer-l action executed, 0 if none.
    std::array<std::uint32_t, 4> layer_termination_round{};
    /// First round after which no node had an enabled action of layer <= l for
    /// the rest of the run, 0 if that held from the start. Only meaningful when
    /// converged.
    std::array<std::uint32_t, 4> layer_legitimacy_round{};
};

/// 20 * (D + 1): the convergence cutoff in rounds.
constexpr std::uint64_t round_cutoff(std::uint32_t diameter) noexcept {
    return 20ULL * (diameter + 1ULL);
}
/// 20 * (D + 1) * n: the step cutoff for schedulers that may take single-node steps.
constexpr std::uint64_t step_cutoff(std::uint32_t diameter, std::uint32_t node_count) noexcept {
    return round_cutoff(diameter) * node_count;
}

/// Enabled nodes of a configuration, ascending.
std::vector<NodeId> enabled_nodes(const Topology& topo, const RoleAssignment& roles,
                                  const Configuration& config);

/// One atomic transition: every activated node applies its enabled action,
/// all reading the pre-step configuration. Throws ContractViolation if
/// `activated` is empty or contains a disabled node.
Configuration step(const Topology& topo, const RoleAssignment& roles, const Configuration& config,
                   std::span<const NodeId> activated);

/// Steps under the scheduler until no node is enabled or the step limit is
/// reached. Never throws on non-convergence; the trace is flagged instead.
Trace run(const Topology& topo, const RoleAssignment& roles, Configuration config,
          const SchedulerSpec& scheduler, const RunOptions& options);

/// Recomputes round boundaries (exclusive end step of each completed round)
/// from a full trace's step log and checks them against the recorded round
/// log. Throws ConsistencyError on mismatch, InvalidInput without a step log.
std::vector<std::uint64_t> count_rounds(const Trace& trace);

}  // namespace mwst
