#include "mwst/simulator.hpp"

#include <algorithm>
#include <random>
#include <set>
#include <string>

#include "mwst/errors.hpp"

namespace mwst {

namespace {

// Owns a configuration and caches every node's enabled action. After a step
// only the activated nodes and their neighbors are re-evaluated.
class Engine {
public:
    Engine(const Topology& topo, const RoleAssignment& roles, Configuration config)
        : topo_(topo),
          roles_(topo.node_count(), roles),
          config_(std::move(config)),
          view_(topo_, roles_, config_),
          action_(topo.node_count()),
          stamp_(topo.node_count(), 0) {
        for (NodeId v = 0; v < topo_.node_count(); ++v) action_[v] = view_.enabled(v);
    }
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    [[nodiscard]] std::vector<NodeId> enabled() const {
        std::vector<NodeId> out;
        for (NodeId v = 0; v < action_.size(); ++v)
            if (action_[v]) out.push_back(v);
        return out;
    }
    [[nodiscard]] std::span<const std::optional<ActionId>> actions() const { return action_; }
    [[nodiscard]] const std::vector<NodeId>& dirty() const { return dirty_; }
    [[nodiscard]] const Configuration& config() const { return config_; }
    Configuration take_config() { return std::move(config_); }

    /// Applies one step. Returns the bitmask of layers that executed.
    std::uint8_t apply(std::span<const NodeId> activated,
                       std::vector<std::pair<NodeId, ActionId>>* executed) {
        if (activated.empty()) throw ContractViolation("step: activated set is empty");
        staged_.clear();
        std::uint8_t layers = 0;
        for (NodeId v : activated) {
            if (v >= action_.size() || !action_[v])
                throw ContractViolation("step: node " + std::to_string(v) + " is not enabled");
            auto result = execute(view_.view(v));
            layers |= static_cast<std::uint8_t>(1U << (layer_of(result->first) - 1));
            if (executed) executed->emplace_back(v, result->first);
            staged_.emplace_back(v, std::move(result->second));
        }
        for (auto& [v, s] : staged_) config_.states[v] = std::move(s);

        ++epoch_;
        dirty_.clear();
        auto touch = [&](NodeId v) {
            if (stamp_[v] != epoch_) {
                stamp_[v] = epoch_;
                dirty_.push_back(v);
            }
        };
        for (NodeId v : activated) {
            touch(v);
            for (NodeId u : topo_.neighbors(v)) touch(u);
        }
        for (NodeId v : dirty_) action_[v] = view_.enabled(v);
        return layers;
    }

private:
    const Topology& topo_;
    RoleTable roles_;
    Configuration config_;
    NetworkView view_;
    std::vector<std::optional<ActionId>> action_;
    std::vector<std::uint64_t> stamp_;
    std::uint64_t epoch_ = 0;
    std::vector<NodeId> dirty_;
    std::vector<std::pair<NodeId, NodeState>> staged_;
};

class SynchronousScheduler final : public Scheduler {
public:
    std::vector<NodeId> choose(std::span<const NodeId> enabled,
                               std::span<const std::optional<ActionId>>) override {
        return {enabled.begin(), enabled.end()};
    }
};

class RandomFairScheduler final : public Scheduler {
public:
    RandomFairScheduler(std::uint64_t seed, std::uint32_t n)
        : rng_(seed), bound_(n), waiting_(n, 0), last_unchosen_(n, 0) {}

    std::vector<NodeId> choose(std::span<const NodeId> enabled,
                               std::span<const std::optional<ActionId>>) override {
        ++call_;
        std::vector<NodeId> out;
        std::bernoulli_distribution coin(0.5);
        for (NodeId v : enabled) {
            // Consecutive waiting only counts if v was passed over in the previous call.
            if (last_unchosen_[v] != call_ - 1) waiting_[v] = 0;
            if (waiting_[v] >= bound_ || coin(rng_)) out.push_back(v);
        }
        if (out.empty()) {
            std::uniform_int_distribution<std::size_t> pick(0, enabled.size() - 1);
            out.push_back(enabled[pick(rng_)]);
        }
        std::size_t j = 0;
        for (NodeId v : enabled) {
            if (j < out.size() && out[j] == v) {
                waiting_[v] = 0;
                ++j;
            } else {
                ++waiting_[v];
                last_unchosen_[v] = call_;
            }
        }
        return out;
    }

private:
    std::mt19937_64 rng_;
    std::uint32_t bound_;
    std::vector<std::uint32_t> waiting_;
    std::vector<std::uint64_t> last_unchosen_;
    std::uint64_t call_ = 1;
};

class RoundRobinScheduler final : public Scheduler {
public:
    std::vector<NodeId> choose(std::span<const NodeId> enabled,
                               std::span<const std::optional<ActionId>>) override {
        auto it = std::lower_bound(enabled.begin(), enabled.end(), cursor_);
        if (it == enabled.end()) it = enabled.begin();
        cursor_ = *it + 1;
        return {*it};
    }

private:
    NodeId cursor_ = 0;
};

// Activates one node per step, preferring the highest-layer action so that
// upper layers keep working on values lower layers will still overwrite.
class AdversarialScheduler final : public Scheduler {
public:
    explicit AdversarialScheduler(std::uint64_t seed) : rng_(seed) {}

    std::vector<NodeId> choose(std::span<const NodeId> enabled,
                               std::span<const std::optional<ActionId>> action_of) override {
        int best = 0;
        for (NodeId v : enabled) best = std::max(best, layer_of(*action_of[v]));
        std::vector<NodeId> top;
        for (NodeId v : enabled)
            if (layer_of(*action_of[v]) == best) top.push_back(v);
        std::uniform_int_distribution<std::size_t> pick(0, top.size() - 1);
        return {top[pick(rng_)]};
    }

private:
    std::mt19937_64 rng_;
};

}  // namespace

std::string_view scheduler_name(SchedulerKind kind) noexcept {
    switch (kind) {
        case SchedulerKind::Synchronous: return "sync";
        case SchedulerKind::RandomFairSubset: return "randfair";
        case SchedulerKind::RoundRobinSingle: return "rr";
        case SchedulerKind::AdversarialGreedy: return "adv";
    }
    return "?";
}

std::optional<SchedulerKind> scheduler_from_name(std::string_view name) noexcept {
    for (auto k : {SchedulerKind::Synchronous, SchedulerKind::RandomFairSubset,
                   SchedulerKind::RoundRobinSingle, SchedulerKind::AdversarialGreedy})
        if (scheduler_name(k) == name) return k;
    return std::nullopt;
}

std::unique_ptr<Scheduler> make_scheduler(const SchedulerSpec& spec, std::uint32_t node_count) {
    switch (spec.kind) {
        case SchedulerKind::Synchronous: return std::make_unique<SynchronousScheduler>();
        case SchedulerKind::RandomFairSubset:
            return std::make_unique<RandomFairScheduler>(spec.seed, node_count);
        case SchedulerKind::RoundRobinSingle: return std::make_unique<RoundRobinScheduler>();
        case SchedulerKind::AdversarialGreedy:
            return std::make_unique<AdversarialScheduler>(spec.seed);
    }
    throw InvalidParameter("unknown scheduler kind");
}

std::vector<NodeId> enabled_nodes(const Topology& topo, const RoleAssignment& roles,
                                  const Configuration& config) {
    const RoleTable table(topo.node_count(), roles);
    const NetworkView net(topo, table, config);
    std::vector<NodeId> out;
    for (NodeId v = 0; v < topo.node_count(); ++v)
        if (net.enabled(v)) out.push_back(v);
    return out;
}

Configuration step(const Topology& topo, const RoleAssignment& roles, const Configuration& config,
                   std::span<const NodeId> activated) {
    Engine engine(topo, roles, config);
    engine.apply(activated, nullptr);
    return engine.take_config();
}

Trace run(const Topology& topo, const RoleAssignment& roles, Configuration config,
          const SchedulerSpec& scheduler_spec, const RunOptions& options) {
    if (options.step_limit == 0) throw InvalidParameter("run: step_limit must be positive");
    validate_configuration(topo, config);
    const std::uint32_t n = topo.node_count();
    Engine engine(topo, roles, std::move(config));
    auto scheduler = make_scheduler(scheduler_spec, n);

    Trace trace;
    std::vector<char> pending(n, 0);
    std::size_t pending_count = 0;
    RoundSummary current;
    std::array<std::uint32_t, 4> last_bad{};  // last round end (0 = start) with layer <= l enabled
    std::array<bool, 4> ever_bad{};

    auto note_layer_quiescence = [&](std::uint32_t round_index) {
        std::array<bool, 4> bad{};
        for (auto a : engine.actions())
            if (a)
                for (int l = layer_of(*a); l <= 4; ++l) bad[l - 1] = true;
        for (int l = 0; l < 4; ++l)
            if (bad[l]) {
                last_bad[l] = round_index;
                ever_bad[l] = true;
            }
    };
    note_layer_quiescence(0);

    std::vector<NodeId> enabled = engine.enabled();
    while (!enabled.empty()) {
        if (trace.steps >= options.step_limit) break;
        if (pending_count == 0) {
            current = RoundSummary{};
            current.index = trace.rounds + 1;
            current.first_step = trace.steps;
            current.enabled_at_start = static_cast<std::uint32_t>(enabled.size());
            for (NodeId v : enabled) {
                pending[v] = 1;
                ++current.enabled_by_layer_at_start[layer_of(*engine.actions()[v]) - 1];
            }
            pending_count = enabled.size();
        }

        auto chosen = scheduler->choose(enabled, engine.actions());
        StepRecord* record = nullptr;
        if (options.full_trace) {
            trace.step_log.push_back(StepRecord{enabled, {}});
            record = &trace.step_log.back();
        }
        current.layers_executed |= engine.apply(chosen, record ? &record->executed : nullptr);
        ++trace.steps;

        for (NodeId v : chosen)
            if (pending[v]) {
                pending[v] = 0;
                --pending_count;
            }
        for (NodeId v : engine.dirty())
            if (pending[v] && !engine.actions()[v]) {
                pending[v] = 0;
                --pending_count;
            }
        enabled = engine.enabled();

        if (pending_count == 0) {
            current.end_step = trace.steps;
            ++trace.rounds;
            for (int l = 0; l < 4; ++l)
                if (current.layers_executed & (1U << l)) {
                    ++trace.layer_running_time[l];
                    trace.layer_termination_round[l] = current.index;
                }
            trace.round_log.push_back(current);
            note_layer_quiescence(current.index);
        }
    }

    trace.converged = enabled.empty();
    trace.final_enabled = enabled;
    for (int l = 0; l < 4; ++l)
        trace.layer_legitimacy_round[l] = ever_bad[l] ? last_bad[l] + 1 : 0;
    trace.final_config = engine.take_config();
    return trace;
}

std::vector<std::uint64_t> count_rounds(const Trace& trace) {
    if (trace.steps > 0 && trace.step_log.size() != trace.steps)
        throw InvalidInput("count_rounds: trace has no per-step log");

    // enabled(i) is Enabled(C_i): the set before step i, or the final set.
    auto enabled_at = [&](std::uint64_t i) -> const std::vector<NodeId>& {
        return i < trace.steps ? trace.step_log[i].enabled_before : trace.final_enabled;
    };
    std::vector<std::uint64_t> boundaries;
    std::uint64_t start = 0;
    while (start < trace.steps) {
        std::set<NodeId> waiting(enabled_at(start).begin(), enabled_at(start).end());
        std::uint64_t t = start;
        while (!waiting.empty() && t < trace.steps) {
            for (auto [v, a] : trace.step_log[t].executed) waiting.erase(v);
            const auto& after = enabled_at(t + 1);
            std::erase_if(waiting, [&](NodeId v) {
                return !std::binary_search(after.begin(), after.end(), v);
            });
            ++t;
        }
        if (!waiting.empty()) break;  // incomplete final round
        boundaries.push_back(t);
        start = t;
    }

    std::vector<std::uint64_t> recorded;
    for (const auto& r : trace.round_log) recorded.push_back(r.end_step);
    if (recorded != boundaries)
        throw ConsistencyError("count_rounds: recomputed " + std::to_string(boundaries.size()) +
                               " rounds, trace recorded " + std::to_string(recorded.size()));
    return boundaries;
}

}  // namespace mwst
