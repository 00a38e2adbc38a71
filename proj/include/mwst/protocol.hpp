#pragma once

// Guarded actions of the four-layer minimal weakly ST-reachable DAG protocol.
//
// Everything here is a pure function of a LocalView: the node's own state,
// its role flags, and the states of its neighbors addressed by local label.
// Layers are composed hierarchically, so an action of layer k can only be
// enabled once every guard of layers 1..k-1 is false at the same node.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "mwst/label_set.hpp"
#include "mwst/topology.hpp"

namespace mwst {

struct NodeState {
    std::uint32_t l1_dist = 0;
    Label l1_parent = kSelf;
    bool l1_color = false;  // red
    std::uint32_t l2_dist = 0;
    Label l2_parent = kSelf;
    bool l2_color = false;  // blue
    LabelSet l3_arc;
    LabelSet arc;
    bool l4_branch = false;

    /// All-zero state for a node of the given degree.
    static NodeState zero(std::uint32_t degree) {
        NodeState s;
        s.l3_arc = LabelSet(degree);
        s.arc = LabelSet(degree);
        return s;
    }

    friend bool operator==(const NodeState&, const NodeState&) = default;
};

/// True when the parent labels are valid, arc arrays have `degree` entries and
/// both distances are at most `dist_cap`.
bool state_is_valid(const NodeState& s, std::uint32_t degree, std::uint32_t dist_cap) noexcept;

struct NeighborRef {
    const NodeState* state;
    Label reverse_label;  // the label this neighbor assigns to the viewing node
};

/// Everything a node may read: its own variables and those of its neighbors.
class LocalView {
public:
    LocalView(RoleFlags roles, const NodeState& self, std::span<const NeighborRef> neighbors,
              std::uint32_t dist_cap) noexcept
        : roles_(roles), self_(&self), neighbors_(neighbors), dist_cap_(dist_cap) {}

    [[nodiscard]] bool is_sender() const noexcept { return roles_.is_sender; }
    [[nodiscard]] bool is_target() const noexcept { return roles_.is_target; }
    [[nodiscard]] const NodeState& self() const noexcept { return *self_; }
    [[nodiscard]] std::uint32_t degree() const noexcept {
        return static_cast<std::uint32_t>(neighbors_.size());
    }
    [[nodiscard]] const NodeState& neighbor(Label l) const noexcept {
        return *neighbors_[l - 1].state;
    }
    [[nodiscard]] Label reverse_label(Label l) const noexcept {
        return neighbors_[l - 1].reverse_label;
    }
    /// Upper bound for stored distances; additions saturate here.
    [[nodiscard]] std::uint32_t dist_cap() const noexcept { return dist_cap_; }

private:
    RoleFlags roles_;
    const NodeState* self_;
    std::span<const NeighborRef> neighbors_;
    std::uint32_t dist_cap_;
};

enum class ActionId : std::uint8_t {
    L1FixDist,
    L1FixParent,
    L1FixColor,
    L2FixDist,
    L2FixParent,
    L2FixColor,
    L3FixArc,
    L4RemoveWrongArc,
    L4FixBranch,
    L4AddArc,
    L4RemoveRedundantArc,
};

inline constexpr std::size_t kActionCount = 11;
inline constexpr std::array<ActionId, kActionCount> kAllActions{
    ActionId::L1FixDist,        ActionId::L1FixParent, ActionId::L1FixColor,
    ActionId::L2FixDist,        ActionId::L2FixParent, ActionId::L2FixColor,
    ActionId::L3FixArc,         ActionId::L4RemoveWrongArc, ActionId::L4FixBranch,
    ActionId::L4AddArc,         ActionId::L4RemoveRedundantArc,
};

/// Layer 1..4 of an action.
constexpr int layer_of(ActionId a) noexcept {
    switch (a) {
        case ActionId::L1FixDist:
        case ActionId::L1FixParent:
        case ActionId::L1FixColor:
            return 1;
        case ActionId::L2FixDist:
        case ActionId::L2FixParent:
        case ActionId::L2FixColor:
            return 2;
        case ActionId::L3FixArc:
            return 3;
        default:
            return 4;
    }
}

/// Position of the action inside its layer's action list, starting at 1.
constexpr int rank_in_layer(ActionId a) noexcept {
    switch (a) {
        case ActionId::L1FixDist:
        case ActionId::L2FixDist:
        case ActionId::L3FixArc:
        case ActionId::L4RemoveWrongArc:
            return 1;
        case ActionId::L1FixParent:
        case ActionId::L2FixParent:
        case ActionId::L4FixBranch:
            return 2;
        case ActionId::L1FixColor:
        case ActionId::L2FixColor:
        case ActionId::L4AddArc:
            return 3;
        case ActionId::L4RemoveRedundantArc:
            return 4;
    }
    return 0;
}

std::string_view action_name(ActionId a) noexcept;
std::optional<ActionId> action_from_name(std::string_view name) noexcept;

/// Correct (dist, parent, color) of one spanning-forest layer.
struct LayerTargets {
    std::uint32_t dist = 0;
    Label parent = kSelf;
    bool color = false;

    friend bool operator==(const LayerTargets&, const LayerTargets&) = default;
};

/// Neighbors whose L1 parent is this node and that are red.
LabelSet red_children(const LocalView& view);
/// Neighbors whose L2 parent is this node and that are blue.
LabelSet blue_children(const LocalView& view);
/// Neighbors whose L1 parent is this node and whose branch flag is set.
LabelSet branch_children(const LocalView& view);

LayerTargets l1_targets(const LocalView& view);
LayerTargets l2_targets(const LocalView& view);

/// Layer-3 arc set: red children when red, plus the L2 parent when blue.
LabelSet l3_target_arcs(const LocalView& view);

bool is_branch(const LocalView& view);

struct Redundancy {
    bool rule1 = false;
    bool rule2 = false;
    bool rule3 = false;
    bool rule4 = false;
    bool redundant = false;
};

/// Removal-rule predicates for the arc toward neighbor `u`.
Redundancy redundancy(const LocalView& view, Label u);

/// Labels u for which the arc toward u is redundant.
LabelSet redundant_labels(const LocalView& view);

/// Guards of all eleven actions evaluated independently, ignoring priority.
std::array<bool, kActionCount> raw_guards(const LocalView& view);

/// Highest-priority action whose guard holds, or nullopt when the node is
/// disabled. Priority is layer first, then order within the layer.
std::optional<ActionId> enabled_action(const LocalView& view);

/// State after executing `action`. Throws ContractViolation if `action` is
/// not the enabled action of the view.
NodeState apply_action(const LocalView& view, ActionId action);

/// enabled_action followed by apply_action; nullopt when disabled.
std::optional<std::pair<ActionId, NodeState>> execute(const LocalView& view);

}  // namespace mwst
