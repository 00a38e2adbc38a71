#include "mwst/protocol.hpp"

#include <algorithm>
#include <string>

#include "mwst/errors.hpp"

namespace mwst {

namespace {

constexpr std::array<std::string_view, kActionCount> kNames{
    "L1FixDist", "L1FixParent", "L1FixColor",       "L2FixDist",
    "L2FixParent", "L2FixColor", "L3FixArc",        "L4RemoveWrongArc",
    "L4FixBranch", "L4AddArc",   "L4RemoveRedundantArc",
};

std::uint32_t saturating_inc(std::uint32_t d, std::uint32_t cap) noexcept {
    return d >= cap ? cap : d + 1;
}

// Minimum neighbor distance and the smallest label attaining it.
template <typename DistOf>
std::pair<std::uint32_t, Label> nearest(const LocalView& view, DistOf dist_of) noexcept {
    std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
    Label arg = kSelf;
    for (Label l = 1; l <= view.degree(); ++l) {
        const std::uint32_t d = dist_of(view.neighbor(l));
        if (d < best) {
            best = d;
            arg = l;
        }
    }
    return {best, arg};
}

bool has_red_child(const LocalView& view) noexcept {
    for (Label l = 1; l <= view.degree(); ++l) {
        const NodeState& u = view.neighbor(l);
        if (u.l1_parent == view.reverse_label(l) && u.l1_color) return true;
    }
    return false;
}

bool has_blue_child(const LocalView& view) noexcept {
    for (Label l = 1; l <= view.degree(); ++l) {
        const NodeState& u = view.neighbor(l);
        if (u.l2_parent == view.reverse_label(l) && u.l2_color) return true;
    }
    return false;
}

// MissingArcDest and RedundantArcDest share the redundancy set.
struct ArcDests {
    LabelSet wrong;
    LabelSet missing;
    LabelSet redundant;
};

ArcDests arc_destinations(const LocalView& view) {
    const NodeState& s = view.self();
    ArcDests out;
    out.wrong = s.arc;
    out.wrong.subtract(s.l3_arc);
    const LabelSet red = redundant_labels(view);
    out.missing = s.l3_arc;
    out.missing.subtract(s.arc);
    out.missing.subtract(red);
    out.redundant = s.arc;
    out.redundant &= red;
    return out;
}

NodeState apply_unchecked(const LocalView& view, ActionId action) {
    NodeState next = view.self();
    switch (action) {
        case ActionId::L1FixDist:
            next.l1_dist = l1_targets(view).dist;
            break;
        case ActionId::L1FixParent:
            next.l1_parent = l1_targets(view).parent;
            break;
        case ActionId::L1FixColor:
            next.l1_color = l1_targets(view).color;
            break;
        case ActionId::L2FixDist:
            next.l2_dist = l2_targets(view).dist;
            break;
        case ActionId::L2FixParent:
            next.l2_parent = l2_targets(view).parent;
            break;
        case ActionId::L2FixColor:
            next.l2_color = l2_targets(view).color;
            break;
        case ActionId::L3FixArc:
            next.l3_arc = l3_target_arcs(view);
            break;
        case ActionId::L4RemoveWrongArc:
            next.arc.subtract(arc_destinations(view).wrong);
            break;
        case ActionId::L4FixBranch:
            next.l4_branch = is_branch(view);
            break;
        case ActionId::L4AddArc:
            next.arc |= arc_destinations(view).missing;
            break;
        case ActionId::L4RemoveRedundantArc:
            next.arc.subtract(arc_destinations(view).redundant);
            break;
    }
    return next;
}

}  // namespace

bool state_is_valid(const NodeState& s, std::uint32_t degree, std::uint32_t dist_cap) noexcept {
    return s.l1_parent <= degree && s.l2_parent <= degree && s.l3_arc.size() == degree &&
           s.arc.size() == degree && s.l1_dist <= dist_cap && s.l2_dist <= dist_cap;
}

std::string_view action_name(ActionId a) noexcept { return kNames[static_cast<std::size_t>(a)]; }

std::optional<ActionId> action_from_name(std::string_view name) noexcept {
    for (std::size_t i = 0; i < kNames.size(); ++i)
        if (kNames[i] == name) return static_cast<ActionId>(i);
    return std::nullopt;
}

LabelSet red_children(const LocalView& view) {
    LabelSet out(view.degree());
    for (Label l = 1; l <= view.degree(); ++l) {
        const NodeState& u = view.neighbor(l);
        if (u.l1_parent == view.reverse_label(l) && u.l1_color) out.set(l);
    }
    return out;
}

LabelSet blue_children(const LocalView& view) {
    LabelSet out(view.degree());
    for (Label l = 1; l <= view.degree(); ++l) {
        const NodeState& u = view.neighbor(l);
        if (u.l2_parent == view.reverse_label(l) && u.l2_color) out.set(l);
    }
    return out;
}

LabelSet branch_children(const LocalView& view) {
    LabelSet out(view.degree());
    for (Label l = 1; l <= view.degree(); ++l) {
        const NodeState& u = view.neighbor(l);
        if (u.l1_parent == view.reverse_label(l) && u.l4_branch) out.set(l);
    }
    return out;
}

LayerTargets l1_targets(const LocalView& view) {
    LayerTargets t;
    if (view.is_sender()) {
        t.dist = 0;
        t.parent = kSelf;
    } else {
        auto [d, arg] = nearest(view, [](const NodeState& u) { return u.l1_dist; });
        t.dist = saturating_inc(d, view.dist_cap());
        t.parent = arg;
    }
    t.color = view.is_target() || has_red_child(view);
    return t;
}

LayerTargets l2_targets(const LocalView& view) {
    LayerTargets t;
    const bool red = view.self().l1_color;
    if (red) {
        t.dist = 0;
        t.parent = kSelf;
    } else {
        auto [d, arg] = nearest(view, [](const NodeState& u) { return u.l2_dist; });
        t.dist = saturating_inc(d, view.dist_cap());
        t.parent = arg;
    }
    t.color = !red && (view.is_sender() || has_blue_child(view));
    return t;
}

LabelSet l3_target_arcs(const LocalView& view) {
    const NodeState& s = view.self();
    LabelSet out(view.degree());
    if (s.l1_color) out = red_children(view);
    if (s.l2_color && s.l2_parent != kSelf) out.set(s.l2_parent);
    return out;
}

bool is_branch(const LocalView& view) {
    if (!view.self().l1_color) return false;
    if (has_blue_child(view)) return true;
    if (view.is_target()) return false;
    const LabelSet red = red_children(view);
    return red.any() && branch_children(view) == red;
}

Redundancy redundancy(const LocalView& view, Label u) {
    const NodeState& s = view.self();
    const LabelSet red = red_children(view);
    const LabelSet branch = branch_children(view);
    Redundancy r;
    const bool u_branch = branch.test(u);
    const bool all_branch = branch == red;
    r.rule1 = u_branch && branch.subset_of(red) && !all_branch;
    r.rule2 = u_branch && all_branch && u != branch.first();
    r.rule3 = u_branch && all_branch && view.is_target();
    if (s.l1_parent != kSelf) {
        const NodeState& parent = view.neighbor(s.l1_parent);
        r.rule4 = !parent.arc.test(view.reverse_label(s.l1_parent)) && !has_blue_child(view);
    }
    r.redundant = r.rule1 || r.rule2 || r.rule3 || r.rule4;
    return r;
}

LabelSet redundant_labels(const LocalView& view) {
    const NodeState& s = view.self();
    LabelSet out(view.degree());
    if (s.l1_parent != kSelf) {
        const NodeState& parent = view.neighbor(s.l1_parent);
        if (!parent.arc.test(view.reverse_label(s.l1_parent)) && !has_blue_child(view)) {
            for (Label l = 1; l <= view.degree(); ++l) out.set(l);
            return out;
        }
    }
    const LabelSet branch = branch_children(view);
    if (branch.none()) return out;
    const LabelSet red = red_children(view);
    if (branch == red) {
        out = branch;
        if (!view.is_target()) out.reset(branch.first());
    } else if (branch.subset_of(red)) {
        out = branch;
    }
    return out;
}

std::array<bool, kActionCount> raw_guards(const LocalView& view) {
    const NodeState& s = view.self();
    const LayerTargets t1 = l1_targets(view);
    const LayerTargets t2 = l2_targets(view);
    const ArcDests dests = arc_destinations(view);
    return {
        s.l1_dist != t1.dist,
        s.l1_parent != t1.parent,
        s.l1_color != t1.color,
        s.l2_dist != t2.dist,
        s.l2_parent != t2.parent,
        s.l2_color != t2.color,
        s.l3_arc != l3_target_arcs(view),
        dests.wrong.any(),
        s.l4_branch != is_branch(view),
        dests.missing.any(),
        dests.redundant.any(),
    };
}

std::optional<ActionId> enabled_action(const LocalView& view) {
    const NodeState& s = view.self();
    const LayerTargets t1 = l1_targets(view);
    if (s.l1_dist != t1.dist) return ActionId::L1FixDist;
    if (s.l1_parent != t1.parent) return ActionId::L1FixParent;
    if (s.l1_color != t1.color) return ActionId::L1FixColor;
    const LayerTargets t2 = l2_targets(view);
    if (s.l2_dist != t2.dist) return ActionId::L2FixDist;
    if (s.l2_parent != t2.parent) return ActionId::L2FixParent;
    if (s.l2_color != t2.color) return ActionId::L2FixColor;
    if (s.l3_arc != l3_target_arcs(view)) return ActionId::L3FixArc;
    const ArcDests dests = arc_destinations(view);
    if (dests.wrong.any()) return ActionId::L4RemoveWrongArc;
    if (s.l4_branch != is_branch(view)) return ActionId::L4FixBranch;
    if (dests.missing.any()) return ActionId::L4AddArc;
    if (dests.redundant.any()) return ActionId::L4RemoveRedundantArc;
    return std::nullopt;
}

NodeState apply_action(const LocalView& view, ActionId action) {
    const auto enabled = enabled_action(view);
    if (enabled != action)
        throw ContractViolation("apply_action: " + std::string(action_name(action)) +
                                " is not the enabled action (enabled: " +
                                (enabled ? std::string(action_name(*enabled)) : "none") + ")");
    return apply_unchecked(view, action);
}

std::optional<std::pair<ActionId, NodeState>> execute(const LocalView& view) {
    const auto action = enabled_action(view);
    if (!action) return std::nullopt;
    return std::pair{*action, apply_unchecked(view, *action)};
}

}  // namespace mwst
