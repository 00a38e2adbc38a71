#include <doctest.h>

#include "mwst/configuration.hpp"
#include "mwst/errors.hpp"
#include "mwst/protocol.hpp"
#include "mwst/verifier.hpp"
#include "test_util.hpp"

using namespace mwst;
using mwst::testing::labels;
using mwst::testing::ViewFixture;

namespace {

// A red sender with red L1 children at every label in `red`, branch flags on
// the labels in `branch`. Layers 1-3 are consistent; layer 4 is left zeroed.
ViewFixture red_sender(std::uint32_t degree, std::initializer_list<Label> red,
                       std::initializer_list<Label> branch) {
    ViewFixture f(degree);
    f.roles.is_sender = true;
    for (Label l : red) f.l1_child(l, true);
    for (Label l : branch) f.nbr(l).l4_branch = true;
    f.self.l1_color = true;
    f.self.l3_arc = labels(degree, red);
    return f;
}

}  // namespace

TEST_SUITE("protocol-core") {

TEST_CASE("action priority order") {
    for (std::size_t i = 0; i + 1 < kAllActions.size(); ++i) {
        const auto a = kAllActions[i], b = kAllActions[i + 1];
        const bool before = layer_of(a) < layer_of(b) ||
                            (layer_of(a) == layer_of(b) && rank_in_layer(a) < rank_in_layer(b));
        CHECK(before);
    }
    CHECK(layer_of(ActionId::L3FixArc) == 3);
    CHECK(rank_in_layer(ActionId::L4RemoveRedundantArc) == 4);
    CHECK(action_from_name("L4AddArc") == ActionId::L4AddArc);
    CHECK_FALSE(action_from_name("bogus").has_value());
}

TEST_CASE("l1_targets") {
    SUBCASE("sender is its own root") {
        ViewFixture f(3);
        f.roles.is_sender = true;
        f.nbr(1).l1_dist = 0;
        f.nbr(2).l1_dist = 7;
        const auto t = l1_targets(f.view());
        CHECK(t.dist == 0);
        CHECK(t.parent == kSelf);
    }
    SUBCASE("target at the end of s-a-t") {
        // Node t: its only neighbor a sits at distance 1 and points at s.
        ViewFixture f(1);
        f.roles.is_target = true;
        f.reverse = {2};  // a calls t "2"
        f.nbr(1).l1_dist = 1;
        f.nbr(1).l1_parent = 1;
        const auto t = l1_targets(f.view());
        CHECK(t == LayerTargets{2, 1, true});

        // Same values from the centralized fixpoint on P3.
        const auto inst = testing::p3_instance();
        const auto ref = reference_construct(inst.topology, inst.roles);
        CHECK(ref[2].l1_dist == 2);
        CHECK(ref[2].l1_parent == 1);
        CHECK(ref[2].l1_color);
    }
    SUBCASE("ties go to the smallest label") {
        ViewFixture f(3);
        f.nbr(1).l1_dist = 5;
        f.nbr(2).l1_dist = 5;
        f.nbr(3).l1_dist = 9;
        const auto t = l1_targets(f.view());
        CHECK(t.dist == 6);
        CHECK(t.parent == 1);
        CHECK_FALSE(t.color);
    }
    SUBCASE("distance saturates at the cap") {
        ViewFixture f(2, 10);
        f.nbr(1).l1_dist = 10;
        f.nbr(2).l1_dist = 10;
        CHECK(l1_targets(f.view()).dist == 10);
    }
    SUBCASE("red child makes the node red") {
        ViewFixture f(2);
        f.l1_child(2, true);
        CHECK(l1_targets(f.view()).color);
        f.nbr(2).l1_color = false;
        CHECK_FALSE(l1_targets(f.view()).color);
    }
}

TEST_CASE("l2_targets") {
    SUBCASE("red node roots its own L2 tree") {
        ViewFixture f(2);
        f.self.l1_color = true;
        f.nbr(1).l2_dist = 0;
        const auto t = l2_targets(f.view());
        CHECK(t == LayerTargets{0, kSelf, false});
    }
    SUBCASE("red sender is not blue") {
        ViewFixture f(1);
        f.roles.is_sender = true;
        f.self.l1_color = true;
        CHECK_FALSE(l2_targets(f.view()).color);
    }
    SUBCASE("colorless node with a blue child is blue") {
        // Chain s1 - t - a - b - s2 with S = {s1, s2}, T = {t}; node a has
        // neighbors t (label 1, red, L2 dist 0) and b (label 2, blue, L2 parent a).
        ViewFixture f(2);
        f.reverse = {2, 1};
        f.nbr(1).l1_color = true;
        f.nbr(1).l2_dist = 0;
        f.nbr(2).l2_dist = 2;
        f.blue_child(2);
        const auto t = l2_targets(f.view());
        CHECK(t == LayerTargets{1, 1, true});

        const Instance chain{testing::path_graph(5), RoleAssignment{{0, 4}, {1}}};
        const auto ref = reference_construct(chain.topology, chain.roles);
        CHECK_FALSE(ref[2].l1_color);
        CHECK(ref[2].l2_color);
        CHECK(ref[2].l2_dist == 1);
        CHECK(ref[2].l2_parent == 1);
        CHECK(ref[3].l2_color);
        CHECK(ref[4].l2_color);
    }
}

TEST_CASE("l3_target_arcs") {
    ViewFixture f(4);
    CHECK(l3_target_arcs(f.view()).none());

    f.self.l2_color = true;
    f.self.l2_parent = 3;
    CHECK(l3_target_arcs(f.view()) == labels(4, {3}));

    ViewFixture r(4);
    r.self.l1_color = true;
    r.l1_child(1, true);
    r.l1_child(4, true);
    r.l1_child(2, false);  // colorless child gets no arc
    CHECK(l3_target_arcs(r.view()) == labels(4, {1, 4}));
}

TEST_CASE("is_branch") {
    SUBCASE("non-red node is never a branch") {
        ViewFixture f(2);
        f.blue_child(1);
        CHECK_FALSE(is_branch(f.view()));
    }
    SUBCASE("red target with a blue L2 child") {
        ViewFixture f(2);
        f.roles.is_target = true;
        f.self.l1_color = true;
        f.blue_child(2);
        CHECK(is_branch(f.view()));
    }
    SUBCASE("red target whose red children are all branches") {
        ViewFixture f(3);
        f.roles.is_target = true;
        f.self.l1_color = true;
        f.l1_child(1, true, true);
        f.l1_child(3, true, true);
        CHECK_FALSE(is_branch(f.view()));
        f.roles.is_target = false;
        CHECK(is_branch(f.view()));
        f.nbr(3).l4_branch = false;
        CHECK_FALSE(is_branch(f.view()));
    }
    SUBCASE("red leaf without blue child") {
        ViewFixture f(2);
        f.self.l1_color = true;
        CHECK_FALSE(is_branch(f.view()));
    }
}

TEST_CASE("removal rules") {
    SUBCASE("no branch children: rules 1-3 never fire") {
        auto f = red_sender(3, {1, 2}, {});
        for (Label u = 1; u <= 3; ++u) {
            const auto r = redundancy(f.view(), u);
            CHECK_FALSE(r.rule1);
            CHECK_FALSE(r.rule2);
            CHECK_FALSE(r.rule3);
        }
    }
    SUBCASE("rule 1: some but not all red children are branches") {
        auto f = red_sender(4, {1, 2, 3}, {2, 3});
        CHECK(redundancy(f.view(), 2).rule1);
        CHECK(redundancy(f.view(), 3).rule1);
        CHECK_FALSE(redundancy(f.view(), 1).redundant);
        CHECK(redundant_labels(f.view()) == labels(4, {2, 3}));
    }
    SUBCASE("rule 2: all branches, the minimum label survives") {
        auto f = red_sender(5, {2, 5}, {2, 5});
        const auto r2 = redundancy(f.view(), 2);
        const auto r5 = redundancy(f.view(), 5);
        CHECK_FALSE(r2.redundant);
        CHECK(r5.rule2);
        CHECK(r5.redundant);
        CHECK_FALSE(r5.rule1);
        CHECK_FALSE(r5.rule3);
        CHECK(redundant_labels(f.view()) == labels(5, {5}));
    }
    SUBCASE("rule 3: a target drops every branch child") {
        auto f = red_sender(3, {1, 3}, {1, 3});
        f.roles.is_sender = false;
        f.roles.is_target = true;
        for (Label u : {1u, 3u}) {
            const auto r = redundancy(f.view(), u);
            CHECK(r.rule3);
            CHECK(r.redundant);
        }
        CHECK(redundancy(f.view(), 1).rule2 == false);  // label 1 is the minimum
        CHECK(redundant_labels(f.view()) == labels(3, {1, 3}));
    }
    SUBCASE("rule 4 needs a parent") {
        auto f = red_sender(2, {1}, {});
        for (Label u = 1; u <= 2; ++u) CHECK_FALSE(redundancy(f.view(), u).rule4);
    }
    SUBCASE("rule 4: parent has no arc toward the node and no blue child") {
        ViewFixture f(3);
        f.self.l1_color = true;
        f.self.l1_parent = 1;
        f.reverse = {3, 1, 1};
        f.l1_child(2, true);
        f.nbr(1).arc = LabelSet(4);
        CHECK(redundancy(f.view(), 2).rule4);
        CHECK(redundancy(f.view(), 3).rule4);  // independent of u
        CHECK(redundant_labels(f.view()) == labels(3, {1, 2, 3}));

        f.nbr(1).arc.set(3);  // parent's arc toward us
        CHECK_FALSE(redundancy(f.view(), 2).rule4);

        f.nbr(1).arc.reset(3);
        f.blue_child(3);
        CHECK_FALSE(redundancy(f.view(), 2).rule4);
    }
    SUBCASE("branch set not contained in the red set") {
        // A branch-flagged child that is not red: neither rule 1 nor rule 2/3.
        auto f = red_sender(3, {1}, {});
        f.l1_child(2, false, true);
        CHECK_FALSE(redundancy(f.view(), 2).redundant);
    }
}

TEST_CASE("enabled_action priority") {
    SUBCASE("fixpoint of the centralized construction is disabled everywhere") {
        for (std::uint64_t seed = 0; seed < 40; ++seed) {
            const auto inst = testing::random_instance(seed, 4, 25, 4, seed % 3 == 0);
            const auto ref = reference_construct(inst.topology, inst.roles);
            const RoleTable roles(inst.topology.node_count(), inst.roles);
            const NetworkView net(inst.topology, roles, ref);
            for (NodeId v = 0; v < inst.topology.node_count(); ++v)
                CHECK_FALSE(net.enabled(v).has_value());
        }
    }
    SUBCASE("wrong distance and wrong color: distance first") {
        ViewFixture f(2);
        f.roles.is_target = true;
        f.nbr(1).l1_dist = 3;
        f.nbr(2).l1_dist = 4;
        f.self.l1_dist = 9;
        f.self.l1_parent = 1;
        f.self.l1_color = false;
        const auto g = raw_guards(f.view());
        CHECK(g[0]);
        CHECK(g[2]);
        CHECK(enabled_action(f.view()) == ActionId::L1FixDist);
    }
    SUBCASE("wrong arc outranks wrong branch flag") {
        const auto inst = testing::p3_instance();
        auto cfg = reference_construct(inst.topology, inst.roles);
        cfg[1].arc.set(1);  // arc toward s, not a layer-3 arc
        cfg[1].l4_branch = !cfg[1].l4_branch;
        const RoleTable roles(3, inst.roles);
        const NetworkView net(inst.topology, roles, cfg);
        const auto g = raw_guards(net.view(1));
        CHECK(g[7]);
        CHECK(g[8]);
        for (std::size_t i = 0; i < 7; ++i) CHECK_FALSE(g[i]);
        CHECK(net.enabled(1) == ActionId::L4RemoveWrongArc);
    }
}

TEST_CASE("apply_action") {
    SUBCASE("L1FixDist on the P3 target changes one field") {
        ViewFixture f(1);
        f.roles.is_target = true;
        f.reverse = {2};
        f.nbr(1).l1_dist = 1;
        f.nbr(1).l1_parent = 1;
        REQUIRE(enabled_action(f.view()) == ActionId::L1FixDist);
        NodeState expected = f.self;
        expected.l1_dist = 2;
        CHECK(apply_action(f.view(), ActionId::L1FixDist) == expected);
    }
    SUBCASE("L4AddArc sets exactly the missing arcs") {
        auto f = red_sender(4, {1, 4}, {});
        f.self.arc.set(2, false);
        REQUIRE(enabled_action(f.view()) == ActionId::L4AddArc);
        NodeState expected = f.self;
        expected.arc = labels(4, {1, 4});
        CHECK(apply_action(f.view(), ActionId::L4AddArc) == expected);
    }
    SUBCASE("L4RemoveRedundantArc clears the redundant arc") {
        auto f = red_sender(5, {2, 5}, {2, 5});
        f.self.l4_branch = true;
        f.self.arc = labels(5, {2, 5});
        REQUIRE(enabled_action(f.view()) == ActionId::L4RemoveRedundantArc);
        const auto next = apply_action(f.view(), ActionId::L4RemoveRedundantArc);
        CHECK(next.arc == labels(5, {2}));
        CHECK(next.l3_arc == f.self.l3_arc);
    }
    SUBCASE("applying a non-enabled action is a contract violation") {
        ViewFixture f(1);
        f.roles.is_target = true;
        f.nbr(1).l1_dist = 1;
        CHECK_THROWS_AS(apply_action(f.view(), ActionId::L1FixColor), ContractViolation);
    }
}

TEST_CASE("properties over random configurations") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        const auto inst = testing::random_instance(seed, 3, 20, 4, seed % 2 == 1);
        const auto& topo = inst.topology;
        const auto cfg = random_configuration(topo, seed + 1000);
        const RoleTable roles(topo.node_count(), inst.roles);
        const NetworkView net(topo, roles, cfg);
        for (NodeId v = 0; v < topo.node_count(); ++v) {
            const auto view = net.view(v);
            const auto guards = raw_guards(view);
            const auto action = enabled_action(view);
            // Purity.
            CHECK(enabled_action(view) == action);
            // The enabled action is the first true guard; nothing else is enabled.
            std::optional<ActionId> first;
            for (std::size_t i = 0; i < kActionCount; ++i)
                if (guards[i]) {
                    first = kAllActions[i];
                    break;
                }
            CHECK(action == first);
            if (action) {
                const auto next = apply_action(view, *action);
                CHECK(apply_action(view, *action) == next);
                CHECK(state_is_valid(next, topo.degree(v), topo.node_count()));
            }
        }
    }
}

TEST_CASE("blue nodes never have redundant arcs in layer-3 legitimate configurations") {
    for (std::uint64_t seed = 0; seed < 80; ++seed) {
        const auto inst = testing::random_instance(seed, 4, 30, 5, seed % 2 == 0);
        auto cfg = reference_construct(inst.topology, inst.roles);
        // Any output arcs and branch flags on top of legitimate layers 1-3.
        const auto noise = random_configuration(inst.topology, seed);
        for (NodeId v = 0; v < cfg.size(); ++v) {
            cfg[v].arc = noise[v].arc;
            cfg[v].l4_branch = noise[v].l4_branch;
        }
        const RoleTable roles(inst.topology.node_count(), inst.roles);
        const NetworkView net(inst.topology, roles, cfg);
        for (NodeId v = 0; v < cfg.size(); ++v)
            if (cfg[v].l2_color) CHECK(redundant_labels(net.view(v)).none());
    }
}

}  // TEST_SUITE
