#include "mwst/verifier.hpp"

#include <algorithm>
#include <limits>

#include <json.hpp>

#include "mwst/errors.hpp"
#include "mwst/simulator.hpp"

namespace mwst {

namespace {

constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

struct Adjacency {
    std::vector<std::vector<NodeId>> out;
    std::vector<std::vector<NodeId>> in;
};

Adjacency adjacency(std::uint32_t n, const std::vector<Edge>& arcs, std::size_t skip = SIZE_MAX) {
    Adjacency a{std::vector<std::vector<NodeId>>(n), std::vector<std::vector<NodeId>>(n)};
    for (std::size_t i = 0; i < arcs.size(); ++i) {
        if (i == skip) continue;
        a.out[arcs[i].first].push_back(arcs[i].second);
        a.in[arcs[i].second].push_back(arcs[i].first);
    }
    return a;
}

std::vector<char> reach(const std::vector<std::vector<NodeId>>& next,
                        const std::vector<NodeId>& sources) {
    std::vector<char> seen(next.size(), 0);
    std::vector<NodeId> stack;
    for (NodeId s : sources)
        if (!seen[s]) {
            seen[s] = 1;
            stack.push_back(s);
        }
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        for (NodeId u : next[v])
            if (!seen[u]) {
                seen[u] = 1;
                stack.push_back(u);
            }
    }
    return seen;
}

// C1 and C2 only.
std::pair<std::vector<NodeId>, std::vector<NodeId>> reachability_violations(
    const RoleAssignment& roles, const Adjacency& a) {
    const auto reaches_target = reach(a.in, roles.targets);
    const auto reached_from_sender = reach(a.out, roles.senders);
    std::pair<std::vector<NodeId>, std::vector<NodeId>> out;
    for (NodeId s : roles.senders)
        if (!reaches_target[s]) out.first.push_back(s);
    for (NodeId t : roles.targets)
        if (!reached_from_sender[t]) out.second.push_back(t);
    return out;
}

std::vector<NodeId> find_cycle(const std::vector<std::vector<NodeId>>& out) {
    const auto n = static_cast<std::uint32_t>(out.size());
    std::vector<std::uint8_t> color(n, 0);  // 0 new, 1 on stack, 2 done
    std::vector<NodeId> parent(n, 0);
    for (NodeId root = 0; root < n; ++root) {
        if (color[root]) continue;
        std::vector<std::pair<NodeId, std::size_t>> stack{{root, 0}};
        color[root] = 1;
        while (!stack.empty()) {
            auto& [v, i] = stack.back();
            if (i < out[v].size()) {
                NodeId u = out[v][i++];
                if (color[u] == 1) {
                    std::vector<NodeId> cycle{u};
                    for (NodeId w = v; w != u; w = parent[w]) cycle.push_back(w);
                    std::reverse(cycle.begin() + 1, cycle.end());
                    return cycle;
                }
                if (color[u] == 0) {
                    color[u] = 1;
                    parent[u] = v;
                    stack.emplace_back(u, 0);
                }
            } else {
                color[v] = 2;
                stack.pop_back();
            }
        }
    }
    return {};
}

// Canonical BFS parent: the smallest label among neighbors one hop closer.
Label bfs_parent(const Topology& topo, const std::vector<std::uint32_t>& dist, NodeId v) {
    for (Label l = 1; l <= topo.degree(v); ++l)
        if (dist[topo.neighbor(v, l)] + 1 == dist[v]) return l;
    return kSelf;
}

// Nodes sorted by decreasing distance, for leaf-to-root passes.
std::vector<NodeId> by_decreasing(const std::vector<std::uint32_t>& dist) {
    std::vector<NodeId> order(dist.size());
    for (NodeId v = 0; v < order.size(); ++v) order[v] = v;
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeId a, NodeId b) { return dist[a] > dist[b]; });
    return order;
}

bool is_child(const Topology& topo, NodeId v, Label l, Label child_parent) {
    return child_parent == topo.reverse_labels(v)[l - 1];
}

struct ForestFacts {
    std::vector<std::uint32_t> dist;
    std::vector<Label> parent;
    std::vector<char> colored;  // subtree contains a root-class member
};

// Multi-source BFS forest with canonical parents; `colored` marks nodes
// whose subtree contains a node with `seed[v]` set, excluding `blocked` nodes.
ForestFacts forest(const Topology& topo, const std::vector<NodeId>& roots,
                   const std::vector<char>& seed, const std::vector<char>& blocked) {
    ForestFacts f;
    f.dist = bfs_distances(topo, roots);
    const std::uint32_t n = topo.node_count();
    f.parent.assign(n, kSelf);
    for (NodeId v = 0; v < n; ++v)
        if (f.dist[v] != 0) f.parent[v] = bfs_parent(topo, f.dist, v);
    f.colored.assign(n, 0);
    for (NodeId v : by_decreasing(f.dist)) {
        if (blocked[v]) continue;
        if (seed[v]) f.colored[v] = 1;
        if (f.colored[v] && f.parent[v] != kSelf) f.colored[topo.neighbor(v, f.parent[v])] |= 1;
    }
    for (NodeId v = 0; v < n; ++v)
        if (blocked[v]) f.colored[v] = 0;
    return f;
}

std::vector<char> role_mask(std::uint32_t n, const std::vector<NodeId>& ids) {
    std::vector<char> m(n, 0);
    for (NodeId v : ids) m[v] = 1;
    return m;
}

}  // namespace

OutputDigraph extract_digraph(const Topology& topo, const Configuration& config,
                              ArcSource source) {
    OutputDigraph g;
    g.source = source;
    for (NodeId v = 0; v < topo.node_count(); ++v) {
        const LabelSet& flags = source == ArcSource::Output ? config[v].arc : config[v].l3_arc;
        flags.for_each([&](Label l) { g.arcs.emplace_back(v, topo.neighbor(v, l)); });
    }
    std::sort(g.arcs.begin(), g.arcs.end());
    return g;
}

DagVerdict check_weak_st_dag(const Topology& topo, const RoleAssignment& roles,
                             const OutputDigraph& digraph) {
    for (auto [a, b] : digraph.arcs)
        if (a >= topo.node_count() || topo.label_of(a, b) == kSelf)
            throw InvalidInput("digraph arc does not overlay a topology edge");
    const auto adj = adjacency(topo.node_count(), digraph.arcs);
    DagVerdict v;
    auto [c1, c2] = reachability_violations(roles, adj);
    v.senders_without_target = std::move(c1);
    v.unreached_targets = std::move(c2);
    v.c1 = v.senders_without_target.empty();
    v.c2 = v.unreached_targets.empty();
    v.cycle = find_cycle(adj.out);
    v.c3 = v.cycle.empty();
    return v;
}

MinimalityVerdict check_minimal(const Topology& topo, const RoleAssignment& roles,
                                const OutputDigraph& digraph) {
    if (!check_weak_st_dag(topo, roles, digraph).ok())
        throw InvalidInput("check_minimal: digraph is not a weakly ST-reachable DAG");
    MinimalityVerdict m{true, std::nullopt};
    for (std::size_t i = 0; i < digraph.arcs.size(); ++i) {
        auto [c1, c2] = reachability_violations(roles, adjacency(topo.node_count(), digraph.arcs, i));
        if (c1.empty() && c2.empty()) {
            m.minimal = false;
            m.removable_arc = digraph.arcs[i];
            break;
        }
    }
    return m;
}

bool layer_legitimate(const Topology& topo, const RoleAssignment& roles,
                      const Configuration& config, int layer) {
    const std::uint32_t n = topo.node_count();
    if (config.size() != n) return false;
    const auto senders = role_mask(n, roles.senders);
    const auto targets = role_mask(n, roles.targets);
    std::vector<char> red(n, 0);
    for (NodeId v = 0; v < n; ++v) red[v] = config[v].l1_color;

    switch (layer) {
        case 1: {
            const auto f = forest(topo, roles.senders, targets, std::vector<char>(n, 0));
            for (NodeId v = 0; v < n; ++v) {
                const NodeState& s = config[v];
                if (s.l1_dist != f.dist[v] || s.l1_parent != f.parent[v] ||
                    s.l1_color != static_cast<bool>(f.colored[v]))
                    return false;
            }
            return true;
        }
        case 2: {
            std::vector<NodeId> roots;
            for (NodeId v = 0; v < n; ++v)
                if (red[v]) roots.push_back(v);
            if (roots.empty()) return false;
            const auto f = forest(topo, roots, senders, red);
            for (NodeId v = 0; v < n; ++v) {
                const NodeState& s = config[v];
                if (s.l2_dist != f.dist[v] || s.l2_parent != f.parent[v] ||
                    s.l2_color != static_cast<bool>(f.colored[v]))
                    return false;
            }
            return true;
        }
        case 3: {
            for (NodeId v = 0; v < n; ++v) {
                const NodeState& s = config[v];
                for (Label l = 1; l <= topo.degree(v); ++l) {
                    const NodeState& u = config[topo.neighbor(v, l)];
                    const bool want = (s.l1_color && u.l1_color && is_child(topo, v, l, u.l1_parent)) ||
                                      (s.l2_color && s.l2_parent == l);
                    if (s.l3_arc.test(l) != want) return false;
                }
            }
            return true;
        }
        case 4: {
            const RoleTable table(n, roles);
            const NetworkView net(topo, table, config);
            for (NodeId v = 0; v < n; ++v) {
                const auto g = raw_guards(net.view(v));
                if (g[7] || g[8] || g[9] || g[10]) return false;
            }
            const auto digraph = extract_digraph(topo, config);
            if (!check_weak_st_dag(topo, roles, digraph).ok()) return false;
            return check_minimal(topo, roles, digraph).minimal;
        }
        default:
            throw InvalidParameter("layer must be in 1..4");
    }
}

bool is_final(const Topology& topo, const RoleAssignment& roles, const Configuration& config) {
    return enabled_nodes(topo, roles, config).empty();
}

Configuration reference_construct(const Topology& topo, const RoleAssignment& roles) {
    validate_roles(topo.node_count(), roles);
    const std::uint32_t n = topo.node_count();
    const auto senders = role_mask(n, roles.senders);
    const auto targets = role_mask(n, roles.targets);
    Configuration c = zero_configuration(topo);

    // Layer 1: BFS forest from the senders, red = subtree holds a target.
    const auto f1 = forest(topo, roles.senders, targets, std::vector<char>(n, 0));
    std::vector<char> red = f1.colored;
    // Layer 2: BFS forest from red nodes, blue = non-red subtree holds a sender.
    std::vector<NodeId> red_nodes;
    for (NodeId v = 0; v < n; ++v)
        if (red[v]) red_nodes.push_back(v);
    const auto f2 = forest(topo, red_nodes, senders, red);

    for (NodeId v = 0; v < n; ++v) {
        NodeState& s = c[v];
        s.l1_dist = f1.dist[v];
        s.l1_parent = f1.parent[v];
        s.l1_color = red[v];
        s.l2_dist = f2.dist[v];
        s.l2_parent = f2.parent[v];
        s.l2_color = f2.colored[v];
    }

    // L1 children per node, by label; blue children likewise on the L2 forest.
    std::vector<std::vector<Label>> red_kids(n), blue_kids(n);
    for (NodeId v = 0; v < n; ++v) {
        if (c[v].l1_parent != kSelf && red[v]) {
            const NodeId p = topo.neighbor(v, c[v].l1_parent);
            red_kids[p].push_back(topo.label_of(p, v));
        }
        if (c[v].l2_parent != kSelf && c[v].l2_color) {
            const NodeId p = topo.neighbor(v, c[v].l2_parent);
            blue_kids[p].push_back(topo.label_of(p, v));
        }
    }

    // Layer 3 arcs.
    for (NodeId v = 0; v < n; ++v) {
        NodeState& s = c[v];
        if (s.l1_color)
            for (Label l : red_kids[v]) s.l3_arc.set(l);
        if (s.l2_color) s.l3_arc.set(s.l2_parent);
    }

    // Branch flags, leaves of the L1 forest first.
    for (NodeId v : by_decreasing(f1.dist)) {
        if (!red[v]) continue;
        bool branch = !blue_kids[v].empty();
        if (!branch && !targets[v] && !red_kids[v].empty())
            branch = std::all_of(red_kids[v].begin(), red_kids[v].end(),
                                 [&](Label l) { return c[topo.neighbor(v, l)].l4_branch; });
        c[v].l4_branch = branch;
    }

    // Output arcs: layer-3 arcs minus rules 1-3, then the rule-4 cascade from
    // roots to leaves.
    std::vector<NodeId> root_first = by_decreasing(f1.dist);
    std::reverse(root_first.begin(), root_first.end());
    for (NodeId v : root_first) {
        NodeState& s = c[v];
        s.arc = s.l3_arc;
        if (s.l1_parent != kSelf && blue_kids[v].empty()) {
            const NodeId p = topo.neighbor(v, s.l1_parent);
            if (!c[p].arc.test(topo.label_of(p, v))) {
                s.arc.clear();
                continue;
            }
        }
        std::vector<Label> branch_kids;
        for (Label l : red_kids[v])
            if (c[topo.neighbor(v, l)].l4_branch) branch_kids.push_back(l);
        if (branch_kids.empty()) continue;
        if (branch_kids.size() < red_kids[v].size()) {
            for (Label l : branch_kids) s.arc.reset(l);  // rule 1
        } else {
            const Label keep = *std::min_element(branch_kids.begin(), branch_kids.end());
            for (Label l : branch_kids)
                if (targets[v] || l != keep) s.arc.reset(l);  // rules 3 and 2
        }
    }
    return c;
}

VerdictReport verify(const Topology& topo, const RoleAssignment& roles,
                     const Configuration& config) {
    validate_configuration(topo, config);
    VerdictReport r;
    const auto digraph = extract_digraph(topo, config);
    r.dag = check_weak_st_dag(topo, roles, digraph);
    if (r.dag.ok()) r.minimality = check_minimal(topo, roles, digraph);
    bool lower = true;
    for (int l = 1; l <= 4; ++l) {
        lower = lower && layer_legitimate(topo, roles, config, l);
        r.layer_legitimate[l - 1] = lower;
    }
    r.final = is_final(topo, roles, config);
    return r;
}

std::string verdict_to_json(const VerdictReport& r) {
    nlohmann::json doc;
    doc["c1"] = {{"ok", r.dag.c1}, {"violating_senders", r.dag.senders_without_target}};
    doc["c2"] = {{"ok", r.dag.c2}, {"violating_targets", r.dag.unreached_targets}};
    doc["c3"] = {{"ok", r.dag.c3}, {"cycle", r.dag.cycle}};
    if (r.minimality) {
        nlohmann::json m{{"ok", r.minimality->minimal}};
        if (r.minimality->removable_arc)
            m["removable_arc"] = {r.minimality->removable_arc->first,
                                  r.minimality->removable_arc->second};
        doc["minimal"] = m;
    } else {
        doc["minimal"] = {{"ok", false}, {"skipped", "not a weakly ST-reachable DAG"}};
    }
    doc["layer_legitimate"] = r.layer_legitimate;
    doc["final"] = r.final;
    doc["all_pass"] = r.all_pass();
    return doc.dump(2) + "\n";
}

}  // namespace mwst
