#include "mwst/topology.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <queue>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "mwst/errors.hpp"

namespace mwst {

namespace {

using Json = nlohmann::json;

std::vector<std::vector<NodeId>> adjacency_from_edges(std::uint32_t n, std::span<const Edge> edges) {
    if (n == 0) throw ValidationError("nodes: graph must have at least one node");
    std::vector<std::vector<NodeId>> adj(n);
    std::set<Edge> seen;
    for (std::size_t i = 0; i < edges.size(); ++i) {
        auto [a, b] = edges[i];
        const std::string where = "edges[" + std::to_string(i) + "]: ";
        if (a >= n || b >= n) throw ValidationError(where + "node id out of range");
        if (a == b) throw ValidationError(where + "self-loop on node " + std::to_string(a));
        if (!seen.insert({std::min(a, b), std::max(a, b)}).second)
            throw ValidationError(where + "duplicate edge {" + std::to_string(a) + "," +
                                  std::to_string(b) + "}");
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    return adj;
}

bool connected(const std::vector<std::vector<NodeId>>& adj) {
    if (adj.empty()) return true;
    std::vector<char> seen(adj.size(), 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
        NodeId v = stack.back();
        stack.pop_back();
        for (NodeId u : adj[v])
            if (!seen[u]) {
                seen[u] = 1;
                ++reached;
                stack.push_back(u);
            }
    }
    return reached == adj.size();
}

}  // namespace

Topology Topology::from_edges(std::uint32_t node_count, std::span<const Edge> edges) {
    auto adj = adjacency_from_edges(node_count, edges);
    for (auto& list : adj) std::sort(list.begin(), list.end());
    return from_edges(node_count, edges, adj);
}

Topology Topology::from_edges(std::uint32_t node_count, std::span<const Edge> edges,
                              const std::vector<std::vector<NodeId>>& label_orders) {
    auto adj = adjacency_from_edges(node_count, edges);
    if (!connected(adj)) throw ValidationError("edges: graph is not connected");
    if (label_orders.size() != node_count)
        throw ValidationError("labels: expected " + std::to_string(node_count) + " entries, got " +
                              std::to_string(label_orders.size()));

    Topology t;
    t.node_count_ = node_count;
    t.offsets_.assign(node_count + 1, 0);
    for (NodeId v = 0; v < node_count; ++v) {
        auto expected = adj[v];
        auto given = label_orders[v];
        std::sort(expected.begin(), expected.end());
        std::sort(given.begin(), given.end());
        if (expected != given)
            throw ValidationError("labels[" + std::to_string(v) +
                                  "]: not a permutation of the node's neighbors");
        t.offsets_[v + 1] = t.offsets_[v] + static_cast<std::uint32_t>(adj[v].size());
    }
    t.neighbors_.resize(t.offsets_.back());
    t.reverse_.resize(t.offsets_.back());
    for (NodeId v = 0; v < node_count; ++v)
        std::copy(label_orders[v].begin(), label_orders[v].end(),
                  t.neighbors_.begin() + t.offsets_[v]);
    for (NodeId v = 0; v < node_count; ++v)
        for (Label l = 1; l <= t.degree(v); ++l)
            t.reverse_[t.offsets_[v] + l - 1] = t.label_of(t.neighbor(v, l), v);
    return t;
}

Label Topology::label_of(NodeId v, NodeId u) const noexcept {
    auto ns = neighbors(v);
    auto it = std::find(ns.begin(), ns.end(), u);
    return it == ns.end() ? kSelf : static_cast<Label>(it - ns.begin()) + 1;
}

std::uint32_t Topology::max_degree() const noexcept {
    std::uint32_t best = 0;
    for (NodeId v = 0; v < node_count_; ++v) best = std::max(best, degree(v));
    return best;
}

std::vector<Edge> Topology::edges() const {
    std::vector<Edge> out;
    out.reserve(edge_count());
    for (NodeId v = 0; v < node_count_; ++v)
        for (NodeId u : neighbors(v))
            if (v < u) out.emplace_back(v, u);
    std::sort(out.begin(), out.end());
    return out;
}

bool Topology::has_canonical_labels() const noexcept {
    for (NodeId v = 0; v < node_count_; ++v) {
        auto ns = neighbors(v);
        if (!std::is_sorted(ns.begin(), ns.end())) return false;
    }
    return true;
}

RoleTable::RoleTable(std::uint32_t node_count, const RoleAssignment& roles) : flags_(node_count) {
    for (NodeId s : roles.senders) flags_.at(s).is_sender = true;
    for (NodeId t : roles.targets) flags_.at(t).is_target = true;
}

void validate_roles(std::uint32_t node_count, const RoleAssignment& roles) {
    if (roles.senders.empty()) throw ValidationError("senders: at least one sender is required");
    if (roles.targets.empty()) throw ValidationError("targets: at least one target is required");
    std::vector<char> mark(node_count, 0);
    auto check = [&](const std::vector<NodeId>& ids, const char* field, char bit) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
            const std::string where = std::string(field) + "[" + std::to_string(i) + "]: ";
            if (ids[i] >= node_count) throw ValidationError(where + "node id out of range");
            if (mark[ids[i]] & bit) throw ValidationError(where + "duplicate node id");
            if (mark[ids[i]] != 0)
                throw ValidationError(where + "node " + std::to_string(ids[i]) +
                                      " is both a sender and a target");
            mark[ids[i]] |= bit;
        }
    };
    check(roles.senders, "senders", 1);
    check(roles.targets, "targets", 2);
}

Topology build_grid(std::uint32_t d) {
    if (d < 2) throw InvalidParameter("grid side must be at least 2");
    std::vector<Edge> edges;
    edges.reserve(2 * d * (d - 1));
    for (std::uint32_t r = 0; r < d; ++r)
        for (std::uint32_t c = 0; c < d; ++c) {
            const NodeId v = r * d + c;
            if (r + 1 < d) edges.emplace_back(v, v + d);
            if (c + 1 < d) edges.emplace_back(v, v + 1);
        }
    // Adjacency in north, south, west, east order; labels are then canonical.
    std::vector<std::vector<NodeId>> order(d * d);
    for (std::uint32_t r = 0; r < d; ++r)
        for (std::uint32_t c = 0; c < d; ++c) {
            auto& list = order[r * d + c];
            if (r > 0) list.push_back((r - 1) * d + c);
            if (r + 1 < d) list.push_back((r + 1) * d + c);
            if (c > 0) list.push_back(r * d + c - 1);
            if (c + 1 < d) list.push_back(r * d + c + 1);
            std::sort(list.begin(), list.end());
        }
    return Topology::from_edges(d * d, edges, order);
}

Topology build_random_connected(std::uint32_t n, double edge_density, std::uint64_t seed) {
    if (n < 2) throw InvalidParameter("random graph needs at least 2 nodes");
    std::mt19937_64 rng(seed);
    const std::uint64_t max_edges = std::uint64_t{n} * (n - 1) / 2;
    const double density = std::clamp(edge_density, 0.0, 1.0);
    const auto wanted = std::clamp<std::uint64_t>(
        static_cast<std::uint64_t>(std::llround(density * static_cast<double>(max_edges))), n - 1,
        max_edges);

    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    std::set<Edge> chosen;
    for (std::uint32_t i = 1; i < n; ++i) {
        std::uniform_int_distribution<std::uint32_t> pick(0, i - 1);
        NodeId a = order[i], b = order[pick(rng)];
        chosen.insert({std::min(a, b), std::max(a, b)});
    }
    std::vector<Edge> rest;
    for (NodeId a = 0; a < n; ++a)
        for (NodeId b = a + 1; b < n; ++b)
            if (!chosen.count({a, b})) rest.emplace_back(a, b);
    std::shuffle(rest.begin(), rest.end(), rng);
    for (std::size_t i = 0; chosen.size() < wanted; ++i) chosen.insert(rest[i]);

    std::vector<Edge> edges(chosen.begin(), chosen.end());
    return Topology::from_edges(n, edges);
}

Topology randomize_labels(const Topology& topo, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<NodeId>> order(topo.node_count());
    for (NodeId v = 0; v < topo.node_count(); ++v) {
        auto ns = topo.neighbors(v);
        order[v].assign(ns.begin(), ns.end());
        std::shuffle(order[v].begin(), order[v].end(), rng);
    }
    auto edges = topo.edges();
    return Topology::from_edges(topo.node_count(), edges, order);
}

RoleAssignment assign_roles(const Topology& topo, std::uint32_t s_count, std::uint32_t t_count,
                            std::uint64_t seed) {
    if (s_count < 1 || t_count < 1)
        throw InvalidParameter("sender and target counts must both be at least 1");
    if (std::uint64_t{s_count} + t_count > topo.node_count())
        throw InvalidParameter("sender + target count exceeds the node count");
    std::mt19937_64 rng(seed);
    std::vector<NodeId> ids(topo.node_count());
    std::iota(ids.begin(), ids.end(), 0);
    // Partial Fisher-Yates over the first s_count + t_count slots.
    for (std::uint32_t i = 0; i < s_count + t_count; ++i) {
        std::uniform_int_distribution<std::uint32_t> pick(i, topo.node_count() - 1);
        std::swap(ids[i], ids[pick(rng)]);
    }
    RoleAssignment roles;
    roles.senders.assign(ids.begin(), ids.begin() + s_count);
    roles.targets.assign(ids.begin() + s_count, ids.begin() + s_count + t_count);
    std::sort(roles.senders.begin(), roles.senders.end());
    std::sort(roles.targets.begin(), roles.targets.end());
    return roles;
}

std::vector<std::uint32_t> bfs_distances(const Topology& topo, std::span<const NodeId> sources) {
    constexpr auto kInf = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> dist(topo.node_count(), kInf);
    std::vector<NodeId> frontier;
    for (NodeId s : sources)
        if (dist[s] != 0) {
            dist[s] = 0;
            frontier.push_back(s);
        }
    for (std::size_t head = 0; head < frontier.size(); ++head) {
        NodeId v = frontier[head];
        for (NodeId u : topo.neighbors(v))
            if (dist[u] == kInf) {
                dist[u] = dist[v] + 1;
                frontier.push_back(u);
            }
    }
    return dist;
}

std::uint32_t diameter(const Topology& topo) {
    std::uint32_t best = 0;
    for (NodeId v = 0; v < topo.node_count(); ++v) {
        const NodeId src[] = {v};
        auto dist = bfs_distances(topo, src);
        best = std::max(best, *std::max_element(dist.begin(), dist.end()));
    }
    return best;
}

bool is_connected(const Topology& topo) {
    if (topo.node_count() == 0) return true;
    const NodeId src[] = {0};
    auto dist = bfs_distances(topo, src);
    return std::none_of(dist.begin(), dist.end(),
                        [](auto d) { return d == std::numeric_limits<std::uint32_t>::max(); });
}

std::string instance_to_string(const Instance& instance) {
    const auto& topo = instance.topology;
    Json doc;
    doc["nodes"] = topo.node_count();
    Json edges = Json::array();
    for (auto [a, b] : topo.edges()) edges.push_back({a, b});
    doc["edges"] = std::move(edges);
    doc["senders"] = instance.roles.senders;
    doc["targets"] = instance.roles.targets;
    if (!topo.has_canonical_labels()) {
        Json labels = Json::array();
        for (NodeId v = 0; v < topo.node_count(); ++v) {
            auto ns = topo.neighbors(v);
            labels.push_back(std::vector<NodeId>(ns.begin(), ns.end()));
        }
        doc["labels"] = std::move(labels);
    }
    return doc.dump(1) + "\n";
}

Instance instance_from_string(const std::string& text) {
    Json doc;
    try {
        doc = Json::parse(text);
    } catch (const Json::parse_error& e) {
        throw ParseError(std::string("instance: ") + e.what());
    }
    auto field = [&](const char* name) -> const Json& {
        if (!doc.is_object() || !doc.contains(name))
            throw ParseError(std::string("instance: missing field '") + name + "'");
        return doc.at(name);
    };
    auto as_ids = [](const Json& arr, const std::string& where) {
        if (!arr.is_array()) throw ParseError(where + ": expected an array");
        std::vector<NodeId> out;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            if (!arr[i].is_number_unsigned())
                throw ParseError(where + "[" + std::to_string(i) + "]: expected a node id");
            out.push_back(arr[i].get<NodeId>());
        }
        return out;
    };

    const Json& nodes = field("nodes");
    if (!nodes.is_number_unsigned() || nodes.get<std::uint64_t>() < 2)
        throw ParseError("nodes: expected an integer >= 2");
    const auto n = nodes.get<std::uint32_t>();

    const Json& edge_arr = field("edges");
    if (!edge_arr.is_array()) throw ParseError("edges: expected an array");
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < edge_arr.size(); ++i) {
        auto pair = as_ids(edge_arr[i], "edges[" + std::to_string(i) + "]");
        if (pair.size() != 2)
            throw ParseError("edges[" + std::to_string(i) + "]: expected a pair of node ids");
        edges.emplace_back(pair[0], pair[1]);
    }

    Instance inst;
    inst.roles.senders = as_ids(field("senders"), "senders");
    inst.roles.targets = as_ids(field("targets"), "targets");
    if (doc.contains("labels")) {
        const Json& labels = doc.at("labels");
        if (!labels.is_array()) throw ParseError("labels: expected an array");
        std::vector<std::vector<NodeId>> order;
        for (std::size_t v = 0; v < labels.size(); ++v)
            order.push_back(as_ids(labels[v], "labels[" + std::to_string(v) + "]"));
        inst.topology = Topology::from_edges(n, edges, order);
    } else {
        inst.topology = Topology::from_edges(n, edges);
    }
    validate_roles(n, inst.roles);
    std::sort(inst.roles.senders.begin(), inst.roles.senders.end());
    std::sort(inst.roles.targets.begin(), inst.roles.targets.end());
    return inst;
}

void save_instance(const std::filesystem::path& path, const Instance& instance) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << instance_to_string(instance);
}

Instance load_instance(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return instance_from_string(buf.str());
}

}  // namespace mwst
