#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "mwst/label_set.hpp"

namespace mwst {

/// Simulator-internal node index. The protocol never sees it.
using NodeId = std::uint32_t;

using Edge = std::pair<NodeId, NodeId>;

/// Undirected simple connected graph with per-node local labels.
///
/// Neighbors of each node are stored in label order: neighbors(v)[l - 1] is
/// the neighbor that v calls l. reverse_labels(v)[l - 1] is the label that
/// neighbor assigns to v.
class Topology {
public:
    Topology() = default;

    /// Builds from an edge list with canonical labels (ascending neighbor id).
    /// Throws ValidationError if the graph is not simple and connected.
    static Topology from_edges(std::uint32_t node_count, std::span<const Edge> edges);

    /// Builds with explicit labels: label_orders[v] lists v's neighbors in label
    /// order. Throws ValidationError if any order is not a permutation of N(v).
    static Topology from_edges(std::uint32_t node_count, std::span<const Edge> edges,
                               const std::vector<std::vector<NodeId>>& label_orders);

    [[nodiscard]] std::uint32_t node_count() const noexcept { return node_count_; }
    [[nodiscard]] std::size_t edge_count() const noexcept { return neighbors_.size() / 2; }

    [[nodiscard]] std::uint32_t degree(NodeId v) const noexcept {
        return offsets_[v + 1] - offsets_[v];
    }
    [[nodiscard]] std::span<const NodeId> neighbors(NodeId v) const noexcept {
        return {neighbors_.data() + offsets_[v], degree(v)};
    }
    [[nodiscard]] std::span<const Label> reverse_labels(NodeId v) const noexcept {
        return {reverse_.data() + offsets_[v], degree(v)};
    }
    [[nodiscard]] NodeId neighbor(NodeId v, Label l) const noexcept {
        return neighbors_[offsets_[v] + l - 1];
    }
    /// Label v assigns to neighbor u, or kSelf if u is not adjacent to v.
    [[nodiscard]] Label label_of(NodeId v, NodeId u) const noexcept;

    [[nodiscard]] std::uint32_t max_degree() const noexcept;

    /// Sorted edge list with first < second.
    [[nodiscard]] std::vector<Edge> edges() const;

    /// True when every node's labels are the canonical ascending-id order.
    [[nodiscard]] bool has_canonical_labels() const noexcept;

    /// Position of each node's neighbor list in the flat adjacency arrays.
    [[nodiscard]] std::uint32_t offset(NodeId v) const noexcept { return offsets_[v]; }

    friend bool operator==(const Topology&, const Topology&) = default;

private:
    std::uint32_t node_count_ = 0;
    std::vector<std::uint32_t> offsets_;
    std::vector<NodeId> neighbors_;
    std::vector<Label> reverse_;
};

/// Designated sender set S and target set T, each sorted ascending.
struct RoleAssignment {
    std::vector<NodeId> senders;
    std::vector<NodeId> targets;

    friend bool operator==(const RoleAssignment&, const RoleAssignment&) = default;
};

/// Per-node role flags derived from a RoleAssignment.
struct RoleFlags {
    bool is_sender = false;
    bool is_target = false;
};

/// Dense per-node role table for O(1) lookup.
class RoleTable {
public:
    RoleTable() = default;
    RoleTable(std::uint32_t node_count, const RoleAssignment& roles);
    [[nodiscard]] RoleFlags operator[](NodeId v) const noexcept { return flags_[v]; }
    [[nodiscard]] std::size_t size() const noexcept { return flags_.size(); }

private:
    std::vector<RoleFlags> flags_;
};

/// Throws ValidationError unless |S|,|T| >= 1, S and T are disjoint, ids < n
/// and neither set repeats an id.
void validate_roles(std::uint32_t node_count, const RoleAssignment& roles);

struct Instance {
    Topology topology;
    RoleAssignment roles;

    friend bool operator==(const Instance&, const Instance&) = default;
};

/// d x d grid, node id = row * d + col. Throws InvalidParameter if d < 2.
Topology build_grid(std::uint32_t d);

/// Random simple connected graph on n nodes: a random spanning tree plus
/// uniformly chosen extra edges until the edge count reaches
/// round(edge_density * n(n-1)/2). Density is clamped to [0, 1].
Topology build_random_connected(std::uint32_t n, double edge_density, std::uint64_t seed);

/// Same graph, each node's labels replaced by a uniformly random permutation.
Topology randomize_labels(const Topology& topo, std::uint64_t seed);

/// Uniformly random disjoint S and T. Throws InvalidParameter if infeasible.
RoleAssignment assign_roles(const Topology& topo, std::uint32_t s_count, std::uint32_t t_count,
                            std::uint64_t seed);

/// Hop distances from the given sources (multi-source BFS).
std::vector<std::uint32_t> bfs_distances(const Topology& topo, std::span<const NodeId> sources);

/// Exact diameter by BFS from every node.
std::uint32_t diameter(const Topology& topo);

bool is_connected(const Topology& topo);

/// JSON instance file: {"nodes", "edges", "senders", "targets", optional "labels"}.
void save_instance(const std::filesystem::path& path, const Instance& instance);
Instance load_instance(const std::filesystem::path& path);
std::string instance_to_string(const Instance& instance);
Instance instance_from_string(const std::string& text);

}  // namespace mwst
