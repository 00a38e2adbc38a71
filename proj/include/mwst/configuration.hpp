#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mwst/protocol.hpp"
#include "mwst/topology.hpp"

namespace mwst {

/// One NodeState per node, indexed like the Topology.
struct Configuration {
    std::vector<NodeState> states;

    [[nodiscard]] std::size_t size() const noexcept { return states.size(); }
    NodeState& operator[](NodeId v) noexcept { return states[v]; }
    const NodeState& operator[](NodeId v) const noexcept { return states[v]; }

    friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// Every node in the all-zero state.
Configuration zero_configuration(const Topology& topo);

/// Throws ValidationError naming the first node whose state does not fit its
/// degree or the distance cap n.
void validate_configuration(const Topology& topo, const Configuration& config);

/// Builds LocalViews over a configuration. Holds pointers into `config`, which
/// must outlive the view and must not be resized.
class NetworkView {
public:
    NetworkView(const Topology& topo, const RoleTable& roles, const Configuration& config);

    [[nodiscard]] LocalView view(NodeId v) const noexcept {
        return LocalView((*roles_)[v], config_->states[v],
                         std::span<const NeighborRef>(refs_.data() + topo_->offset(v),
                                                      topo_->degree(v)),
                         topo_->node_count());
    }
    [[nodiscard]] std::optional<ActionId> enabled(NodeId v) const { return enabled_action(view(v)); }

private:
    const Topology* topo_;
    const RoleTable* roles_;
    const Configuration* config_;
    std::vector<NeighborRef> refs_;
};

/// Redraws every field of each listed node uniformly from its full domain:
/// distances from [0, n], parents from {self} + labels, every boolean and arc
/// flag independently. Deterministic per seed.
Configuration randomize_states(const Topology& topo, Configuration config,
                               std::span<const NodeId> nodes, std::uint64_t seed);

/// randomize_states over all nodes, starting from the zero configuration.
Configuration random_configuration(const Topology& topo, std::uint64_t seed);

/// Picks max(1, round(fraction * n)) distinct nodes uniformly at random.
std::vector<NodeId> pick_nodes(const Topology& topo, double fraction, std::uint64_t seed);

/// Line-oriented configuration file. One header line "nodes <n>" followed by
/// one line per node:
///   <id> <l1_dist> <l1_parent> <l1_color> <l2_dist> <l2_parent> <l2_color>
///   <l3_arc bits> <arc bits> <l4_branch>
/// Bit strings list labels 1..degree left to right.
std::string configuration_to_string(const Configuration& config);
Configuration configuration_from_string(const Topology& topo, const std::string& text);
void save_configuration(const std::filesystem::path& path, const Configuration& config);
Configuration load_configuration(const Topology& topo, const std::filesystem::path& path);

}  // namespace mwst
