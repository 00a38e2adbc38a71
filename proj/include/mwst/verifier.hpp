#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "mwst/configuration.hpp"
#include "mwst/topology.hpp"

namespace mwst {

enum class ArcSource : std::uint8_t {
    Output,  // the `arc` variables
    Layer3,  // the `l3_arc` variables
};

/// Digraph overlaid on the topology. Arcs are sorted (from, to) pairs.
struct OutputDigraph {
    std::vector<Edge> arcs;
    ArcSource source = ArcSource::Output;
};

/// C1/C2/C3 outcome with witnesses.
struct DagVerdict {
    bool c1 = false;
    std::vector<NodeId> senders_without_target;  // C1 violations
    bool c2 = false;
    std::vector<NodeId> unreached_targets;       // C2 violations
    bool c3 = false;
    std::vector<NodeId> cycle;                   // v0 -> v1 -> ... -> v0 when !c3

    [[nodiscard]] bool ok() const noexcept { return c1 && c2 && c3; }
};

struct MinimalityVerdict {
    bool minimal = false;
    std::optional<Edge> removable_arc;  // deleting it keeps C1 and C2
};

struct VerdictReport {
    DagVerdict dag;
    /// Absent when the digraph is not a weakly ST-reachable DAG.
    std::optional<MinimalityVerdict> minimality;
    /// Layer l is true iff layers 1..l are all legitimate.
    std::array<bool, 4> layer_legitimate{};
    bool final = false;

    [[nodiscard]] bool all_pass() const noexcept {
        return dag.ok() && minimality && minimality->minimal && final &&
               layer_legitimate[3];
    }
};

OutputDigraph extract_digraph(const Topology& topo, const Configuration& config,
                              ArcSource source = ArcSource::Output);

DagVerdict check_weak_st_dag(const Topology& topo, const RoleAssignment& roles,
                             const OutputDigraph& digraph);

/// Brute force: delete each arc in turn and re-check C1 and C2. Throws
/// InvalidInput unless the digraph already satisfies C1, C2 and C3.
MinimalityVerdict check_minimal(const Topology& topo, const RoleAssignment& roles,
                                const OutputDigraph& digraph);

/// Structural legitimacy of one layer, assuming layers below it are
/// legitimate. `layer` must be 1..4.
bool layer_legitimate(const Topology& topo, const RoleAssignment& roles,
                      const Configuration& config, int layer);

/// True iff no node has an enabled action.
bool is_final(const Topology& topo, const RoleAssignment& roles, const Configuration& config);

/// Centralized computation of the fixpoint configuration, independent of the
/// guarded-action code.
Configuration reference_construct(const Topology& topo, const RoleAssignment& roles);

/// Full report over the output digraph of `config`.
VerdictReport verify(const Topology& topo, const RoleAssignment& roles,
                     const Configuration& config);

/// JSON rendering of a report.
std::string verdict_to_json(const VerdictReport& report);

}  // namespace mwst
