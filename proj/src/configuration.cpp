#include "mwst/configuration.hpp"

#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "mwst/errors.hpp"

namespace mwst {

Configuration zero_configuration(const Topology& topo) {
    Configuration c;
    c.states.reserve(topo.node_count());
    for (NodeId v = 0; v < topo.node_count(); ++v) c.states.push_back(NodeState::zero(topo.degree(v)));
    return c;
}

void validate_configuration(const Topology& topo, const Configuration& config) {
    if (config.size() != topo.node_count())
        throw ValidationError("configuration has " + std::to_string(config.size()) +
                              " nodes, instance has " + std::to_string(topo.node_count()));
    for (NodeId v = 0; v < topo.node_count(); ++v)
        if (!state_is_valid(config[v], topo.degree(v), topo.node_count()))
            throw ValidationError("node " + std::to_string(v) +
                                  ": state does not fit the node's degree or distance cap");
}

NetworkView::NetworkView(const Topology& topo, const RoleTable& roles, const Configuration& config)
    : topo_(&topo), roles_(&roles), config_(&config) {
    refs_.resize(2 * topo.edge_count());
    for (NodeId v = 0; v < topo.node_count(); ++v) {
        auto ns = topo.neighbors(v);
        auto rev = topo.reverse_labels(v);
        for (std::size_t i = 0; i < ns.size(); ++i)
            refs_[topo.offset(v) + i] = NeighborRef{&config.states[ns[i]], rev[i]};
    }
}

Configuration randomize_states(const Topology& topo, Configuration config,
                               std::span<const NodeId> nodes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const std::uint32_t n = topo.node_count();
    std::uniform_int_distribution<std::uint32_t> dist(0, n);
    std::bernoulli_distribution coin(0.5);
    for (NodeId v : nodes) {
        const std::uint32_t deg = topo.degree(v);
        std::uniform_int_distribution<Label> parent(0, deg);
        NodeState s = NodeState::zero(deg);
        s.l1_dist = dist(rng);
        s.l1_parent = parent(rng);
        s.l1_color = coin(rng);
        s.l2_dist = dist(rng);
        s.l2_parent = parent(rng);
        s.l2_color = coin(rng);
        for (Label l = 1; l <= deg; ++l) s.l3_arc.set(l, coin(rng));
        for (Label l = 1; l <= deg; ++l) s.arc.set(l, coin(rng));
        s.l4_branch = coin(rng);
        config.states.at(v) = std::move(s);
    }
    return config;
}

Configuration random_configuration(const Topology& topo, std::uint64_t seed) {
    std::vector<NodeId> all(topo.node_count());
    std::iota(all.begin(), all.end(), 0);
    return randomize_states(topo, zero_configuration(topo), all, seed);
}

std::vector<NodeId> pick_nodes(const Topology& topo, double fraction, std::uint64_t seed) {
    const std::uint32_t n = topo.node_count();
    auto count = static_cast<std::uint32_t>(std::llround(std::clamp(fraction, 0.0, 1.0) * n));
    count = std::clamp<std::uint32_t>(count, 1, n);
    std::vector<NodeId> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    std::mt19937_64 rng(seed);
    for (std::uint32_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::uint32_t> pick(i, n - 1);
        std::swap(ids[i], ids[pick(rng)]);
    }
    ids.resize(count);
    std::sort(ids.begin(), ids.end());
    return ids;
}

namespace {

std::string bits(const LabelSet& set) {
    std::string out(set.size(), '0');
    for (Label l = 1; l <= set.size(); ++l)
        if (set.test(l)) out[l - 1] = '1';
    return out.empty() ? "-" : out;
}

}  // namespace

std::string configuration_to_string(const Configuration& config) {
    std::ostringstream out;
    out << "nodes " << config.size() << "\n";
    for (NodeId v = 0; v < config.size(); ++v) {
        const NodeState& s = config[v];
        out << v << ' ' << s.l1_dist << ' ' << s.l1_parent << ' ' << int{s.l1_color} << ' '
            << s.l2_dist << ' ' << s.l2_parent << ' ' << int{s.l2_color} << ' ' << bits(s.l3_arc)
            << ' ' << bits(s.arc) << ' ' << int{s.l4_branch} << "\n";
    }
    return out.str();
}

Configuration configuration_from_string(const Topology& topo, const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string keyword;
    std::uint64_t count = 0;
    if (!std::getline(in, line) || !(std::istringstream(line) >> keyword >> count) ||
        keyword != "nodes")
        throw ParseError("configuration: expected header 'nodes <n>'");
    if (count != topo.node_count())
        throw ValidationError("configuration: header declares " + std::to_string(count) +
                              " nodes, instance has " + std::to_string(topo.node_count()));

    const std::uint32_t n = topo.node_count();
    Configuration config;
    config.states.reserve(n);
    for (NodeId v = 0; v < n; ++v) {
        const std::string where = "configuration: node " + std::to_string(v) + ": ";
        if (!std::getline(in, line))
            throw ParseError(where + "missing (file ends after " + std::to_string(v) + " nodes)");
        std::istringstream fields(line);
        std::vector<std::string> tok;
        for (std::string t; fields >> t;) tok.push_back(t);
        if (tok.size() != 10)
            throw ParseError(where + "expected 10 fields, got " + std::to_string(tok.size()));
        auto number = [&](std::size_t i, const char* name) -> std::uint64_t {
            const std::string& t = tok[i];
            if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos ||
                t.size() > 10)
                throw ParseError(where + name + " is not a non-negative integer");
            return std::stoull(t);
        };
        auto flag = [&](std::size_t i, const char* name) {
            if (tok[i] != "0" && tok[i] != "1") throw ParseError(where + name + " must be 0 or 1");
            return tok[i] == "1";
        };
        const std::uint32_t deg = topo.degree(v);
        auto arcs = [&](std::size_t i, const char* name) {
            const std::string& t = tok[i];
            if (t.size() != deg)
                throw ValidationError(where + name + " has " + std::to_string(t.size()) +
                                      " entries, node degree is " + std::to_string(deg));
            LabelSet set(deg);
            for (Label l = 1; l <= deg; ++l) {
                if (t[l - 1] != '0' && t[l - 1] != '1')
                    throw ParseError(where + name + " must be a 0/1 string");
                set.set(l, t[l - 1] == '1');
            }
            return set;
        };
        if (number(0, "id") != v) throw ParseError(where + "node ids must appear in order");
        NodeState s;
        const auto d1 = number(1, "l1_dist");
        const auto p1 = number(2, "l1_parent");
        s.l1_color = flag(3, "l1_color");
        const auto d2 = number(4, "l2_dist");
        const auto p2 = number(5, "l2_parent");
        s.l2_color = flag(6, "l2_color");
        s.l3_arc = arcs(7, "l3_arc");
        s.arc = arcs(8, "arc");
        s.l4_branch = flag(9, "l4_branch");
        if (d1 > n || d2 > n) throw ValidationError(where + "distance exceeds the cap n");
        if (p1 > deg || p2 > deg) throw ValidationError(where + "parent label exceeds the degree");
        s.l1_dist = static_cast<std::uint32_t>(d1);
        s.l2_dist = static_cast<std::uint32_t>(d2);
        s.l1_parent = static_cast<Label>(p1);
        s.l2_parent = static_cast<Label>(p2);
        config.states.push_back(std::move(s));
    }
    return config;
}

void save_configuration(const std::filesystem::path& path, const Configuration& config) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << configuration_to_string(config);
}

Configuration load_configuration(const Topology& topo, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return configuration_from_string(topo, buf.str());
}

}  // namespace mwst
