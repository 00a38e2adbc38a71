// Command-line front end: gen, run, experiment, verify.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mwst/configuration.hpp"
#include "mwst/errors.hpp"
#include "mwst/experiment.hpp"
#include "mwst/simulator.hpp"
#include "mwst/topology.hpp"
#include "mwst/verifier.hpp"

namespace fs = std::filesystem;
using namespace mwst;

namespace {

// Accepts "a,b,c" items and "lo:hi[:step]" ranges, e.g. "6:86:2".
std::vector<std::uint32_t> parse_list(const std::vector<std::string>& items) {
    std::vector<std::uint32_t> out;
    for (const auto& item : items) {
        std::stringstream ss(item);
        for (std::string part; std::getline(ss, part, ',');) {
            std::vector<std::uint32_t> nums;
            std::stringstream ps(part);
            for (std::string tok; std::getline(ps, tok, ':');) nums.push_back(std::stoul(tok));
            if (nums.size() == 1) {
                out.push_back(nums[0]);
            } else if (nums.size() == 2 || nums.size() == 3) {
                const std::uint32_t stepv = nums.size() == 3 ? nums[2] : 1;
                if (stepv == 0) throw InvalidParameter("range step must be positive");
                for (std::uint32_t v = nums[0]; v <= nums[1]; v += stepv) out.push_back(v);
            } else {
                throw InvalidParameter("bad list item '" + part + "'");
            }
        }
    }
    return out;
}

SchedulerKind parse_scheduler(const std::string& name) {
    auto k = scheduler_from_name(name);
    if (!k) throw InvalidParameter("unknown scheduler '" + name + "'");
    return *k;
}

struct InstanceArgs {
    std::string instance;
    std::uint32_t grid_d = 0;
    std::uint32_t senders = 1;
    std::uint32_t targets = 1;
};

Instance load_or_build(const InstanceArgs& a, std::uint64_t seed) {
    if (!a.instance.empty()) return load_instance(a.instance);
    if (a.grid_d == 0) throw InvalidParameter("one of --instance or --grid-d is required");
    Instance inst{build_grid(a.grid_d), {}};
    inst.roles = assign_roles(inst.topology, a.senders, a.targets, derive_seed(seed, 0, 0, 0));
    return inst;
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
}

int cmd_gen(const InstanceArgs& a, std::uint32_t random_n, double density, bool random_labels,
            std::uint64_t seed, const std::string& out) {
    Instance inst;
    if (random_n > 0) {
        inst.topology = build_random_connected(random_n, density, seed);
        inst.roles = assign_roles(inst.topology, a.senders, a.targets, mix64(seed));
    } else {
        inst = load_or_build(a, seed);
    }
    if (random_labels) inst.topology = randomize_labels(inst.topology, mix64(seed + 1));
    if (out.empty())
        std::cout << instance_to_string(inst);
    else
        save_instance(out, inst);
    return 0;
}

int cmd_run(const InstanceArgs& a, const std::string& sched_name, std::uint64_t seed,
            const std::string& out, double perturb, bool from_legitimate,
            const std::string& trace_mode) {
    const Instance inst = load_or_build(a, seed);
    const Topology& topo = inst.topology;
    Configuration start = from_legitimate ? reference_construct(topo, inst.roles)
                                          : random_configuration(topo, derive_seed(seed, 0, 0, 1));
    if (perturb > 0) {
        const auto nodes = pick_nodes(topo, perturb, derive_seed(seed, 0, 0, 3));
        start = randomize_states(topo, std::move(start), nodes, derive_seed(seed, 0, 0, 4));
    }
    const SchedulerKind kind = parse_scheduler(sched_name);
    const std::uint32_t diam = diameter(topo);
    const std::uint64_t limit = kind == SchedulerKind::Synchronous
                                    ? round_cutoff(diam)
                                    : step_cutoff(diam, topo.node_count());
    const Trace trace = run(topo, inst.roles, start, SchedulerSpec{kind, derive_seed(seed, 0, 0, 2)},
                            RunOptions{limit, trace_mode == "full"});
    const bool converged = trace.converged && trace.rounds <= round_cutoff(diam);
    const VerdictReport verdict = verify(topo, inst.roles, trace.final_config);

    nlohmann::json summary{{"converged", converged},
                           {"steps", trace.steps},
                           {"rounds", trace.rounds},
                           {"diameter", diam},
                           {"round_cutoff", round_cutoff(diam)},
                           {"scheduler", sched_name},
                           {"layer_running_time", trace.layer_running_time},
                           {"layer_termination_round", trace.layer_termination_round},
                           {"layer_legitimacy_round", trace.layer_legitimacy_round},
                           {"verdict_pass", verdict.all_pass()}};
    std::cout << summary.dump(2) << "\n";
    if (!out.empty()) {
        fs::create_directories(out);
        write_file(fs::path(out) / "summary.json", summary.dump(2) + "\n");
        write_file(fs::path(out) / "verdict.json", verdict_to_json(verdict));
        write_file(fs::path(out) / "rounds.csv", trace_rounds_csv(trace));
        save_configuration(fs::path(out) / "initial.cfg", start);
        save_configuration(fs::path(out) / "final.cfg", trace.final_config);
        save_instance(fs::path(out) / "instance.json", inst);
        if (trace_mode == "full") {
            std::ostringstream steps;
            steps << "step,node,action\n";
            for (std::size_t i = 0; i < trace.step_log.size(); ++i)
                for (auto [v, act] : trace.step_log[i].executed)
                    steps << i << ',' << v << ',' << action_name(act) << "\n";
            write_file(fs::path(out) / "steps.csv", steps.str());
        }
    }
    return converged && verdict.all_pass() ? 0 : 1;
}

int cmd_verify(const std::string& instance, const std::string& config) {
    const Instance inst = load_instance(instance);
    const Configuration c = load_configuration(inst.topology, config);
    const VerdictReport r = verify(inst.topology, inst.roles, c);
    std::cout << verdict_to_json(r);
    return r.all_pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-stabilizing minimal weakly ST-reachable DAG construction: simulator and verifier"};
    app.require_subcommand(1);

    InstanceArgs inst;
    std::uint64_t seed = 1;
    std::string sched = "sync";
    std::string out;

    auto add_instance_opts = [&](CLI::App* cmd) {
        cmd->add_option("--instance", inst.instance, "Instance file (JSON)");
        cmd->add_option("--grid-d", inst.grid_d, "Grid side d (d x d grid)");
        cmd->add_option("--senders", inst.senders, "Number of senders for generated roles");
        cmd->add_option("--targets", inst.targets, "Number of targets for generated roles");
        cmd->add_option("--seed", seed, "Random seed");
    };

    auto* gen = app.add_subcommand("gen", "Generate an instance file");
    add_instance_opts(gen);
    std::uint32_t random_n = 0;
    double density = 0.2;
    bool random_labels = false;
    gen->add_option("--random-n", random_n, "Random connected graph with this many nodes");
    gen->add_option("--density", density, "Edge density for --random-n");
    gen->add_flag("--random-labels", random_labels, "Randomly permute every node's labels");
    gen->add_option("--out", out, "Output file (stdout if omitted)");

    auto* runc = app.add_subcommand("run", "Run one simulation and verify the result");
    add_instance_opts(runc);
    double perturb = 0;
    bool from_legit = false;
    std::string trace_mode = "summary";
    runc->add_option("--scheduler", sched, "sync, randfair, rr or adv")
        ->check(CLI::IsMember({"sync", "randfair", "rr", "adv"}));
    runc->add_option("--out", out, "Directory for trace and verdict files");
    runc->add_option("--perturb", perturb, "Fraction of nodes whose state is redrawn")
        ->check(CLI::Range(0.0, 1.0));
    runc->add_flag("--from-legitimate", from_legit, "Start from the legitimate configuration");
    runc->add_option("--trace", trace_mode, "summary or full")
        ->check(CLI::IsMember({"summary", "full"}));

    auto* exp = app.add_subcommand("experiment", "Parameter sweep with CSV output");
    std::vector<std::string> grid_items, sender_items{"5"}, target_items{"10"};
    std::vector<std::string> instance_files;
    std::uint32_t iterations = 500;
    bool series = false, no_verify = false;
    exp->add_option("--grid-d", grid_items, "Grid sides: list or lo:hi:step range");
    exp->add_option("--instance", instance_files, "Instance files (roles from file)");
    exp->add_option("--senders", sender_items, "Sender counts: list or range");
    exp->add_option("--targets", target_items, "Target counts: list or range");
    exp->add_option("--scheduler", sched, "sync, randfair, rr or adv")
        ->check(CLI::IsMember({"sync", "randfair", "rr", "adv"}));
    exp->add_option("--iterations", iterations, "Iterations per cell");
    exp->add_option("--seed", seed, "Master seed");
    exp->add_option("--out", out, "Output directory")->required();
    exp->add_flag("--enabled-series", series, "Export iteration 0's per-round enabled counts");
    exp->add_flag("--no-verify", no_verify, "Skip output verification");

    auto* ver = app.add_subcommand("verify", "Verify a configuration file against an instance");
    std::string config_file;
    ver->add_option("--instance", inst.instance, "Instance file")->required();
    ver->add_option("--config", config_file, "Configuration file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(inst, random_n, density, random_labels, seed, out);
        if (runc->parsed()) return cmd_run(inst, sched, seed, out, perturb, from_legit, trace_mode);
        if (ver->parsed()) return cmd_verify(inst.instance, config_file);
        if (exp->parsed()) {
            ExperimentSpec spec;
            spec.grid_sides = parse_list(grid_items);
            for (const auto& f : instance_files) spec.instance_files.emplace_back(f);
            spec.sender_counts = parse_list(sender_items);
            spec.target_counts = parse_list(target_items);
            spec.scheduler = parse_scheduler(sched);
            spec.iterations = iterations;
            spec.master_seed = seed;
            spec.enabled_series = series;
            spec.verify_outputs = !no_verify;
            const auto result = run_experiment(spec);
            write_experiment(result, out);
            std::cout << cells_csv(result);
            return result.ok ? 0 : 1;
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
