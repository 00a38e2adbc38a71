#include "mwst/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "mwst/errors.hpp"
#include "mwst/verifier.hpp"

namespace mwst {

std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t iteration,
                          std::uint64_t stream) noexcept {
    std::uint64_t x = mix64(master ^ mix64(cell + 1));
    x = mix64(x ^ mix64(iteration + 1));
    return mix64(x ^ mix64(stream + 1));
}

unsigned default_workers() {
    if (const char* env = std::getenv("MWST_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1U, std::thread::hardware_concurrency());
}

void validate_spec(const ExperimentSpec& spec) {
    if (spec.iterations < 1) throw InvalidParameter("iterations must be at least 1");
    if (spec.grid_sides.empty() && spec.instance_files.empty())
        throw InvalidParameter("experiment needs grid sides or instance files");
    if (!spec.grid_sides.empty() && (spec.sender_counts.empty() || spec.target_counts.empty()))
        throw InvalidParameter("grid experiments need sender and target counts");
    for (auto d : spec.grid_sides) {
        if (d < 2) throw InvalidParameter("grid side must be at least 2");
        for (auto s : spec.sender_counts)
            for (auto t : spec.target_counts)
                if (s < 1 || t < 1 || std::uint64_t{s} + t > std::uint64_t{d} * d)
                    throw InvalidParameter("infeasible cell: d=" + std::to_string(d) +
                                           " |S|=" + std::to_string(s) +
                                           " |T|=" + std::to_string(t));
    }
}

std::vector<Cell> expand_cells(const ExperimentSpec& spec) {
    validate_spec(spec);
    std::vector<Cell> cells;
    for (auto d : spec.grid_sides)
        for (auto s : spec.sender_counts)
            for (auto t : spec.target_counts) {
                Cell c;
                c.index = static_cast<std::uint32_t>(cells.size());
                c.family = "grid";
                c.grid_side = d;
                c.node_count = d * d;
                c.diameter = 2 * d - 2;
                c.senders = s;
                c.targets = t;
                cells.push_back(c);
            }
    for (const auto& path : spec.instance_files) {
        const Instance inst = load_instance(path);
        Cell c;
        c.index = static_cast<std::uint32_t>(cells.size());
        c.family = path.filename().string();
        c.source = path;
        c.node_count = inst.topology.node_count();
        c.diameter = diameter(inst.topology);
        c.senders = static_cast<std::uint32_t>(inst.roles.senders.size());
        c.targets = static_cast<std::uint32_t>(inst.roles.targets.size());
        cells.push_back(c);
    }
    return cells;
}

namespace {

Stat stat_of(const std::vector<double>& xs) {
    Stat s;
    if (xs.empty()) return s;
    double sum = 0;
    for (double x : xs) sum += x;
    s.mean = sum / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double sq = 0;
        for (double x : xs) sq += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(sq / static_cast<double>(xs.size() - 1));
    }
    return s;
}

}  // namespace

CellAggregate aggregate(const Cell& cell, const std::vector<RunRecord>& records) {
    CellAggregate a;
    a.cell = cell;
    std::vector<double> rounds;
    std::array<std::vector<double>, 4> run_t, term, legit;
    for (const auto& r : records) {
        if (r.cell != cell.index) continue;
        ++a.iterations;
        if (r.converged) ++a.converged;
        if (!r.verdict_pass) ++a.verdict_failures;
        rounds.push_back(r.rounds);
        for (int l = 0; l < 4; ++l) {
            run_t[l].push_back(r.running_time[l]);
            term[l].push_back(r.termination_round[l]);
            legit[l].push_back(r.legitimacy_round[l]);
        }
    }
    a.rounds = stat_of(rounds);
    for (int l = 0; l < 4; ++l) {
        a.running_time[l] = stat_of(run_t[l]);
        a.termination_round[l] = stat_of(term[l]);
        a.legitimacy_round[l] = stat_of(legit[l]);
    }
    return a;
}

RunRecord run_iteration(const Cell& cell, const Instance& instance, std::uint32_t iteration,
                        const ExperimentSpec& spec, std::vector<EnabledSeriesRow>* series) {
    const Topology& topo = instance.topology;
    const RoleAssignment roles =
        cell.source.empty()
            ? assign_roles(topo, cell.senders, cell.targets,
                           derive_seed(spec.master_seed, cell.index, iteration, 0))
            : instance.roles;
    Configuration start =
        random_configuration(topo, derive_seed(spec.master_seed, cell.index, iteration, 1));
    const SchedulerSpec sched{spec.scheduler,
                              derive_seed(spec.master_seed, cell.index, iteration, 2)};
    const std::uint64_t limit = spec.scheduler == SchedulerKind::Synchronous
                                    ? round_cutoff(cell.diameter)
                                    : step_cutoff(cell.diameter, cell.node_count);
    const Trace trace = run(topo, roles, std::move(start), sched, RunOptions{limit, false});

    RunRecord r;
    r.cell = cell.index;
    r.iteration = iteration;
    r.converged = trace.converged && trace.rounds <= round_cutoff(cell.diameter);
    r.steps = trace.steps;
    r.rounds = trace.rounds;
    r.running_time = trace.layer_running_time;
    r.termination_round = trace.layer_termination_round;
    r.legitimacy_round = trace.layer_legitimacy_round;
    r.verdict_pass = !spec.verify_outputs || (r.converged && verify(topo, roles, trace.final_config).all_pass());
    if (series)
        for (const auto& round : trace.round_log)
            series->push_back(EnabledSeriesRow{cell.index, round.index, round.enabled_at_start,
                                               round.enabled_by_layer_at_start});
    return r;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    ExperimentResult result;
    result.cells = expand_cells(spec);

    std::vector<Instance> instances;
    for (const auto& cell : result.cells) {
        if (cell.source.empty()) {
            instances.push_back(Instance{build_grid(cell.grid_side), {}});
        } else {
            instances.push_back(load_instance(cell.source));
        }
    }

    const std::size_t total = result.cells.size() * spec.iterations;
    result.runs.resize(total);
    std::vector<std::vector<EnabledSeriesRow>> series(result.cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t job = next++; job < total; job = next++) {
            const std::size_t c = job / spec.iterations;
            const auto it = static_cast<std::uint32_t>(job % spec.iterations);
            auto* out = spec.enabled_series && it == 0 ? &series[c] : nullptr;
            result.runs[job] = run_iteration(result.cells[c], instances[c], it, spec, out);
        }
    };
    const unsigned workers = spec.workers ? spec.workers : default_workers();
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < std::min<std::size_t>(workers, total); ++w) pool.emplace_back(worker);
    worker();
    pool.clear();

    for (const auto& cell : result.cells) result.aggregates.push_back(aggregate(cell, result.runs));
    for (auto& s : series)
        result.enabled_series.insert(result.enabled_series.end(), s.begin(), s.end());
    if (spec.scheduler != SchedulerKind::AdversarialGreedy)
        for (const auto& r : result.runs)
            if (!r.converged || !r.verdict_pass) result.ok = false;
    return result;
}

namespace {

std::string fmt(double x) {
    std::ostringstream o;
    o.precision(6);
    o << std::fixed << x;
    return o.str();
}

}  // namespace

std::string runs_csv(const ExperimentResult& result) {
    std::ostringstream o;
    o << "cell,iteration,converged,verdict_pass,steps,rounds";
    for (const char* k : {"running_time", "termination_round", "legitimacy_round"})
        for (int l = 1; l <= 4; ++l) o << ',' << k << "_l" << l;
    o << "\n";
    for (const auto& r : result.runs) {
        o << r.cell << ',' << r.iteration << ',' << int{r.converged} << ','
          << int{r.verdict_pass} << ',' << r.steps << ',' << r.rounds;
        for (auto v : r.running_time) o << ',' << v;
        for (auto v : r.termination_round) o << ',' << v;
        for (auto v : r.legitimacy_round) o << ',' << v;
        o << "\n";
    }
    return o.str();
}

std::string cells_csv(const ExperimentResult& result) {
    std::ostringstream o;
    o << "cell,family,d,n,D,senders,targets,iterations,converged,verdict_failures,"
         "rounds_mean,rounds_sd";
    for (const char* k : {"running_time", "termination_round", "legitimacy_round"})
        for (int l = 1; l <= 4; ++l) o << ',' << k << "_l" << l << "_mean," << k << "_l" << l << "_sd";
    o << "\n";
    for (const auto& a : result.aggregates) {
        const Cell& c = a.cell;
        o << c.index << ',' << c.family << ',' << c.grid_side << ',' << c.node_count << ','
          << c.diameter << ',' << c.senders << ',' << c.targets << ',' << a.iterations << ','
          << a.converged << ',' << a.verdict_failures << ',' << fmt(a.rounds.mean) << ','
          << fmt(a.rounds.sd);
        for (const auto* group : {&a.running_time, &a.termination_round, &a.legitimacy_round})
            for (const Stat& s : *group) o << ',' << fmt(s.mean) << ',' << fmt(s.sd);
        o << "\n";
    }
    return o.str();
}

std::string enabled_series_csv(const ExperimentResult& result) {
    std::ostringstream o;
    o << "cell,round,enabled,enabled_l1,enabled_l2,enabled_l3,enabled_l4\n";
    for (const auto& row : result.enabled_series) {
        o << row.cell << ',' << row.round << ',' << row.enabled;
        for (auto v : row.by_layer) o << ',' << v;
        o << "\n";
    }
    return o.str();
}

void write_experiment(const ExperimentResult& result, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto write = [&](const char* name, const std::string& text) {
        std::ofstream f(out_dir / name);
        if (!f) throw Error("cannot write " + (out_dir / name).string());
        f << text;
    };
    write("runs.csv", runs_csv(result));
    write("cells.csv", cells_csv(result));
    if (!result.enabled_series.empty()) write("enabled_series.csv", enabled_series_csv(result));
}

std::string trace_rounds_csv(const Trace& trace) {
    std::ostringstream o;
    o << "round,first_step,end_step,enabled,enabled_l1,enabled_l2,enabled_l3,enabled_l4,"
         "layers_executed\n";
    for (const auto& r : trace.round_log) {
        o << r.index << ',' << r.first_step << ',' << r.end_step << ',' << r.enabled_at_start;
        for (auto v : r.enabled_by_layer_at_start) o << ',' << v;
        o << ',';
        for (int l = 0; l < 4; ++l)
            if (r.layers_executed & (1U << l)) o << (l + 1);
        o << "\n";
    }
    return o.str();
}

}  // namespace mwst
