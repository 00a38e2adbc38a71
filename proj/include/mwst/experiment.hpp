#pragma once

// Parameter-sweep runner: cells of (topology, |S|, |T|), independent seeded
// iterations per cell, per-run records and per-cell aggregates as CSV.

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mwst/simulator.hpp"
#include "mwst/topology.hpp"

namespace mwst {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed for one random stream of one iteration of one cell:
///   mix64(mix64(mix64(master ^ mix64(cell + 1)) ^ mix64(iteration + 1)) ^ mix64(stream + 1))
/// Streams: 0 = role placement, 1 = initial states, 2 = scheduler.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell, std::uint64_t iteration,
                          std::uint64_t stream) noexcept;

struct ExperimentSpec {
    std::vector<std::uint32_t> grid_sides;                  // d values
    std::vector<std::filesystem::path> instance_files;      // roles taken from the file
    std::vector<std::uint32_t> sender_counts{5};
    std::vector<std::uint32_t> target_counts{10};
    SchedulerKind scheduler = SchedulerKind::Synchronous;
    std::uint32_t iterations = 500;
    std::uint64_t master_seed = 1;
    bool verify_outputs = true;
    bool enabled_series = false;  // export iteration 0's per-round enabled counts
    unsigned workers = 0;         // 0 = from MWST_WORKERS or hardware
};

/// Throws InvalidParameter on an empty or infeasible spec.
void validate_spec(const ExperimentSpec& spec);

struct Cell {
    std::uint32_t index = 0;
    std::string family;  // "grid" or the instance file name
    std::filesystem::path source;  // instance file, empty for grid cells
    std::uint32_t grid_side = 0;
    std::uint32_t node_count = 0;
    std::uint32_t diameter = 0;
    std::uint32_t senders = 0;
    std::uint32_t targets = 0;
};

struct RunRecord {
    std::uint32_t cell = 0;
    std::uint32_t iteration = 0;
    bool converged = false;
    bool verdict_pass = false;  // true when verification is disabled
    std::uint64_t steps = 0;
    std::uint32_t rounds = 0;
    std::array<std::uint32_t, 4> running_time{};
    std::array<std::uint32_t, 4> termination_round{};
    std::array<std::uint32_t, 4> legitimacy_round{};
};

struct Stat {
    double mean = 0;
    double sd = 0;  // sample standard deviation
};

struct CellAggregate {
    Cell cell;
    std::uint32_t iterations = 0;
    std::uint32_t converged = 0;
    std::uint32_t verdict_failures = 0;
    Stat rounds;
    std::array<Stat, 4> running_time{};
    std::array<Stat, 4> termination_round{};
    std::array<Stat, 4> legitimacy_round{};
};

struct EnabledSeriesRow {
    std::uint32_t cell = 0;
    std::uint32_t round = 0;
    std::uint32_t enabled = 0;
    std::array<std::uint32_t, 4> by_layer{};
};

struct ExperimentResult {
    std::vector<Cell> cells;
    std::vector<RunRecord> runs;  // ordered by (cell, iteration)
    std::vector<CellAggregate> aggregates;
    std::vector<EnabledSeriesRow> enabled_series;

    /// False if any run failed to converge or verify, unless the scheduler is
    /// the exploratory adversarial one.
    bool ok = true;
};

std::vector<Cell> expand_cells(const ExperimentSpec& spec);

/// Aggregates over the records of one cell. A pure function of the records.
CellAggregate aggregate(const Cell& cell, const std::vector<RunRecord>& records);

/// One full iteration: role placement (grid cells), random initial states,
/// run under the scheduler with the 20(D+1) round cutoff, verification.
RunRecord run_iteration(const Cell& cell, const Instance& instance, std::uint32_t iteration,
                        const ExperimentSpec& spec, std::vector<EnabledSeriesRow>* series);

ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Worker count: MWST_WORKERS if set and positive, else hardware concurrency.
unsigned default_workers();

/// CSV renderings with a header row.
std::string runs_csv(const ExperimentResult& result);
std::string cells_csv(const ExperimentResult& result);
std::string enabled_series_csv(const ExperimentResult& result);

/// Writes runs.csv, cells.csv and (when present) enabled_series.csv.
void write_experiment(const ExperimentResult& result, const std::filesystem::path& out_dir);

/// Per-round summary of one trace as CSV.
std::string trace_rounds_csv(const Trace& trace);

}  // namespace mwst
