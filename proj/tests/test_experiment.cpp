#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "mwst/errors.hpp"
#include "mwst/experiment.hpp"
#include "test_util.hpp"

using namespace mwst;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentSpec small_spec() {
    ExperimentSpec spec;
    spec.grid_sides = {4, 5};
    spec.sender_counts = {2};
    spec.target_counts = {1, 3};
    spec.iterations = 6;
    spec.master_seed = 99;
    spec.enabled_series = true;
    return spec;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("mix64 matches the splitmix64 finalizer") {
    // Independent transcription of the finalizer constants.
    auto ref = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    for (std::uint64_t x : {0ULL, 1ULL, 42ULL, 0xffffffffffffffffULL, 123456789ULL})
        CHECK(mix64(x) == ref(x));
    CHECK(derive_seed(1, 2, 3, 0) ==
          mix64(mix64(mix64(1 ^ mix64(3)) ^ mix64(4)) ^ mix64(1)));
}

TEST_CASE("derived seeds are distinct across cells, iterations and streams") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t c = 0; c < 20; ++c)
        for (std::uint64_t i = 0; i < 50; ++i)
            for (std::uint64_t s = 0; s < 3; ++s) seen.insert(derive_seed(7, c, i, s));
    CHECK(seen.size() == 20 * 50 * 3);
    CHECK(derive_seed(7, 1, 1, 1) != derive_seed(8, 1, 1, 1));
}

TEST_CASE("spec validation") {
    ExperimentSpec spec;
    CHECK_THROWS_AS(validate_spec(spec), InvalidParameter);
    spec.grid_sides = {1};
    CHECK_THROWS_AS(validate_spec(spec), InvalidParameter);
    spec.grid_sides = {3};
    spec.sender_counts = {5};
    spec.target_counts = {5};
    CHECK_THROWS_AS(validate_spec(spec), InvalidParameter);
    spec.target_counts = {4};
    CHECK_NOTHROW(validate_spec(spec));
    spec.iterations = 0;
    CHECK_THROWS_AS(validate_spec(spec), InvalidParameter);
    spec.iterations = 1;
    spec.sender_counts = {0};
    CHECK_THROWS_AS(validate_spec(spec), InvalidParameter);
}

TEST_CASE("cell expansion") {
    const auto cells = expand_cells(small_spec());
    REQUIRE(cells.size() == 4);
    CHECK(cells[0].grid_side == 4);
    CHECK(cells[0].targets == 1);
    CHECK(cells[1].targets == 3);
    CHECK(cells[3].grid_side == 5);
    CHECK(cells[3].node_count == 25);
    CHECK(cells[3].diameter == 8);
    for (std::uint32_t i = 0; i < 4; ++i) CHECK(cells[i].index == i);
}

TEST_CASE("aggregate is a pure function of the records") {
    Cell cell;
    std::vector<RunRecord> recs(4);
    const std::array<std::uint32_t, 4> rounds{10, 12, 14, 20};
    for (std::uint32_t i = 0; i < 4; ++i) {
        recs[i].iteration = i;
        recs[i].converged = i != 3;
        recs[i].verdict_pass = i != 2;
        recs[i].rounds = rounds[i];
        recs[i].running_time = {i, 2 * i, 0, 1};
    }
    const auto a = aggregate(cell, recs);
    CHECK(a.iterations == 4);
    CHECK(a.converged == 3);
    CHECK(a.verdict_failures == 1);
    CHECK(a.rounds.mean == doctest::Approx(14.0));
    // Sample sd of {10,12,14,20}: deviations -4,-2,0,6 -> 56/3.
    CHECK(a.rounds.sd == doctest::Approx(std::sqrt(56.0 / 3.0)));
    CHECK(a.running_time[1].mean == doctest::Approx(3.0));
    CHECK(a.running_time[3].sd == doctest::Approx(0.0));
    auto shuffled = recs;
    std::swap(shuffled[0], shuffled[3]);
    const auto b = aggregate(cell, shuffled);
    CHECK(b.rounds.mean == a.rounds.mean);
    CHECK(b.rounds.sd == doctest::Approx(a.rounds.sd));

    const auto one = aggregate(cell, {recs[0]});
    CHECK(one.rounds.sd == 0.0);
}

TEST_CASE("identical spec and seed give byte-identical tables") {
    auto spec = small_spec();
    spec.workers = 3;
    const auto a = run_experiment(spec);
    spec.workers = 1;
    const auto b = run_experiment(spec);
    CHECK(a.ok);
    CHECK(runs_csv(a) == runs_csv(b));
    CHECK(cells_csv(a) == cells_csv(b));
    CHECK(enabled_series_csv(a) == enabled_series_csv(b));
    REQUIRE(a.runs.size() == 24);
    for (std::size_t i = 0; i < a.runs.size(); ++i) {
        CHECK(a.runs[i].cell == i / 6);
        CHECK(a.runs[i].iteration == i % 6);
        CHECK(a.runs[i].converged);
        CHECK(a.runs[i].verdict_pass);
    }
    CHECK_FALSE(a.enabled_series.empty());

    spec.master_seed = 100;
    CHECK(runs_csv(run_experiment(spec)) != runs_csv(a));

    const auto dir = std::filesystem::temp_directory_path() / "mwst_exp_test";
    std::filesystem::remove_all(dir);
    write_experiment(a, dir);
    CHECK(slurp(dir / "runs.csv") == runs_csv(a));
    CHECK(slurp(dir / "cells.csv") == cells_csv(a));
    CHECK(slurp(dir / "enabled_series.csv") == enabled_series_csv(a));
    std::filesystem::remove_all(dir);
}

TEST_CASE("degenerate 2x2 cell") {
    ExperimentSpec spec;
    spec.grid_sides = {2};
    spec.sender_counts = {1};
    spec.target_counts = {1};
    spec.iterations = 40;
    const auto r = run_experiment(spec);
    CHECK(r.ok);
    REQUIRE(r.aggregates.size() == 1);
    CHECK(r.aggregates[0].converged == 40);
    CHECK(r.aggregates[0].verdict_failures == 0);
    for (const auto& run : r.runs) CHECK(run.rounds <= round_cutoff(2));
}

TEST_CASE("instance file cells keep their roles") {
    const auto dir = std::filesystem::temp_directory_path() / "mwst_exp_inst";
    std::filesystem::create_directories(dir);
    const auto inst = testing::random_instance(4, 15, 25, 3, true);
    save_instance(dir / "a.json", inst);
    ExperimentSpec spec;
    spec.instance_files = {dir / "a.json"};
    spec.iterations = 5;
    spec.scheduler = SchedulerKind::RandomFairSubset;
    const auto r = run_experiment(spec);
    CHECK(r.ok);
    REQUIRE(r.cells.size() == 1);
    CHECK(r.cells[0].family == "a.json");
    CHECK(r.cells[0].senders == inst.roles.senders.size());
    CHECK(r.cells[0].diameter == diameter(inst.topology));
    std::filesystem::remove_all(dir);
}

TEST_CASE("worker count from the environment") {
    ::setenv("MWST_WORKERS", "3", 1);
    CHECK(default_workers() == 3);
    ::setenv("MWST_WORKERS", "0", 1);
    CHECK(default_workers() >= 1);
    ::unsetenv("MWST_WORKERS");
    CHECK(default_workers() >= 1);
}

TEST_CASE("CSV headers") {
    ExperimentSpec spec;
    spec.grid_sides = {3};
    spec.sender_counts = {1};
    spec.target_counts = {2};
    spec.iterations = 2;
    const auto r = run_experiment(spec);
    const auto runs = runs_csv(r);
    CHECK(runs.substr(0, runs.find('\n')).find("rounds") != std::string::npos);
    CHECK(std::count(runs.begin(), runs.end(), '\n') == 3);
    const auto cells = cells_csv(r);
    CHECK(std::count(cells.begin(), cells.end(), '\n') == 2);
}

}  // TEST_SUITE
