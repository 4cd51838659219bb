#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace rmws;

namespace {

Scenario small_scenario(std::uint64_t seed = 1)
{
    Scenario sc;
    sc.seed = seed;
    sc.frames = 2;
    sc.slots_per_frame = 4;
    return sc;
}

std::string csv_of(const ExperimentReport& r)
{
    std::ostringstream os;
    write_report_csv(r, os);
    return os.str();
}

} // namespace

TEST(Algorithms, Parsing)
{
    EXPECT_EQ(parse_algorithm("rmws"), Algorithm::RMWS);
    EXPECT_EQ(parse_algorithm("EcEeRa"), Algorithm::ECEERA);
    EXPECT_THROW(parse_algorithm("greedy"), ConfigError);
    EXPECT_EQ(parse_algorithms("all").size(), 7u);
    EXPECT_EQ(parse_algorithms("CPO,RMWS"), (std::vector<Algorithm>{Algorithm::CPO, Algorithm::RMWS}));
    EXPECT_FALSE(as_baseline(Algorithm::RMWS).has_value());
    EXPECT_EQ(as_baseline(Algorithm::EERA), BaselineKind::EERA);
}

TEST(Report, FloatFormat)
{
    EXPECT_EQ(format_float(20.0), "20.0000000");
    EXPECT_EQ(format_float(0.5), "0.500000000");
    EXPECT_EQ(format_float(123456.789), "123456.789");
}

TEST(Report, EmptyIsHeaderOnly)
{
    EXPECT_EQ(csv_of(ExperimentReport{}), std::string(kReportHeader) + "\n");
    EXPECT_EQ(std::string(kReportHeader),
              "frame,slot,algorithm,total_latency_s,edge_latency_s,cloud_latency_s,cost_total,feasible,"
              "iters_placement,iters_schedule");
}

TEST(Experiment, SingleSlotCpo)
{
    Scenario sc;
    sc.frames = 1;
    sc.slots_per_frame = 1;
    const auto cfg = build_config(sc);
    const std::array algos{Algorithm::CPO};
    const auto rep = run_experiment(cfg, algos, sc.gibbs, sc.solver);
    ASSERT_EQ(rep.rows.size(), 1u);
    const auto w = generate_trace(cfg).snapshot(0, 0);
    double expect = 0.0;
    for (std::size_t s = 0; s < cfg.num_services(); ++s) expect += w.total(s) * cfg.services[s].cloud_delay;
    EXPECT_NEAR(rep.rows[0].total_latency, expect, 1e-9 * expect);
    EXPECT_DOUBLE_EQ(rep.rows[0].cost_total, 0.0);
}

TEST(Experiment, RowsAndSummaries)
{
    const auto sc = small_scenario();
    const auto cfg = build_config(sc);
    const auto rep = run_experiment(cfg, kAllAlgorithms, sc.gibbs, sc.solver);
    ASSERT_EQ(rep.rows.size(), 2u * 4u * 7u);
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
        const auto& r = rep.rows[k];
        EXPECT_EQ(r.frame, k / 28);
        EXPECT_EQ(r.slot, (k / 7) % 4);
        EXPECT_EQ(r.algorithm, to_string(kAllAlgorithms[k % 7]));
        if (!r.feasible) continue;
        EXPECT_NEAR(r.total_latency, r.edge_latency + r.cloud_latency, 1e-9 * r.total_latency);
        EXPECT_EQ(r.violations, "ok");
    }
    // Aggregates recomputed independently from the rows.
    for (const auto& s : rep.summary) {
        double sum = 0.0;
        std::size_t n = 0, bad = 0;
        for (const auto& r : rep.rows) {
            if (r.algorithm != s.algorithm) continue;
            if (!r.feasible) {
                ++bad;
                continue;
            }
            sum += r.total_latency;
            ++n;
        }
        EXPECT_EQ(s.rows, n + bad);
        EXPECT_EQ(s.infeasible_rows, bad);
        if (n > 0) {
            EXPECT_NEAR(s.mean_latency, sum / static_cast<double>(n), 1e-9 * s.mean_latency);
        }
    }
}

TEST(Experiment, RmwsBeatsCloudOnly)
{
    const auto sc = small_scenario(2);
    const auto cfg = build_config(sc);
    const std::array algos{Algorithm::RMWS, Algorithm::CPO};
    const auto rep = run_experiment(cfg, algos, sc.gibbs, sc.solver);
    EXPECT_LT(rep.of("RMWS").mean_latency, rep.of("CPO").mean_latency);
}

TEST(Experiment, Deterministic)
{
    const auto sc = small_scenario(3);
    const auto cfg = build_config(sc);
    const auto a = run_experiment(cfg, kAllAlgorithms, sc.gibbs, sc.solver);
    const auto b = run_experiment(cfg, kAllAlgorithms, sc.gibbs, sc.solver);
    EXPECT_EQ(csv_of(a), csv_of(b));
    EXPECT_TRUE(a == b);
}

TEST(Experiment, RejectsEmptySelection)
{
    const auto sc = small_scenario();
    EXPECT_THROW(run_experiment(build_config(sc), std::span<const Algorithm>{}, sc.gibbs, sc.solver), ConfigError);
}

TEST(Report, JsonRoundTrip)
{
    const auto sc = small_scenario(4);
    const auto rep = run_experiment(build_config(sc), kAllAlgorithms, sc.gibbs, sc.solver);
    const auto back = report_from_json(nlohmann::json::parse(report_to_json(rep).dump()));
    EXPECT_TRUE(back == rep);
}

TEST(Report, JsonRoundTripWithNan)
{
    ExperimentReport rep;
    ReportRow r;
    r.algorithm = "EERA";
    r.total_latency = r.edge_latency = r.cloud_latency = r.cost_total = std::nan("");
    r.feasible = false;
    r.emitted = false;
    r.violations = "edge capacity";
    rep.rows.push_back(r);
    rep.summary = summarize(rep.rows);
    const auto back = report_from_json(nlohmann::json::parse(report_to_json(rep).dump()));
    EXPECT_TRUE(back == rep);
    EXPECT_TRUE(std::isnan(back.rows[0].total_latency));
}

TEST(Report, EmitWritesFiles)
{
    const auto dir = std::filesystem::temp_directory_path() / "rmws_harness_test";
    std::filesystem::create_directories(dir);
    ExperimentReport rep;
    emit_report(rep, (dir / "r.csv").string(), ReportFormat::Csv);
    emit_report(rep, (dir / "r.json").string(), ReportFormat::Json);
    std::ifstream is(dir / "r.csv");
    std::string line;
    std::getline(is, line);
    EXPECT_EQ(line, kReportHeader);
    EXPECT_TRUE(read_report_json((dir / "r.json").string()) == rep);
    EXPECT_THROW(emit_report(rep, (dir / "missing" / "r.csv").string(), ReportFormat::Csv), std::runtime_error);
    EXPECT_THROW(parse_format("xml"), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST(Sweep, BudgetSweepShape)
{
    SweepSpec spec;
    spec.parameter = "budget_coefficient";
    spec.values = {0.5, 0.6, 0.7, 0.8, 0.9};
    spec.base = small_scenario();
    spec.base.frames = 1;
    spec.base.slots_per_frame = 2;
    spec.algorithms = {Algorithm::CPO, Algorithm::PSP};
    spec.seeds = {1, 2};
    const auto res = run_sweep(spec);
    EXPECT_EQ(res.runs.size(), 10u);
    for (std::size_t k = 0; k < res.runs.size(); ++k) {
        EXPECT_EQ(res.runs[k].value, spec.values[k / 2]);
        EXPECT_EQ(res.runs[k].seed, spec.seeds[k % 2]);
    }
    const double cpo = res.mean_latency(0.5, "CPO");
    for (double v : spec.values) EXPECT_EQ(res.mean_latency(v, "CPO"), cpo);

    std::ostringstream os;
    write_sweep_summary_csv(res, os);
    EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "parameter,value,algorithm,runs,scored_runs,infeasible_rows,mean_latency_s");
}

TEST(Sweep, ThreadCountDoesNotChangeResults)
{
    SweepSpec spec;
    spec.parameter = "num_services";
    spec.values = {8, 10};
    spec.base = small_scenario();
    spec.base.frames = 1;
    spec.base.slots_per_frame = 2;
    spec.seeds = {1, 2};
    spec.threads = 1;
    const auto a = run_sweep(spec);
    spec.threads = 4;
    const auto b = run_sweep(spec);
    ASSERT_EQ(a.runs.size(), b.runs.size());
    for (std::size_t k = 0; k < a.runs.size(); ++k) EXPECT_EQ(csv_of(a.runs[k].report), csv_of(b.runs[k].report));
}

TEST(Sweep, Validation)
{
    SweepSpec spec;
    spec.parameter = "budget_coefficient";
    EXPECT_THROW(spec.validate(), ConfigError);
    spec.values = {0.5};
    EXPECT_NO_THROW(spec.validate());
    spec.parameter = "colour";
    EXPECT_THROW(spec.validate(), ConfigError);
    Scenario sc;
    EXPECT_THROW(apply_sweep_value(sc, "colour", 1.0), ConfigError);
    apply_sweep_value(sc, "compute_capacity_scale", 0.4);
    EXPECT_DOUBLE_EQ(sc.compute_capacity_scale, 0.4);
}
