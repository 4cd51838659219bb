#include <map>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace rmws;
using rmws::testing::make_config;
using rmws::testing::make_workload;

TEST(AcceptanceProbability, Logistic)
{
    EXPECT_DOUBLE_EQ(acceptance_probability(5.0, 5.0, 0.001), 0.5);
    EXPECT_NEAR(acceptance_probability(1.001, 1.0, 0.001), 1.0 / (1.0 + std::exp(1.0)), 1e-9);
    EXPECT_NEAR(acceptance_probability(0.0, 100.0, 0.001), 1.0, 1e-15);
    EXPECT_NEAR(acceptance_probability(100.0, 0.0, 0.001), 0.0, 1e-15);
    EXPECT_THROW(acceptance_probability(1.0, 1.0, 0.0), ConfigError);
}

TEST(IsFeasiblePlacement, Examples)
{
    auto cfg = make_config(1, 2);
    auto& e = cfg.servers[0];
    e.storage_capacity = 40.0;
    e.storage_price = 20.0;
    e.budget = 28.0;
    std::vector<std::uint8_t> row{0, 0};
    EXPECT_TRUE(is_feasible_placement(cfg, row, 0));
    row = {1, 1};  // exactly full, storage cost 20 < 28
    EXPECT_TRUE(is_feasible_placement(cfg, row, 0));
    e.budget = 20.0;
    EXPECT_FALSE(is_feasible_placement(cfg, row, 0));
    cfg.services[1].storage_req = 21.0;
    e.budget = 100.0;
    EXPECT_FALSE(is_feasible_placement(cfg, row, 0));
}

TEST(Propose, TwoElementRowSpace)
{
    auto cfg = make_config(1, 1);
    Placement x(cfg);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 50; ++k) {
        const auto p = propose(cfg, x, rng);
        ASSERT_FALSE(p.noop);
        EXPECT_EQ(p.row[0], 1);  // the only row that differs from [0]
    }
}

TEST(Propose, ExcludesStorageInfeasibleRows)
{
    auto cfg = make_config(1, 2);
    cfg.servers[0].storage_capacity = 25.0;
    cfg.services[0].storage_req = 20.0;
    cfg.services[1].storage_req = 30.0;
    Placement x(cfg);
    std::mt19937_64 rng(9);
    for (int k = 0; k < 50; ++k) {
        const auto p = propose(cfg, x, rng);
        EXPECT_EQ(p.row, (std::vector<std::uint8_t>{1, 0}));
    }
    x(0, 0) = 1;
    EXPECT_EQ(propose(cfg, x, rng).row, (std::vector<std::uint8_t>{0, 0}));
}

TEST(Propose, ServersUniformAndDeterministic)
{
    auto cfg = make_config(4, 3);
    Placement x(cfg);
    std::mt19937_64 a(3), b(3);
    std::map<std::size_t, int> hits;
    for (int k = 0; k < 4000; ++k) {
        const auto p = propose(cfg, x, a);
        const auto q = propose(cfg, x, b);
        ASSERT_EQ(p.server, q.server);
        ASSERT_EQ(p.row, q.row);
        ++hits[p.server];
    }
    for (const auto& [server, n] : hits) EXPECT_NEAR(n, 1000, 120) << "server " << server;
}

TEST(GreedyPopularity, FillsByRank)
{
    auto cfg = make_config(1, 3);
    cfg.servers[0].storage_capacity = 45.0;
    cfg.servers[0].budget = 100.0;
    WorkloadSnapshot w(1, 3, 60.0);
    const auto p = zipf_popularity(3, 0.6);
    for (std::size_t s = 0; s < 3; ++s) w.n(0, s) = 1000.0 * p[s];
    const auto x = greedy_popularity_placement(cfg, popularity_order(w));
    EXPECT_TRUE(x.placed(0, 0));
    EXPECT_TRUE(x.placed(0, 1));
    EXPECT_FALSE(x.placed(0, 2));
}

TEST(GibbsOptimize, SingleCellEdgeWins)
{
    auto cfg = make_config(1, 1);
    auto w = make_workload(cfg, 600.0 * 30, 1800.0);
    const auto bf = brute_force_placement(cfg, w, SolverConfig{});
    EXPECT_TRUE(bf.x.placed(0, 0));
    GibbsConfig g;
    const auto t = gibbs_optimize(cfg, w, g, SolverConfig{}, nullptr);
    EXPECT_EQ(t.x_best, bf.x);
    EXPECT_NEAR(t.theta_best, bf.theta, 1e-9 * bf.theta);
}

TEST(GibbsOptimize, HugeOmegaIsRandomWalk)
{
    auto cfg = make_config(2, 2);
    auto w = make_workload(cfg, 5000.0, 1800.0);
    GibbsConfig g;
    g.omega = 1e6;
    g.max_iters = 1000;
    g.pure_chain = true;
    g.seed = 17;
    const auto t = gibbs_optimize(cfg, w, g, SolverConfig{}, nullptr);
    std::size_t scored = 0, accepted = 0;
    for (const auto& s : t.steps) {
        if (s.noop || !s.feasible) continue;
        ++scored;
        accepted += s.accepted ? 1u : 0u;
    }
    ASSERT_GT(scored, 500u);
    const double rate = static_cast<double>(accepted) / static_cast<double>(scored);
    EXPECT_GE(rate, 0.45);
    EXPECT_LE(rate, 0.55);
}

TEST(GibbsOptimize, TraceInvariantsAndDeterminism)
{
    Scenario sc;
    sc.seed = 2;
    const auto cfg = build_config(sc);
    const auto w = frame_forecast(cfg, 0, ForecastMode::Mean);
    GibbsConfig g;
    g.seed = 99;
    const auto a = gibbs_optimize(cfg, w, g, SolverConfig{});
    const auto b = gibbs_optimize(cfg, w, g, SolverConfig{});
    EXPECT_EQ(a.x_best, b.x_best);
    EXPECT_EQ(a.theta_best, b.theta_best);
    ASSERT_EQ(a.steps.size(), b.steps.size());

    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : a.steps) {
        best = std::min(best, s.theta_after);
        EXPECT_TRUE(is_feasible_placement(cfg, a.states.at(s.state)));
    }
    EXPECT_LE(a.theta_best, best + 1e-12);
    EXPECT_LE(a.iterations, g.max_iters);
    const double f = total_latency(cfg, a.x_best, a.best.y, a.best.z_shadow, w);
    EXPECT_NEAR(a.theta_best, f, 1e-9 * f);
}

TEST(GibbsConfig, Validation)
{
    GibbsConfig g;
    g.omega = 0.0;
    EXPECT_THROW(g.validate(), ConfigError);
    g = GibbsConfig{};
    g.max_iters = 0;
    EXPECT_THROW(g.validate(), ConfigError);
}
