#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <rmws/domain.hpp>
#include <rmws/inner_solver.hpp>
#include <rmws/placement.hpp>
#include <rmws/provisioning.hpp>
#include <rmws/scenario.hpp>
#include <rmws/scheduling.hpp>
#include <rmws/verification.hpp>
#include <rmws/workload.hpp>

// Seeded probe batteries over generated instances, shared by the `verify`
// command and the acceptance tests.

namespace rmws {

// Counts constraint checks over every decision a probe emits.
struct ConstraintTally
{
    std::size_t checked = 0;
    std::size_t failed = 0;
    std::string first_failure;

    void add(const ConstraintReport& r, const std::string& where)
    {
        ++checked;
        if (r.all_ok()) return;
        if (failed++ == 0) first_failure = where + ": " + r.summary();
    }
};

// Default-range instance with the given dimensions; one frame.
inline SystemConfig probe_config(std::uint64_t seed, std::size_t servers, std::size_t services)
{
    Scenario sc;
    sc.seed = seed;
    sc.num_servers = servers;
    sc.num_services = services;
    sc.frames = 1;
    return build_config(sc);
}

namespace detail {

inline double elapsed_s(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

inline std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

} // namespace detail

/*
 * Gibbs search against exhaustive enumeration on small instances: passes
 * when at least `required` runs end within 1% of the enumerated optimum
 * and the batch finishes within the time limit.
 */
inline ProbeReport probe_placement_oracle(std::size_t instances = 20, std::size_t required = 19,
                                          std::size_t servers = 2, std::size_t services = 3,
                                          double time_limit_s = 120.0, ConstraintTally* tally = nullptr,
                                          std::uint64_t seed0 = 1)
{
    const auto t0 = std::chrono::steady_clock::now();
    ProbeReport r;
    r.name = "placement-vs-enumeration";
    r.tolerance = 0.01;
    const SolverConfig solver;
    for (std::size_t k = 0; k < instances; ++k) {
        const auto cfg = probe_config(seed0 + k, servers, services);
        const auto w = frame_forecast(cfg, 0, ForecastMode::Mean);
        const auto brute = brute_force_placement(cfg, w, solver);
        GibbsConfig g;
        g.omega = 0.001;
        g.max_iters = 2000;
        g.patience = 2000;
        g.seed = derive_seed(seed0 + k, 4);
        const auto chain = gibbs_optimize(cfg, w, g, solver);
        const double gap = (chain.theta_best - brute.theta) / brute.theta;
        ++r.samples;
        r.worst_margin = std::max(r.worst_margin, gap);
        if (gap > r.tolerance) ++r.violations;
        if (tally) tally->add(check_constraints(cfg, chain.x_best, chain.best.y, chain.best.z_shadow, w), r.name);
    }
    const double t = detail::elapsed_s(t0);
    r.pass = r.samples - r.violations >= required && t <= time_limit_s;
    r.detail = std::to_string(r.samples - r.violations) + "/" + std::to_string(r.samples) + " within 1%, worst gap " +
               detail::fmt(r.worst_margin) + ", " + detail::fmt(t) + " s";
    return r;
}

/*
 * Closed-form allocation against the iterative solver, the KKT system and
 * the budget identity on random (X, Z) with stable interiors.
 */
inline ProbeReport probe_closed_form(std::size_t instances = 50, ConstraintTally* tally = nullptr,
                                     std::uint64_t seed0 = 101)
{
    ProbeReport r;
    r.name = "closed-form-allocation";
    r.tolerance = 1e-6;
    double worst_entry = 0.0, worst_kkt = 0.0, worst_sum = 0.0;
    for (std::size_t k = 0; k < instances; ++k) {
        std::mt19937_64 rng(derive_seed(seed0, 5, k));
        const std::size_t L = 2 + rng() % 3;
        const std::size_t S = 3 + rng() % 6;
        const auto cfg = probe_config(seed0 + k, L, S);
        const auto w = frame_forecast(cfg, 0, ForecastMode::Mean);
        Placement x(cfg);
        std::vector<std::uint8_t> row(S);
        for (std::size_t i = 0; i < L; ++i) {
            for (int t = 0; t < 32; ++t) {
                for (auto& b : row) b = static_cast<std::uint8_t>(rng() & 1u);
                if (is_feasible_placement(cfg, row, i)) {
                    std::copy(row.begin(), row.end(), x.row(i).begin());
                    break;
                }
            }
        }
        if (!x.any()) x = greedy_popularity_placement(cfg, popularity_order(w));
        Schedule z(cfg);
        {
            auto joint = detail::sample_joint(cfg, x, w, rng);
            for (std::size_t e = 0; e < z.data().size(); ++e) z.data()[e] = joint.second.data()[e];
        }
        const auto closed = optimal_allocation(cfg, x, z, w);
        const auto numeric = numeric_p3_solver(cfg, x, z, w);
        for (std::size_t e = 0; e < numeric.data().size(); ++e)
            worst_entry = std::max(worst_entry, std::abs(numeric.data()[e] - closed.y.data()[e]));
        worst_kkt = std::max(worst_kkt, kkt_residual(cfg, x, z, closed.y, w));
        const auto totals = w.totals();
        for (std::size_t i = 0; i < L; ++i) {
            double work = 0.0, ysum = 0.0;
            for (std::size_t s = 0; s < S; ++s) {
                work += x(i, s) * z(i, s) * totals[s];
                ysum += closed.y(i, s);
            }
            if (work <= 0) continue;
            worst_sum = std::max(worst_sum, std::abs(ysum - std::min(1.0, oracle::budget_share(cfg, i, x))));
        }
        if (tally) tally->add(check_constraints(cfg, x, closed.y, z, w), r.name);
        ++r.samples;
    }
    r.worst_margin = worst_entry;
    const bool ok_entry = worst_entry <= 1e-6;
    const bool ok_kkt = worst_kkt <= 1e-8;
    const bool ok_sum = worst_sum <= 1e-9;
    r.violations = (ok_entry ? 0 : 1) + (ok_kkt ? 0 : 1) + (ok_sum ? 0 : 1);
    r.pass = r.violations == 0;
    r.detail = "max |y - y_num| " + detail::fmt(worst_entry) + ", max KKT residual " + detail::fmt(worst_kkt) +
               ", max |sum y - min(1, gamma)| " + detail::fmt(worst_sum);
    return r;
}

/*
 * Schedule solver against a 1e-5 grid on one server, one service and the
 * cloud. Edge capacity is drawn between 1.2x and 6x the slot's work so the
 * optimum ranges over interior and boundary points.
 */
inline ProbeReport probe_schedule_grid(std::size_t instances = 20, ConstraintTally* tally = nullptr,
                                       std::uint64_t seed0 = 201)
{
    ProbeReport r;
    r.name = "schedule-vs-grid";
    r.tolerance = 1e-3;
    const SolverConfig solver;
    for (std::size_t k = 0; k < instances; ++k) {
        auto cfg = probe_config(seed0 + k, 1, 1);
        const auto trace = generate_trace(cfg);
        const auto w = trace.snapshot(0, 0);
        Placement x(cfg);
        x(0, 0) = 1;
        Allocation y(cfg);
        y(0, 0) = std::min(1.0, gamma(cfg, 0, x));
        std::mt19937_64 rng(derive_seed(seed0, 7, k));
        const double ratio = std::uniform_real_distribution<double>(1.2, 6.0)(rng);
        cfg.servers[0].compute_capacity =
            ratio * w.total(0) * cfg.services[0].compute_req / (y(0, 0) * w.interval_length);
        const auto solved = solve_schedule(cfg, x, y, w, solver);
        const auto grid = grid_schedule_1d(cfg, y, w, 1e-5);
        const double gap = std::abs(solved.objective - grid.objective);
        ++r.samples;
        r.worst_margin = std::max(r.worst_margin, gap);
        if (gap > r.tolerance) ++r.violations;
        if (tally) tally->add(check_constraints(cfg, x, y, solved.z, w), r.name);
    }
    r.pass = r.violations == 0;
    r.detail = "worst |f - f_grid| " + detail::fmt(r.worst_margin) + " s over " + std::to_string(r.samples) + " seeds";
    return r;
}

/*
 * P3 and P4 convexity on a default-size instance (1000 pairs each) and a
 * search for a joint non-convexity witness on up to five 1x1 instances.
 */
inline std::vector<ProbeReport> probe_convexity(std::size_t pairs = 1000, std::size_t p2_pairs = 10000,
                                                std::uint64_t seed0 = 301)
{
    std::vector<ProbeReport> out;
    {
        const auto cfg = probe_config(seed0, 4, 10);
        const auto w = frame_forecast(cfg, 0, ForecastMode::Mean);
        const auto x = greedy_popularity_placement(cfg, popularity_order(w));
        const auto inner = solve_inner(cfg, x, w, SolverConfig{});
        out.push_back(convexity_probe(Problem::P3, {cfg, x, w, nullptr, &inner.z_shadow}, pairs, seed0));
        out.push_back(convexity_probe(Problem::P4, {cfg, x, w, &inner.y, nullptr}, pairs, seed0 + 1));
    }
    ProbeReport p2;
    for (std::uint64_t k = 0; k < 5; ++k) {
        const auto cfg = probe_config(seed0 + 10 + k, 1, 1);
        const auto w = frame_forecast(cfg, 0, ForecastMode::Mean);
        Placement x(cfg);
        x(0, 0) = 1;
        auto r = convexity_probe(Problem::P2, {cfg, x, w}, p2_pairs, seed0 + 10 + k);
        r.detail = "instance " + std::to_string(k + 1) + ": violation after " + std::to_string(r.samples) + " pairs";
        p2 = r;
        if (r.pass) break;
    }
    out.push_back(p2);
    for (auto& r : out) {
        if (r.detail.empty())
            r.detail = std::to_string(r.violations) + " violations in " + std::to_string(r.samples) +
                       " pairs, worst margin " + detail::fmt(r.worst_margin);
    }
    return out;
}

struct StationaritySuite
{
    ProbeReport probe;
    std::vector<StationarityReport> runs;  // omega = 10 sigma, sigma, sigma / 10
};

/*
 * Pure-chain sampling on a one-server, two-service instance with four
 * admissible placements. TV distance to the Boltzmann law at omega = sigma
 * and monotone optimal-state mass as omega shrinks.
 */
inline StationaritySuite probe_stationarity(std::size_t steps = 100000, std::size_t burn_in = 10000,
                                            ConstraintTally* tally = nullptr, std::uint64_t seed0 = 401)
{
    const SolverConfig solver;
    std::uint64_t seed = seed0;
    SystemConfig cfg;
    for (;; ++seed) {
        cfg = probe_config(seed, 1, 2);
        if (oracle::enumerate_placements(cfg).size() == 4) break;
        if (seed > seed0 + 1000) throw DegenerateInstance("no four-state instance found");
    }
    const auto w = frame_forecast(cfg, 0, ForecastMode::Mean);
    const auto brute = brute_force_placement(cfg, w, solver);
    double mean = 0.0, var = 0.0;
    for (double t : brute.thetas) mean += t / static_cast<double>(brute.thetas.size());
    for (double t : brute.thetas) var += (t - mean) * (t - mean) / static_cast<double>(brute.thetas.size());
    const double sigma = std::sqrt(var);

    StationaritySuite out;
    ScoreCache cache(cfg, w, solver);
    for (double omega : {10.0 * sigma, sigma, sigma / 10.0}) {
        GibbsConfig g;
        g.omega = omega;
        g.max_iters = steps;
        g.pure_chain = true;
        g.seed = derive_seed(seed, 6);
        const auto chain = gibbs_optimize(cfg, w, g, solver, nullptr, &cache);
        if (tally) tally->add(check_constraints(cfg, chain.x_best, chain.best.y, chain.best.z_shadow, w), "stationarity");
        out.runs.push_back(stationarity_check(cfg, w, chain, omega, solver, burn_in));
    }
    const auto& mid = out.runs[1];
    const bool monotone = out.runs[0].optimal_mass <= out.runs[1].optimal_mass &&
                          out.runs[1].optimal_mass <= out.runs[2].optimal_mass;
    out.probe = mid.probe;
    out.probe.pass = mid.probe.pass && monotone;
    out.probe.violations = (mid.probe.pass ? 0 : 1) + (monotone ? 0 : 1);
    out.probe.detail = "TV " + detail::fmt(mid.tv_distance) + " at omega = sigma; optimal mass " +
                       detail::fmt(out.runs[0].optimal_mass) + " -> " + detail::fmt(out.runs[1].optimal_mass) +
                       " -> " + detail::fmt(out.runs[2].optimal_mass);
    return out;
}

} // namespace rmws
