#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include <rmws/domain.hpp>
#include <rmws/inner_solver.hpp>
#include <rmws/placement.hpp>
#include <rmws/scheduling.hpp>

// Numeric oracles for the solvers. Nothing here is used by the production
// code paths; objectives, feasibility and allocations are re-derived from
// the configuration directly.

namespace rmws {

struct ProbeReport
{
    std::string name;
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worst_margin = -std::numeric_limits<double>::infinity();
    double tolerance = 0.0;
    bool pass = false;
    std::string detail;
};

inline nlohmann::json to_json(const ProbeReport& r)
{
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(); };
    return {{"name", r.name},
            {"samples", r.samples},
            {"violations", r.violations},
            {"worst_margin", num(r.worst_margin)},
            {"tolerance", r.tolerance},
            {"pass", r.pass},
            {"detail", r.detail}};
}

namespace oracle {

inline double latency(const SystemConfig& cfg, const Matrix<double>& y, const Matrix<double>& z,
                      const Matrix<double>& n, double dt)
{
    const auto L = cfg.servers.size();
    double total = 0.0;
    for (std::size_t s = 0; s < cfg.services.size(); ++s) {
        const auto& v = cfg.services[s];
        double ns = 0.0;
        for (std::size_t i = 0; i < L; ++i) ns += n(i, s);
        total += z(L, s) * ns * v.cloud_delay;
        for (std::size_t i = 0; i < L; ++i) {
            const double zi = z(i, s);
            if (zi <= 0) continue;
            const double work = zi * ns * v.compute_req;
            const double cap = y(i, s) * cfg.servers[i].compute_capacity * dt;
            if (cap - work <= 0) return std::numeric_limits<double>::infinity();
            total += work * dt / (cap - work);
            total += std::max(zi * ns - n(i, s), 0.0) * v.edge_delay;
        }
    }
    return total;
}

inline double storage_spend(const SystemConfig& cfg, std::size_t i, const Matrix<std::uint8_t>& x)
{
    double spend = 0.0;
    for (std::size_t s = 0; s < cfg.services.size(); ++s)
        if (x(i, s)) spend += cfg.services[s].storage_req / cfg.servers[i].storage_capacity * cfg.servers[i].storage_price;
    return spend;
}

inline double budget_share(const SystemConfig& cfg, std::size_t i, const Matrix<std::uint8_t>& x)
{
    const auto& e = cfg.servers[i];
    return (e.budget - storage_spend(cfg, i, x)) / e.compute_price;
}

inline bool row_admissible(const SystemConfig& cfg, std::size_t i, const Matrix<std::uint8_t>& x)
{
    double used = 0.0;
    for (std::size_t s = 0; s < cfg.services.size(); ++s)
        if (x(i, s)) used += cfg.services[s].storage_req;
    const auto& e = cfg.servers[i];
    return used <= e.storage_capacity * (1.0 + 1e-12) && storage_spend(cfg, i, x) < e.budget;
}

// All admissible placements in lexicographic order of their row-major bits.
inline std::vector<Placement> enumerate_placements(const SystemConfig& cfg)
{
    const auto L = cfg.num_servers();
    const auto S = cfg.num_services();
    const auto bits = L * S;
    if (bits > 12) throw TooLarge("placement enumeration limited to 2^12 states");
    std::vector<Placement> out;
    for (std::uint32_t code = 0; code < (1u << bits); ++code) {
        Placement x(cfg);
        for (std::size_t b = 0; b < bits; ++b) x.data()[b] = static_cast<std::uint8_t>((code >> (bits - 1 - b)) & 1u);
        bool ok = true;
        for (std::size_t i = 0; i < L && ok; ++i) ok = row_admissible(cfg, i, x);
        if (ok) out.push_back(std::move(x));
    }
    return out;
}

} // namespace oracle

// =======================================================================
// Brute-force placement
// =======================================================================

struct BruteForceResult
{
    Placement x;
    double theta = 0.0;
    std::vector<Placement> states;
    std::vector<double> thetas;
};

inline BruteForceResult brute_force_placement(const SystemConfig& cfg, const WorkloadSnapshot& w,
                                              const SolverConfig& solver)
{
    if (cfg.num_servers() * cfg.num_services() > 12) throw TooLarge("brute_force_placement: 2^(L S) exceeds 4096");
    BruteForceResult r;
    r.states = oracle::enumerate_placements(cfg);
    r.theta = std::numeric_limits<double>::infinity();
    for (const auto& x : r.states) {
        const double t = solve_inner(cfg, x, w, solver).objective_theta;
        r.thetas.push_back(t);
        if (t < r.theta) {
            r.theta = t;
            r.x = x;
        }
    }
    return r;
}

// =======================================================================
// Convexity probes
// =======================================================================

enum class Problem
{
    P2,  // joint (Y, Z) for fixed X
    P3,  // Y for fixed (X, Z)
    P4,  // Z for fixed (X, Y)
};

struct ProbeInstance
{
    const SystemConfig& cfg;
    const Placement& x;
    const WorkloadSnapshot& w;
    const Allocation* y = nullptr;  // required by P4
    const Schedule* z = nullptr;    // required by P3
};

namespace detail {

inline std::vector<double> random_simplex(std::size_t k, std::mt19937_64& rng)
{
    std::exponential_distribution<double> ex(1.0);
    std::vector<double> v(k);
    double sum = 0.0;
    for (auto& e : v) sum += (e = ex(rng));
    for (auto& e : v) e /= sum;
    return v;
}

inline double budget_bound(const SystemConfig& cfg, std::size_t i, const Placement& x)
{
    return std::min(1.0, oracle::budget_share(cfg, i, x));
}

// Random Y on the support of x with every loaded queue strictly stable.
inline Matrix<double> sample_allocation(const SystemConfig& cfg, const Placement& x, const Matrix<double>& z,
                                        const WorkloadSnapshot& w, std::mt19937_64& rng)
{
    const auto L = cfg.num_servers();
    const auto S = cfg.num_services();
    const double dt = w.interval_length;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix<double> y(L, S, 0.0);
    const auto totals = w.totals();
    for (std::size_t i = 0; i < L; ++i) {
        std::vector<std::size_t> on;
        std::vector<double> lo;
        double lo_sum = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            if (!x(i, s)) continue;
            on.push_back(s);
            lo.push_back(z(i, s) * totals[s] * cfg.services[s].compute_req / (cfg.servers[i].compute_capacity * dt));
            lo_sum += lo.back();
        }
        if (on.empty()) continue;
        const double room = budget_bound(cfg, i, x) - lo_sum;
        if (!(room > 0)) throw DegenerateInstance("no stable allocation exists on server " + std::to_string(i));
        const auto share = random_simplex(on.size(), rng);
        const double used = room * (0.02 + 0.98 * unit(rng));
        for (std::size_t k = 0; k < on.size(); ++k) y(i, on[k]) = lo[k] + used * share[k];
    }
    return y;
}

// Random Z supported on x plus the cloud, stable for the given Y.
inline Matrix<double> sample_schedule(const SystemConfig& cfg, const Placement& x, const Matrix<double>& y,
                                      const WorkloadSnapshot& w, std::mt19937_64& rng)
{
    const auto L = cfg.num_servers();
    const auto S = cfg.num_services();
    const auto totals = w.totals();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Matrix<double> z(L + 1, S, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
        const auto share = random_simplex(L + 1, rng);
        double edge = 0.0;
        for (std::size_t i = 0; i < L; ++i) {
            if (!x(i, s)) continue;
            const double per = totals[s] * cfg.services[s].compute_req;
            const double cap = per > 0 ? 0.999 * y(i, s) * cfg.servers[i].compute_capacity * w.interval_length / per : 1.0;
            z(i, s) = std::min({share[i], cap * unit(rng), 1.0 - edge});
            edge += z(i, s);
        }
        z(L, s) = 1.0 - edge;
    }
    return z;
}

// Joint (Y, Z) sample: Z first with stability left to Y.
inline std::pair<Matrix<double>, Matrix<double>> sample_joint(const SystemConfig& cfg, const Placement& x,
                                                              const WorkloadSnapshot& w, std::mt19937_64& rng)
{
    const auto L = cfg.num_servers();
    const auto S = cfg.num_services();
    const auto totals = w.totals();
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Matrix<double> z(L + 1, S, 0.0);
        for (std::size_t s = 0; s < S; ++s) {
            const auto share = random_simplex(L + 1, rng);
            double edge = 0.0;
            for (std::size_t i = 0; i < L; ++i)
                if (x(i, s)) edge += (z(i, s) = share[i]);
            z(L, s) = std::max(0.0, 1.0 - edge);
        }
        bool ok = true;
        for (std::size_t i = 0; i < L && ok; ++i) {
            double need = 0.0;
            for (std::size_t s = 0; s < S; ++s)
                need += z(i, s) * totals[s] * cfg.services[s].compute_req /
                        (cfg.servers[i].compute_capacity * w.interval_length);
            ok = need < budget_bound(cfg, i, x);
        }
        if (ok) return {sample_allocation(cfg, x, z, w, rng), std::move(z)};
    }
    throw DegenerateInstance("no stable (Y, Z) pair found");
}

} // namespace detail

/*
 * Midpoint-convexity test f((a+b)/2) <= (f(a)+f(b))/2 + tol on random
 * feasible pairs, tol = 1e-9 relative to the objective scale. P3 and P4
 * pass with zero violations; P2 passes when a violation is found.
 */
inline ProbeReport convexity_probe(Problem problem, const ProbeInstance& inst, std::size_t n_pairs,
                                   std::uint64_t seed = 1)
{
    const auto& cfg = inst.cfg;
    const double dt = inst.w.interval_length;
    std::mt19937_64 rng(seed);
    ProbeReport r;
    r.tolerance = 1e-9;
    r.name = problem == Problem::P2 ? "convexity-P2" : problem == Problem::P3 ? "convexity-P3" : "convexity-P4";
    if (problem == Problem::P3 && !inst.z) throw ConfigError("convexity_probe: P3 needs a schedule");
    if (problem == Problem::P4 && !inst.y) throw ConfigError("convexity_probe: P4 needs an allocation");

    auto midpoint = [](const Matrix<double>& a, const Matrix<double>& b) {
        Matrix<double> m(a.rows(), a.cols(), 0.0);
        for (std::size_t k = 0; k < a.data().size(); ++k) m.data()[k] = 0.5 * (a.data()[k] + b.data()[k]);
        return m;
    };

    for (std::size_t p = 0; p < n_pairs; ++p) {
        double fa, fb, fm;
        if (problem == Problem::P3) {
            const auto ya = detail::sample_allocation(cfg, inst.x, *inst.z, inst.w, rng);
            const auto yb = detail::sample_allocation(cfg, inst.x, *inst.z, inst.w, rng);
            fa = oracle::latency(cfg, ya, *inst.z, inst.w.n, dt);
            fb = oracle::latency(cfg, yb, *inst.z, inst.w.n, dt);
            fm = oracle::latency(cfg, midpoint(ya, yb), *inst.z, inst.w.n, dt);
        } else if (problem == Problem::P4) {
            const auto za = detail::sample_schedule(cfg, inst.x, *inst.y, inst.w, rng);
            const auto zb = detail::sample_schedule(cfg, inst.x, *inst.y, inst.w, rng);
            fa = oracle::latency(cfg, *inst.y, za, inst.w.n, dt);
            fb = oracle::latency(cfg, *inst.y, zb, inst.w.n, dt);
            fm = oracle::latency(cfg, *inst.y, midpoint(za, zb), inst.w.n, dt);
        } else {
            const auto [ya, za] = detail::sample_joint(cfg, inst.x, inst.w, rng);
            const auto [yb, zb] = detail::sample_joint(cfg, inst.x, inst.w, rng);
            fa = oracle::latency(cfg, ya, za, inst.w.n, dt);
            fb = oracle::latency(cfg, yb, zb, inst.w.n, dt);
            fm = oracle::latency(cfg, midpoint(ya, yb), midpoint(za, zb), inst.w.n, dt);
        }
        const double avg = 0.5 * (fa + fb);
        const double margin = (fm - avg) / std::max(1.0, std::abs(avg));
        ++r.samples;
        r.worst_margin = std::max(r.worst_margin, margin);
        if (margin > r.tolerance) {
            ++r.violations;
            if (problem == Problem::P2) break;
        }
    }
    r.pass = problem == Problem::P2 ? r.violations > 0 : r.violations == 0;
    return r;
}

// =======================================================================
// Closed-form allocation checks
// =======================================================================

struct KktReport
{
    double residual = 0.0;
    std::vector<double> lambda;  // per server, capacity multiplier
    std::vector<double> mu;      // per server, budget multiplier
};

/*
 * Rebuilds the multipliers of the capacity and budget constraints from the
 * closed-form expressions and measures how well (Y, lambda, mu) satisfies
 * stationarity, primal feasibility and complementary slackness. Each term
 * is relative to its natural scale.
 */
inline KktReport kkt_check(const SystemConfig& cfg, const Placement& x, const Schedule& z, const Allocation& y,
                           const WorkloadSnapshot& w)
{
    const auto L = cfg.num_servers();
    const auto S = cfg.num_services();
    const double dt = w.interval_length;
    const auto totals = w.totals();
    KktReport r;
    r.lambda.assign(L, 0.0);
    r.mu.assign(L, 0.0);
    for (std::size_t i = 0; i < L; ++i) {
        const auto& e = cfg.servers[i];
        const double fdt = e.compute_capacity * dt;
        double sqrt_sum = 0.0, work_sum = 0.0, ysum = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            const double wk = x(i, s) ? z(i, s) * totals[s] * cfg.services[s].compute_req : 0.0;
            sqrt_sum += std::sqrt(wk);
            work_sum += wk;
            ysum += y(i, s);
        }
        if (work_sum <= 0) continue;
        const double g = oracle::budget_share(cfg, i, x);
        const double bound = std::min(1.0, g);
        const double slack = bound * fdt - work_sum;
        const double nu = fdt * dt * sqrt_sum * sqrt_sum / (slack * slack);
        if (g < 1.0) r.mu[i] = nu / e.compute_price;
        else r.lambda[i] = nu;
        const double price = r.lambda[i] + r.mu[i] * e.compute_price;

        for (std::size_t s = 0; s < S; ++s) {
            const double wk = x(i, s) ? z(i, s) * totals[s] * cfg.services[s].compute_req : 0.0;
            if (wk <= 0) continue;
            const double margin = y(i, s) * fdt - wk;
            if (margin <= 0) {
                r.residual = std::numeric_limits<double>::infinity();
                continue;
            }
            // d/dy of w dt / (y F dt - w)
            const double grad = -wk * dt * fdt / (margin * margin);
            r.residual = std::max(r.residual, std::abs(grad + price) / price);
        }
        const double cost = oracle::storage_spend(cfg, i, x) + e.compute_price * ysum;
        r.residual = std::max(r.residual, std::max(0.0, ysum - 1.0));
        r.residual = std::max(r.residual, std::max(0.0, cost - e.budget) / std::max(1.0, e.budget));
        // Complementary slackness on the multiplier that is active.
        if (r.lambda[i] > 0) r.residual = std::max(r.residual, std::abs(1.0 - ysum));
        if (r.mu[i] > 0) r.residual = std::max(r.residual, std::abs(e.budget - cost) / std::max(1.0, e.budget));
    }
    return r;
}

inline double kkt_residual(const SystemConfig& cfg, const Placement& x, const Schedule& z, const Allocation& y,
                           const WorkloadSnapshot& w)
{
    return kkt_check(cfg, x, z, y, w).residual;
}

/*
 * Iterative solution of the allocation problem, server by server, in the
 * variables u_s = y_s - w_s / (F dt) > 0. The objective sum a_s / u_s is
 * decreasing in every u_s, so the budget-or-capacity bound is tight:
 * sum u_s = R. Each iteration takes a diagonally scaled gradient step
 * projected onto that hyperplane (the multiplier is the one that keeps the
 * sum fixed), then backtracks to stay positive and satisfy Armijo. Stops
 * when the relative spread of the marginal values a_s / u_s^2 is <= 1e-12.
 */
inline Allocation numeric_p3_solver(const SystemConfig& cfg, const Placement& x, const Schedule& z,
                                    const WorkloadSnapshot& w, std::size_t max_iters = 1000000)
{
    const auto L = cfg.num_servers();
    const auto S = cfg.num_services();
    const double dt = w.interval_length;
    const auto totals = w.totals();
    Allocation y(cfg);

    for (std::size_t i = 0; i < L; ++i) {
        const double fdt = cfg.servers[i].compute_capacity * dt;
        std::vector<std::size_t> on;
        std::vector<double> a, lo;
        double lo_sum = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            const double wk = x(i, s) ? z(i, s) * totals[s] * cfg.services[s].compute_req : 0.0;
            if (wk <= 0) continue;
            on.push_back(s);
            a.push_back(wk * dt / fdt);
            lo.push_back(wk / fdt);
            lo_sum += wk / fdt;
        }
        if (on.empty()) continue;
        const double bound = std::min(1.0, oracle::budget_share(cfg, i, x));
        const double R = bound - lo_sum;
        if (!(R > 0)) throw InfeasibleDemand(i, "numeric_p3_solver: no stable allocation");
        const auto k = on.size();

        auto f = [&](const std::vector<double>& u) {
            double v = 0.0;
            for (std::size_t j = 0; j < k; ++j) v += a[j] / u[j];
            return v;
        };

        std::vector<double> u(k, R / static_cast<double>(k)), g(k), h(k), d(k), trial(k);
        bool done = false;
        for (std::size_t it = 0; it < max_iters; ++it) {
            double num = 0.0, den = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                g[j] = -a[j] / (u[j] * u[j]);
                h[j] = 2.0 * a[j] / (u[j] * u[j] * u[j]);
                num += g[j] / h[j];
                den += 1.0 / h[j];
            }
            const double nu = -num / den;
            double spread = 0.0, slope = 0.0;
            for (std::size_t j = 0; j < k; ++j) {
                spread = std::max(spread, std::abs(g[j] + nu) / nu);
                d[j] = -(g[j] + nu) / h[j];
                slope += g[j] * d[j];
            }
            if (spread <= 1e-12) {
                done = true;
                break;
            }
            const double f0 = f(u);
            double t = 1.0;
            for (int bt = 0; bt < 200; ++bt, t *= 0.5) {
                bool positive = true;
                for (std::size_t j = 0; j < k; ++j) positive = positive && (trial[j] = u[j] + t * d[j]) > 0;
                if (positive && f(trial) <= f0 + 1e-4 * t * slope) break;
            }
            double sum = 0.0;
            for (double v : trial) sum += v;
            for (std::size_t j = 0; j < k; ++j) u[j] = trial[j] * (R / sum);
        }
        if (!done) throw NonConvergence("numeric_p3_solver: iteration limit on server " + std::to_string(i));
        for (std::size_t j = 0; j < k; ++j) y(i, on[j]) = lo[j] + u[j];
    }
    return y;
}

// =======================================================================
// Grid-search oracles for the schedule and the joint inner problem
// =======================================================================

struct GridResult
{
    double objective = std::numeric_limits<double>::infinity();
    std::vector<double> z;  // best point (edge fractions, then cloud)
};

// One server, one service plus cloud: z_edge on a uniform grid of [0, 1].
inline GridResult grid_schedule_1d(const SystemConfig& cfg, const Allocation& y, const WorkloadSnapshot& w,
                                   double resolution = 1e-5)
{
    if (cfg.num_servers() != 1 || cfg.num_services() != 1) throw ConfigError("grid_schedule_1d: 1x1 instance only");
    const auto steps = static_cast<std::size_t>(std::llround(1.0 / resolution));
    GridResult best;
    Matrix<double> z(2, 1, 0.0);
    for (std::size_t k = 0; k <= steps; ++k) {
        z(0, 0) = static_cast<double>(k) / static_cast<double>(steps);
        z(1, 0) = 1.0 - z(0, 0);
        const double f = oracle::latency(cfg, y, z, w.n, w.interval_length);
        if (f < best.objective) {
            best.objective = f;
            best.z = {z(0, 0), z(1, 0)};
        }
    }
    return best;
}

/*
 * Joint oracle for a fixed placement: every Z on a grid of the given
 * resolution (per column, over the placed servers and the cloud), each
 * scored with its optimal allocation computed from scratch.
 */
inline GridResult grid_inner_oracle(const SystemConfig& cfg, const Placement& x, const WorkloadSnapshot& w,
                                    double resolution = 1e-2, double max_points = 1e8)
{
    const auto L = cfg.num_servers();
    const auto S = cfg.num_services();
    const double dt = w.interval_length;
    const auto totals = w.totals();
    const auto steps = static_cast<int>(std::llround(1.0 / resolution));

    // Per-column grid points over admissible rows.
    std::vector<std::vector<std::vector<int>>> columns(S);
    double points = 1.0;
    for (std::size_t s = 0; s < S; ++s) {
        std::vector<std::size_t> rows;
        for (std::size_t i = 0; i < L; ++i)
            if (x(i, s)) rows.push_back(i);
        std::vector<int> cur(L + 1, 0);
        std::function<void(std::size_t, int)> rec = [&](std::size_t k, int left) {
            if (k == rows.size()) {
                cur[L] = left;
                columns[s].push_back(cur);
                return;
            }
            for (int v = 0; v <= left; ++v) {
                cur[rows[k]] = v;
                rec(k + 1, left - v);
            }
            cur[rows[k]] = 0;
        };
        rec(0, steps);
        points *= static_cast<double>(columns[s].size());
    }
    if (points > max_points) throw TooLarge("grid_inner_oracle: grid too large");

    std::vector<double> bound(L);
    for (std::size_t i = 0; i < L; ++i) bound[i] = std::min(1.0, oracle::budget_share(cfg, i, x));

    GridResult best;
    std::vector<std::size_t> idx(S, 0);
    std::vector<double> sq(L), work(L);
    while (true) {
        double f = 0.0;
        std::fill(sq.begin(), sq.end(), 0.0);
        std::fill(work.begin(), work.end(), 0.0);
        for (std::size_t s = 0; s < S; ++s) {
            const auto& c = columns[s][idx[s]];
            const auto& v = cfg.services[s];
            f += c[L] * resolution * totals[s] * v.cloud_delay;
            for (std::size_t i = 0; i < L; ++i) {
                if (!c[i]) continue;
                const double zi = c[i] * resolution;
                const double wk = zi * totals[s] * v.compute_req;
                sq[i] += std::sqrt(wk);
                work[i] += wk;
                f += std::max(zi * totals[s] - w.n(i, s), 0.0) * v.edge_delay;
            }
        }
        // Queueing part at the optimal allocation: dt (sum_s sqrt w)^2 / slack.
        for (std::size_t i = 0; i < L && std::isfinite(f); ++i) {
            if (work[i] <= 0) continue;
            const double fdt = cfg.servers[i].compute_capacity * dt;
            const double slack = bound[i] * fdt - work[i];
            if (slack <= 0) {
                f = std::numeric_limits<double>::infinity();
                break;
            }
            f += dt * sq[i] * sq[i] / slack;
        }
        if (f < best.objective) {
            best.objective = f;
            best.z.clear();
            for (std::size_t s = 0; s < S; ++s)
                for (std::size_t i = 0; i <= L; ++i) best.z.push_back(columns[s][idx[s]][i] * resolution);
        }
        std::size_t s = 0;
        while (s < S && ++idx[s] == columns[s].size()) idx[s++] = 0;
        if (s == S) break;
    }
    return best;
}

// =======================================================================
// Stationary law of the placement chain
// =======================================================================

struct StationarityReport
{
    ProbeReport probe;
    std::vector<Placement> states;
    std::vector<double> thetas;
    std::vector<double> exact;      // pi(X) proportional to exp(-theta / omega)
    std::vector<double> empirical;  // visit frequencies after burn-in
    double tv_distance = 0.0;
    double optimal_mass = 0.0;      // empirical mass on the brute-force optimum
};

/*
 * Compares the visit frequencies of a pure-chain Gibbs trace (after
 * burn-in) with the Boltzmann law over the enumerated placements.
 */
inline StationarityReport stationarity_check(const SystemConfig& cfg, const WorkloadSnapshot& w,
                                             const GibbsTrace& trace, double omega, const SolverConfig& solver,
                                             std::size_t burn_in = 10000, double tolerance = 0.05)
{
    StationarityReport r;
    r.states = oracle::enumerate_placements(cfg);
    if (r.states.size() > 16) throw TooLarge("stationarity_check: more than 16 states");
    for (const auto& x : r.states) r.thetas.push_back(solve_inner(cfg, x, w, solver).objective_theta);

    const double t_min = *std::min_element(r.thetas.begin(), r.thetas.end());
    double z = 0.0;
    for (double t : r.thetas) z += std::exp(-(t - t_min) / omega);
    for (double t : r.thetas) r.exact.push_back(std::exp(-(t - t_min) / omega) / z);

    std::map<std::vector<std::uint8_t>, std::size_t> index;
    for (std::size_t k = 0; k < r.states.size(); ++k) index.emplace(r.states[k].data(), k);
    r.empirical.assign(r.states.size(), 0.0);
    std::size_t counted = 0;
    for (std::size_t m = burn_in; m < trace.steps.size(); ++m) {
        const auto& x = trace.states.at(trace.steps[m].state);
        auto it = index.find(x.data());
        if (it == index.end()) throw std::logic_error("stationarity_check: chain visited an unknown state");
        r.empirical[it->second] += 1.0;
        ++counted;
    }
    if (counted == 0) throw ConfigError("stationarity_check: trace shorter than burn-in");
    for (auto& p : r.empirical) p /= static_cast<double>(counted);

    for (std::size_t k = 0; k < r.states.size(); ++k) r.tv_distance += 0.5 * std::abs(r.exact[k] - r.empirical[k]);
    const auto best = static_cast<std::size_t>(std::min_element(r.thetas.begin(), r.thetas.end()) - r.thetas.begin());
    r.optimal_mass = r.empirical[best];

    r.probe.name = "stationarity";
    r.probe.samples = counted;
    r.probe.worst_margin = r.tv_distance;
    r.probe.tolerance = tolerance;
    r.probe.violations = r.tv_distance > tolerance ? 1 : 0;
    r.probe.pass = r.probe.violations == 0;
    return r;
}

} // namespace rmws
