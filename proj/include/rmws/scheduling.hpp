#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include <rmws/domain.hpp>
#include <rmws/provisioning.hpp>

namespace rmws {

struct SolverConfig
{
    // Initial step; when unset each service column uses 1 / (n_s phi_{c,s} + 1).
    std::optional<double> step0_alpha;
    // alpha_n = alpha_0 / n^step_exponent
    double step_exponent = 0.5;
    double tolerance_eps = 1e-6;
    std::size_t max_iters = 500;
    // Alternation rounds for the inner (allocation, schedule) solver.
    std::size_t max_rounds = 100;

    void validate() const
    {
        if (step0_alpha && !(*step0_alpha > 0)) throw ConfigError("solver: step0_alpha must be > 0");
        if (!(step_exponent > 0 && step_exponent <= 1)) throw ConfigError("solver: step_exponent must be in (0, 1]");
        if (!(tolerance_eps > 0)) throw ConfigError("solver: tolerance_eps must be > 0");
        if (max_iters < 1) throw ConfigError("solver: max_iters must be >= 1");
        if (max_rounds < 1) throw ConfigError("solver: max_rounds must be >= 1");
    }
};

// Which rows a service's workload may be routed to.
enum class ScheduleScope
{
    Full,          // any placed server and the cloud
    LocalOrCloud,  // a server only takes its own region's demand; no edge-edge forwarding
    EdgeOnly,      // placed services stay on the edge; unplaced services go to the cloud
};

struct ScheduleResult
{
    Schedule z;
    double objective = 0.0;
    std::size_t iterations = 0;  // largest iteration count over service columns
    bool converged = true;       // false: some column hit max_iters (best iterate returned)
};

// =======================================================================
// Sub-gradient
// =======================================================================

namespace detail {

inline bool near_kink(double routed, double local) noexcept
{
    return std::abs(routed - local) <= 1e-12 * std::max(1.0, local);
}

} // namespace detail

/*
 * Sub-gradient of the response-time objective with respect to z.
 * Edge entries: n_s c_s y F dt^2 / (y F dt - z n_s c_s)^2, plus n_s phi_s
 * when the server imports work (z n_s > n_{i,s}); at the kink the midpoint
 * n_s phi_s / 2 is used. Entries violating queue stability get the obstacle
 * gradient n_s c_s. Cloud row: n_s phi_{c,s}. Unplaced rows are zero.
 */
inline Matrix<double> subgradient(const SystemConfig& cfg, const Placement& x, const Allocation& y,
                                  const Schedule& z, const WorkloadSnapshot& w)
{
    detail::require_dims(cfg, x);
    detail::require_dims(cfg, y);
    detail::require_dims(cfg, z, w);
    const auto L = cfg.num_servers();
    const auto S = cfg.num_services();
    const double dt = w.interval_length;
    Matrix<double> g(L + 1, S, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
        const auto& svc = cfg.services[s];
        const double ns = w.total(s);
        for (std::size_t i = 0; i < L; ++i) {
            if (!x.placed(i, s) || ns <= 0) continue;
            const double per_unit = ns * svc.compute_req;
            const double cap = y(i, s) * cfg.servers[i].compute_capacity * dt;
            const double margin = cap - z(i, s) * per_unit;
            if (!(margin > detail::stability_floor(cap)) || cap <= 0) {
                g(i, s) = per_unit;
                continue;
            }
            double d = per_unit * cap * dt / (margin * margin);
            const double routed = z(i, s) * ns;
            if (detail::near_kink(routed, w.n(i, s))) d += 0.5 * ns * svc.edge_delay;
            else if (routed > w.n(i, s)) d += ns * svc.edge_delay;
            g(i, s) = d;
        }
        g(L, s) = ns * svc.cloud_delay;
    }
    return g;
}

// =======================================================================
// Projections
// =======================================================================

/*
 * Weighting step for one service column (length L+1, cloud last): clamp
 * negatives to 0, zero inadmissible rows, rescale the rest to sum to one.
 * An all-zero column is sent to the cloud.
 */
inline std::vector<double> project_schedule(std::span<const double> col, std::span<const std::uint8_t> mask)
{
    if (col.size() != mask.size() || col.empty()) throw ConfigError("project_schedule: column/mask size mismatch");
    std::vector<double> out(col.size(), 0.0);
    double sum = 0.0;
    for (std::size_t i = 0; i < col.size(); ++i) {
        if (!mask[i]) continue;
        out[i] = std::max(col[i], 0.0);
        sum += out[i];
    }
    if (sum <= 0) {
        std::fill(out.begin(), out.end(), 0.0);
        out.back() = 1.0;
        return out;
    }
    for (auto& v : out) v /= sum;
    return out;
}

/*
 * Euclidean projection onto {z : sum z = 1, 0 <= z <= upper}. Solves
 * sum clamp(v - tau, 0, upper) = 1 for tau over the sorted breakpoints.
 * Requires sum(upper) >= 1.
 */
inline std::vector<double> project_capped_simplex(std::span<const double> v, std::span<const double> upper)
{
    const auto n = v.size();
    double cap_sum = 0.0;
    for (const auto u : upper) cap_sum += u;
    if (cap_sum < 1.0 - 1e-12) throw InfeasibleDemand(0, "capped simplex is empty");

    auto mass = [&](double tau) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m += std::clamp(v[i] - tau, 0.0, upper[i]);
        return m;
    };

    std::vector<double> bp;
    bp.reserve(2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        if (upper[i] <= 0) continue;
        bp.push_back(v[i] - upper[i]);
        bp.push_back(v[i]);
    }
    std::sort(bp.begin(), bp.end());

    double tau = bp.front();
    double prev = bp.front();
    double prev_mass = mass(prev);
    if (prev_mass > 1.0) {
        for (std::size_t k = 1; k < bp.size(); ++k) {
            const double cur_mass = mass(bp[k]);
            if (cur_mass <= 1.0) {
                const double span = prev_mass - cur_mass;
                tau = span > 0 ? prev + (prev_mass - 1.0) * (bp[k] - prev) / span : bp[k];
                break;
            }
            prev = bp[k];
            prev_mass = cur_mass;
        }
    }
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::clamp(v[i] - tau, 0.0, upper[i]);
    return out;
}

// =======================================================================
// Solver
// =======================================================================

namespace detail {

// One service column of the scheduling problem; rows 0..L-1 edge, L cloud.
struct ColumnProblem
{
    std::size_t rows = 0;
    double ns = 0.0;
    double cloud_delay = 0.0;
    double edge_delay = 0.0;
    double dt = 0.0;
    std::vector<double> per_unit;  // n_s c_s on admissible edge rows
    std::vector<double> cap;       // y F dt
    std::vector<double> local;     // n_{i,s}
    std::vector<double> upper;     // feasible upper bound on z
    std::vector<double> scope_upper;  // routing-scope bound alone (no stability backoff)
    std::vector<std::uint8_t> mask;

    bool violates(std::size_t i, double zi) const
    {
        const double work = zi * per_unit[i];
        return work > 0 && !(cap[i] - work > stability_floor(cap[i]));
    }

    double objective(std::span<const double> z) const
    {
        double f = 0.0;
        for (std::size_t i = 0; i + 1 < rows; ++i) {
            if (!mask[i] || z[i] <= 0) continue;
            const double work = z[i] * per_unit[i];
            const double margin = cap[i] - work;
            if (!(margin > stability_floor(cap[i]))) return std::numeric_limits<double>::infinity();
            f += work * dt / margin;
            const double routed = z[i] * ns;
            if (routed > local[i]) f += (routed - local[i]) * edge_delay;
        }
        return f + z[rows - 1] * ns * cloud_delay;
    }

    void gradient(std::span<const double> z, std::span<double> g) const
    {
        for (std::size_t i = 0; i + 1 < rows; ++i) {
            g[i] = 0.0;
            if (!mask[i]) continue;
            const double margin = cap[i] - z[i] * per_unit[i];
            if (cap[i] <= 0 || !(margin > stability_floor(cap[i]))) {
                g[i] = per_unit[i];
                continue;
            }
            double d = per_unit[i] * cap[i] * dt / (margin * margin);
            const double routed = z[i] * ns;
            if (near_kink(routed, local[i])) d += 0.5 * ns * edge_delay;
            else if (routed > local[i]) d += ns * edge_delay;
            g[i] = d;
        }
        g[rows - 1] = mask[rows - 1] ? ns * cloud_delay : 0.0;
    }
};

inline ColumnProblem make_column(const SystemConfig& cfg, const Placement& x, const Allocation& y,
                                 const WorkloadSnapshot& w, std::size_t s, ScheduleScope scope)
{
    const auto L = cfg.num_servers();
    const auto& svc = cfg.services[s];
    ColumnProblem p;
    p.rows = L + 1;
    p.ns = w.total(s);
    p.cloud_delay = svc.cloud_delay;
    p.edge_delay = svc.edge_delay;
    p.dt = w.interval_length;
    p.per_unit.assign(L, p.ns * svc.compute_req);
    p.cap.assign(L, 0.0);
    p.local.assign(L, 0.0);
    p.upper.assign(L + 1, 0.0);
    p.scope_upper.assign(L + 1, 0.0);
    p.mask.assign(L + 1, 0);
    bool any_edge = false;
    for (std::size_t i = 0; i < L; ++i) {
        p.local[i] = w.n(i, s);
        if (!x.placed(i, s)) continue;
        any_edge = true;
        p.mask[i] = 1;
        p.cap[i] = y(i, s) * cfg.servers[i].compute_capacity * p.dt;
        double scope_bound = 1.0;
        if (scope == ScheduleScope::LocalOrCloud) scope_bound = p.ns > 0 ? std::min(1.0, p.local[i] / p.ns) : 0.0;
        const double stable = p.per_unit[i] > 0 ? 0.999 * p.cap[i] / p.per_unit[i] : 1.0;
        p.scope_upper[i] = scope_bound;
        p.upper[i] = std::max(std::min(scope_bound, stable), 0.0);
    }
    const bool cloud_allowed = scope != ScheduleScope::EdgeOnly || !any_edge;
    p.mask[L] = cloud_allowed ? 1 : 0;
    p.upper[L] = cloud_allowed ? 1.0 : 0.0;
    p.scope_upper[L] = p.upper[L];
    return p;
}

// Proportional-to-capacity start: half of each admissible server's
// capacity, with the remainder on the cloud.
inline std::vector<double> initial_column(const ColumnProblem& p, std::size_t s)
{
    const auto L = p.rows - 1;
    std::vector<double> z(p.rows, 0.0);
    if (p.ns <= 0) {
        if (p.mask[L]) {
            z[L] = 1.0;
        } else {
            double k = 0;
            for (std::size_t i = 0; i < L; ++i) k += p.mask[i];
            for (std::size_t i = 0; i < L; ++i) z[i] = p.mask[i] / k;
        }
        return z;
    }
    if (!p.mask[L]) {
        double cap_sum = 0.0;
        for (std::size_t i = 0; i < L; ++i) cap_sum += p.upper[i];
        if (cap_sum < 1.0) {
            throw InfeasibleDemand(0, "edge capacity cannot absorb the demand of service " + std::to_string(s));
        }
        double total_cap = 0.0;
        for (std::size_t i = 0; i < L; ++i) total_cap += p.mask[i] ? p.cap[i] : 0.0;
        for (std::size_t i = 0; i < L; ++i) z[i] = p.mask[i] ? p.cap[i] / total_cap : 0.0;
        return project_capped_simplex(z, p.upper);
    }
    double edge = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
        if (!p.mask[i]) continue;
        z[i] = std::min(0.5 * p.cap[i] / p.per_unit[i], p.upper[i]);
        edge += z[i];
    }
    if (edge > 1.0) {
        for (std::size_t i = 0; i < L; ++i) z[i] /= edge;
        edge = 1.0;
    }
    z[L] = 1.0 - edge;
    return z;
}

struct ColumnOutcome
{
    std::vector<double> z;
    double objective = 0.0;
    std::size_t iterations = 0;
    bool converged = true;
};

inline ColumnOutcome solve_column(const ColumnProblem& p, std::vector<double> z, const SolverConfig& solver)
{
    const auto L = p.rows - 1;
    ColumnOutcome out;
    if (p.ns <= 0) {
        out.z = std::move(z);
        out.objective = 0.0;
        return out;
    }

    bool in_scope = true;
    for (std::size_t i = 0; i < p.rows; ++i) in_scope = in_scope && z[i] <= p.scope_upper[i] + 1e-12;
    double best_f = in_scope ? p.objective(z) : std::numeric_limits<double>::infinity();
    std::vector<double> best_z = z;
    if (p.mask[L]) {
        std::vector<double> cloud(p.rows, 0.0);
        cloud[L] = 1.0;
        const double f_cloud = p.objective(cloud);
        if (f_cloud < best_f) {
            best_f = f_cloud;
            best_z = cloud;
        }
    }

    const double alpha0 = solver.step0_alpha.value_or(1.0 / (p.ns * p.cloud_delay + 1.0));
    std::vector<double> g(p.rows), v(p.rows);
    double f_prev = p.objective(z);
    out.converged = false;
    std::size_t k = 1;
    for (; k <= solver.max_iters; ++k) {
        p.gradient(z, g);
        const double alpha = alpha0 / std::pow(static_cast<double>(k), solver.step_exponent);
        for (std::size_t i = 0; i < p.rows; ++i) {
            v[i] = p.mask[i] ? z[i] - alpha * g[i] : 0.0;
            // Obstacle pull-back: re-enter the stable region before weighting.
            if (i < L && p.mask[i] && p.violates(i, z[i])) {
                v[i] = std::min(v[i], 0.999 * p.cap[i] / p.per_unit[i]);
            }
        }
        z = project_capped_simplex(v, p.upper);
        z = project_schedule(z, p.mask);
        const double f = p.objective(z);
        if (f < best_f) {
            best_f = f;
            best_z = z;
        }
        if (std::abs(f - f_prev) <= solver.tolerance_eps) {
            out.converged = true;
            break;
        }
        f_prev = f;
    }
    out.iterations = std::min(k, solver.max_iters);
    out.z = std::move(best_z);
    out.objective = best_f;
    return out;
}

} // namespace detail

/*
 * Starting schedule for a given allocation: every admissible server takes
 * half of the work it could serve under y, the cloud takes the rest.
 */
inline Schedule initial_schedule(const SystemConfig& cfg, const Placement& x, const Allocation& y,
                                 const WorkloadSnapshot& w, ScheduleScope scope = ScheduleScope::Full)
{
    Schedule z(cfg);
    for (std::size_t s = 0; s < cfg.num_services(); ++s) {
        const auto p = detail::make_column(cfg, x, y, w, s, scope);
        z.set_col(s, detail::initial_column(p, s));
    }
    return z;
}

/*
 * Projected sub-gradient descent on the scheduling problem for fixed
 * placement and allocation. The objective separates over service columns,
 * so each column is iterated independently:
 *
 *   z <- weight(project(z - alpha_n g)),  alpha_n = alpha_0 / n^p
 *
 * until the column objective changes by at most tolerance_eps. The best
 * feasible iterate (never worse than the start or cloud-only) is returned.
 */
inline ScheduleResult solve_schedule(const SystemConfig& cfg, const Placement& x, const Allocation& y,
                                     const WorkloadSnapshot& w, const SolverConfig& solver,
                                     ScheduleScope scope = ScheduleScope::Full,
                                     const Schedule* start = nullptr)
{
    detail::require_dims(cfg, x);
    detail::require_dims(cfg, y);
    if (!w.n.same_shape(cfg.num_servers(), cfg.num_services())) throw ConfigError("workload snapshot must be L x S");
    if (start) detail::require_dims(cfg, *start, w);
    solver.validate();

    ScheduleResult out{Schedule(cfg), 0.0, 0, true};
    for (std::size_t s = 0; s < cfg.num_services(); ++s) {
        const auto p = detail::make_column(cfg, x, y, w, s, scope);
        std::vector<double> z0;
        if (start) {
            z0 = project_schedule(start->col(s), p.mask);
            if (!p.mask[cfg.cloud_row()] && z0[cfg.cloud_row()] > 0) z0 = detail::initial_column(p, s);
        } else {
            z0 = detail::initial_column(p, s);
        }
        auto col = detail::solve_column(p, std::move(z0), solver);
        out.z.set_col(s, col.z);
        out.objective += col.objective;
        out.iterations = std::max(out.iterations, col.iterations);
        out.converged = out.converged && col.converged;
    }
    return out;
}

} // namespace rmws
