#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <rmws/domain.hpp>
#include <rmws/provisioning.hpp>
#include <rmws/scheduling.hpp>

namespace rmws {

// Jointly optimised allocation and shadow schedule for one placement.
struct InnerSolution
{
    Allocation y;
    Schedule z_shadow;
    double objective_theta = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    // Objective at (Y0, Z0) followed by the objective after each round.
    std::vector<double> history;
};

namespace detail {

inline InnerSolution cloud_fallback(const SystemConfig& cfg, const Placement& x, const WorkloadSnapshot& w,
                                    bool converged)
{
    InnerSolution out{Allocation(cfg), Schedule::cloud_only(cfg), 0.0, 1, converged, {}};
    out.objective_theta = total_latency(cfg, x, out.y, out.z_shadow, w);
    out.history.push_back(out.objective_theta);
    return out;
}

} // namespace detail

/*
 * Alternating minimisation over (Y, Z) for a fixed placement.
 * Z0 is the capacity-proportional start under the equal budget split; each
 * round takes the closed-form allocation for the current schedule and then
 * descends on the schedule from where it was. Stops when a round changes
 * the objective by at most tolerance_eps.
 *
 * The result is a coordinate-wise stationary point, not necessarily the
 * global optimum of the joint (non-convex) problem.
 */
inline InnerSolution solve_inner(const SystemConfig& cfg, const Placement& x, const WorkloadSnapshot& w,
                                 const SolverConfig& solver, ScheduleScope scope = ScheduleScope::Full)
{
    detail::require_dims(cfg, x);
    solver.validate();
    if (!x.any()) return detail::cloud_fallback(cfg, x, w, true);

    Schedule z = initial_schedule(cfg, x, equal_allocation(cfg, x), w, scope);

    // InfeasibleDemand cannot arise from the starts above, but a caller's
    // scope may still leave a queue without headroom; shed half of the
    // edge work to the cloud and retry.
    constexpr int kRetries = 8;
    for (int attempt = 0;; ++attempt) {
        try {
            InnerSolution out{Allocation(cfg), z, 0.0, 0, false, {}};
            double f_prev = std::numeric_limits<double>::infinity();
            for (std::size_t round = 1; round <= solver.max_rounds; ++round) {
                out.y = optimal_allocation(cfg, x, out.z_shadow, w).y;
                if (round == 1) {
                    f_prev = evaluate_objective(cfg, x, out.y, out.z_shadow, w);
                    out.history.push_back(f_prev);
                }
                auto step = solve_schedule(cfg, x, out.y, w, solver, scope, &out.z_shadow);
                out.z_shadow = std::move(step.z);
                out.iterations = round;
                out.history.push_back(step.objective);
                if (std::abs(step.objective - f_prev) <= solver.tolerance_eps) {
                    out.converged = true;
                    break;
                }
                f_prev = step.objective;
            }
            out.objective_theta = total_latency(cfg, x, out.y, out.z_shadow, w);
            return out;
        } catch (const InfeasibleDemand&) {
            if (attempt >= kRetries || scope == ScheduleScope::EdgeOnly) break;
            for (std::size_t s = 0; s < cfg.num_services(); ++s) {
                double moved = 0.0;
                for (std::size_t i = 0; i < cfg.num_servers(); ++i) {
                    moved += 0.5 * z(i, s);
                    z(i, s) *= 0.5;
                }
                z(cfg.cloud_row(), s) += moved;
            }
        }
    }
    if (scope == ScheduleScope::EdgeOnly) {
        throw InfeasibleDemand(0, "edge-only scope cannot stabilise the routed work");
    }
    return detail::cloud_fallback(cfg, x, w, false);
}

} // namespace rmws
