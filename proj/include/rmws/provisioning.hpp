#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <rmws/domain.hpp>

namespace rmws {

enum class BindingCase
{
    Idle,             // nothing placed, or no routed work
    BudgetLimited,    // gamma < 1: the budget constraint binds
    CapacityLimited,  // gamma >= 1: the capacity constraint binds
};

// Closed-form optimum of the allocation sub-problem together with the
// multipliers of its two per-server constraints.
struct KktSolution
{
    Allocation y;
    std::vector<double> lambda;  // capacity multiplier
    std::vector<double> mu;      // budget multiplier
    std::vector<BindingCase> binding;
    std::vector<double> gamma;
};

/*
 * Compute-budget headroom of server i after paying for the storage of its
 * placed services, in units of the full compute capacity:
 *   (P_i^bud - sum_{s in theta_i} (m_s / M_i) P_i^m) / P_i^f.
 * Negative when storage alone exceeds the budget.
 */
inline double gamma(const SystemConfig& cfg, std::size_t i, const Placement& x)
{
    const auto& e = cfg.servers[i];
    const double headroom = e.budget - storage_cost(cfg, i, x.row(i));
    if (e.compute_price == 0) {
        return headroom >= 0 ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
    }
    return headroom / e.compute_price;
}

/*
 * Optimal compute shares for fixed placement and routing. With
 * w_s = z_{i,s} n_s c_s and B = min(1, gamma_i):
 *
 *   y_s = sqrt(w_s) (B F dt - sum w) / (sum sqrt(w) F dt) + w_s / (F dt)
 *
 * i.e. every queue receives its stability floor w_s / (F dt) and the
 * remaining share of B is split in proportion to sqrt(w_s). Services that
 * are placed but receive no work get nothing.
 */
inline KktSolution optimal_allocation(const SystemConfig& cfg, const Placement& x, const Schedule& z,
                                      const WorkloadSnapshot& w)
{
    detail::require_dims(cfg, x);
    detail::require_dims(cfg, z, w);
    const auto L = cfg.num_servers();
    const auto S = cfg.num_services();
    const double dt = w.interval_length;
    const auto totals = w.totals();

    KktSolution out{Allocation(cfg), std::vector<double>(L, 0.0), std::vector<double>(L, 0.0),
                    std::vector<BindingCase>(L, BindingCase::Idle), std::vector<double>(L, 0.0)};

    std::vector<double> work(S);
    for (std::size_t i = 0; i < L; ++i) {
        const auto& e = cfg.servers[i];
        const double g = gamma(cfg, i, x);
        out.gamma[i] = g;
        if (x.services_on(i).empty()) continue;

        double work_sum = 0.0;
        double root_sum = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            work[s] = x.placed(i, s) ? z(i, s) * totals[s] * cfg.services[s].compute_req : 0.0;
            work_sum += work[s];
            root_sum += std::sqrt(work[s]);
        }
        if (work_sum <= 0) continue;
        if (!(g > 0)) throw NegativeGamma(i, g);

        const double bound = std::min(1.0, g);
        const double full = e.compute_capacity * dt;
        const double slack = bound * full - work_sum;
        if (!(slack > detail::stability_floor(bound * full))) {
            throw InfeasibleDemand(i, "routed work " + std::to_string(work_sum) + " exceeds the compute budget " +
                                          std::to_string(bound * full) + " of server " + std::to_string(i));
        }
        for (std::size_t s = 0; s < S; ++s) {
            if (work[s] <= 0) continue;
            const double share = std::sqrt(work[s]) * slack / (root_sum * full) + work[s] / full;
            if (!(share >= 0)) throw InfeasibleDemand(i, "negative allocation from closed form");
            // rounding can push a lone service a few ulps past the bound
            out.y(i, s) = std::min(share, bound);
        }
        // Stationarity gives sqrt(F dt^2 / nu) sum sqrt(w) = B F dt - sum w.
        const double nu = full * dt * root_sum * root_sum / (slack * slack);
        if (g < 1.0) {
            out.binding[i] = BindingCase::BudgetLimited;
            out.mu[i] = nu / e.compute_price;
        } else {
            out.binding[i] = BindingCase::CapacityLimited;
            out.lambda[i] = nu;
        }
    }
    return out;
}

/*
 * Budget-respecting equal split: min(1, gamma_i) / |theta_i| to every
 * placed service.
 */
inline Allocation equal_allocation(const SystemConfig& cfg, const Placement& x)
{
    detail::require_dims(cfg, x);
    Allocation y(cfg);
    for (std::size_t i = 0; i < cfg.num_servers(); ++i) {
        const auto theta = x.services_on(i);
        if (theta.empty()) continue;
        const double g = gamma(cfg, i, x);
        if (!(g > 0)) throw NegativeGamma(i, g);
        const double share = std::min(1.0, g) / static_cast<double>(theta.size());
        for (const auto s : theta) y(i, s) = share;
    }
    return y;
}

} // namespace rmws
