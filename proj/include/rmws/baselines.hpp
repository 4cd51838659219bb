#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <rmws/domain.hpp>
#include <rmws/inner_solver.hpp>
#include <rmws/placement.hpp>
#include <rmws/provisioning.hpp>
#include <rmws/scheduling.hpp>

namespace rmws {

enum class BaselineKind
{
    CPO,     // cloud processing only
    FSP,     // placement fixed at the first frame
    NSP,     // no edge-edge cooperation
    PSP,     // popularity placement, optimised allocation and schedule
    EERA,    // edge-only scheduling, equal allocation
    ECEERA,  // edge and cloud scheduling, equal allocation
};

inline constexpr std::string_view to_string(BaselineKind k)
{
    switch (k) {
        case BaselineKind::CPO: return "CPO";
        case BaselineKind::FSP: return "FSP";
        case BaselineKind::NSP: return "NSP";
        case BaselineKind::PSP: return "PSP";
        case BaselineKind::EERA: return "EERA";
        case BaselineKind::ECEERA: return "ECEERA";
    }
    return "?";
}

struct FrameDecision
{
    Placement x;
    Allocation y;
    std::size_t iterations = 0;
};

inline ScheduleScope schedule_scope(BaselineKind k)
{
    switch (k) {
        case BaselineKind::NSP: return ScheduleScope::LocalOrCloud;
        case BaselineKind::EERA: return ScheduleScope::EdgeOnly;
        case BaselineKind::CPO:
        case BaselineKind::FSP:
        case BaselineKind::PSP:
        case BaselineKind::ECEERA: return ScheduleScope::Full;
    }
    throw std::logic_error("unhandled baseline");
}

/*
 * Frame-level placement and allocation of a baseline. FSP uses `frozen`
 * when given (the frame-0 placement); every other placement is the
 * popularity-greedy fill for the frame's forecast. Throws InfeasibleDemand
 * when EERA's edge capacity cannot absorb the placed services' demand.
 */
inline FrameDecision baseline_frame_decision(BaselineKind kind, const SystemConfig& cfg, const WorkloadSnapshot& w_frame,
                                             const SolverConfig& solver, const Placement* frozen = nullptr)
{
    FrameDecision d{Placement(cfg), Allocation(cfg), 0};
    if (kind == BaselineKind::CPO) return d;

    d.x = (kind == BaselineKind::FSP && frozen) ? *frozen : greedy_popularity_placement(cfg, popularity_order(w_frame));
    switch (kind) {
        case BaselineKind::FSP:
        case BaselineKind::NSP:
        case BaselineKind::PSP: {
            auto inner = solve_inner(cfg, d.x, w_frame, solver, schedule_scope(kind));
            d.y = std::move(inner.y);
            d.iterations = inner.iterations;
            break;
        }
        case BaselineKind::EERA:
            d.y = equal_allocation(cfg, d.x);
            // Throws when the edge cannot hold the forecast.
            (void)initial_schedule(cfg, d.x, d.y, w_frame, ScheduleScope::EdgeOnly);
            break;
        case BaselineKind::ECEERA:
            d.y = equal_allocation(cfg, d.x);
            break;
        case BaselineKind::CPO:
            break;
    }
    return d;
}

// Slot-level routing of a baseline for fixed (X, Y).
inline ScheduleResult baseline_slot_schedule(BaselineKind kind, const SystemConfig& cfg, const Placement& x,
                                             const Allocation& y, const WorkloadSnapshot& w_slot,
                                             const SolverConfig& solver)
{
    if (kind == BaselineKind::CPO) {
        ScheduleResult r{Schedule::cloud_only(cfg), 0.0, 0, true};
        r.objective = total_latency(cfg, x, y, r.z, w_slot);
        return r;
    }
    return solve_schedule(cfg, x, y, w_slot, solver, schedule_scope(kind));
}

} // namespace rmws
