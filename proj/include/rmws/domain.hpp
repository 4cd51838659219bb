#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include <rmws/error.hpp>
#include <rmws/matrix.hpp>

namespace rmws {

// =======================================================================
// System description
// =======================================================================

struct EdgeServer
{
    double compute_capacity = 100.0;  // giga-cycles per second (F_i)
    double storage_capacity = 100.0;  // GB (M_i)
    double storage_price = 20.0;      // per hour for the full storage (P_i^m)
    double compute_price = 20.0;      // per hour for the full compute (P_i^f)
    double budget = 28.0;             // per hour (P_i^bud)
};

struct Service
{
    double storage_req = 20.0;   // GB (m_s)
    double compute_req = 0.3;    // giga-cycles per task (c_s)
    double edge_delay = 0.01;    // s per task forwarded between edge servers (phi_s)
    double cloud_delay = 0.1;    // s per task sent to the cloud (phi_{c,s})
};

enum class ForecastMode
{
    Mean,
    Oracle,
};

struct SystemConfig
{
    std::vector<EdgeServer> servers;
    std::vector<Service> services;
    double slot_length = 60.0;  // seconds
    std::size_t slots_per_frame = 30;
    std::size_t frames = 10;
    double zipf_exponent = 0.6;
    double arrival_mean = 600.0;    // tasks per slot per server
    double arrival_spread = 20.0;   // standard deviation, tasks per slot
    double budget_coefficient = 0.7;
    std::uint64_t seed = 1;
    ForecastMode forecast = ForecastMode::Mean;
    // Optional per-frame overrides; frame f uses entry f % size().
    std::vector<double> frame_zipf_exponents;
    std::vector<std::vector<std::size_t>> frame_rankings;

    std::size_t num_servers() const noexcept { return servers.size(); }
    std::size_t num_services() const noexcept { return services.size(); }
    std::size_t cloud_row() const noexcept { return servers.size(); }
    double frame_length() const noexcept { return slot_length * static_cast<double>(slots_per_frame); }

    // Throws ConfigError on the first violated invariant.
    void validate() const
    {
        if (servers.empty()) throw ConfigError("config: at least one edge server required");
        if (services.empty()) throw ConfigError("config: at least one service required");
        for (std::size_t i = 0; i < servers.size(); ++i) {
            const auto& e = servers[i];
            const auto tag = "config: server " + std::to_string(i) + ": ";
            if (!(e.compute_capacity > 0)) throw ConfigError(tag + "compute_capacity must be > 0");
            if (!(e.storage_capacity > 0)) throw ConfigError(tag + "storage_capacity must be > 0");
            if (!(e.storage_price >= 0) || !(e.compute_price >= 0)) throw ConfigError(tag + "prices must be >= 0");
            if (!(e.budget >= 0)) throw ConfigError(tag + "budget must be >= 0");
        }
        for (std::size_t s = 0; s < services.size(); ++s) {
            const auto& v = services[s];
            const auto tag = "config: service " + std::to_string(s) + ": ";
            if (!(v.storage_req > 0)) throw ConfigError(tag + "storage_req must be > 0");
            if (!(v.compute_req > 0)) throw ConfigError(tag + "compute_req must be > 0");
            if (!(v.edge_delay >= 0) || !(v.cloud_delay >= 0)) throw ConfigError(tag + "delays must be >= 0");
            if (v.cloud_delay < v.edge_delay) throw ConfigError(tag + "cloud_delay must be >= edge_delay");
        }
        if (!(slot_length > 0)) throw ConfigError("config: slot_length must be > 0");
        if (slots_per_frame < 1) throw ConfigError("config: slots_per_frame must be >= 1");
        if (!(zipf_exponent >= 0)) throw ConfigError("config: zipf_exponent must be >= 0");
        if (!(arrival_mean >= 0) || !(arrival_spread >= 0)) throw ConfigError("config: arrival parameters must be >= 0");
        if (!(budget_coefficient > 0 && budget_coefficient <= 1)) {
            throw ConfigError("config: budget_coefficient must be in (0, 1]");
        }
        for (const auto e : frame_zipf_exponents) {
            if (!(e >= 0)) throw ConfigError("config: frame_zipf_exponents must be >= 0");
        }
        for (const auto& r : frame_rankings) {
            std::vector<bool> seen(services.size(), false);
            if (r.size() != services.size()) throw ConfigError("config: frame ranking must be a permutation of services");
            for (const auto s : r) {
                if (s >= services.size() || seen[s]) throw ConfigError("config: frame ranking must be a permutation of services");
                seen[s] = true;
            }
        }
    }
};

// =======================================================================
// Decision variables
// =======================================================================

// x: L x S binary.
struct Placement : Matrix<std::uint8_t>
{
    using Matrix::Matrix;
    explicit Placement(const SystemConfig& cfg) : Matrix(cfg.num_servers(), cfg.num_services(), 0) {}

    bool placed(std::size_t i, std::size_t s) const { return (*this)(i, s) != 0; }

    // theta_i
    std::vector<std::size_t> services_on(std::size_t i) const
    {
        std::vector<std::size_t> out;
        for (std::size_t s = 0; s < cols(); ++s) if (placed(i, s)) out.push_back(s);
        return out;
    }

    bool any() const
    {
        for (const auto v : data()) if (v) return true;
        return false;
    }
};

// y: L x S fractions of compute capacity.
struct Allocation : Matrix<double>
{
    using Matrix::Matrix;
    explicit Allocation(const SystemConfig& cfg) : Matrix(cfg.num_servers(), cfg.num_services(), 0.0) {}
};

// z: (L+1) x S routing ratios; the last row is the cloud.
struct Schedule : Matrix<double>
{
    using Matrix::Matrix;
    explicit Schedule(const SystemConfig& cfg) : Matrix(cfg.num_servers() + 1, cfg.num_services(), 0.0) {}

    static Schedule cloud_only(const SystemConfig& cfg)
    {
        Schedule z(cfg);
        for (std::size_t s = 0; s < cfg.num_services(); ++s) z(cfg.cloud_row(), s) = 1.0;
        return z;
    }
};

// Request counts n_{i,s} over an interval of the given length.
struct WorkloadSnapshot
{
    Matrix<double> n;
    double interval_length = 60.0;

    WorkloadSnapshot() = default;
    WorkloadSnapshot(std::size_t servers, std::size_t services, double dt)
        : n(servers, services, 0.0), interval_length(dt)
    {}

    // n_s
    double total(std::size_t s) const
    {
        double t = 0;
        for (std::size_t i = 0; i < n.rows(); ++i) t += n(i, s);
        return t;
    }

    std::vector<double> totals() const
    {
        std::vector<double> out(n.cols(), 0.0);
        for (std::size_t i = 0; i < n.rows(); ++i)
            for (std::size_t s = 0; s < n.cols(); ++s) out[s] += n(i, s);
        return out;
    }
};

// =======================================================================
// Latency model
// =======================================================================

namespace detail {

inline void require_dims(const SystemConfig& cfg, const Schedule& z, const WorkloadSnapshot& w)
{
    const auto L = cfg.num_servers();
    const auto S = cfg.num_services();
    if (!z.same_shape(L + 1, S)) throw ConfigError("schedule matrix must be (L+1) x S");
    if (!w.n.same_shape(L, S)) throw ConfigError("workload snapshot must be L x S");
    if (!(w.interval_length > 0)) throw ConfigError("workload interval length must be > 0");
}

inline void require_dims(const SystemConfig& cfg, const Allocation& y)
{
    if (!y.same_shape(cfg.num_servers(), cfg.num_services())) throw ConfigError("allocation matrix must be L x S");
}

inline void require_dims(const SystemConfig& cfg, const Placement& x)
{
    if (!x.same_shape(cfg.num_servers(), cfg.num_services())) throw ConfigError("placement matrix must be L x S");
}

// Minimum admissible y F dt - w for a loaded queue.
inline double stability_floor(double capacity_work) noexcept { return 1e-9 * capacity_work; }

} // namespace detail

// Work (giga-cycles) routed to server i for service s: z n_s c_s.
inline double routed_work(const SystemConfig& cfg, std::size_t i, std::size_t s,
                          const Schedule& z, double n_s)
{
    return z(i, s) * n_s * cfg.services[s].compute_req;
}

// Compute work server i can do for service s over dt: y F dt.
inline double capacity_work(const SystemConfig& cfg, std::size_t i, std::size_t s,
                            const Allocation& y, double dt)
{
    return y(i, s) * cfg.servers[i].compute_capacity * dt;
}

// Stability margin y F dt - z n c, in giga-cycles.
inline double stability_margin(const SystemConfig& cfg, std::size_t i, std::size_t s,
                               const Allocation& y, const Schedule& z, const WorkloadSnapshot& w)
{
    return capacity_work(cfg, i, s, y, w.interval_length) - routed_work(cfg, i, s, z, w.total(s));
}

// Excess inbound forwarding charge: max(z n_s - n_{i,s}, 0) phi_s.
inline double transmission_latency(const SystemConfig& cfg, std::size_t i, std::size_t s,
                                   const Schedule& z, const WorkloadSnapshot& w)
{
    detail::require_dims(cfg, z, w);
    if (i >= cfg.num_servers() || s >= cfg.num_services()) throw ConfigError("index out of range");
    const double excess = z(i, s) * w.total(s) - w.n(i, s);
    return std::max(excess, 0.0) * cfg.services[s].edge_delay;
}

/*
 * M/M/1 sojourn summed over the z n_s tasks routed to (i, s):
 *   z n_s / (y F_i / c_s - z n_s / dt).
 * Evaluated as w dt / (y F dt - w) with w = z n_s c_s.
 */
inline double computation_latency(const SystemConfig& cfg, std::size_t i, std::size_t s,
                                  const Allocation& y, const Schedule& z, const WorkloadSnapshot& w)
{
    detail::require_dims(cfg, z, w);
    detail::require_dims(cfg, y);
    if (i >= cfg.num_servers() || s >= cfg.num_services()) throw ConfigError("index out of range");
    const double work = routed_work(cfg, i, s, z, w.total(s));
    if (work <= 0) return 0.0;
    const double cap = capacity_work(cfg, i, s, y, w.interval_length);
    const double margin = cap - work;
    if (!(margin > detail::stability_floor(cap))) throw QueueUnstable(i, s, margin);
    return work * w.interval_length / margin;
}

// z_{L+1,s} n_s phi_{c,s}
inline double cloud_latency(const SystemConfig& cfg, std::size_t s, const Schedule& z, const WorkloadSnapshot& w)
{
    detail::require_dims(cfg, z, w);
    if (s >= cfg.num_services()) throw ConfigError("index out of range");
    return z(cfg.cloud_row(), s) * w.total(s) * cfg.services[s].cloud_delay;
}

struct LatencyBreakdown
{
    double edge = 0.0;
    double cloud = 0.0;
    double total = 0.0;
};

namespace detail {

inline void require_support(const SystemConfig& cfg, const Placement& x, const Schedule& z)
{
    for (std::size_t i = 0; i < cfg.num_servers(); ++i)
        for (std::size_t s = 0; s < cfg.num_services(); ++s)
            if (!x.placed(i, s) && z(i, s) != 0.0) {
                throw ConfigError("schedule routes service " + std::to_string(s) +
                                  " to server " + std::to_string(i) + " where it is not placed");
            }
}

} // namespace detail

// Edge (servers' T_i) and cloud (T_c) components of the response-time objective.
inline LatencyBreakdown latency_breakdown(const SystemConfig& cfg, const Placement& x, const Allocation& y,
                                          const Schedule& z, const WorkloadSnapshot& w)
{
    detail::require_dims(cfg, x);
    detail::require_dims(cfg, y);
    detail::require_dims(cfg, z, w);
    detail::require_support(cfg, x, z);
    LatencyBreakdown out;
    for (std::size_t i = 0; i < cfg.num_servers(); ++i) {
        for (std::size_t s = 0; s < cfg.num_services(); ++s) {
            if (!x.placed(i, s)) continue;
            out.edge += computation_latency(cfg, i, s, y, z, w) + transmission_latency(cfg, i, s, z, w);
        }
    }
    for (std::size_t s = 0; s < cfg.num_services(); ++s) out.cloud += cloud_latency(cfg, s, z, w);
    out.total = out.edge + out.cloud;
    return out;
}

// Sum of T_i over edge servers plus T_c. Throws QueueUnstable.
inline double total_latency(const SystemConfig& cfg, const Placement& x, const Allocation& y,
                            const Schedule& z, const WorkloadSnapshot& w)
{
    return latency_breakdown(cfg, x, y, z, w).total;
}

/*
 * Same objective as total_latency in one fused pass with no dimension or
 * support checks; returns +inf instead of throwing on an unstable queue.
 * Hot path of the solvers.
 */
inline double evaluate_objective(const SystemConfig& cfg, const Placement& x, const Allocation& y,
                                 const Schedule& z, const WorkloadSnapshot& w)
{
    const auto L = cfg.num_servers();
    const auto S = cfg.num_services();
    const double dt = w.interval_length;
    double f = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
        const auto& svc = cfg.services[s];
        double ns = 0.0;
        for (std::size_t i = 0; i < L; ++i) ns += w.n(i, s);
        for (std::size_t i = 0; i < L; ++i) {
            if (!x(i, s)) continue;
            const double routed = z(i, s) * ns;
            const double work = routed * svc.compute_req;
            if (work > 0) {
                const double cap = y(i, s) * cfg.servers[i].compute_capacity * dt;
                const double margin = cap - work;
                if (!(margin > 1e-9 * cap)) return std::numeric_limits<double>::infinity();
                f += work * dt / margin;
            }
            if (routed > w.n(i, s)) f += (routed - w.n(i, s)) * svc.edge_delay;
        }
        f += z(L, s) * ns * svc.cloud_delay;
    }
    return f;
}

// =======================================================================
// Cost model
// =======================================================================

// Storage spend of a placement row: sum (m_s / M_i) P_i^m.
inline double storage_cost(const SystemConfig& cfg, std::size_t i, std::span<const std::uint8_t> row)
{
    const auto& e = cfg.servers[i];
    double c = 0.0;
    for (std::size_t s = 0; s < row.size(); ++s)
        if (row[s]) c += cfg.services[s].storage_req / e.storage_capacity * e.storage_price;
    return c;
}

inline double storage_used(const SystemConfig& cfg, std::span<const std::uint8_t> row)
{
    double m = 0.0;
    for (std::size_t s = 0; s < row.size(); ++s) if (row[s]) m += cfg.services[s].storage_req;
    return m;
}

// p_i = sum_s x (m_s / M_i P^m + y P^f)
inline double server_cost(const SystemConfig& cfg, std::size_t i, const Placement& x, const Allocation& y)
{
    detail::require_dims(cfg, x);
    detail::require_dims(cfg, y);
    const auto& e = cfg.servers[i];
    double c = storage_cost(cfg, i, x.row(i));
    for (std::size_t s = 0; s < cfg.num_services(); ++s)
        if (x.placed(i, s)) c += y(i, s) * e.compute_price;
    return c;
}

// =======================================================================
// Constraint checking
// =======================================================================

struct ConstraintStatus
{
    bool ok = true;
    double violation = 0.0;  // worst magnitude beyond the bound; 0 when ok

    void record(double v, double tol)
    {
        if (v > tol) {
            ok = false;
            violation = std::max(violation, v);
        }
    }
};

struct ConstraintReport
{
    // C1..C8 at index 0..7.
    std::array<ConstraintStatus, 8> c{};
    // y and z are zero wherever x is zero.
    ConstraintStatus support{};

    bool all_ok() const
    {
        for (const auto& s : c) if (!s.ok) return false;
        return support.ok;
    }

    const ConstraintStatus& operator[](int k) const { return c[static_cast<std::size_t>(k - 1)]; }

    static std::string fmt(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", v);
        return buf;
    }

    std::string summary() const
    {
        std::string out;
        for (std::size_t k = 0; k < c.size(); ++k) {
            if (!c[k].ok) out += "C" + std::to_string(k + 1) + "=" + fmt(c[k].violation) + " ";
        }
        if (!support.ok) out += "support=" + fmt(support.violation);
        return out.empty() ? "ok" : out;
    }
};

inline constexpr double kSumTolerance = 1e-9;

/*
 * Evaluates C1..C8. C5 applies to loaded queues (z n_s > 0) and is strict
 * with margin 1e-9 y F dt; an idle (i, s) pair has no queue to stabilise.
 */
inline ConstraintReport check_constraints(const SystemConfig& cfg, const Placement& x, const Allocation& y,
                                          const Schedule& z, const WorkloadSnapshot& w)
{
    detail::require_dims(cfg, x);
    detail::require_dims(cfg, y);
    detail::require_dims(cfg, z, w);
    const auto L = cfg.num_servers();
    const auto S = cfg.num_services();
    ConstraintReport r;
    const auto totals = w.totals();

    for (std::size_t i = 0; i < L; ++i) {
        const auto& e = cfg.servers[i];
        r.c[0].record(storage_used(cfg, x.row(i)) - e.storage_capacity, kSumTolerance * e.storage_capacity);

        double ysum = 0.0;
        for (std::size_t s = 0; s < S; ++s) ysum += y(i, s);
        r.c[1].record(ysum - 1.0, kSumTolerance);

        r.c[3].record(server_cost(cfg, i, x, y) - e.budget, kSumTolerance * std::max(1.0, e.budget));

        for (std::size_t s = 0; s < S; ++s) {
            const double work = z(i, s) * totals[s] * cfg.services[s].compute_req;
            if (work > 0) {
                const double cap = y(i, s) * e.compute_capacity * w.interval_length;
                const double shortfall = detail::stability_floor(cap) - (cap - work);
                if (shortfall >= 0) r.c[4].record(std::max(shortfall, std::numeric_limits<double>::min()), 0.0);
            }
            const auto xv = x(i, s);
            r.c[5].record(xv == 0 || xv == 1 ? 0.0 : 1.0, 0.0);
            r.c[6].record(std::max(-y(i, s), y(i, s) - 1.0), 0.0);
            if (!x.placed(i, s)) r.support.record(std::max(std::abs(y(i, s)), std::abs(z(i, s))), 0.0);
        }
    }
    for (std::size_t s = 0; s < S; ++s) {
        double zsum = 0.0;
        for (std::size_t i = 0; i <= L; ++i) {
            zsum += z(i, s);
            r.c[7].record(std::max(-z(i, s), z(i, s) - 1.0), 0.0);
        }
        r.c[2].record(std::abs(zsum - 1.0), kSumTolerance);
    }
    return r;
}

} // namespace rmws
