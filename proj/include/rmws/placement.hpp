#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <mutex>
#include <numeric>
#include <optional>
#include <random>
#include <vector>

#include <rmws/domain.hpp>
#include <rmws/inner_solver.hpp>
#include <rmws/provisioning.hpp>

namespace rmws {

struct GibbsConfig
{
    double omega = 0.001;          // smoothing temperature
    std::size_t max_iters = 500;
    std::size_t patience = 100;    // iterations without a new best before stopping
    std::uint64_t seed = 1;
    // Plain Markov chain: no patience stop (used to sample the stationary law).
    bool pure_chain = false;

    void validate() const
    {
        if (!(omega > 0)) throw ConfigError("gibbs: omega must be > 0");
        if (max_iters < 1) throw ConfigError("gibbs: max_iters must be >= 1");
    }
};

// =======================================================================
// Feasibility and proposals
// =======================================================================

/*
 * A row is admissible on server k when it fits in storage and its storage
 * spend is strictly below the budget (so some compute can still be bought).
 */
inline bool is_feasible_placement(const SystemConfig& cfg, std::span<const std::uint8_t> row, std::size_t k)
{
    const auto& e = cfg.servers.at(k);
    if (row.size() != cfg.num_services()) throw ConfigError("placement row has wrong length");
    if (storage_used(cfg, row) > e.storage_capacity * (1.0 + 1e-12)) return false;
    return storage_cost(cfg, k, row) < e.budget;
}

inline bool is_feasible_placement(const SystemConfig& cfg, const Placement& x)
{
    for (std::size_t i = 0; i < cfg.num_servers(); ++i)
        if (!is_feasible_placement(cfg, x.row(i), i)) return false;
    return true;
}

struct Proposal
{
    std::size_t server = 0;
    std::vector<std::uint8_t> row;
    bool noop = false;  // no distinct storage-feasible row was found
};

/*
 * Picks a server uniformly and a new row for it uniformly from the
 * storage-feasible rows other than the current one (rejection sampling over
 * {0,1}^S, 64 tries), falling back to a random single-bit flip.
 */
inline Proposal propose(const SystemConfig& cfg, const Placement& x, std::mt19937_64& rng)
{
    const auto S = cfg.num_services();
    std::uniform_int_distribution<std::size_t> pick_server(0, cfg.num_servers() - 1);
    Proposal p;
    p.server = pick_server(rng);
    const auto current = x.row(p.server);
    const double capacity = cfg.servers[p.server].storage_capacity * (1.0 + 1e-12);
    p.row.assign(S, 0);

    constexpr int kTries = 64;
    for (int t = 0; t < kTries; ++t) {
        for (std::size_t s = 0; s < S; ++s) p.row[s] = static_cast<std::uint8_t>(rng() & 1u);
        if (storage_used(cfg, p.row) <= capacity && !std::equal(p.row.begin(), p.row.end(), current.begin())) {
            return p;
        }
    }

    std::vector<std::size_t> flips;
    const double used = storage_used(cfg, current);
    for (std::size_t s = 0; s < S; ++s) {
        if (current[s] || used + cfg.services[s].storage_req <= capacity) flips.push_back(s);
    }
    p.row.assign(current.begin(), current.end());
    if (flips.empty()) {
        p.noop = true;
        return p;
    }
    std::uniform_int_distribution<std::size_t> pick_bit(0, flips.size() - 1);
    const auto s = flips[pick_bit(rng)];
    p.row[s] = p.row[s] ? 0 : 1;
    return p;
}

// rho = 1 / (1 + exp((theta_new - theta_old) / omega)), evaluated without overflow.
inline double acceptance_probability(double theta_new, double theta_old, double omega)
{
    if (!(omega > 0)) throw ConfigError("acceptance_probability: omega must be > 0");
    const double t = (theta_new - theta_old) / omega;
    if (t >= 0) {
        const double e = std::exp(-t);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(t));
}

// Services in decreasing order of total demand (ties by index).
inline std::vector<std::size_t> popularity_order(const WorkloadSnapshot& w)
{
    const auto totals = w.totals();
    std::vector<std::size_t> order(totals.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return totals[a] > totals[b]; });
    return order;
}

/*
 * Each server, independently, takes services in decreasing popularity while
 * the row stays feasible.
 */
inline Placement greedy_popularity_placement(const SystemConfig& cfg, std::span<const std::size_t> order)
{
    Placement x(cfg);
    for (std::size_t i = 0; i < cfg.num_servers(); ++i) {
        for (const auto s : order) {
            x(i, s) = 1;
            if (!is_feasible_placement(cfg, x.row(i), i)) x(i, s) = 0;
        }
    }
    return x;
}

// =======================================================================
// Gibbs sampling over placements
// =======================================================================

struct GibbsStep
{
    std::size_t server = 0;
    bool noop = false;
    bool feasible = false;
    bool accepted = false;
    double theta_before = 0.0;
    double theta_candidate = std::numeric_limits<double>::quiet_NaN();
    double theta_after = 0.0;
    std::size_t state = 0;  // index into GibbsTrace::states after the step
};

struct GibbsTrace
{
    std::vector<GibbsStep> steps;
    std::vector<Placement> states;  // distinct states visited, in order of first visit
    std::vector<double> state_theta;
    Placement x_best;
    InnerSolution best;
    double theta_best = 0.0;
    std::size_t iterations = 0;
};

// Memoised inner solves keyed by placement; safe for concurrent use.
class ScoreCache
{
public:
    ScoreCache(const SystemConfig& cfg, const WorkloadSnapshot& w, const SolverConfig& solver,
               ScheduleScope scope = ScheduleScope::Full)
        : cfg_(cfg), w_(w), solver_(solver), scope_(scope)
    {}

    const InnerSolution& score(const Placement& x)
    {
        {
            std::lock_guard lock(mutex_);
            if (auto it = cache_.find(x.data()); it != cache_.end()) return it->second;
        }
        auto sol = solve_inner(cfg_, x, w_, solver_, scope_);
        std::lock_guard lock(mutex_);
        return cache_.emplace(x.data(), std::move(sol)).first->second;
    }

    std::size_t size() const
    {
        std::lock_guard lock(mutex_);
        return cache_.size();
    }

private:
    const SystemConfig& cfg_;
    const WorkloadSnapshot& w_;
    SolverConfig solver_;
    ScheduleScope scope_;
    mutable std::mutex mutex_;
    std::map<std::vector<std::uint8_t>, InnerSolution> cache_;
};

/*
 * Markov chain over placements: pick a server and a candidate row, score
 * the candidate with the inner solver and move with probability
 * 1 / (1 + exp((theta' - theta) / omega)). Returns the best state seen.
 * Starts from `initial` when given and feasible, else from the
 * popularity-greedy placement.
 */
inline GibbsTrace gibbs_optimize(const SystemConfig& cfg, const WorkloadSnapshot& w, const GibbsConfig& gibbs,
                                 const SolverConfig& solver, const Placement* initial = nullptr,
                                 ScoreCache* shared_cache = nullptr)
{
    gibbs.validate();
    solver.validate();
    std::optional<ScoreCache> own_cache;
    if (!shared_cache) own_cache.emplace(cfg, w, solver);
    ScoreCache& cache = shared_cache ? *shared_cache : *own_cache;

    Placement state = (initial && initial->same_shape(cfg.num_servers(), cfg.num_services()) &&
                       is_feasible_placement(cfg, *initial))
                          ? *initial
                          : greedy_popularity_placement(cfg, popularity_order(w));

    GibbsTrace trace;
    std::map<std::vector<std::uint8_t>, std::size_t> ids;
    auto state_id = [&](const Placement& x, double theta) {
        auto [it, inserted] = ids.emplace(x.data(), trace.states.size());
        if (inserted) {
            trace.states.push_back(x);
            trace.state_theta.push_back(theta);
        }
        return it->second;
    };

    double theta = cache.score(state).objective_theta;
    state_id(state, theta);
    trace.x_best = state;
    trace.theta_best = theta;

    std::mt19937_64 rng(gibbs.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t since_best = 0;
    std::size_t m = 0;
    while (m < gibbs.max_iters) {
        ++m;
        GibbsStep step;
        step.theta_before = theta;
        auto prop = propose(cfg, state, rng);
        step.server = prop.server;
        step.noop = prop.noop;
        if (!prop.noop) {
            step.feasible = is_feasible_placement(cfg, prop.row, prop.server);
            if (step.feasible) {
                Placement candidate = state;
                std::copy(prop.row.begin(), prop.row.end(), candidate.row(prop.server).begin());
                const double theta_new = cache.score(candidate).objective_theta;
                step.theta_candidate = theta_new;
                if (unit(rng) < acceptance_probability(theta_new, theta, gibbs.omega)) {
                    state = std::move(candidate);
                    theta = theta_new;
                    step.accepted = true;
                }
            }
        }
        step.theta_after = theta;
        step.state = state_id(state, theta);
        trace.steps.push_back(step);

        if (theta < trace.theta_best) {
            trace.theta_best = theta;
            trace.x_best = state;
            since_best = 0;
        } else {
            ++since_best;
        }
        if (!gibbs.pure_chain && since_best >= gibbs.patience) break;
    }
    trace.iterations = m;
    trace.best = cache.score(trace.x_best);
    return trace;
}

} // namespace rmws
