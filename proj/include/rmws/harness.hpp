#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <mutex>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include <rmws/baselines.hpp>
#include <rmws/domain.hpp>
#include <rmws/placement.hpp>
#include <rmws/scenario.hpp>
#include <rmws/scheduling.hpp>
#include <rmws/workload.hpp>

namespace rmws {

enum class Algorithm
{
    RMWS,
    CPO,
    FSP,
    NSP,
    PSP,
    EERA,
    ECEERA,
};

inline constexpr std::array<Algorithm, 7> kAllAlgorithms{Algorithm::RMWS, Algorithm::CPO,  Algorithm::FSP,
                                                         Algorithm::NSP,  Algorithm::PSP,  Algorithm::EERA,
                                                         Algorithm::ECEERA};

inline constexpr std::string_view to_string(Algorithm a)
{
    switch (a) {
        case Algorithm::RMWS: return "RMWS";
        case Algorithm::CPO: return "CPO";
        case Algorithm::FSP: return "FSP";
        case Algorithm::NSP: return "NSP";
        case Algorithm::PSP: return "PSP";
        case Algorithm::EERA: return "EERA";
        case Algorithm::ECEERA: return "ECEERA";
    }
    return "?";
}

inline Algorithm parse_algorithm(std::string_view name)
{
    for (auto a : kAllAlgorithms) {
        const auto s = to_string(a);
        if (s.size() == name.size() &&
            std::equal(s.begin(), s.end(), name.begin(), [](char p, char q) { return p == std::toupper(q); })) {
            return a;
        }
    }
    throw ConfigError("unknown algorithm '" + std::string(name) + "'");
}

// Comma-separated list; "all" selects every algorithm.
inline std::vector<Algorithm> parse_algorithms(const std::string& list)
{
    if (list.empty() || list == "all") return {kAllAlgorithms.begin(), kAllAlgorithms.end()};
    std::vector<Algorithm> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto a = parse_algorithm(item);
        if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
    }
    if (out.empty()) throw ConfigError("empty algorithm list");
    return out;
}

inline std::optional<BaselineKind> as_baseline(Algorithm a)
{
    switch (a) {
        case Algorithm::RMWS: return std::nullopt;
        case Algorithm::CPO: return BaselineKind::CPO;
        case Algorithm::FSP: return BaselineKind::FSP;
        case Algorithm::NSP: return BaselineKind::NSP;
        case Algorithm::PSP: return BaselineKind::PSP;
        case Algorithm::EERA: return BaselineKind::EERA;
        case Algorithm::ECEERA: return BaselineKind::ECEERA;
    }
    return std::nullopt;
}

// =======================================================================
// Reports
// =======================================================================

struct ReportRow
{
    std::size_t frame = 0;
    std::size_t slot = 0;
    std::string algorithm;
    double total_latency = 0.0;  // s; NaN when the decision is infeasible
    double edge_latency = 0.0;
    double cloud_latency = 0.0;
    double cost_total = 0.0;
    bool feasible = true;
    bool emitted = true;  // an (X, Y, Z) was produced for this row
    std::size_t iters_placement = 0;
    std::size_t iters_schedule = 0;
    std::vector<double> server_cost;
    std::string violations;  // "ok" or the failing constraints

    friend bool operator==(const ReportRow& a, const ReportRow& b)
    {
        auto same = [](double p, double q) { return p == q || (std::isnan(p) && std::isnan(q)); };
        if (a.server_cost.size() != b.server_cost.size()) return false;
        for (std::size_t k = 0; k < a.server_cost.size(); ++k)
            if (!same(a.server_cost[k], b.server_cost[k])) return false;
        return a.frame == b.frame && a.slot == b.slot && a.algorithm == b.algorithm &&
               same(a.total_latency, b.total_latency) && same(a.edge_latency, b.edge_latency) &&
               same(a.cloud_latency, b.cloud_latency) && same(a.cost_total, b.cost_total) &&
               a.feasible == b.feasible && a.emitted == b.emitted && a.iters_placement == b.iters_placement &&
               a.iters_schedule == b.iters_schedule && a.violations == b.violations;
    }
};

struct AlgorithmSummary
{
    std::string algorithm;
    std::size_t rows = 0;
    std::size_t infeasible_rows = 0;
    double mean_latency = std::numeric_limits<double>::quiet_NaN();  // over feasible rows
    double p95_latency = std::numeric_limits<double>::quiet_NaN();   // nearest rank
    double mean_cost = std::numeric_limits<double>::quiet_NaN();

    friend bool operator==(const AlgorithmSummary& a, const AlgorithmSummary& b)
    {
        auto same = [](double p, double q) { return p == q || (std::isnan(p) && std::isnan(q)); };
        return a.algorithm == b.algorithm && a.rows == b.rows && a.infeasible_rows == b.infeasible_rows &&
               same(a.mean_latency, b.mean_latency) && same(a.p95_latency, b.p95_latency) &&
               same(a.mean_cost, b.mean_cost);
    }
};

struct ExperimentReport
{
    std::vector<ReportRow> rows;
    std::vector<AlgorithmSummary> summary;

    const AlgorithmSummary& of(std::string_view algorithm) const
    {
        for (const auto& s : summary)
            if (s.algorithm == algorithm) return s;
        throw std::out_of_range("no summary for " + std::string(algorithm));
    }

    std::size_t infeasible_rows() const
    {
        return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const auto& r) { return !r.feasible; }));
    }

    friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

// Per-algorithm aggregates, in order of first appearance in the rows.
inline std::vector<AlgorithmSummary> summarize(const std::vector<ReportRow>& rows)
{
    std::vector<AlgorithmSummary> out;
    std::vector<std::vector<double>> latencies;
    std::vector<double> cost_sum;
    for (const auto& r : rows) {
        auto it = std::find_if(out.begin(), out.end(), [&](const auto& s) { return s.algorithm == r.algorithm; });
        if (it == out.end()) {
            out.push_back({r.algorithm});
            latencies.emplace_back();
            cost_sum.push_back(0.0);
            it = out.end() - 1;
        }
        const auto k = static_cast<std::size_t>(it - out.begin());
        ++it->rows;
        if (!r.feasible) {
            ++it->infeasible_rows;
            continue;
        }
        latencies[k].push_back(r.total_latency);
        cost_sum[k] += r.cost_total;
    }
    for (std::size_t k = 0; k < out.size(); ++k) {
        auto& v = latencies[k];
        if (v.empty()) continue;
        const double n = static_cast<double>(v.size());
        out[k].mean_latency = std::accumulate(v.begin(), v.end(), 0.0) / n;
        out[k].mean_cost = cost_sum[k] / n;
        std::sort(v.begin(), v.end());
        const auto rank = static_cast<std::size_t>(std::ceil(0.95 * n));
        out[k].p95_latency = v[std::max<std::size_t>(rank, 1) - 1];
    }
    return out;
}

// =======================================================================
// Two-timescale driver
// =======================================================================

namespace detail {

struct AlgorithmState
{
    Algorithm algorithm;
    std::optional<Placement> previous;  // RMWS chain start, FSP frozen placement
};

inline ReportRow infeasible_row(std::size_t f, std::size_t k, Algorithm a, const std::string& why)
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    ReportRow r;
    r.frame = f;
    r.slot = k;
    r.algorithm = std::string(to_string(a));
    r.total_latency = r.edge_latency = r.cloud_latency = r.cost_total = nan;
    r.feasible = false;
    r.emitted = false;
    r.violations = why;
    return r;
}

inline std::size_t fingerprint(const Placement& x, const Allocation& y)
{
    std::size_t h = 1469598103934665603ull;
    auto mix = [&](const void* p, std::size_t n) {
        const auto* b = static_cast<const unsigned char*>(p);
        for (std::size_t k = 0; k < n; ++k) h = (h ^ b[k]) * 1099511628211ull;
    };
    mix(x.data().data(), x.data().size());
    mix(y.data().data(), y.data().size() * sizeof(double));
    return h;
}

} // namespace detail

/*
 * Frame loop: forecast, then per algorithm a frame decision (X, Y) that is
 * held for the frame's slots; each slot routes the realised demand with
 * the schedule solver. Infeasible decisions become flagged rows.
 */
inline ExperimentReport run_experiment(const SystemConfig& cfg, std::span<const Algorithm> algorithms,
                                       const GibbsConfig& gibbs, const SolverConfig& solver,
                                       const WorkloadTrace* trace = nullptr)
{
    cfg.validate();
    gibbs.validate();
    solver.validate();
    if (algorithms.empty()) throw ConfigError("run_experiment: no algorithms selected");

    std::optional<WorkloadTrace> own_trace;
    if (!trace) own_trace.emplace(generate_trace(cfg));
    const WorkloadTrace& tr = trace ? *trace : *own_trace;
    if (tr.frames < cfg.frames || tr.slots_per_frame != cfg.slots_per_frame || tr.num_servers != cfg.num_servers() ||
        tr.num_services != cfg.num_services()) {
        throw ConfigError("run_experiment: trace does not match the configuration");
    }

    std::vector<detail::AlgorithmState> states;
    for (auto a : algorithms) states.push_back({a, std::nullopt});

    ExperimentReport report;
    std::vector<std::vector<ReportRow>> frame_rows(states.size());
    for (std::size_t f = 0; f < cfg.frames; ++f) {
        const auto forecast = frame_forecast(cfg, f, cfg.forecast, &tr);
        for (std::size_t a = 0; a < states.size(); ++a) {
            auto& st = states[a];
            auto& rows = frame_rows[a];
            rows.clear();
            const auto baseline = as_baseline(st.algorithm);

            std::optional<FrameDecision> decision;
            std::string why;
            try {
                if (!baseline) {
                    GibbsConfig g = gibbs;
                    g.seed = derive_seed(gibbs.seed ^ cfg.seed, 3, f);
                    const Placement* start = st.previous ? &*st.previous : nullptr;
                    auto chain = gibbs_optimize(cfg, forecast, g, solver, start);
                    decision = FrameDecision{chain.x_best, chain.best.y, chain.iterations};
                    st.previous = chain.x_best;
                } else {
                    const Placement* frozen = st.previous ? &*st.previous : nullptr;
                    decision = baseline_frame_decision(*baseline, cfg, forecast, solver, frozen);
                    if (*baseline == BaselineKind::FSP && !st.previous) st.previous = decision->x;
                }
            } catch (const InfeasibleDemand& e) {
                why = e.what();
            } catch (const NegativeGamma& e) {
                why = e.what();
            }

            if (!decision) {
                for (std::size_t k = 0; k < cfg.slots_per_frame; ++k)
                    rows.push_back(detail::infeasible_row(f, k, st.algorithm, why));
                continue;
            }

            const FrameDecision& d = *decision;
            const auto before = detail::fingerprint(d.x, d.y);
            for (std::size_t k = 0; k < cfg.slots_per_frame; ++k) {
                const auto w = tr.snapshot(f, k);
                ScheduleResult sched;
                try {
                    sched = baseline ? baseline_slot_schedule(*baseline, cfg, d.x, d.y, w, solver)
                                     : solve_schedule(cfg, d.x, d.y, w, solver);
                } catch (const InfeasibleDemand& e) {
                    rows.push_back(detail::infeasible_row(f, k, st.algorithm, e.what()));
                    continue;
                }
                ReportRow r;
                r.frame = f;
                r.slot = k;
                r.algorithm = std::string(to_string(st.algorithm));
                r.iters_placement = d.iterations;
                r.iters_schedule = sched.iterations;
                const auto check = check_constraints(cfg, d.x, d.y, sched.z, w);
                r.violations = check.summary();
                r.feasible = check.all_ok();
                try {
                    const auto lat = latency_breakdown(cfg, d.x, d.y, sched.z, w);
                    r.edge_latency = lat.edge;
                    r.cloud_latency = lat.cloud;
                    r.total_latency = lat.total;
                } catch (const QueueUnstable& e) {
                    r.feasible = false;
                    r.violations = e.what();
                    r.total_latency = r.edge_latency = r.cloud_latency = std::numeric_limits<double>::quiet_NaN();
                }
                r.cost_total = 0.0;
                for (std::size_t i = 0; i < cfg.num_servers(); ++i) {
                    r.server_cost.push_back(server_cost(cfg, i, d.x, d.y));
                    r.cost_total += r.server_cost.back();
                }
                rows.push_back(std::move(r));
            }
            if (detail::fingerprint(d.x, d.y) != before) {
                throw std::logic_error("run_experiment: frame decision changed within a frame");
            }
        }
        for (std::size_t k = 0; k < cfg.slots_per_frame; ++k)
            for (auto& rows : frame_rows) report.rows.push_back(rows[k]);
    }
    report.summary = summarize(report.rows);
    return report;
}

// =======================================================================
// Report output
// =======================================================================

enum class ReportFormat
{
    Csv,
    Json,
};

inline ReportFormat parse_format(std::string_view s)
{
    if (s == "csv") return ReportFormat::Csv;
    if (s == "json") return ReportFormat::Json;
    throw ConfigError("unknown format '" + std::string(s) + "' (csv or json)");
}

// Nine significant digits, trailing zeros kept: 20 -> 20.0000000.
inline std::string format_float(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%#.9g", v);
    return buf;
}

inline constexpr const char* kReportHeader =
    "frame,slot,algorithm,total_latency_s,edge_latency_s,cloud_latency_s,cost_total,feasible,iters_placement,"
    "iters_schedule";

inline void write_report_csv(const ExperimentReport& report, std::ostream& os)
{
    os << kReportHeader << '\n';
    for (const auto& r : report.rows) {
        os << r.frame << ',' << r.slot << ',' << r.algorithm << ',' << format_float(r.total_latency) << ','
           << format_float(r.edge_latency) << ',' << format_float(r.cloud_latency) << ','
           << format_float(r.cost_total) << ',' << (r.feasible ? 1 : 0) << ',' << r.iters_placement << ','
           << r.iters_schedule << '\n';
    }
}

namespace detail {

inline nlohmann::json number(double v)
{
    return std::isnan(v) ? nlohmann::json() : nlohmann::json(v);
}

inline double number(const nlohmann::json& j)
{
    return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

} // namespace detail

inline nlohmann::json report_to_json(const ExperimentReport& report)
{
    using detail::number;
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : report.rows) {
        nlohmann::json costs = nlohmann::json::array();
        for (double c : r.server_cost) costs.push_back(number(c));
        rows.push_back({{"frame", r.frame},
                        {"slot", r.slot},
                        {"algorithm", r.algorithm},
                        {"total_latency_s", number(r.total_latency)},
                        {"edge_latency_s", number(r.edge_latency)},
                        {"cloud_latency_s", number(r.cloud_latency)},
                        {"cost_total", number(r.cost_total)},
                        {"server_cost", costs},
                        {"feasible", r.feasible},
                        {"emitted", r.emitted},
                        {"violations", r.violations},
                        {"iters_placement", r.iters_placement},
                        {"iters_schedule", r.iters_schedule}});
    }
    nlohmann::json summary = nlohmann::json::array();
    for (const auto& s : report.summary) {
        summary.push_back({{"algorithm", s.algorithm},
                           {"rows", s.rows},
                           {"infeasible_rows", s.infeasible_rows},
                           {"mean_latency_s", number(s.mean_latency)},
                           {"p95_latency_s", number(s.p95_latency)},
                           {"mean_cost", number(s.mean_cost)}});
    }
    return {{"rows", rows}, {"summary", summary}};
}

inline ExperimentReport report_from_json(const nlohmann::json& j)
{
    using detail::number;
    ExperimentReport report;
    try {
        for (const auto& e : j.at("rows")) {
            ReportRow r;
            r.frame = e.at("frame").get<std::size_t>();
            r.slot = e.at("slot").get<std::size_t>();
            r.algorithm = e.at("algorithm").get<std::string>();
            r.total_latency = number(e.at("total_latency_s"));
            r.edge_latency = number(e.at("edge_latency_s"));
            r.cloud_latency = number(e.at("cloud_latency_s"));
            r.cost_total = number(e.at("cost_total"));
            for (const auto& c : e.at("server_cost")) r.server_cost.push_back(number(c));
            r.feasible = e.at("feasible").get<bool>();
            r.emitted = e.at("emitted").get<bool>();
            r.violations = e.at("violations").get<std::string>();
            r.iters_placement = e.at("iters_placement").get<std::size_t>();
            r.iters_schedule = e.at("iters_schedule").get<std::size_t>();
            report.rows.push_back(std::move(r));
        }
        for (const auto& e : j.at("summary")) {
            AlgorithmSummary s;
            s.algorithm = e.at("algorithm").get<std::string>();
            s.rows = e.at("rows").get<std::size_t>();
            s.infeasible_rows = e.at("infeasible_rows").get<std::size_t>();
            s.mean_latency = number(e.at("mean_latency_s"));
            s.p95_latency = number(e.at("p95_latency_s"));
            s.mean_cost = number(e.at("mean_cost"));
            report.summary.push_back(std::move(s));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("report json: ") + e.what());
    }
    return report;
}

inline void write_report_json(const ExperimentReport& report, std::ostream& os)
{
    os << report_to_json(report).dump(1) << '\n';
}

inline void emit_report(const ExperimentReport& report, const std::string& path, ReportFormat format)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    if (format == ReportFormat::Csv) write_report_csv(report, os);
    else write_report_json(report, os);
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + path);
}

inline ExperimentReport read_report_json(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return report_from_json(j);
}

// =======================================================================
// Sweeps
// =======================================================================

inline constexpr std::array<std::string_view, 9> kSweepParameters{
    "budget_coefficient",     // mu
    "num_services",           // S
    "storage_capacity_scale", // M_i multiplier
    "compute_capacity_scale", // F_i multiplier
    "edge_capacity_scale",    // M_i and F_i together
    "service_storage_scale",  // m_s multiplier
    "service_compute_scale",  // c_s multiplier
    "zipf_exponent",          // e
    "arrival_mean",           // tasks per slot per server
};

inline void apply_sweep_value(Scenario& sc, std::string_view parameter, double v)
{
    if (parameter == "budget_coefficient") sc.budget_coefficient = v;
    else if (parameter == "num_services") {
        if (v < 1 || v != std::floor(v)) throw ConfigError("num_services sweep needs positive integers");
        sc.num_services = static_cast<std::size_t>(v);
    } else if (parameter == "storage_capacity_scale") sc.storage_capacity_scale = v;
    else if (parameter == "compute_capacity_scale") sc.compute_capacity_scale = v;
    else if (parameter == "edge_capacity_scale") sc.storage_capacity_scale = sc.compute_capacity_scale = v;
    else if (parameter == "service_storage_scale") sc.service_storage_scale = v;
    else if (parameter == "service_compute_scale") sc.service_compute_scale = v;
    else if (parameter == "zipf_exponent") sc.zipf_exponent = v;
    else if (parameter == "arrival_mean") sc.arrival_mean = v;
    else throw ConfigError("unknown sweep parameter '" + std::string(parameter) + "'");
}

struct SweepSpec
{
    std::string parameter;
    std::vector<double> values;
    Scenario base;
    std::vector<Algorithm> algorithms{kAllAlgorithms.begin(), kAllAlgorithms.end()};
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::size_t threads = 0;  // 0: hardware concurrency

    void validate() const
    {
        if (values.empty()) throw ConfigError("sweep: value list is empty");
        if (seeds.empty()) throw ConfigError("sweep: no seeds");
        if (algorithms.empty()) throw ConfigError("sweep: no algorithms");
        if (std::find(kSweepParameters.begin(), kSweepParameters.end(), parameter) == kSweepParameters.end()) {
            throw ConfigError("unknown sweep parameter '" + parameter + "'");
        }
    }
};

struct SweepRun
{
    double value = 0.0;
    std::uint64_t seed = 0;
    ExperimentReport report;
};

struct SweepSummaryRow
{
    double value = 0.0;
    std::string algorithm;
    std::size_t runs = 0;
    std::size_t infeasible_rows = 0;
    std::size_t scored_runs = 0;  // runs with at least one feasible row
    double mean_latency = std::numeric_limits<double>::quiet_NaN();  // mean of the scored runs' means
};

struct SweepResult
{
    std::string parameter;
    std::vector<SweepRun> runs;  // value-major, then seed
    std::vector<SweepSummaryRow> summary;

    double mean_latency(double value, std::string_view algorithm) const
    {
        for (const auto& s : summary)
            if (s.value == value && s.algorithm == algorithm) return s.mean_latency;
        throw std::out_of_range("no sweep summary entry");
    }
};

inline std::vector<SweepSummaryRow> summarize_sweep(const std::vector<double>& values,
                                                    const std::vector<SweepRun>& runs)
{
    std::vector<SweepSummaryRow> out;
    for (double v : values) {
        std::vector<SweepSummaryRow> block;
        for (const auto& run : runs) {
            if (run.value != v) continue;
            for (const auto& s : run.report.summary) {
                auto it = std::find_if(block.begin(), block.end(), [&](const auto& b) { return b.algorithm == s.algorithm; });
                if (it == block.end()) {
                    block.push_back({v, s.algorithm, 0, 0, 0, 0.0});
                    it = block.end() - 1;
                }
                ++it->runs;
                it->infeasible_rows += s.infeasible_rows;
                if (std::isnan(s.mean_latency)) continue;
                ++it->scored_runs;
                it->mean_latency += s.mean_latency;
            }
        }
        for (auto& b : block) {
            b.mean_latency = b.scored_runs ? b.mean_latency / static_cast<double>(b.scored_runs)
                                           : std::numeric_limits<double>::quiet_NaN();
        }
        out.insert(out.end(), block.begin(), block.end());
    }
    return out;
}

/*
 * One experiment per (value, seed). Runs execute on a worker pool; each
 * run is self-contained and results are stored by index, so the output
 * does not depend on scheduling.
 */
inline SweepResult run_sweep(const SweepSpec& spec, std::function<void(const SweepRun&)> on_done = {})
{
    spec.validate();
    SweepResult result;
    result.parameter = spec.parameter;
    for (double v : spec.values)
        for (auto seed : spec.seeds) result.runs.push_back({v, seed, {}});

    std::atomic<std::size_t> next{0};
    std::mutex done_mutex;
    std::exception_ptr failure;
    auto worker = [&] {
        for (std::size_t k = next++; k < result.runs.size(); k = next++) {
            auto& run = result.runs[k];
            try {
                Scenario sc = spec.base;
                sc.seed = run.seed;
                apply_sweep_value(sc, spec.parameter, run.value);
                const auto cfg = build_config(sc);
                GibbsConfig g = sc.gibbs;
                run.report = run_experiment(cfg, spec.algorithms, g, sc.solver);
                if (on_done) {
                    std::lock_guard lock(done_mutex);
                    on_done(run);
                }
            } catch (...) {
                std::lock_guard lock(done_mutex);
                if (!failure) failure = std::current_exception();
                next = result.runs.size();
            }
        }
    };
    std::size_t n = spec.threads ? spec.threads : std::max(1u, std::thread::hardware_concurrency());
    n = std::min(n, result.runs.size());
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    result.summary = summarize_sweep(spec.values, result.runs);
    return result;
}

inline void write_sweep_summary_csv(const SweepResult& r, std::ostream& os)
{
    os << "parameter,value,algorithm,runs,scored_runs,infeasible_rows,mean_latency_s\n";
    for (const auto& s : r.summary) {
        os << r.parameter << ',' << format_float(s.value) << ',' << s.algorithm << ',' << s.runs << ','
           << s.scored_runs << ',' << s.infeasible_rows << ',' << format_float(s.mean_latency) << '\n';
    }
}

} // namespace rmws
