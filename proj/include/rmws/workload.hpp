#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <rmws/domain.hpp>

namespace rmws {

// p_s = 1 / (s^e H), H = sum_k 1 / k^e, ranks 1..S.
inline std::vector<double> zipf_popularity(std::size_t num_services, double exponent)
{
    if (num_services < 1) throw ConfigError("zipf_popularity: at least one service required");
    if (!(exponent >= 0)) throw ConfigError("zipf_popularity: exponent must be >= 0");
    std::vector<double> p(num_services);
    double h = 0.0;
    for (std::size_t k = 0; k < num_services; ++k) {
        p[k] = 1.0 / std::pow(static_cast<double>(k + 1), exponent);
        h += p[k];
    }
    for (auto& v : p) v /= h;
    return p;
}

// Popularity of each service index in frame f, honouring per-frame
// exponent and ranking overrides. ranking[k] is the service at rank k+1.
inline std::vector<double> frame_popularity(const SystemConfig& cfg, std::size_t frame)
{
    const auto S = cfg.num_services();
    const double e = cfg.frame_zipf_exponents.empty()
                         ? cfg.zipf_exponent
                         : cfg.frame_zipf_exponents[frame % cfg.frame_zipf_exponents.size()];
    const auto by_rank = zipf_popularity(S, e);
    if (cfg.frame_rankings.empty()) return by_rank;
    const auto& ranking = cfg.frame_rankings[frame % cfg.frame_rankings.size()];
    std::vector<double> p(S);
    for (std::size_t k = 0; k < S; ++k) p[ranking[k]] = by_rank[k];
    return p;
}

// Per-slot request counts for every (frame, slot, server, service).
struct WorkloadTrace
{
    std::size_t frames = 0;
    std::size_t slots_per_frame = 0;
    std::size_t num_servers = 0;
    std::size_t num_services = 0;
    double slot_length = 60.0;
    std::uint64_t seed = 0;
    std::vector<Matrix<std::int64_t>> counts;  // frame-major

    const Matrix<std::int64_t>& at(std::size_t frame, std::size_t slot) const
    {
        return counts.at(frame * slots_per_frame + slot);
    }

    Matrix<std::int64_t>& at(std::size_t frame, std::size_t slot)
    {
        return counts.at(frame * slots_per_frame + slot);
    }

    WorkloadSnapshot snapshot(std::size_t frame, std::size_t slot) const
    {
        const auto& c = at(frame, slot);
        WorkloadSnapshot w(num_servers, num_services, slot_length);
        for (std::size_t i = 0; i < num_servers; ++i)
            for (std::size_t s = 0; s < num_services; ++s) w.n(i, s) = static_cast<double>(c(i, s));
        return w;
    }

    Matrix<std::int64_t> frame_totals(std::size_t frame) const
    {
        Matrix<std::int64_t> t(num_servers, num_services, 0);
        for (std::size_t k = 0; k < slots_per_frame; ++k) {
            const auto& c = at(frame, k);
            for (std::size_t i = 0; i < num_servers; ++i)
                for (std::size_t s = 0; s < num_services; ++s) t(i, s) += c(i, s);
        }
        return t;
    }

    friend bool operator==(const WorkloadTrace&, const WorkloadTrace&) = default;
};

/*
 * Per slot and server: total ~ round(max(0, Normal(mean, spread))), split
 * over services multinomially with the frame's popularity vector.
 */
inline WorkloadTrace generate_trace(const SystemConfig& cfg, std::mt19937_64& rng)
{
    const auto L = cfg.num_servers();
    const auto S = cfg.num_services();
    WorkloadTrace t;
    t.frames = cfg.frames;
    t.slots_per_frame = cfg.slots_per_frame;
    t.num_servers = L;
    t.num_services = S;
    t.slot_length = cfg.slot_length;
    t.seed = cfg.seed;
    t.counts.assign(cfg.frames * cfg.slots_per_frame, Matrix<std::int64_t>(L, S, 0));

    // per-server totals and the split across services use separate streams,
    // so the totals do not depend on the number of services
    std::mt19937_64 split_rng(rng());
    std::normal_distribution<double> arrivals(cfg.arrival_mean, cfg.arrival_spread);
    for (std::size_t f = 0; f < cfg.frames; ++f) {
        const auto p = frame_popularity(cfg, f);
        for (std::size_t k = 0; k < cfg.slots_per_frame; ++k) {
            auto& c = t.at(f, k);
            for (std::size_t i = 0; i < L; ++i) {
                const double draw = cfg.arrival_spread > 0 ? arrivals(rng) : cfg.arrival_mean;
                auto remaining = static_cast<std::int64_t>(std::llround(std::max(0.0, draw)));
                double mass = 1.0;
                for (std::size_t s = 0; s < S && remaining > 0; ++s) {
                    if (s + 1 == S || mass <= 0) {
                        c(i, s) = remaining;
                        remaining = 0;
                        break;
                    }
                    const double q = std::clamp(p[s] / mass, 0.0, 1.0);
                    std::binomial_distribution<std::int64_t> split(remaining, q);
                    c(i, s) = split(split_rng);
                    remaining -= c(i, s);
                    mass -= p[s];
                }
            }
        }
    }
    return t;
}

inline WorkloadTrace generate_trace(const SystemConfig& cfg)
{
    std::mt19937_64 rng(cfg.seed);
    return generate_trace(cfg, rng);
}

// Predicted frame totals n^f over the frame length.
struct FrameForecast : WorkloadSnapshot
{
    using WorkloadSnapshot::WorkloadSnapshot;
};

/*
 * Mean: slots_per_frame * arrival_mean * p_s for every server.
 * Oracle: the realised frame sums from the trace.
 */
inline FrameForecast frame_forecast(const SystemConfig& cfg, std::size_t frame, ForecastMode mode,
                                    const WorkloadTrace* trace = nullptr)
{
    const auto L = cfg.num_servers();
    const auto S = cfg.num_services();
    FrameForecast out(L, S, cfg.frame_length());
    if (mode == ForecastMode::Mean) {
        const auto p = frame_popularity(cfg, frame);
        const double per_server = static_cast<double>(cfg.slots_per_frame) * cfg.arrival_mean;
        for (std::size_t i = 0; i < L; ++i)
            for (std::size_t s = 0; s < S; ++s) out.n(i, s) = per_server * p[s];
        return out;
    }
    if (!trace) throw ConfigError("oracle forecast requires a trace");
    if (trace->num_servers != L || trace->num_services != S || frame >= trace->frames) {
        throw ConfigError("oracle forecast: trace does not match the configuration");
    }
    const auto totals = trace->frame_totals(frame);
    for (std::size_t i = 0; i < L; ++i)
        for (std::size_t s = 0; s < S; ++s) out.n(i, s) = static_cast<double>(totals(i, s));
    return out;
}

// =======================================================================
// CSV exchange: frame,slot,server,service,count
// =======================================================================

inline void write_trace_csv(const WorkloadTrace& t, std::ostream& os)
{
    os << "frame,slot,server,service,count\n";
    for (std::size_t f = 0; f < t.frames; ++f)
        for (std::size_t k = 0; k < t.slots_per_frame; ++k) {
            const auto& c = t.at(f, k);
            for (std::size_t i = 0; i < t.num_servers; ++i)
                for (std::size_t s = 0; s < t.num_services; ++s)
                    os << f << ',' << k << ',' << i << ',' << s << ',' << c(i, s) << '\n';
        }
}

inline void write_trace_csv(const WorkloadTrace& t, const std::string& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_trace_csv(t, os);
    if (!os) throw std::runtime_error("write failed: " + path);
}

/*
 * Reads a trace written by write_trace_csv. Dimensions are inferred from
 * the largest indices; every (frame, slot, server, service) cell must be
 * present exactly once.
 */
inline WorkloadTrace read_trace_csv(std::istream& is, double slot_length)
{
    std::string line;
    if (!std::getline(is, line)) throw ConfigError("trace csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "frame,slot,server,service,count") throw ConfigError("trace csv: unexpected header '" + line + "'");

    struct Row { std::size_t f, k, i, s; std::int64_t n; };
    std::vector<Row> rows;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        Row r{};
        char c1, c2, c3, c4;
        long long f, k, i, s, n;
        if (!(ls >> f >> c1 >> k >> c2 >> i >> c3 >> s >> c4 >> n) || c1 != ',' || c2 != ',' || c3 != ',' ||
            c4 != ',' || f < 0 || k < 0 || i < 0 || s < 0 || n < 0) {
            throw ConfigError("trace csv: malformed line " + std::to_string(line_no));
        }
        r = {static_cast<std::size_t>(f), static_cast<std::size_t>(k), static_cast<std::size_t>(i),
             static_cast<std::size_t>(s), n};
        rows.push_back(r);
    }
    WorkloadTrace t;
    t.slot_length = slot_length;
    for (const auto& r : rows) {
        t.frames = std::max(t.frames, r.f + 1);
        t.slots_per_frame = std::max(t.slots_per_frame, r.k + 1);
        t.num_servers = std::max(t.num_servers, r.i + 1);
        t.num_services = std::max(t.num_services, r.s + 1);
    }
    t.counts.assign(t.frames * t.slots_per_frame, Matrix<std::int64_t>(t.num_servers, t.num_services, -1));
    for (const auto& r : rows) {
        auto& cell = t.at(r.f, r.k)(r.i, r.s);
        if (cell != -1) throw ConfigError("trace csv: duplicate cell");
        cell = r.n;
    }
    for (const auto& m : t.counts)
        for (const auto v : m.data())
            if (v < 0) throw ConfigError("trace csv: missing cell");
    return t;
}

} // namespace rmws
