#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <rmws/domain.hpp>
#include <rmws/placement.hpp>
#include <rmws/scheduling.hpp>

namespace rmws {

struct Range
{
    double lo = 0.0;
    double hi = 0.0;
};

/*
 * Generative description of an experiment. Server and service parameters
 * are drawn uniformly from the ranges with the seed unless given
 * explicitly. Each server and each service has its own random stream, so
 * growing num_services keeps the first services unchanged.
 */
struct Scenario
{
    std::size_t num_servers = 4;
    std::size_t num_services = 10;
    Range storage_capacity{50, 200};    // GB
    Range compute_capacity{50, 150};    // GHz
    Range service_storage{10, 40};      // GB
    Range service_compute{0.1, 0.5};    // giga-cycles per task
    Range storage_price{10, 40};        // per hour
    Range compute_price{10, 50};        // per hour
    double storage_capacity_scale = 1.0;
    double compute_capacity_scale = 1.0;
    double service_storage_scale = 1.0;
    double service_compute_scale = 1.0;
    double edge_delay = 0.01;
    double cloud_delay = 0.1;

    double slot_length = 60.0;
    std::size_t slots_per_frame = 30;
    std::size_t frames = 10;
    double zipf_exponent = 0.6;
    double arrival_mean = 600.0;
    double arrival_spread = 20.0;
    double budget_coefficient = 0.7;
    std::uint64_t seed = 1;
    ForecastMode forecast = ForecastMode::Mean;
    std::vector<double> frame_zipf_exponents;
    std::vector<std::vector<std::size_t>> frame_rankings;

    // Explicit overrides; a server budget < 0 means mu (P^m + P^f).
    std::optional<std::vector<EdgeServer>> servers;
    std::optional<std::vector<Service>> services;

    GibbsConfig gibbs;
    SolverConfig solver;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

inline double draw(std::mt19937_64& rng, Range r)
{
    if (r.hi < r.lo) throw ConfigError("range upper bound below lower bound");
    return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

} // namespace detail

// Seed for stream `k` of kind `tag` derived from a base seed.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag, std::uint64_t k = 0) noexcept
{
    return detail::splitmix64(detail::splitmix64(base ^ (tag * 0xD1B54A32D192ED03ull)) + k);
}

inline SystemConfig build_config(const Scenario& sc)
{
    SystemConfig cfg;
    cfg.slot_length = sc.slot_length;
    cfg.slots_per_frame = sc.slots_per_frame;
    cfg.frames = sc.frames;
    cfg.zipf_exponent = sc.zipf_exponent;
    cfg.arrival_mean = sc.arrival_mean;
    cfg.arrival_spread = sc.arrival_spread;
    cfg.budget_coefficient = sc.budget_coefficient;
    cfg.seed = sc.seed;
    cfg.forecast = sc.forecast;
    cfg.frame_zipf_exponents = sc.frame_zipf_exponents;
    cfg.frame_rankings = sc.frame_rankings;

    if (sc.servers) {
        cfg.servers = *sc.servers;
    } else {
        for (std::size_t i = 0; i < sc.num_servers; ++i) {
            std::mt19937_64 rng(derive_seed(sc.seed, 1, i));
            EdgeServer e;
            e.storage_capacity = detail::draw(rng, sc.storage_capacity);
            e.compute_capacity = detail::draw(rng, sc.compute_capacity);
            e.storage_price = detail::draw(rng, sc.storage_price);
            e.compute_price = detail::draw(rng, sc.compute_price);
            e.budget = -1.0;
            cfg.servers.push_back(e);
        }
    }
    for (auto& e : cfg.servers) {
        e.storage_capacity *= sc.storage_capacity_scale;
        e.compute_capacity *= sc.compute_capacity_scale;
        if (e.budget < 0) e.budget = sc.budget_coefficient * (e.storage_price + e.compute_price);
    }

    if (sc.services) {
        cfg.services = *sc.services;
    } else {
        for (std::size_t s = 0; s < sc.num_services; ++s) {
            std::mt19937_64 rng(derive_seed(sc.seed, 2, s));
            Service v;
            v.storage_req = detail::draw(rng, sc.service_storage);
            v.compute_req = detail::draw(rng, sc.service_compute);
            v.edge_delay = sc.edge_delay;
            v.cloud_delay = sc.cloud_delay;
            cfg.services.push_back(v);
        }
    }
    for (auto& v : cfg.services) {
        v.storage_req *= sc.service_storage_scale;
        v.compute_req *= sc.service_compute_scale;
    }
    cfg.validate();
    return cfg;
}

// =======================================================================
// JSON configuration (schema 1)
// =======================================================================

namespace detail {

using nlohmann::json;

template <class T>
void read_opt(const json& j, const char* key, T& out)
{
    if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

inline void read_range(const json& j, const char* key, Range& r)
{
    auto it = j.find(key);
    if (it == j.end()) return;
    if (!it->is_array() || it->size() != 2) throw ConfigError(std::string("config: ") + key + " must be [lo, hi]");
    r = {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where)
{
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const auto* k : keys) known = known || it.key() == k;
        if (!known) throw ConfigError("config: unknown key '" + it.key() + "' in " + where);
    }
}

} // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& j)
{
    using detail::read_opt;
    try {
        if (!j.is_object()) throw ConfigError("config: document must be an object");
        if (!j.contains("schema") || j.at("schema").get<int>() != 1) throw ConfigError("config: \"schema\": 1 required");
        detail::reject_unknown(j,
                               {"schema", "seed", "num_servers", "num_services", "ranges", "scales", "edge_delay_s",
                                "cloud_delay_s", "slot_length_s", "slots_per_frame", "frames", "zipf_exponent",
                                "arrival_mean", "arrival_spread", "budget_coefficient", "forecast",
                                "frame_zipf_exponents", "frame_rankings", "servers", "services", "gibbs", "solver"},
                               "document");
        Scenario sc;
        read_opt(j, "seed", sc.seed);
        read_opt(j, "num_servers", sc.num_servers);
        read_opt(j, "num_services", sc.num_services);
        if (auto it = j.find("ranges"); it != j.end()) {
            detail::reject_unknown(*it, {"storage_capacity_gb", "compute_capacity_ghz", "service_storage_gb",
                                         "service_compute_gcycles", "storage_price", "compute_price"},
                                   "ranges");
            detail::read_range(*it, "storage_capacity_gb", sc.storage_capacity);
            detail::read_range(*it, "compute_capacity_ghz", sc.compute_capacity);
            detail::read_range(*it, "service_storage_gb", sc.service_storage);
            detail::read_range(*it, "service_compute_gcycles", sc.service_compute);
            detail::read_range(*it, "storage_price", sc.storage_price);
            detail::read_range(*it, "compute_price", sc.compute_price);
        }
        if (auto it = j.find("scales"); it != j.end()) {
            detail::reject_unknown(*it, {"storage_capacity", "compute_capacity", "service_storage", "service_compute"},
                                   "scales");
            read_opt(*it, "storage_capacity", sc.storage_capacity_scale);
            read_opt(*it, "compute_capacity", sc.compute_capacity_scale);
            read_opt(*it, "service_storage", sc.service_storage_scale);
            read_opt(*it, "service_compute", sc.service_compute_scale);
        }
        read_opt(j, "edge_delay_s", sc.edge_delay);
        read_opt(j, "cloud_delay_s", sc.cloud_delay);
        read_opt(j, "slot_length_s", sc.slot_length);
        read_opt(j, "slots_per_frame", sc.slots_per_frame);
        read_opt(j, "frames", sc.frames);
        read_opt(j, "zipf_exponent", sc.zipf_exponent);
        read_opt(j, "arrival_mean", sc.arrival_mean);
        read_opt(j, "arrival_spread", sc.arrival_spread);
        read_opt(j, "budget_coefficient", sc.budget_coefficient);
        if (auto it = j.find("forecast"); it != j.end()) {
            const auto f = it->get<std::string>();
            if (f == "mean") sc.forecast = ForecastMode::Mean;
            else if (f == "oracle") sc.forecast = ForecastMode::Oracle;
            else throw ConfigError("config: forecast must be \"mean\" or \"oracle\"");
        }
        read_opt(j, "frame_zipf_exponents", sc.frame_zipf_exponents);
        read_opt(j, "frame_rankings", sc.frame_rankings);
        if (auto it = j.find("servers"); it != j.end()) {
            std::vector<EdgeServer> servers;
            for (const auto& e : *it) {
                detail::reject_unknown(e, {"compute_capacity", "storage_capacity", "storage_price", "compute_price",
                                           "budget"},
                                       "servers[]");
                EdgeServer v;
                v.compute_capacity = e.at("compute_capacity").get<double>();
                v.storage_capacity = e.at("storage_capacity").get<double>();
                v.storage_price = e.at("storage_price").get<double>();
                v.compute_price = e.at("compute_price").get<double>();
                v.budget = -1.0;
                read_opt(e, "budget", v.budget);
                servers.push_back(v);
            }
            sc.servers = std::move(servers);
        }
        if (auto it = j.find("services"); it != j.end()) {
            std::vector<Service> services;
            for (const auto& e : *it) {
                detail::reject_unknown(e, {"storage_req", "compute_req", "edge_delay", "cloud_delay"}, "services[]");
                Service v;
                v.storage_req = e.at("storage_req").get<double>();
                v.compute_req = e.at("compute_req").get<double>();
                v.edge_delay = sc.edge_delay;
                v.cloud_delay = sc.cloud_delay;
                read_opt(e, "edge_delay", v.edge_delay);
                read_opt(e, "cloud_delay", v.cloud_delay);
                services.push_back(v);
            }
            sc.services = std::move(services);
        }
        if (auto it = j.find("gibbs"); it != j.end()) {
            detail::reject_unknown(*it, {"omega", "max_iters", "patience", "seed"}, "gibbs");
            read_opt(*it, "omega", sc.gibbs.omega);
            read_opt(*it, "max_iters", sc.gibbs.max_iters);
            read_opt(*it, "patience", sc.gibbs.patience);
            read_opt(*it, "seed", sc.gibbs.seed);
        }
        if (auto it = j.find("solver"); it != j.end()) {
            detail::reject_unknown(*it, {"step0_alpha", "step_exponent", "tolerance_eps", "max_iters", "max_rounds"},
                                   "solver");
            if (auto a = it->find("step0_alpha"); a != it->end() && !a->is_null()) sc.solver.step0_alpha = a->get<double>();
            read_opt(*it, "step_exponent", sc.solver.step_exponent);
            read_opt(*it, "tolerance_eps", sc.solver.tolerance_eps);
            read_opt(*it, "max_iters", sc.solver.max_iters);
            read_opt(*it, "max_rounds", sc.solver.max_rounds);
        }
        sc.gibbs.validate();
        sc.solver.validate();
        return sc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

inline nlohmann::json scenario_to_json(const Scenario& sc)
{
    nlohmann::json j;
    j["schema"] = 1;
    j["seed"] = sc.seed;
    j["num_servers"] = sc.num_servers;
    j["num_services"] = sc.num_services;
    j["ranges"] = {
        {"storage_capacity_gb", {sc.storage_capacity.lo, sc.storage_capacity.hi}},
        {"compute_capacity_ghz", {sc.compute_capacity.lo, sc.compute_capacity.hi}},
        {"service_storage_gb", {sc.service_storage.lo, sc.service_storage.hi}},
        {"service_compute_gcycles", {sc.service_compute.lo, sc.service_compute.hi}},
        {"storage_price", {sc.storage_price.lo, sc.storage_price.hi}},
        {"compute_price", {sc.compute_price.lo, sc.compute_price.hi}},
    };
    j["scales"] = {
        {"storage_capacity", sc.storage_capacity_scale},
        {"compute_capacity", sc.compute_capacity_scale},
        {"service_storage", sc.service_storage_scale},
        {"service_compute", sc.service_compute_scale},
    };
    j["edge_delay_s"] = sc.edge_delay;
    j["cloud_delay_s"] = sc.cloud_delay;
    j["slot_length_s"] = sc.slot_length;
    j["slots_per_frame"] = sc.slots_per_frame;
    j["frames"] = sc.frames;
    j["zipf_exponent"] = sc.zipf_exponent;
    j["arrival_mean"] = sc.arrival_mean;
    j["arrival_spread"] = sc.arrival_spread;
    j["budget_coefficient"] = sc.budget_coefficient;
    j["forecast"] = sc.forecast == ForecastMode::Mean ? "mean" : "oracle";
    j["frame_zipf_exponents"] = sc.frame_zipf_exponents;
    j["frame_rankings"] = sc.frame_rankings;
    if (sc.servers) {
        auto& arr = j["servers"] = nlohmann::json::array();
        for (const auto& e : *sc.servers) {
            arr.push_back({{"compute_capacity", e.compute_capacity},
                           {"storage_capacity", e.storage_capacity},
                           {"storage_price", e.storage_price},
                           {"compute_price", e.compute_price},
                           {"budget", e.budget}});
        }
    }
    if (sc.services) {
        auto& arr = j["services"] = nlohmann::json::array();
        for (const auto& v : *sc.services) {
            arr.push_back({{"storage_req", v.storage_req},
                           {"compute_req", v.compute_req},
                           {"edge_delay", v.edge_delay},
                           {"cloud_delay", v.cloud_delay}});
        }
    }
    j["gibbs"] = {{"omega", sc.gibbs.omega},
                  {"max_iters", sc.gibbs.max_iters},
                  {"patience", sc.gibbs.patience},
                  {"seed", sc.gibbs.seed}};
    j["solver"] = {{"step0_alpha", sc.solver.step0_alpha ? nlohmann::json(*sc.solver.step0_alpha) : nlohmann::json()},
                   {"step_exponent", sc.solver.step_exponent},
                   {"tolerance_eps", sc.solver.tolerance_eps},
                   {"max_iters", sc.solver.max_iters},
                   {"max_rounds", sc.solver.max_rounds}};
    return j;
}

inline Scenario load_scenario(const std::string& path)
{
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config: " + path + ": " + e.what());
    }
    return scenario_from_json(j);
}

} // namespace rmws
