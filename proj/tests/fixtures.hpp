#pragma once

#include <cstddef>

#include <rmws/rmws.hpp>

namespace rmws::testing {

inline SystemConfig make_config(std::size_t servers, std::size_t services)
{
    SystemConfig cfg;
    cfg.servers.assign(servers, EdgeServer{});
    cfg.services.assign(services, Service{});
    return cfg;
}

inline WorkloadSnapshot make_workload(const SystemConfig& cfg, double per_cell, double dt = 60.0)
{
    WorkloadSnapshot w(cfg.num_servers(), cfg.num_services(), dt);
    w.n.fill(per_cell);
    return w;
}

} // namespace rmws::testing
