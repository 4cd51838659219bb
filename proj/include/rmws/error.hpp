#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rmws {

// Bad dimensions, invalid parameter values, malformed config documents.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// M/M/1 stability violated: service rate does not exceed arrival rate.
class QueueUnstable : public std::runtime_error
{
public:
    QueueUnstable(std::size_t server, std::size_t service, double margin)
        : std::runtime_error("queue unstable at server " + std::to_string(server) +
                             ", service " + std::to_string(service) +
                             " (margin " + std::to_string(margin) + ")"),
          server_(server), service_(service), margin_(margin)
    {}

    std::size_t server() const noexcept { return server_; }
    std::size_t service() const noexcept { return service_; }
    // y F dt - z n c; <= 0 when thrown.
    double margin() const noexcept { return margin_; }

private:
    std::size_t server_;
    std::size_t service_;
    double margin_;
};

// Routed work cannot be served within the available capacity.
class InfeasibleDemand : public std::runtime_error
{
public:
    InfeasibleDemand(std::size_t server, const std::string& what)
        : std::runtime_error(what), server_(server)
    {}

    std::size_t server() const noexcept { return server_; }

private:
    std::size_t server_;
};

// Storage spend alone meets or exceeds the server budget.
class NegativeGamma : public std::runtime_error
{
public:
    NegativeGamma(std::size_t server, double gamma)
        : std::runtime_error("non-positive compute headroom on server " + std::to_string(server) +
                             " (gamma " + std::to_string(gamma) + ")"),
          server_(server), gamma_(gamma)
    {}

    std::size_t server() const noexcept { return server_; }
    double gamma() const noexcept { return gamma_; }

private:
    std::size_t server_;
    double gamma_;
};

class TooLarge : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class NonConvergence : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

class DegenerateInstance : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace rmws
