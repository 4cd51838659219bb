#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <rmws/rmws.hpp>

namespace fs = std::filesystem;
using namespace rmws;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInfeasible = 1;
constexpr int kExitConfig = 2;
constexpr int kExitError = 3;

struct Common
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string algo = "all";
    std::string out = ".";
    std::string format = "csv";
    bool strict = false;
};

Scenario load(const Common& c)
{
    Scenario sc = c.config.empty() ? Scenario{} : load_scenario(c.config);
    if (c.seed) sc.seed = *c.seed;
    return sc;
}

fs::path out_dir(const Common& c)
{
    fs::path p(c.out);
    std::error_code ec;
    fs::create_directories(p, ec);
    if (ec) throw std::runtime_error("cannot create " + p.string() + ": " + ec.message());
    return p;
}

std::vector<double> parse_values(const std::string& list)
{
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("bad number '" + item + "'");
        }
    }
    return out;
}

std::string value_tag(double v)
{
    std::ostringstream os;
    os << v;
    return os.str();
}

int cmd_run(const Common& c)
{
    const auto sc = load(c);
    const auto cfg = build_config(sc);
    const auto algos = parse_algorithms(c.algo);
    const auto format = parse_format(c.format);
    const auto report = run_experiment(cfg, algos, sc.gibbs, sc.solver);
    const auto path = out_dir(c) / (format == ReportFormat::Csv ? "report.csv" : "report.json");
    emit_report(report, path.string(), format);
    for (const auto& s : report.summary) {
        std::cout << s.algorithm << " mean " << format_float(s.mean_latency) << " s, p95 "
                  << format_float(s.p95_latency) << " s, infeasible rows " << s.infeasible_rows << '\n';
    }
    std::cout << "wrote " << path.string() << '\n';
    return c.strict && report.infeasible_rows() > 0 ? kExitInfeasible : kExitOk;
}

int cmd_sweep(const Common& c, const std::string& param, const std::string& values, const std::string& seeds,
              std::size_t threads)
{
    SweepSpec spec;
    spec.base = load(c);
    spec.parameter = param;
    spec.values = parse_values(values);
    spec.algorithms = parse_algorithms(c.algo);
    spec.threads = threads;
    if (!seeds.empty()) {
        spec.seeds.clear();
        for (double v : parse_values(seeds)) spec.seeds.push_back(static_cast<std::uint64_t>(v));
    } else if (c.seed) {
        spec.seeds = {*c.seed};
    }
    const auto format = parse_format(c.format);
    const auto dir = out_dir(c);
    const auto result = run_sweep(spec);

    std::size_t infeasible = 0;
    for (const auto& run : result.runs) {
        const auto name = "sweep_" + param + "_" + value_tag(run.value) + "_seed" + std::to_string(run.seed) +
                          (format == ReportFormat::Csv ? ".csv" : ".json");
        emit_report(run.report, (dir / name).string(), format);
        infeasible += run.report.infeasible_rows();
    }
    const auto summary_path = dir / ("sweep_" + param + "_summary.csv");
    std::ofstream os(summary_path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + summary_path.string() + " for writing");
    write_sweep_summary_csv(result, os);
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + summary_path.string());
    std::cout << "wrote " << summary_path.string() << " and " << result.runs.size() << " reports\n";
    return c.strict && infeasible > 0 ? kExitInfeasible : kExitOk;
}

int cmd_verify(const Common& c)
{
    ConstraintTally tally;
    std::vector<ProbeReport> probes;
    probes.push_back(probe_placement_oracle(20, 19, 2, 3, 120.0, &tally));
    probes.push_back(probe_closed_form(50, &tally));
    probes.push_back(probe_schedule_grid(20, &tally));
    for (auto& r : probe_convexity()) probes.push_back(std::move(r));
    probes.push_back(probe_stationarity(100000, 10000, &tally).probe);

    nlohmann::json doc = nlohmann::json::array();
    bool all = true;
    for (const auto& p : probes) {
        std::cout << (p.pass ? "PASS " : "FAIL ") << p.name << ": " << p.detail << '\n';
        doc.push_back(to_json(p));
        all = all && p.pass;
    }
    std::cout << "constraint checks: " << tally.checked << ", failures: " << tally.failed << '\n';
    const auto path = out_dir(c) / "verify.json";
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << doc.dump(1) << '\n';
    return all && tally.failed == 0 ? kExitOk : kExitInfeasible;
}

int cmd_gen_trace(const Common& c)
{
    const auto cfg = build_config(load(c));
    const auto trace = generate_trace(cfg);
    const auto path = out_dir(c) / "trace.csv";
    write_trace_csv(trace, path.string());
    std::cout << "wrote " << path.string() << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Edge service placement, provisioning and scheduling experiments"};
    app.require_subcommand(1);
    Common c;

    auto add_common = [&](CLI::App* sub, bool with_algo) {
        sub->add_option("--config", c.config, "JSON configuration (schema 1)");
        sub->add_option("--seed", c.seed, "Instance and workload seed");
        sub->add_option("--out", c.out, "Output directory");
        if (with_algo) {
            sub->add_option("--algo", c.algo, "Comma-separated algorithms or 'all'");
            sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
            sub->add_flag("--strict", c.strict, "Exit 1 when any row is infeasible");
        }
    };

    auto* run = app.add_subcommand("run", "Run all frames and slots for the selected algorithms");
    add_common(run, true);

    std::string param, values, seeds;
    std::size_t threads = 0;
    auto* sweep = app.add_subcommand("sweep", "Repeat the experiment over a parameter grid");
    add_common(sweep, true);
    sweep->add_option("--param", param, "Parameter to sweep")->required();
    sweep->add_option("--values", values, "Comma-separated values")->required();
    sweep->add_option("--seeds", seeds, "Comma-separated seeds (default 1,2,3,4,5)");
    sweep->add_option("--threads", threads, "Worker threads (0: all cores)");

    auto* verify = app.add_subcommand("verify", "Run the oracle probe suite");
    add_common(verify, false);

    auto* gen = app.add_subcommand("gen-trace", "Write the workload trace as CSV");
    add_common(gen, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (*run) return cmd_run(c);
        if (*sweep) return cmd_sweep(c, param, values, seeds, threads);
        if (*verify) return cmd_verify(c);
        if (*gen) return cmd_gen_trace(c);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitOk;
}
