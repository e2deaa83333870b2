#include "dlms/cli.hpp"

#include "dlms/config.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

namespace dlms {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::size_t> parse_f_list(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos) {
            throw Error(Errc::config, "--f: expected comma-separated nonnegative integers, got \"" +
                                          text + "\"");
        }
        out.push_back(std::stoull(item));
    }
    if (out.empty()) {
        throw Error(Errc::config, "--f: list is empty");
    }
    return out;
}

namespace {

int exit_code(const Error& e) {
    switch (e.code()) {
    case Errc::config:
    case Errc::io:
    case Errc::invalid_agent:
    case Errc::domain:
    case Errc::empty_input:
        return 1;
    default:
        return 2;
    }
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw Error(Errc::io, "cannot write " + path.string());
    }
    f << text;
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw Error(Errc::io, "cannot create " + dir.string() + ": " + ec.message());
    }
}

ScenarioConfig load_with_seed(const std::string& path, std::optional<std::uint64_t> seed) {
    ScenarioConfig cfg = load_config(path);
    if (seed) {
        cfg.seed = seed;
    }
    if (!cfg.seed) {
        throw Error(Errc::config, "seed: not set in config and no --seed given");
    }
    return cfg;
}

int cmd_run(const std::string& config, const std::string& out_dir,
            std::optional<std::uint64_t> seed, std::ostream& out) {
    const ScenarioConfig cfg = load_with_seed(config, seed);
    const SimulationResult result = run_simulation(cfg);
    const fs::path dir(out_dir);
    make_dir(dir);

    std::ostringstream metrics;
    write_metrics_csv(metrics, result.metrics);
    write_file(dir / "metrics.csv", metrics.str());
    std::ostringstream agents;
    write_agents_csv(agents, result.metrics);
    write_file(dir / "agents.csv", agents.str());
    write_file(dir / "topology_initial.json",
               topology_to_json(result.metrics.initial_topology).dump(2) + "\n");
    write_file(dir / "topology_final.json",
               topology_to_json(result.metrics.final_topology).dump(2) + "\n");
    const json summary = summarize(cfg, result);
    write_file(dir / "summary.json", summary.dump(2) + "\n");

    out << "algorithm " << to_string(cfg.algorithm) << ", attack " << to_string(cfg.attack.kind)
        << ": steady-state MSD " << std::fixed << std::setprecision(2)
        << summary["msd_db"][std::string(to_string(cfg.algorithm))].get<double>() << " dB\n";
    out << "wrote " << dir.string() << "\n";
    return 0;
}

struct SweepRow {
    std::string label;
    std::optional<std::size_t> F;
    double msd_db = 0.0;
    std::size_t pruned = 0;
};

int cmd_sweep_f(const std::string& config, const std::string& f_text, const std::string& out_dir,
                std::optional<std::uint64_t> seed, std::ostream& out) {
    const auto Fs = parse_f_list(f_text);
    const ScenarioConfig base = load_with_seed(config, seed);

    std::vector<ScenarioConfig> points;
    std::vector<SweepRow> rows;
    auto add = [&](Algorithm a, std::optional<std::size_t> F) {
        ScenarioConfig c = base;
        c.algorithm = a;
        if (F) {
            c.F = FSpec{};
            c.F.global = *F;
        }
        points.push_back(std::move(c));
        rows.push_back({std::string(to_string(a)), F, 0.0, 0});
    };
    add(Algorithm::noncoop, std::nullopt);
    add(Algorithm::dlmsaw, std::nullopt);
    for (std::size_t F : Fs) {
        add(Algorithm::rdlmsaw, F);
    }

    // Same seed everywhere: every point sees the same graph and data.
    std::vector<std::future<SimulationResult>> jobs;
    for (const auto& c : points) {
        jobs.push_back(std::async(std::launch::async, [c] { return run_simulation(c); }));
    }
    for (std::size_t j = 0; j < jobs.size(); ++j) {
        const SimulationResult r = jobs[j].get();
        rows[j].msd_db = to_db(steady_state_msd(r.metrics, points[j].steady_window));
        rows[j].pruned = pruned_attack_links(r.metrics);
    }

    make_dir(out_dir);
    std::ostringstream csv;
    csv << "algorithm,F,msd_db,n_pruned_attack_links\n";
    csv << std::setprecision(17);
    for (const auto& r : rows) {
        csv << r.label << ',' << (r.F ? std::to_string(*r.F) : "") << ',' << r.msd_db << ','
            << r.pruned << '\n';
    }
    write_file(fs::path(out_dir) / "sweep_f.csv", csv.str());

    out << std::left << std::setw(10) << "algorithm" << std::setw(4) << "F" << std::setw(12)
        << "msd_db" << "pruned_attack_links\n";
    for (const auto& r : rows) {
        out << std::setw(10) << r.label << std::setw(4) << (r.F ? std::to_string(*r.F) : "-")
            << std::setw(12) << std::fixed << std::setprecision(2) << r.msd_db << r.pruned << '\n';
    }
    return 0;
}

int cmd_plan_attack(const std::string& graph, std::ostream& out) {
    const Topology t = load_topology(graph);
    const DominatingSet d = greedy_min_dominating_set(t);
    if (!is_dominating_set(t, d.members)) {
        throw Error(Errc::domain, "planner produced a set that does not dominate the graph");
    }
    json j;
    j["members"] = d.members;
    j["size"] = d.members.size();
    out << j.dump() << "\n";
    return 0;
}

std::vector<double> sigma_values(const std::string& spec, std::size_t n) {
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(s, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != s.size() || !(x > 0.0)) {
            throw Error(Errc::domain, "--sigma: expected a positive number or lo:hi, got \"" +
                                          spec + "\"");
        }
        return x;
    };
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        return std::vector<double>(n, number(spec));
    }
    const double lo = number(spec.substr(0, colon));
    const double hi = number(spec.substr(colon + 1));
    if (hi < lo) {
        throw Error(Errc::domain, "--sigma: range needs lo <= hi");
    }
    // Evenly spaced over [lo, hi].
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    return out;
}

int cmd_msd_theory(double mu, std::size_t m, std::size_t n, const std::string& sigma,
                   const std::string& partition, std::ostream& out) {
    if (!(mu > 0.0) || m == 0 || n == 0) {
        throw Error(Errc::domain, "need mu > 0, m >= 1, n >= 1");
    }
    const auto vars = sigma_values(sigma, n);
    const double ncop = msd_noncooperative(mu, m, vars);
    const double diff = msd_diffusion(mu, m, vars);
    out << std::fixed << std::setprecision(6);
    auto line = [&](const char* name, double v) {
        out << std::left << std::setw(14) << name << std::scientific << std::setprecision(6) << v
            << "  " << std::fixed << std::setprecision(2) << to_db(v) << " dB\n";
    };
    line("msd_noncoop", ncop);
    line("msd_diffusion", diff);
    if (!partition.empty()) {
        std::vector<std::vector<double>> blocks;
        std::size_t used = 0;
        std::stringstream ss(partition);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos ||
                std::stoull(item) == 0) {
                throw Error(Errc::domain, "--partition: expected positive block sizes");
            }
            const std::size_t size = std::stoull(item);
            if (used + size > n) {
                break;
            }
            blocks.emplace_back(vars.begin() + static_cast<std::ptrdiff_t>(used),
                                vars.begin() + static_cast<std::ptrdiff_t>(used + size));
            used += size;
        }
        if (used != n || blocks.empty()) {
            throw Error(Errc::domain, "--partition: block sizes must sum to n");
        }
        const double after = msd_partitioned(mu, m, blocks);
        line("msd_after", after);
        out << std::left << std::setw(14) << "delta" << std::scientific << std::setprecision(6)
            << msd_partition_delta(mu, m, blocks) << "\n";
    }
    return 0;
}

int cmd_validate(const std::string& config, std::ostream& out) {
    const ScenarioConfig cfg = load_config(config);
    out << "ok: algorithm " << to_string(cfg.algorithm) << ", attack " << to_string(cfg.attack.kind)
        << ", " << cfg.rounds << " rounds" << (cfg.seed ? "" : " (no seed; pass --seed to run)")
        << "\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Multi-task diffusion LMS simulator with Byzantine attacks and resilient combining",
                 "dlms-sim"};
    app.require_subcommand(1);

    std::string config;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::string f_list;
    std::string graph;
    double mu = 0.0;
    std::size_t m = 0;
    std::size_t n = 0;
    std::string sigma;
    std::string partition;

    auto* run = app.add_subcommand("run", "Run one scenario and write metrics");
    run->add_option("--config", config, "Scenario config (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory")->required();
    run->add_option("--seed", seed, "Overrides the config seed");

    auto* sweep = app.add_subcommand("sweep-f", "Steady-state MSD versus F, with baselines");
    sweep->add_option("--config", config, "Scenario config (JSON)")->required();
    sweep->add_option("--f", f_list, "Comma-separated F values")->required();
    sweep->add_option("--out", out_dir, "Output directory")->required();
    sweep->add_option("--seed", seed, "Overrides the config seed");

    auto* plan = app.add_subcommand("plan-attack", "Greedy dominating set of a graph");
    plan->add_option("--graph", graph, "Graph JSON")->required();

    auto* theory = app.add_subcommand("msd-theory", "Closed-form steady-state MSD");
    theory->add_option("--mu", mu, "Step size")->required();
    theory->add_option("--m", m, "Regressor dimension")->required();
    theory->add_option("--n", n, "Number of agents")->required();
    theory->add_option("--sigma", sigma, "Noise variance, or lo:hi spread evenly over agents")
        ->required();
    theory->add_option("--partition", partition, "Block sizes after a split, e.g. 50,50");

    auto* val = app.add_subcommand("validate", "Check a scenario config");
    val->add_option("--config", config, "Scenario config (JSON)")->required();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) {
            return cmd_run(config, out_dir, seed, out);
        }
        if (sweep->parsed()) {
            return cmd_sweep_f(config, f_list, out_dir, seed, out);
        }
        if (plan->parsed()) {
            return cmd_plan_attack(graph, out);
        }
        if (theory->parsed()) {
            return cmd_msd_theory(mu, m, n, sigma, partition, out);
        }
        if (val->parsed()) {
            return cmd_validate(config, out);
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return exit_code(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace dlms
