// qscore: generate instances, run solvers, run Q-score sweeps, build oracle
// tables and emit plot data.
//
// Exit status: 0 on success, 2 for configuration errors, 3 for I/O errors,
// 1 for anything else. Solver failures are data and never change the status.

#include <chrono>
#include <csignal>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qscore/qscore.hpp"

namespace fs = std::filesystem;
using namespace qscore;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_or_throw(const std::string& path) {
    try {
        return read_file(path);
    } catch (const std::runtime_error& e) {
        throw IoError(e.what());
    }
}

void write_or_throw(const fs::path& path, const std::string& content) {
    try {
        write_file(path.string(), content);
    } catch (const std::runtime_error& e) {
        throw IoError(e.what());
    }
}

/// "k=v" strings into a map; `prefix` is stripped if present.
ParamMap parse_assignments(const std::vector<std::string>& items) {
    ParamMap out;
    for (const auto& s : items) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("expected key=value, got '" + s + "'");
        out[s.substr(0, eq)] = s.substr(eq + 1);
    }
    return out;
}

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string config_text(const KeyValues& kv) {
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

/// out/<UTC timestamp>-<config hash>, never reusing an existing directory.
fs::path make_run_dir(const std::string& out, const std::string& config) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream name;
    name << std::put_time(&tm, "%Y%m%dT%H%M%SZ") << '-' << std::hex << std::setw(8) << std::setfill('0')
         << (fnv1a(config) & 0xffffffffULL);
    fs::path dir = fs::path(out) / name.str();
    for (int k = 1; fs::exists(dir); ++k) dir = fs::path(out) / (name.str() + "." + std::to_string(k));
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create run directory '" + dir.string() + "': " + ec.message());
    return dir;
}

SolverBudget budget_from_flags(const std::optional<std::int64_t>& ms, const std::optional<std::uint64_t>& quota,
                               std::uint64_t seed) {
    if (ms && quota) throw ConfigError("give at most one of --budget-ms and --quota");
    if (quota) return SolverBudget::deterministic(*quota, seed);
    const auto limit = ms.value_or(60000);
    if (limit <= 0) throw ConfigError("budget_ms must be > 0");
    return SolverBudget::wall_clock(std::chrono::milliseconds(limit), seed);
}

std::string emit(void (*writer)(std::ostream&, const SweepReport&), const SweepReport& rep) {
    std::ostringstream s;
    writer(s, rep);
    return s.str();
}

void write_plotdata(const fs::path& dir, const SweepReport& rep) {
    write_or_throw(dir / "beta.tsv", emit(write_beta_plot, rep));
    write_or_throw(dir / "time.tsv", emit(write_time_plot, rep));
}

/// Owns the oracle used by a sweep in oracle mode.
struct OracleSetup {
    std::unique_ptr<Solver> solver;
    std::unique_ptr<OracleProvider> provider;
};

OracleSetup make_oracle(const RunConfig& c) {
    OracleSetup o;
    if (c.beta.cmax_mode != CmaxMode::Oracle) return o;
    if (!c.oracle_table.empty()) {
        try {
            o.provider = std::make_unique<TableOracle>(oracle_from_json(json::parse(read_or_throw(c.oracle_table))));
        } catch (const json::exception& e) {
            throw ConfigError("oracle table '" + c.oracle_table + "': " + e.what());
        } catch (const DomainError& e) {
            throw ConfigError("oracle table '" + c.oracle_table + "': " + e.what());
        }
        return o;
    }
    const auto budget = c.budget().with_seed(c.seed);
    if (c.oracle_solver == "default") {
        o.solver = make_solver("sa", c.oracle_params);
        o.provider = std::make_unique<DefaultOracle>(*o.solver, budget, c.workers);
    } else {
        o.solver = make_solver(c.oracle_solver, c.oracle_params);
        o.provider = std::make_unique<SolverOracle>(*o.solver, budget, c.workers);
    }
    return o;
}

// ---- subcommands ----------------------------------------------------------------

struct GenArgs {
    std::size_t n = 0;
    std::string p = "1/2";
    std::uint64_t seed = 0;
    std::string out;
};

int cmd_gen(const GenArgs& a) {
    const auto g = generate_er_graph(a.n, parse_probability(a.p), a.seed);
    const auto text = serialize_graph(g);
    if (a.out.empty()) {
        std::cout << text;
    } else {
        write_or_throw(a.out, text);
    }
    return 0;
}

struct SolveArgs {
    std::string graph;
    std::string solver = "sa";
    std::vector<std::string> params;
    std::optional<std::int64_t> budget_ms;
    std::optional<std::uint64_t> quota;
    std::uint64_t seed = 0;
    std::string remote_url;
};

int cmd_solve(const SolveArgs& a) {
    const auto budget = budget_from_flags(a.budget_ms, a.quota, a.seed);
    std::optional<RemoteEndpoint> ep;
    if (a.solver == "remote") {
        RunConfig c;
        c.remote_url = a.remote_url;
        if (budget.is_wall_clock()) c.budget_ms = static_cast<std::int64_t>(budget.limit_ms());
        ep = c.endpoint();
        if (ep->base_url.empty()) throw ConfigError("solver 'remote' needs --remote-url");
    }
    const auto solver = make_solver(a.solver, parse_assignments(a.params), ep);
    const std::string text = read_or_throw(a.graph);
    GraphInstance g = [&] {
        try {
            return parse_graph(text);
        } catch (const ParseError& e) {
            throw IoError(a.graph + ":" + std::to_string(e.line()) + ": " + e.what());
        }
    }();
    std::cout << run_to_json(solver->solve(g, budget)).dump(2) << '\n';
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::vector<std::string>& sets) {
    KeyValues kv;
    if (!config_path.empty()) {
        const auto text = read_or_throw(config_path);
        try {
            kv = parse_config_text(text);
        } catch (const ParseError& e) {
            throw ConfigError(config_path + ":" + std::to_string(e.line()) + ": " + e.what());
        }
    }
    for (const auto& [k, v] : parse_assignments(sets)) kv[k] = v;
    const RunConfig c = RunConfig::from_kv(kv);

    std::optional<RemoteEndpoint> ep;
    if (c.solver == "remote") ep = c.endpoint();
    const auto solver = make_solver(c.solver, c.solver_params, ep);
    auto oracle = make_oracle(c);

    auto effective = c.to_kv();
    if (c.solver != "remote") {
        for (const auto& [k, v] : solver->effective_params()) effective["solver." + k] = v;
    }
    const auto text = config_text(effective);
    const auto dir = make_run_dir(c.out, text);
    write_or_throw(dir / "config.txt", text);

    SweepOptions opts;
    opts.time_cap_ms = c.time_cap_ms;
    opts.workers = c.workers;
    opts.oracle = oracle.provider.get();
    opts.on_size = [](const SizeRecord& r) {
        std::cerr << "n=" << r.n << " beta=" << params::format_double(r.beta)
                  << " mean_cut=" << params::format_double(r.mean_cut)
                  << " mean_ms=" << params::format_double(r.mean_time_ms) << " no_result=" << r.no_result_count
                  << '\n';
    };
    const auto rep = run_sweep(*solver, c.schedule, c.beta, c.budget(), c.seed_base, opts);

    const ReportContext ctx{effective, describe_machine()};
    write_or_throw(dir / "report.json", report_to_json(rep, ctx).dump(2) + "\n");
    write_or_throw(dir / "report.csv", emit(write_report_csv, rep));
    write_plotdata(dir, rep);
    if (c.beta.cmax_mode == CmaxMode::Oracle && c.oracle_table.empty()) {
        OracleTable t(rep.oracle_source, c.seed_base, c.beta.m_instances);
        for (const auto& r : rep.records) t.set(r.n, r.cmax);
        write_or_throw(dir / "oracle.json", oracle_to_json(t).dump(2) + "\n");
    }

    std::cout << "run directory: " << dir.string() << '\n';
    std::cout << "qscore: "
              << (rep.qscore ? std::to_string(*rep.qscore)
                             : "below start n (" + std::to_string(c.schedule.start) + ")")
              << '\n';
    std::cout << "stop reason: " << to_string(rep.stop_reason) << '\n';
    return 0;
}

struct OracleArgs {
    std::string solver = "default";
    std::vector<std::string> params;
    std::vector<std::size_t> sizes;
    std::size_t m = 100;
    std::optional<std::int64_t> budget_ms;
    std::optional<std::uint64_t> quota;
    std::uint64_t seed = 0;
    std::uint64_t seed_base = 0;
    std::size_t workers = 1;
    std::string out;
};

int cmd_oracle(const OracleArgs& a) {
    if (a.sizes.empty()) throw ConfigError("--sizes needs at least one size");
    if (a.m == 0) throw ConfigError("m must be >= 1");
    for (auto n : a.sizes) {
        if (n == 0) throw ConfigError("sizes must be >= 1");
    }
    const auto budget = budget_from_flags(a.budget_ms, a.quota, a.seed);
    const auto p = parse_assignments(a.params);
    OracleTable table;
    if (a.solver == "default") {
        const auto sa = make_solver("sa", p);
        DefaultOracle oracle(*sa, budget, a.workers);
        table = OracleTable(oracle.source(), a.seed_base, a.m);
        for (auto n : a.sizes) table.set(n, oracle.cmax({n, a.seed_base, a.m}));
    } else {
        const auto s = make_solver(a.solver, p);
        table = build_oracle(*s, a.sizes, a.m, budget, a.seed_base, a.workers);
    }
    const auto text = oracle_to_json(table).dump(2) + "\n";
    if (a.out.empty()) {
        std::cout << text;
    } else {
        write_or_throw(a.out, text);
    }
    return 0;
}

int cmd_plotdata(const std::string& report_path, const std::string& out_dir) {
    SweepReport rep;
    try {
        rep = report_from_json(json::parse(read_or_throw(report_path)));
    } catch (const json::exception& e) {
        throw IoError(report_path + ": " + e.what());
    } catch (const ParseError& e) {
        throw IoError(report_path + ": " + e.what());
    }
    const fs::path dir = out_dir.empty() ? fs::path(report_path).parent_path() : fs::path(out_dir);
    write_plotdata(dir.empty() ? fs::path(".") : dir, rep);
    return 0;
}

httplib::Server* serving = nullptr;

int cmd_serve(const std::string& host, int port, const std::string& solver_name,
              const std::vector<std::string>& params) {
    const auto p = parse_assignments(params);
    if (solver_name != "sa" && solver_name != "tabu") throw ConfigError("serve supports solvers 'sa' and 'tabu'");
    const AnnealingSolver sa(solver_name == "sa" ? AnnealingParams::parse(p) : AnnealingParams{});
    const TabuDecompositionSolver tabu(solver_name == "tabu" ? TabuParams::parse(p) : TabuParams{});
    httplib::Server server;
    install_solver_service(server, [&](const RealQubo& q, const SolverBudget& budget) {
        const Adjacency<double> adj(q);
        const BudgetTracker tracker(budget);
        return solver_name == "sa" ? sa.anneal(adj, tracker) : tabu.search(adj, tracker);
    });
    serving = &server;
    std::signal(SIGINT, [](int) { serving->stop(); });
    std::signal(SIGTERM, [](int) { serving->stop(); });
    if (!server.bind_to_port(host, port)) throw IoError("cannot listen on " + host + ":" + std::to_string(port));
    std::cerr << "serving " << solver_name << " on http://" << host << ":" << port << "/solve\n";
    server.listen_after_bind();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Q-score benchmarking toolkit for Max-Cut solvers"};
    app.require_subcommand(1);

    GenArgs gen;
    auto* g = app.add_subcommand("gen", "write a seeded G(n, p) graph");
    g->add_option("-n,--n", gen.n, "vertices")->required()->check(CLI::PositiveNumber);
    g->add_option("-p,--p", gen.p, "edge probability, 'a/b' or decimal")->capture_default_str();
    g->add_option("-s,--seed", gen.seed, "instance seed")->capture_default_str();
    g->add_option("-o,--out", gen.out, "output file (default stdout)");

    SolveArgs solve;
    auto* s = app.add_subcommand("solve", "run one solver on one graph file and print the run as JSON");
    s->add_option("graph", solve.graph, "graph file")->required();
    s->add_option("--solver", solve.solver, "exact | random | sa | tabu | remote")->capture_default_str();
    s->add_option("-P,--param", solve.params, "solver parameter key=value (repeatable)");
    auto* s_ms = s->add_option("--budget-ms", solve.budget_ms, "wall-clock budget (default 60000)");
    s->add_option("--quota", solve.quota, "deterministic work quota")->excludes(s_ms);
    s->add_option("--seed", solve.seed, "solver seed")->capture_default_str();
    s->add_option("--remote-url", solve.remote_url, "endpoint for --solver remote");

    std::string config_path;
    std::vector<std::string> sets;
    auto* w = app.add_subcommand("sweep", "run a Q-score sweep and write a report directory");
    w->add_option("-c,--config", config_path, "config file of 'key = value' lines");
    w->add_option("--set", sets, "config override key=value (repeatable); overrides the file");
    // flags mirroring the most used config keys
    struct Mirror {
        const char* flag;
        const char* key;
        const char* help;
    };
    static const Mirror mirrors[] = {{"--solver", "solver", "solver name"},
                                     {"--start", "start", "first size"},
                                     {"--step", "step", "size increment"},
                                     {"--max", "max", "largest size"},
                                     {"-m,--m", "m", "instances per size"},
                                     {"--beta-star", "beta_star", "beta threshold"},
                                     {"--cmax", "cmax", "approx | oracle"},
                                     {"--baseline", "baseline", "n2_8 | exact"},
                                     {"--oracle-table", "oracle_table", "oracle table file"},
                                     {"--oracle-solver", "oracle_solver", "default | exact | random | sa | tabu"},
                                     {"--budget-ms", "budget_ms", "wall-clock budget per instance"},
                                     {"--quota", "quota", "deterministic quota per instance"},
                                     {"--seed", "seed", "solver seed base"},
                                     {"--seed-base", "seed_base", "graph seed base"},
                                     {"--time-cap-ms", "time_cap_ms", "mean runtime cap"},
                                     {"--workers", "workers", "parallel instances"},
                                     {"--out", "out", "output directory"},
                                     {"--remote-url", "remote_url", "remote endpoint"},
                                     {"--remote-timeout-ms", "remote_timeout_ms", "remote request timeout"}};
    std::vector<std::pair<const char*, std::string>> mirrored(std::size(mirrors));
    for (std::size_t i = 0; i < std::size(mirrors); ++i) {
        mirrored[i].first = mirrors[i].key;
        w->add_option(mirrors[i].flag, mirrored[i].second, mirrors[i].help);
    }
    std::vector<std::string> sweep_params;
    w->add_option("-P,--param", sweep_params, "solver parameter key=value (repeatable)");

    OracleArgs orc;
    auto* o = app.add_subcommand("oracle", "compute a C_max oracle table over seeded instance sets");
    o->add_option("--solver", orc.solver, "default | exact | random | sa | tabu")->capture_default_str();
    o->add_option("-P,--param", orc.params, "solver parameter key=value (repeatable)");
    o->add_option("--sizes", orc.sizes, "sizes to tabulate")->required()->delimiter(',');
    o->add_option("-m,--m", orc.m, "instances per size")->capture_default_str();
    auto* o_ms = o->add_option("--budget-ms", orc.budget_ms, "wall-clock budget per instance (default 60000)");
    o->add_option("--quota", orc.quota, "deterministic quota per instance")->excludes(o_ms);
    o->add_option("--seed", orc.seed, "solver seed base")->capture_default_str();
    o->add_option("--seed-base", orc.seed_base, "graph seed base")->capture_default_str();
    o->add_option("--workers", orc.workers, "parallel instances")->capture_default_str();
    o->add_option("-o,--out", orc.out, "output file (default stdout)");

    std::string report_path, plot_dir;
    auto* pd = app.add_subcommand("plotdata", "re-emit beta.tsv and time.tsv from a saved report.json");
    pd->add_option("report", report_path, "report.json")->required();
    pd->add_option("-o,--out", plot_dir, "output directory (default: next to the report)");

    std::string host = "127.0.0.1", serve_solver = "sa";
    int port = 8080;
    std::vector<std::string> serve_params;
    auto* sv = app.add_subcommand("serve", "expose an in-process solver over the remote wire protocol");
    sv->add_option("--host", host)->capture_default_str();
    sv->add_option("--port", port)->capture_default_str();
    sv->add_option("--solver", serve_solver, "sa | tabu")->capture_default_str();
    sv->add_option("-P,--param", serve_params, "solver parameter key=value (repeatable)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*g) return cmd_gen(gen);
        if (*s) return cmd_solve(solve);
        if (*w) {
            for (const auto& [key, value] : mirrored) {
                if (!value.empty()) sets.push_back(std::string(key) + "=" + value);
            }
            for (const auto& p : sweep_params) sets.push_back("solver." + p);
            return cmd_sweep(config_path, sets);
        }
        if (*o) return cmd_oracle(orc);
        if (*pd) return cmd_plotdata(report_path, plot_dir);
        if (*sv) return cmd_serve(host, port, serve_solver, serve_params);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
