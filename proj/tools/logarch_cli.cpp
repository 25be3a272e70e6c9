// logarch: simulate, fit, select and summarize spatiotemporal log-ARCH models.
//
// Exit codes: 0 success, 1 runtime failure (error JSON on stderr), 2 usage error.

#include "logarch/io.hpp"
#include "logarch/mixture.hpp"
#include "logarch/shrinkage.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <sstream>

#ifndef LOGARCH_VERSION
#define LOGARCH_VERSION "unknown"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace logarch;

namespace {

struct DataOptions {
    std::string panel;
    std::string weights;
    std::string weights_format = "auto";
    bool network = false;
    double network_cap = 1e6;
    bool no_row_normalize = false;
    double floor = 1e-12;
};

struct ChainOptions {
    long iterations = 100000;
    long burn_in = 20000;
    long thin = 1;
    std::uint64_t seed = 1;
    double rho_step = 0.05;
    long max_field_draws = 1000;
    std::string prior;
    bool no_stability = false;
    bool shrinkage = false;
    std::string tau2_rule = "conjugate";
    double lasso_c = 1.0;
    double lasso_d = 1.0;
};

struct SimulateOptions {
    int rows = 7;
    int cols = 7;
    long periods = 100;
    int factors = 2;
    double rho = 0.16;
    double gamma = 0.15;
    double delta = 0.2;
    double beta = -2.0;
    int burn_in_periods = 200;
    std::uint64_t seed = 1;
};

struct Inputs {
    io::PanelFile panel;
    WeightMatrix weights;
};

void add_data_options(CLI::App* cmd, DataOptions& o) {
    cmd->add_option("--panel", o.panel, "Long-format panel CSV (unit,time,y[,x...])")->required()->check(CLI::ExistingFile);
    auto* w = cmd->add_option("--weights", o.weights, "Weight matrix CSV (dense n x n or i,j,weight edge list)");
    auto* net = cmd->add_flag("--network", o.network, "Build weights from the correlation distance of the outcome series");
    w->excludes(net);
    cmd->add_option("--weights-format", o.weights_format, "auto, dense or edges")
        ->check(CLI::IsMember({"auto", "dense", "edges"}));
    cmd->add_option("--network-cap", o.network_cap, "Weight assigned to perfectly correlated pairs")
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--no-row-normalize", o.no_row_normalize, "Use the weights as given");
    cmd->add_option("--floor", o.floor, "Lower bound on Y^2 before taking logs")->check(CLI::PositiveNumber);
}

void add_chain_options(CLI::App* cmd, ChainOptions& o) {
    cmd->add_option("--iterations", o.iterations, "Total MCMC iterations")->check(CLI::PositiveNumber);
    cmd->add_option("--burn-in", o.burn_in, "Discarded iterations (the rho step adapts during these)")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--thin", o.thin, "Keep every k-th post burn-in draw")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "Random seed");
    cmd->add_option("--rho-step", o.rho_step, "Initial random-walk step for rho")->check(CLI::PositiveNumber);
    cmd->add_option("--max-field-draws", o.max_field_draws, "Retained snapshots of the common component")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--prior", o.prior, "Prior JSON file")->check(CLI::ExistingFile);
    cmd->add_flag("--no-stability", o.no_stability, "Do not restrict |rho|+|gamma|+|delta| < 1");
    cmd->add_flag("--shrinkage", o.shrinkage, "Bayesian lasso prior on the loadings");
    cmd->add_option("--tau2-rule", o.tau2_rule, "conjugate or inverse-gaussian")
        ->check(CLI::IsMember({"conjugate", "inverse-gaussian"}));
    cmd->add_option("--lasso-c", o.lasso_c, "Gamma shape of the lasso penalty prior")->check(CLI::PositiveNumber);
    cmd->add_option("--lasso-d", o.lasso_d, "Gamma rate of the lasso penalty prior")->check(CLI::PositiveNumber);
}

Inputs load_inputs(const DataOptions& o) {
    Inputs in{io::parse_panel_csv(o.panel), {}};
    const Eigen::Index n = in.panel.panel.units();
    WeightMatrix raw;
    if (o.network) {
        raw = correlation_network(in.panel.panel.y, o.network_cap);
    } else if (!o.weights.empty()) {
        raw = WeightMatrix(io::read_weights_csv(o.weights, n, io::weights_format_from_string(o.weights_format)));
    } else {
        throw Error("either --weights or --network is required");
    }
    in.weights = o.no_row_normalize ? raw : row_normalize(raw);
    return in;
}

PriorSpec load_prior(const ChainOptions& o) {
    PriorSpec prior = o.prior.empty() ? PriorSpec{} : io::read_prior_json(o.prior);
    if (o.no_stability) prior.enforce_stability = false;
    return prior;
}

SamplerConfig sampler_config(const ChainOptions& o, const DataOptions& d) {
    SamplerConfig cfg;
    cfg.iterations = o.iterations;
    cfg.burn_in = o.burn_in;
    cfg.thin = o.thin;
    cfg.seed = o.seed;
    cfg.rho_step = o.rho_step;
    cfg.max_field_draws = o.max_field_draws;
    cfg.floor = d.floor;
    cfg.validate();
    return cfg;
}

ShrinkageSettings shrinkage_settings(const ChainOptions& o) {
    return {o.lasso_c, o.lasso_d, tau2_rule_from_string(o.tau2_rule)};
}

json sampler_to_json(const SamplerConfig& c) {
    return json{{"iterations", c.iterations}, {"burn_in", c.burn_in},       {"thin", c.thin},
                {"seed", c.seed},             {"rho_step", c.rho_step},     {"adapt_band", {c.adapt_low, c.adapt_high}},
                {"adapt_window", c.adapt_window}, {"max_field_draws", c.max_field_draws}, {"floor", c.floor}};
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    return buf;
}

json base_manifest(const std::string& command) {
    return json{{"version", LOGARCH_VERSION}, {"command", command}, {"started_at", utc_timestamp()}};
}

fs::path prepare_output(const std::string& dir) {
    fs::path out(dir);
    fs::create_directories(out);
    return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// Accepts "3", "1..8" or "1,2,5".
std::vector<int> parse_q_list(const std::string& text) {
    std::vector<int> out;
    const auto dots = text.find("..");
    try {
        if (dots != std::string::npos) {
            const int lo = std::stoi(text.substr(0, dots));
            const int hi = std::stoi(text.substr(dots + 2));
            if (hi < lo) throw CLI::ValidationError("--q", "empty range " + text);
            for (int q = lo; q <= hi; ++q) out.push_back(q);
        } else {
            std::stringstream ss(text);
            std::string item;
            while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
        }
    } catch (const std::logic_error&) {
        throw CLI::ValidationError("--q", "expected a count, a range a..b or a comma list, got " + text);
    }
    for (int q : out) {
        if (q < 0) throw CLI::ValidationError("--q", "factor counts must be non-negative");
    }
    if (out.empty()) throw CLI::ValidationError("--q", "no factor counts given");
    return out;
}

int run_simulate(const SimulateOptions& o, const std::string& output) {
    const auto start = std::chrono::steady_clock::now();
    SimConfig cfg = reference_design(o.periods, o.seed);
    cfg.weights = row_normalize(queen_contiguity(o.rows, o.cols));
    cfg.factors = o.factors;
    cfg.params = {o.rho, o.gamma, o.delta};
    cfg.beta = Eigen::VectorXd::Constant(1, o.beta);
    cfg.burn_in_periods = o.burn_in_periods;
    const auto sim = simulate_panel(cfg);

    const fs::path out = prepare_output(output);
    const auto ids = io::default_unit_ids(sim.panel.units());
    io::write_panel_csv(out / "panel.csv", sim.panel, ids, {"x1"});
    io::write_weights_csv(out / "weights.csv", cfg.weights);
    io::write_text(out / "truth.json", io::truth_to_json(sim.truth).dump(2) + "\n");

    json m = base_manifest("simulate");
    m["seed"] = o.seed;
    m["design"] = {{"rows", o.rows},       {"cols", o.cols},   {"periods", o.periods},
                   {"factors", o.factors}, {"rho", o.rho},     {"gamma", o.gamma},
                   {"delta", o.delta},     {"beta", o.beta},   {"burn_in_periods", o.burn_in_periods}};
    m["wall_time_seconds"] = seconds_since(start);
    io::write_text(out / "manifest.json", m.dump(2) + "\n");
    std::printf("simulated %ld units x %ld periods, mean true h* %.4f\n", static_cast<long>(sim.panel.units()),
                static_cast<long>(sim.panel.periods()), sim.truth.hstar.mean());
    return 0;
}

int run_fit(const DataOptions& data, const ChainOptions& chain, int q, const std::string& output) {
    const auto start = std::chrono::steady_clock::now();
    const Inputs in = load_inputs(data);
    const PriorSpec prior = load_prior(chain);
    const SamplerConfig cfg = sampler_config(chain, data);
    const ModelData model = ModelData::build(in.panel.panel, in.weights, cfg.floor);
    const PosteriorDraws draws = chain.shrinkage ? run_chain_shrinkage(model, prior, cfg, q, shrinkage_settings(chain))
                                                 : run_chain(model, prior, cfg, q);
    const VolatilityField field = recover_volatility(draws, model);

    const fs::path out = prepare_output(output);
    io::write_draws_csv(out / "draws.csv", draws);
    io::write_volatility_csv(out / "volatility.csv", field, in.panel.unit_ids);

    auto rows = summarize(draws);
    std::erase_if(rows, [](const ParameterSummary& r) { return r.name == "loglik"; });
    rows.push_back({"h*", field.overall_average, field.overall_average, field.overall_lo, field.overall_hi});
    const std::string table = io::summary_table(rows);
    io::write_text(out / "summary.txt", table);

    json m = base_manifest("fit");
    m["inputs"] = {{"panel", data.panel}, {"weights", data.network ? "correlation network" : data.weights},
                   {"row_normalized", in.weights.row_normalized()}};
    m["sampler"] = sampler_to_json(cfg);
    m["prior"] = io::prior_to_json(prior);
    if (chain.shrinkage) m["shrinkage"] = {{"c", chain.lasso_c}, {"d", chain.lasso_d}, {"tau2_rule", chain.tau2_rule}};
    m["run"] = io::manifest_to_json(draws.manifest);
    m["seed"] = cfg.seed;
    m["acceptance_rate"] = draws.manifest.acceptance_rate;
    m["wall_time_seconds"] = seconds_since(start);
    io::write_text(out / "manifest.json", m.dump(2) + "\n");
    std::cout << table;
    return 0;
}

int run_select(const DataOptions& data, const ChainOptions& chain, const std::vector<int>& q_list, int jobs,
               const std::string& output) {
    const auto start = std::chrono::steady_clock::now();
    const Inputs in = load_inputs(data);
    const PriorSpec prior = load_prior(chain);
    const SamplerConfig cfg = sampler_config(chain, data);
    ScanOptions opts;
    opts.jobs = jobs;
    if (chain.shrinkage) opts.shrinkage = shrinkage_settings(chain);
    const DicReport report = scan_q(ModelData::build(in.panel.panel, in.weights, cfg.floor), prior, cfg, q_list, opts);

    const fs::path out = prepare_output(output);
    io::write_text(out / "dic_report.json", io::dic_report_to_json(report).dump(2) + "\n");
    const std::string table = io::dic_table(report);
    io::write_text(out / "dic_table.txt", table);

    json m = base_manifest("select");
    m["inputs"] = {{"panel", data.panel}, {"weights", data.network ? "correlation network" : data.weights}};
    m["sampler"] = sampler_to_json(cfg);
    m["q"] = q_list;
    m["jobs"] = jobs;
    m["seed"] = cfg.seed;
    json acc = json::object();
    for (const auto& e : report.entries) {
        if (e.ok) acc[std::to_string(e.factors)] = e.manifest.acceptance_rate;
    }
    m["acceptance_rate"] = acc;
    m["wall_time_seconds"] = seconds_since(start);
    io::write_text(out / "manifest.json", m.dump(2) + "\n");
    std::cout << table;
    if (!report.selected_q) throw Error("every chain in the scan failed");
    return 0;
}

int run_summarize(const std::string& path) {
    const auto table = io::read_draws_csv(path);
    std::vector<ParameterSummary> rows;
    for (std::size_t c = 0; c < table.names.size(); ++c) {
        if (table.names[c] == "loglik") continue;
        rows.push_back(summarize_trace(table.names[c], table.columns[c]));
    }
    std::printf("%zu draws from %s\n", table.iteration.size(), path.c_str());
    std::cout << io::summary_table(rows);
    return 0;
}

void dump_mixture() {
    const auto& t = mixture_table();
    std::printf("%-4s %10s %10s %10s\n", "j", "p", "mu", "sigma2");
    for (std::size_t j = 0; j < t.p.size(); ++j) {
        std::printf("%-4zu %10.5f %10.5f %10.5f\n", j + 1, t.p[j], t.mu[j], t.sigma2[j]);
    }
    std::printf("mean %.5f variance %.5f\n", t.mean(), t.variance());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bayesian estimation of spatiotemporal log-ARCH models with latent factors", "logarch"};
    app.set_version_flag("--version", LOGARCH_VERSION);
    app.fallthrough();
    bool mixture = false;
    app.add_flag("--dump-mixture", mixture, "Print the ten-component mixture table and exit");
    std::string output = ".";
    app.add_option("-o,--output", output, "Output directory")->envname("LOGARCH_OUTPUT_DIR");

    SimulateOptions sim;
    auto* simulate = app.add_subcommand("simulate", "Simulate a panel on a queen lattice");
    simulate->add_option("--rows", sim.rows, "Lattice rows")->check(CLI::PositiveNumber);
    simulate->add_option("--cols", sim.cols, "Lattice columns")->check(CLI::PositiveNumber);
    simulate->add_option("--periods", sim.periods, "Recorded periods T")->check(CLI::PositiveNumber);
    simulate->add_option("--factors", sim.factors, "Latent factors")->check(CLI::NonNegativeNumber);
    simulate->add_option("--rho", sim.rho, "Spatial effect");
    simulate->add_option("--gamma", sim.gamma, "Temporal effect");
    simulate->add_option("--delta", sim.delta, "Spatiotemporal effect");
    simulate->add_option("--beta", sim.beta, "Covariate coefficient");
    simulate->add_option("--burn-in-periods", sim.burn_in_periods, "Discarded warm-up periods")
        ->check(CLI::NonNegativeNumber);
    simulate->add_option("--seed", sim.seed, "Random seed");

    DataOptions fit_data;
    ChainOptions fit_chain;
    int fit_q = 2;
    auto* fit = app.add_subcommand("fit", "Run one MCMC chain");
    add_data_options(fit, fit_data);
    add_chain_options(fit, fit_chain);
    fit->add_option("-q,--factors,--q-max", fit_q, "Latent factors (the upper bound with --shrinkage)")
        ->check(CLI::NonNegativeNumber);

    DataOptions select_data;
    ChainOptions select_chain;
    std::string q_text = "1..8";
    int jobs = 1;
    auto* select = app.add_subcommand("select", "Compare factor counts by DIC");
    add_data_options(select, select_data);
    add_chain_options(select, select_chain);
    select->add_option("--q", q_text, "Factor counts: 3, 1..8 or 1,2,5");
    select->add_option("--jobs", jobs, "Chains run concurrently")->check(CLI::PositiveNumber);

    std::string draws_path;
    auto* summary = app.add_subcommand("summarize", "Posterior medians and 95% intervals from a draws CSV");
    summary->add_option("--draws", draws_path, "draws.csv written by fit")->required()->check(CLI::ExistingFile);

    std::vector<int> q_list;
    try {
        app.parse(argc, argv);
        if (!mixture && app.get_subcommands().empty()) throw CLI::RequiredError("a subcommand");
        if (*select) q_list = parse_q_list(q_text);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    try {
        if (mixture) {
            dump_mixture();
            if (app.get_subcommands().empty()) return 0;
        }
        if (*simulate) return run_simulate(sim, output);
        if (*fit) return run_fit(fit_data, fit_chain, fit_q, output);
        if (*select) return run_select(select_data, select_chain, q_list, jobs, output);
        return run_summarize(draws_path);
    } catch (const std::exception& e) {
        const std::string command = app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name();
        std::cerr << json{{"error", e.what()}, {"command", command}}.dump() << '\n';
        return 1;
    }
}
