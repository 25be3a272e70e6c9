#include "logarch/io.hpp"
#include "logarch/mixture.hpp"
#include "logarch/shrinkage.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace logarch;

namespace {

PanelData make_panel(Eigen::MatrixXd y, Eigen::VectorXd y0, std::vector<Eigen::MatrixXd> x) {
    PanelData p{std::move(y), std::move(y0), std::move(x)};
    p.validate();
    return p;
}

PriorSpec make_prior(const std::string& prior_json, bool enforce_stability) {
    PriorSpec prior = prior_json.empty() ? PriorSpec{} : io::prior_from_json(nlohmann::json::parse(prior_json));
    if (!enforce_stability) prior.enforce_stability = false;
    return prior;
}

SamplerConfig make_config(long iterations, long burn_in, long thin, std::uint64_t seed, double rho_step) {
    SamplerConfig cfg;
    cfg.iterations = iterations;
    cfg.burn_in = burn_in;
    cfg.thin = thin;
    cfg.seed = seed;
    cfg.rho_step = rho_step;
    cfg.validate();
    return cfg;
}

py::dict simulate_py(Eigen::Index periods, std::uint64_t seed, int rows, int cols, int factors, double rho, double gamma,
                  double delta, double beta, int burn_in_periods) {
    SimConfig cfg = reference_design(periods, seed);
    cfg.weights = row_normalize(queen_contiguity(rows, cols));
    cfg.factors = factors;
    cfg.params = {rho, gamma, delta};
    cfg.beta = Eigen::VectorXd::Constant(1, beta);
    cfg.burn_in_periods = burn_in_periods;
    Simulation sim;
    {
        py::gil_scoped_release release;
        sim = simulate_panel(cfg);
    }
    py::dict out;
    out["y"] = sim.panel.y;
    out["y0"] = sim.panel.y0;
    out["x"] = sim.panel.x;
    out["weights"] = cfg.weights.matrix();
    out["hstar"] = sim.truth.hstar;
    out["loadings"] = sim.truth.loadings;
    out["factors"] = sim.truth.factors;
    return out;
}

py::dict fit_py(Eigen::MatrixXd y, Eigen::VectorXd y0, std::vector<Eigen::MatrixXd> x, const Eigen::MatrixXd& weights,
             int q, long iterations, long burn_in, long thin, std::uint64_t seed, double rho_step, bool shrinkage,
             const std::string& tau2_rule, const std::string& prior_json, bool enforce_stability) {
    const PanelData panel = make_panel(std::move(y), std::move(y0), std::move(x));
    const PriorSpec prior = make_prior(prior_json, enforce_stability);
    const SamplerConfig cfg = make_config(iterations, burn_in, thin, seed, rho_step);
    const ShrinkageSettings lasso{1.0, 1.0, tau2_rule_from_string(tau2_rule)};
    PosteriorDraws draws;
    VolatilityField field;
    {
        py::gil_scoped_release release;
        const ModelData data = ModelData::build(panel, WeightMatrix(weights));
        draws = shrinkage ? run_chain_shrinkage(data, prior, cfg, q, lasso) : run_chain(data, prior, cfg, q);
        field = recover_volatility(draws, data);
    }
    py::dict traces;
    for (const auto& name : draws.parameter_names()) traces[py::str(name)] = draws.parameter(name);
    py::dict vol;
    vol["median"] = field.median;
    vol["lo"] = field.lo;
    vol["hi"] = field.hi;
    vol["plugin"] = field.plugin;
    vol["overall_average"] = field.overall_average;
    py::dict out;
    out["draws"] = traces;
    out["iteration"] = draws.iteration;
    out["mean_common"] = draws.mean_common;
    out["volatility"] = vol;
    out["manifest"] = io::manifest_to_json(draws.manifest).dump();
    return out;
}

std::string select_py(Eigen::MatrixXd y, Eigen::VectorXd y0, std::vector<Eigen::MatrixXd> x,
                   const Eigen::MatrixXd& weights, const std::vector<int>& q_list, long iterations, long burn_in,
                   long thin, std::uint64_t seed, int jobs, bool shrinkage, const std::string& prior_json) {
    const PanelData panel = make_panel(std::move(y), std::move(y0), std::move(x));
    const PriorSpec prior = make_prior(prior_json, true);
    const SamplerConfig cfg = make_config(iterations, burn_in, thin, seed, 0.05);
    ScanOptions opts;
    opts.jobs = jobs;
    if (shrinkage) opts.shrinkage = ShrinkageSettings{};
    DicReport report;
    {
        py::gil_scoped_release release;
        report = scan_q(panel, WeightMatrix(weights), prior, cfg, q_list, opts);
    }
    return io::dic_report_to_json(report).dump();
}

py::dict summarize_trace_py(const std::string& name, const std::vector<double>& values) {
    const auto s = summarize_trace(name, values);
    py::dict out;
    out["name"] = s.name;
    out["mean"] = s.mean;
    out["median"] = s.median;
    out["lo"] = s.lo;
    out["hi"] = s.hi;
    return out;
}

}  // namespace

PYBIND11_MODULE(_logarch, m) {
    m.doc() = "Spatiotemporal log-ARCH estimation";
    py::register_exception<Error>(m, "LogarchError", PyExc_ValueError);

    m.def("mixture_table", [] {
        const auto& t = mixture_table();
        py::dict out;
        out["p"] = std::vector<double>(t.p.begin(), t.p.end());
        out["mu"] = std::vector<double>(t.mu.begin(), t.mu.end());
        out["sigma2"] = std::vector<double>(t.sigma2.begin(), t.sigma2.end());
        return out;
    });
    m.def("log_chi2_density", py::vectorize([](double x) { return log_chi2_density(x); }), py::arg("x"));
    m.def("mixture_density", py::vectorize([](double x) { return mixture_density(x); }), py::arg("x"));

    m.def("queen_contiguity", [](int rows, int cols) { return queen_contiguity(rows, cols).matrix(); },
          py::arg("rows"), py::arg("cols"));
    m.def("row_normalize", [](const Eigen::MatrixXd& w) { return row_normalize(WeightMatrix(w)).matrix(); },
          py::arg("weights"));
    m.def("correlation_network", [](const Eigen::MatrixXd& s, double cap) { return correlation_network(s, cap).matrix(); },
          py::arg("series"), py::arg("cap") = 1e6);
    m.def("log_squared", [](const Eigen::MatrixXd& y, double floor) {
        return log_squared_transform(PanelData{y, Eigen::VectorXd::Ones(y.rows()), {}}, floor).ystar;
    }, py::arg("y"), py::arg("floor") = 1e-12);

    m.def("simulate", &simulate_py, py::arg("periods") = 100, py::arg("seed") = 1, py::arg("rows") = 7,
          py::arg("cols") = 7, py::arg("factors") = 2, py::arg("rho") = 0.16, py::arg("gamma") = 0.15,
          py::arg("delta") = 0.2, py::arg("beta") = -2.0, py::arg("burn_in_periods") = 200);
    m.def("fit", &fit_py, py::arg("y"), py::arg("y0"), py::arg("x"), py::arg("weights"), py::arg("q") = 2,
          py::arg("iterations") = 100000, py::arg("burn_in") = 20000, py::arg("thin") = 1, py::arg("seed") = 1,
          py::arg("rho_step") = 0.05, py::arg("shrinkage") = false, py::arg("tau2_rule") = "conjugate",
          py::arg("prior_json") = "", py::arg("enforce_stability") = true);
    m.def("select", &select_py, py::arg("y"), py::arg("y0"), py::arg("x"), py::arg("weights"), py::arg("q_list"),
          py::arg("iterations") = 100000, py::arg("burn_in") = 20000, py::arg("thin") = 1, py::arg("seed") = 1,
          py::arg("jobs") = 1, py::arg("shrinkage") = false, py::arg("prior_json") = "");
    m.def("summarize_trace", &summarize_trace_py, py::arg("name"), py::arg("values"));
}
