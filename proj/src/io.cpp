#include "logarch/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace logarch::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const auto pos = text.find('\n', start);
        const auto line = text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
        out.push_back(line);
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

bool try_parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

double parse_number(std::string_view s, std::size_t line, const char* what) {
    double v = 0.0;
    if (!try_parse_double(s, v)) {
        throw Error("line " + std::to_string(line) + ": non-numeric " + what + " '" + std::string(s) + "'");
    }
    return v;
}

long parse_index(std::string_view s, std::size_t line, const char* what) {
    s = trim(s);
    long v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw Error("line " + std::to_string(line) + ": invalid " + what + " '" + std::string(s) + "'");
    }
    return v;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error("cannot write " + path.string());
    os << text;
    if (!os) throw Error("failed writing " + path.string());
}

PanelFile parse_panel_csv_text(std::string_view text) {
    const auto lines = lines_of(text);
    if (lines.empty() || trim(lines.front()).empty()) throw Error("panel: empty file");
    const auto header = split(lines.front());
    if (header.size() < 3 || header[0] != "unit" || header[1] != "time" || header[2] != "y") {
        throw Error("line 1: panel header must start with unit,time,y");
    }
    PanelFile out;
    for (std::size_t c = 3; c < header.size(); ++c) out.covariate_names.emplace_back(header[c]);
    const std::size_t k = out.covariate_names.size();

    struct Row {
        double y;
        std::vector<double> x;
    };
    std::map<std::string, std::map<long, Row>> cells;
    long max_time = -1;
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        const std::size_t line_no = ln + 1;
        if (trim(lines[ln]).empty()) continue;
        const auto f = split(lines[ln]);
        if (f.size() != header.size() && !(f.size() == 3 && k > 0)) {
            throw Error("line " + std::to_string(line_no) + ": expected " + std::to_string(header.size()) +
                        " fields, found " + std::to_string(f.size()));
        }
        const std::string unit(f[0]);
        if (unit.empty()) throw Error("line " + std::to_string(line_no) + ": empty unit id");
        const long time = parse_index(f[1], line_no, "time");
        if (time < 0) throw Error("line " + std::to_string(line_no) + ": negative time");
        Row row;
        row.y = parse_number(f[2], line_no, "y");
        if (time > 0) {
            if (f.size() != header.size()) {
                throw Error("line " + std::to_string(line_no) + ": covariates missing for time " + std::to_string(time));
            }
            for (std::size_t c = 0; c < k; ++c) row.x.push_back(parse_number(f[3 + c], line_no, "covariate"));
        }
        auto& unit_cells = cells[unit];
        if (!unit_cells.emplace(time, std::move(row)).second) {
            throw Error("line " + std::to_string(line_no) + ": duplicate row for unit " + unit + ", time " +
                        std::to_string(time));
        }
        max_time = std::max(max_time, time);
    }
    if (cells.empty()) throw Error("panel: no data rows");
    if (max_time < 1) throw Error("panel: need time 0 and at least one later period");

    const auto n = static_cast<Eigen::Index>(cells.size());
    const Eigen::Index periods = max_time;
    PanelData& p = out.panel;
    p.y.resize(n, periods);
    p.y0.resize(n);
    if (k > 0) p.x.assign(static_cast<std::size_t>(periods), Eigen::MatrixXd(n, static_cast<Eigen::Index>(k)));
    Eigen::Index i = 0;
    for (const auto& [unit, rows] : cells) {
        out.unit_ids.push_back(unit);
        for (long t = 0; t <= max_time; ++t) {
            const auto it = rows.find(t);
            if (it == rows.end()) {
                throw Error("panel: missing cell for unit " + unit + ", time " + std::to_string(t));
            }
            if (t == 0) {
                p.y0(i) = it->second.y;
                continue;
            }
            p.y(i, t - 1) = it->second.y;
            for (std::size_t c = 0; c < k; ++c) {
                p.x[static_cast<std::size_t>(t - 1)](i, static_cast<Eigen::Index>(c)) = it->second.x[c];
            }
        }
        ++i;
    }
    return out;
}

PanelFile parse_panel_csv(const std::filesystem::path& path) {
    try {
        return parse_panel_csv_text(read_text(path));
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::vector<std::string> default_unit_ids(Eigen::Index n) {
    const int width = std::max(3, static_cast<int>(std::to_string(n).size()));
    std::vector<std::string> ids;
    for (Eigen::Index i = 0; i < n; ++i) {
        std::ostringstream os;
        os << 'u' << std::setw(width) << std::setfill('0') << (i + 1);
        ids.push_back(os.str());
    }
    return ids;
}

void write_panel_csv(const std::filesystem::path& path, const PanelData& panel, const std::vector<std::string>& unit_ids,
                     const std::vector<std::string>& covariate_names) {
    panel.validate();
    const auto n = panel.units();
    const auto k = panel.covariates();
    if (static_cast<Eigen::Index>(unit_ids.size()) != n) throw Error("write_panel_csv: unit id count mismatch");
    std::ostringstream os;
    os << "unit,time,y";
    for (Eigen::Index c = 0; c < k; ++c) {
        os << ',' << (static_cast<std::size_t>(c) < covariate_names.size() ? covariate_names[static_cast<std::size_t>(c)]
                                                                           : "x" + std::to_string(c + 1));
    }
    os << '\n';
    for (Eigen::Index i = 0; i < n; ++i) {
        os << unit_ids[static_cast<std::size_t>(i)] << ",0," << format_double(panel.y0(i));
        for (Eigen::Index c = 0; c < k; ++c) os << ',';
        os << '\n';
        for (Eigen::Index t = 0; t < panel.periods(); ++t) {
            os << unit_ids[static_cast<std::size_t>(i)] << ',' << (t + 1) << ',' << format_double(panel.y(i, t));
            for (Eigen::Index c = 0; c < k; ++c) os << ',' << format_double(panel.x[static_cast<std::size_t>(t)](i, c));
            os << '\n';
        }
    }
    write_text(path, os.str());
}

WeightsFormat weights_format_from_string(const std::string& name) {
    if (name == "auto") return WeightsFormat::Auto;
    if (name == "dense") return WeightsFormat::Dense;
    if (name == "edges") return WeightsFormat::EdgeList;
    throw Error("unknown weights format '" + name + "' (expected auto, dense or edges)");
}

Eigen::MatrixXd read_weights_csv(const std::filesystem::path& path, Eigen::Index units, WeightsFormat format) {
    const std::string text = read_text(path);
    std::vector<std::string_view> lines;
    for (auto l : lines_of(text)) {
        if (!trim(l).empty()) lines.push_back(l);
    }
    if (lines.empty()) throw Error(path.string() + ": empty weights file");
    const auto first = split(lines.front());
    const bool edge_header = first.size() == 3 && first[0] == "i" && first[1] == "j" && first[2] == "weight";
    if (format == WeightsFormat::Auto) format = edge_header ? WeightsFormat::EdgeList : WeightsFormat::Dense;

    if (format == WeightsFormat::Dense) {
        const auto n = static_cast<Eigen::Index>(lines.size());
        if (units > 0 && n != units) {
            throw Error(path.string() + ": dense weights have " + std::to_string(n) + " rows, expected " +
                        std::to_string(units));
        }
        Eigen::MatrixXd m(n, n);
        for (Eigen::Index r = 0; r < n; ++r) {
            const auto f = split(lines[static_cast<std::size_t>(r)]);
            if (static_cast<Eigen::Index>(f.size()) != n) {
                throw Error(path.string() + ": line " + std::to_string(r + 1) + " has " + std::to_string(f.size()) +
                            " columns, expected " + std::to_string(n));
            }
            for (Eigen::Index c = 0; c < n; ++c) {
                m(r, c) = parse_number(f[static_cast<std::size_t>(c)], static_cast<std::size_t>(r + 1), "weight");
            }
        }
        return m;
    }

    if (units < 1) throw Error(path.string() + ": edge list needs the number of units");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(units, units);
    for (std::size_t ln = edge_header ? 1 : 0; ln < lines.size(); ++ln) {
        const auto f = split(lines[ln]);
        if (f.size() != 3) throw Error(path.string() + ": line " + std::to_string(ln + 1) + " is not i,j,weight");
        const long i = parse_index(f[0], ln + 1, "row index");
        const long j = parse_index(f[1], ln + 1, "column index");
        if (i < 0 || j < 0 || i >= units || j >= units) {
            throw Error(path.string() + ": line " + std::to_string(ln + 1) + " index out of range");
        }
        m(i, j) = parse_number(f[2], ln + 1, "weight");
    }
    return m;
}

void write_weights_csv(const std::filesystem::path& path, const WeightMatrix& weights) {
    std::ostringstream os;
    const auto& m = weights.matrix();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            if (c) os << ',';
            os << format_double(m(r, c));
        }
        os << '\n';
    }
    write_text(path, os.str());
}

void write_draws_csv(const std::filesystem::path& path, const PosteriorDraws& draws) {
    const auto names = draws.parameter_names();
    std::vector<std::vector<double>> cols;
    for (const auto& n : names) cols.push_back(draws.parameter(n));
    std::ostringstream os;
    os << "iteration";
    for (const auto& n : names) os << ',' << n;
    os << '\n';
    for (std::size_t g = 0; g < draws.size(); ++g) {
        os << draws.iteration[g];
        for (const auto& c : cols) os << ',' << format_double(c[g]);
        os << '\n';
    }
    write_text(path, os.str());
}

DrawTable read_draws_csv(const std::filesystem::path& path) {
    const std::string text = read_text(path);
    const auto lines = lines_of(text);
    if (lines.empty()) throw Error(path.string() + ": empty draws file");
    const auto header = split(lines.front());
    if (header.empty() || header[0] != "iteration") throw Error(path.string() + ": header must start with iteration");
    DrawTable t;
    for (std::size_t c = 1; c < header.size(); ++c) t.names.emplace_back(header[c]);
    t.columns.resize(t.names.size());
    for (std::size_t ln = 1; ln < lines.size(); ++ln) {
        if (trim(lines[ln]).empty()) continue;
        const auto f = split(lines[ln]);
        if (f.size() != header.size()) throw Error(path.string() + ": line " + std::to_string(ln + 1) + " has the wrong width");
        t.iteration.push_back(parse_index(f[0], ln + 1, "iteration"));
        for (std::size_t c = 1; c < f.size(); ++c) t.columns[c - 1].push_back(parse_number(f[c], ln + 1, "value"));
    }
    return t;
}

void write_volatility_csv(const std::filesystem::path& path, const VolatilityField& field,
                          const std::vector<std::string>& unit_ids) {
    if (static_cast<Eigen::Index>(unit_ids.size()) != field.median.rows()) {
        throw Error("write_volatility_csv: unit id count mismatch");
    }
    std::ostringstream os;
    os << "unit,time,median,lo,hi\n";
    for (Eigen::Index i = 0; i < field.median.rows(); ++i) {
        for (Eigen::Index t = 0; t < field.median.cols(); ++t) {
            os << unit_ids[static_cast<std::size_t>(i)] << ',' << (t + 1) << ',' << format_double(field.median(i, t))
               << ',' << format_double(field.lo(i, t)) << ',' << format_double(field.hi(i, t)) << '\n';
        }
    }
    write_text(path, os.str());
}

namespace {

using nlohmann::json;

Eigen::VectorXd vector_from_json(const json& j) {
    if (j.is_number()) return Eigen::VectorXd::Constant(1, j.get<double>());
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// A scalar c becomes the 1x1 matrix [c] (broadcast later to c*I where allowed).
Eigen::MatrixXd matrix_from_json(const json& j) {
    if (j.is_number()) return Eigen::MatrixXd::Constant(1, 1, j.get<double>());
    const auto rows = j.get<std::vector<std::vector<double>>>();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), rows.empty() ? 0 : static_cast<Eigen::Index>(rows[0].size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (static_cast<Eigen::Index>(rows[r].size()) != m.cols()) throw Error("prior: ragged matrix");
        for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
    return m;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

PriorSpec prior_from_json(const json& j) {
    static const std::set<std::string> known{"b_phi", "B_phi", "b_beta", "B_beta", "b_lambda", "B_lambda",
                                             "rho_support", "enforce_stability"};
    for (const auto& [key, _] : j.items()) {
        if (!known.count(key)) throw Error("prior: unknown field '" + key + "'");
    }
    PriorSpec p;
    try {
        if (j.contains("b_phi")) {
            const Eigen::VectorXd v = vector_from_json(j.at("b_phi"));
            p.phi_mean = v.size() == 1 ? Eigen::Vector2d::Constant(v(0)) : Eigen::Vector2d(v);
        }
        if (j.contains("B_phi")) {
            const Eigen::MatrixXd m = matrix_from_json(j.at("B_phi"));
            p.phi_cov = m.size() == 1 ? Eigen::Matrix2d(m(0, 0) * Eigen::Matrix2d::Identity()) : Eigen::Matrix2d(m);
        }
        if (j.contains("b_beta")) p.beta_mean = vector_from_json(j.at("b_beta"));
        if (j.contains("B_beta")) p.beta_cov = matrix_from_json(j.at("B_beta"));
        if (j.contains("b_lambda")) p.lambda_mean = vector_from_json(j.at("b_lambda"));
        if (j.contains("B_lambda")) p.lambda_cov = matrix_from_json(j.at("B_lambda"));
        if (j.contains("rho_support")) {
            const auto v = j.at("rho_support").get<std::vector<double>>();
            if (v.size() != 2) throw Error("prior: rho_support must have two entries");
            p.rho_support = std::make_pair(v[0], v[1]);
        }
        if (j.contains("enforce_stability")) p.enforce_stability = j.at("enforce_stability").get<bool>();
    } catch (const json::exception& e) {
        throw Error(std::string("prior: ") + e.what());
    }
    // A 1x1 beta covariance broadcasts like lambda.
    if (p.beta_cov.size() == 1 && p.beta_mean.size() > 1) {
        p.beta_cov = p.beta_cov(0, 0) * Eigen::MatrixXd::Identity(p.beta_mean.size(), p.beta_mean.size());
    }
    return p;
}

json prior_to_json(const PriorSpec& p) {
    json j;
    j["b_phi"] = vector_to_json(p.phi_mean);
    j["B_phi"] = matrix_to_json(p.phi_cov);
    j["b_beta"] = vector_to_json(p.beta_mean);
    j["B_beta"] = matrix_to_json(p.beta_cov);
    j["b_lambda"] = vector_to_json(p.lambda_mean);
    j["B_lambda"] = matrix_to_json(p.lambda_cov);
    if (p.rho_support) j["rho_support"] = {p.rho_support->first, p.rho_support->second};
    j["enforce_stability"] = p.enforce_stability;
    return j;
}

PriorSpec read_prior_json(const std::filesystem::path& path) {
    try {
        return prior_from_json(json::parse(read_text(path)));
    } catch (const json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

json manifest_to_json(const RunManifest& m) {
    return json{{"seed", m.seed},
                {"factors", m.factors},
                {"shrinkage", m.shrinkage},
                {"tau2_rule", m.tau2_rule},
                {"iterations", m.iterations},
                {"burn_in", m.burn_in},
                {"thin", m.thin},
                {"rho_step_initial", m.rho_step_initial},
                {"rho_step_final", m.rho_step_final},
                {"acceptance_burn_in", m.acceptance_burn_in},
                {"acceptance_rate", m.acceptance_rate},
                {"runtime_seconds", m.runtime_seconds},
                {"floored_cells", m.floored_cells}};
}

json truth_to_json(const SimTruth& t) {
    return json{{"rho", t.params.rho},
                {"gamma", t.params.gamma},
                {"delta", t.params.delta},
                {"beta", vector_to_json(t.beta)},
                {"loadings", matrix_to_json(t.loadings)},
                {"factors", matrix_to_json(t.factors)},
                {"hstar", matrix_to_json(t.hstar)},
                {"hstar_mean", t.hstar.size() ? t.hstar.mean() : 0.0}};
}

json dic_report_to_json(const DicReport& r) {
    json entries = json::array();
    for (const auto& e : r.entries) {
        json je{{"q", e.factors}, {"ok", e.ok}};
        if (e.ok) {
            je["dic"] = e.terms.dic;
            je["mean_loglik"] = e.terms.mean_loglik;
            je["plugin_loglik"] = e.terms.plugin_loglik;
            je["mean_deviance"] = -2.0 * e.terms.mean_loglik;
            je["plugin_deviance"] = -2.0 * e.terms.plugin_loglik;
            je["p_d"] = e.terms.p_d;
            je["manifest"] = manifest_to_json(e.manifest);
        } else {
            je["error"] = e.error;
        }
        entries.push_back(je);
    }
    json j{{"entries", entries}};
    j["selected_q"] = r.selected_q ? json(*r.selected_q) : json(nullptr);
    return j;
}

std::string dic_table(const DicReport& r) {
    std::ostringstream os;
    os << std::left << std::setw(6) << "q" << std::right << std::setw(14) << "DIC" << std::setw(14) << "mean dev"
       << std::setw(14) << "plugin dev" << std::setw(10) << "pD" << '\n';
    os << std::fixed << std::setprecision(3);
    for (const auto& e : r.entries) {
        os << std::left << std::setw(6) << (std::to_string(e.factors) + (r.selected_q == e.factors ? "*" : ""))
           << std::right;
        if (!e.ok) {
            os << "  failed: " << e.error << '\n';
            continue;
        }
        os << std::setw(14) << e.terms.dic << std::setw(14) << -2.0 * e.terms.mean_loglik << std::setw(14)
           << -2.0 * e.terms.plugin_loglik << std::setw(10) << e.terms.p_d << '\n';
    }
    return os.str();
}

std::string summary_table(const std::vector<ParameterSummary>& rows) {
    std::ostringstream os;
    constexpr int w = 22;
    os << std::left << std::setw(8) << "" << std::right;
    for (const auto& r : rows) os << std::setw(w) << r.name;
    os << '\n' << std::left << std::setw(8) << "median" << std::right << std::fixed << std::setprecision(3);
    for (const auto& r : rows) os << std::setw(w) << r.median;
    os << '\n' << std::left << std::setw(8) << "95% CI" << std::right;
    for (const auto& r : rows) {
        std::ostringstream ci;
        ci << std::fixed << std::setprecision(3) << '[' << r.lo << ',' << r.hi << ']';
        os << std::setw(w) << ci.str();
    }
    os << '\n';
    return os.str();
}

}  // namespace logarch::io
