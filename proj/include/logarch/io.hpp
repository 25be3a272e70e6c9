#pragma once

#include "logarch/core.hpp"
#include "logarch/inference.hpp"
#include "logarch/posterior.hpp"
#include "logarch/sampler.hpp"
#include "logarch/selection.hpp"
#include "logarch/simulate.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace logarch::io {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// A panel together with the sorted unit identifiers it was read with.
struct PanelFile {
    PanelData panel;
    std::vector<std::string> unit_ids;
    std::vector<std::string> covariate_names;
};

/// Long format, header `unit,time,y[,x1..xk]`. Time 0 supplies Y0; units are
/// ordered lexicographically by id.
PanelFile parse_panel_csv(const std::filesystem::path& path);
PanelFile parse_panel_csv_text(std::string_view text);

void write_panel_csv(const std::filesystem::path& path, const PanelData& panel,
                     const std::vector<std::string>& unit_ids, const std::vector<std::string>& covariate_names = {});

/// Zero-padded ids u001.. so that lexicographic and numeric order agree.
std::vector<std::string> default_unit_ids(Eigen::Index n);

enum class WeightsFormat { Auto, Dense, EdgeList };
WeightsFormat weights_format_from_string(const std::string& name);

/// Dense n x n CSV without header, or an `i,j,weight` edge list with 0-based
/// indices (header optional). `units` sizes the edge list.
Eigen::MatrixXd read_weights_csv(const std::filesystem::path& path, Eigen::Index units,
                                 WeightsFormat format = WeightsFormat::Auto);
void write_weights_csv(const std::filesystem::path& path, const WeightMatrix& weights);

void write_draws_csv(const std::filesystem::path& path, const PosteriorDraws& draws);

struct DrawTable {
    std::vector<std::string> names;           // without the leading iteration column
    std::vector<long> iteration;
    std::vector<std::vector<double>> columns;  // one per name
};
DrawTable read_draws_csv(const std::filesystem::path& path);

/// unit,time,median,lo,hi with time running 1..T.
void write_volatility_csv(const std::filesystem::path& path, const VolatilityField& field,
                          const std::vector<std::string>& unit_ids);

PriorSpec prior_from_json(const nlohmann::json& j);
nlohmann::json prior_to_json(const PriorSpec& prior);
PriorSpec read_prior_json(const std::filesystem::path& path);

nlohmann::json manifest_to_json(const RunManifest& manifest);
nlohmann::json truth_to_json(const SimTruth& truth);
nlohmann::json dic_report_to_json(const DicReport& report);

/// Plain-text table of a DIC scan, one row per q.
std::string dic_table(const DicReport& report);

/// Parameter table with median and 95% interval rows.
std::string summary_table(const std::vector<ParameterSummary>& rows);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace logarch::io
