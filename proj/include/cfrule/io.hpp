#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

#include <json.hpp>

#include "cfrule/datasets.hpp"
#include "cfrule/eval.hpp"
#include "cfrule/extractor.hpp"
#include "cfrule/mcro.hpp"
#include "cfrule/model.hpp"
#include "cfrule/rule.hpp"
#include "cfrule/trainer.hpp"

// File formats. Everything is plain text: JSON for models, rules and reports,
// CSV for datasets, traces and regression coefficients. Doubles are written
// in shortest round-trip form so repeated runs give identical bytes.
namespace cfrule::io {

using json = nlohmann::ordered_json;

inline constexpr int kModelFormatVersion = 1;

std::string format_double(double v);

/// {"version":1,"dim":d,"channels":[{"u":..,"bias":..,"w":[..]}]}
json model_to_json(const CfModel& m);
CfModel model_from_json(const json& j);
void save_model(const std::filesystem::path& path, const CfModel& m);
CfModel load_model(const std::filesystem::path& path);

/// [{"pos":[..],"neg":[..],"cf":..}] with 0-based feature indices.
json rules_to_json(const RuleSet& rs);
RuleSet rules_from_json(const json& j, std::size_t dim);
void save_rules(const std::filesystem::path& path, const RuleSet& rs);
RuleSet load_rules(const std::filesystem::path& path, std::size_t dim);
/// Largest referenced index + 1 in a rule file, without validating it.
std::size_t rules_min_dim(const json& j);

/// One rule per line in the IF ... THEN form.
std::string rules_to_text(const RuleSet& rs, std::span<const std::string> feature_names);

/// Header: feature names then "label"; rows: feature values then 1/0.
void write_dataset_csv(std::ostream& out, const Dataset& ds);
Dataset read_dataset_csv(std::istream& in, const std::string& provenance = "csv");
Dataset load_dataset_csv(const std::filesystem::path& path);

/// Columns epoch, mse, then w_j_i for every channel j (1-based) and weight i
/// (0 = bias) when snapshots were recorded; cells are empty on epochs without
/// a snapshot.
void write_trace_csv(std::ostream& out, const TrainTrace& trace);

/// Columns index, b (0..1 space), c (bipolar space).
void write_coefficients_csv(std::ostream& out, const RegressionFit& fit);

json extraction_diagnostics_to_json(const Extraction& ex);
json report_to_json(const EvalReport& report);
json comparison_to_json(const ComparisonReport& report);

/// Two-row table in the layout of the MCRO / random-start comparison.
std::string comparison_table(const ComparisonReport& report);

}  // namespace cfrule::io
