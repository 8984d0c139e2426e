#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cfrule/model.hpp"
#include "cfrule/rule.hpp"

namespace cfrule {

/// The only thresholds considered by automatic selection, ascending.
inline constexpr std::array<double, 4> kCandidateThresholds{0.35, 0.5, 0.65, 0.8};

struct ExtractionConfig {
    double threshold = 0.5;
    /// Rules whose CF falls below this are discarded.
    double low_cf_cutoff = 0.1;
    /// select_threshold accepts a candidate whose error is within this much
    /// of the best candidate's error.
    double selection_slack = 0.02;

    /// Throws std::invalid_argument unless 0 < threshold < 1.
    void validate() const;
};

struct ExtractionDiagnostic {
    std::size_t channel = 0;
    std::string reason;
};

struct Extraction {
    RuleSet rules;
    /// Channel each surviving rule came from, parallel to rules.rules.
    std::vector<std::size_t> source_channels;
    std::vector<ExtractionDiagnostic> diagnostics;
    /// Number of input weights examined; grows as k * d.
    std::size_t weights_visited = 0;
};

/// Threshold one channel: input weights are divided by the largest |w_i|
/// (bias excluded), then w_i >= r gives x_i and w_i <= -r gives NOT x_i.
/// The rule CF is the channel's output weight. Channels with no nonzero input
/// weight or a zero output weight yield nothing.
std::optional<Rule> extract_channel(const Channel& ch, double r);

/// extract_channel over every channel, then drop low-CF rules, collapse
/// identical premises (keeping the highest CF) and remove rules whose premise
/// is a proper superset of another surviving premise.
Extraction extract_rules(const CfModel& m, const ExtractionConfig& cfg);

struct ThresholdSelection {
    double threshold = 0.5;
    /// Exact-match error for each entry of kCandidateThresholds.
    std::array<double, 4> errors{};
};

/// Sweep the candidate thresholds from high to low and return the highest one
/// whose rule error (on `validation` if given, else `train`) is within
/// cfg.selection_slack of the best candidate.
ThresholdSelection select_threshold_detailed(const CfModel& m, std::span<const Instance> train,
                                             std::optional<std::span<const Instance>> validation,
                                             const ExtractionConfig& cfg);

double select_threshold(const CfModel& m, std::span<const Instance> train,
                        std::optional<std::span<const Instance>> validation,
                        const ExtractionConfig& cfg);

}  // namespace cfrule
