#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "cfrule/datasets.hpp"
#include "cfrule/extractor.hpp"
#include "cfrule/rule.hpp"
#include "cfrule/trainer.hpp"

namespace cfrule {

/// Fraction of instances whose exact-match rule label differs from the true
/// label. Zero for an empty sample.
double rule_error(const RuleSet& rs, std::span<const Instance> data);
double rule_error(const RuleSet& rs, const Dataset& ds);

/// Training and extraction settings for one learning run.
struct LearnerConfig {
    TrainConfig train;
    ExtractionConfig extract;
    /// Pick the extraction threshold from kCandidateThresholds on the
    /// training data instead of using extract.threshold.
    bool auto_threshold = false;
};

struct LearnedRules {
    CfModel model;
    TrainTrace trace;
    bool converged = false;
    double threshold = 0.5;
    Extraction extraction;
};

/// Initialise (random or MCRO, per cfg.train.init_mode), train and extract.
LearnedRules learn_rules(std::span<const Instance> train, std::size_t dim, std::size_t channels,
                         const LearnerConfig& cfg, std::uint64_t seed);

struct FoldResult {
    std::size_t repeat = 0;
    std::size_t fold = 0;
    std::vector<std::size_t> train_ids;
    std::vector<std::size_t> test_ids;
    double threshold = 0.5;
    RuleSet rules;
    double train_error = 0.0;
    double test_error = 0.0;
    std::size_t epochs = 0;
    bool converged = false;
};

struct EvalReport {
    double train_error_rate = 0.0;
    double test_error_rate = 0.0;
    std::vector<FoldResult> folds;
    /// Rule set evaluated, for single-rule-set reports.
    RuleSet rules;
};

/// Two-fold cross-validation repeated `repeats` times with fresh splits and
/// fresh initial weights. Each half trains a model which is tested on the
/// other half; rates are averaged over all 2 * repeats folds.
EvalReport cross_validate(const Dataset& ds, std::size_t channels, const LearnerConfig& cfg,
                          std::size_t repeats, std::uint64_t seed, std::size_t threads = 0);

inline constexpr std::array<double, 3> kSignificanceLevels{0.05, 0.025, 0.01};

struct TTestResult {
    double t_value = 0.0;
    std::size_t degrees_of_freedom = 0;
    /// Levels from kSignificanceLevels whose one-sided critical value t exceeds.
    std::vector<double> significant_at;

    bool significant(double alpha) const;
};

/// One-sided upper critical value of Student's t. Table covers df 1..200;
/// larger df use the df = 200 row.
double t_critical(std::size_t df, double alpha);

/// Pooled-variance two-sample t statistic for mean(b) > mean(a).
TTestResult t_test_one_sided(std::span<const double> a, std::span<const double> b);

struct ComparisonConfig {
    std::size_t trials = 25;
    std::size_t train_size = 100;
    std::size_t test_size = 100;
    std::size_t dim = 20;
    std::size_t channels = 3;
    LearnerConfig learner;
    std::uint64_t seed = 1;
    std::size_t threads = 0;
};

struct StrategyOutcome {
    std::vector<double> train_errors;
    std::vector<double> test_errors;
    /// Trials whose extracted premises equal the task's premises.
    std::size_t exact_recoveries = 0;

    double mean_train() const;
    double mean_test() const;
};

struct ComparisonReport {
    StrategyOutcome mcro;
    StrategyOutcome random;
    TTestResult train;  ///< a = MCRO, b = random start
    TTestResult test;
};

/// MCRO versus random start on a synthetic task. Trial i draws its own
/// training and test samples, shared by both strategies.
ComparisonReport mcro_comparison(const RuleSet& task, const ComparisonConfig& cfg);

/// Run `fn(i)` for i in [0, n) on up to `threads` workers (0 = hardware).
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

}  // namespace cfrule
