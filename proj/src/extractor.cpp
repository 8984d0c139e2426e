#include "cfrule/extractor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cfrule/eval.hpp"

namespace cfrule {

void ExtractionConfig::validate() const
{
    if (!(threshold > 0.0 && threshold < 1.0)) {
        throw std::invalid_argument("extraction threshold must lie in (0, 1)");
    }
}

namespace {

std::optional<Rule> extract_channel_counted(const Channel& ch, double r, std::size_t& visited)
{
    double scale = 0.0;
    for (double w : ch.w) scale = std::max(scale, std::abs(w));
    visited += ch.w.size();
    if (scale == 0.0 || ch.u <= 0.0) return std::nullopt;

    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < ch.w.size(); ++i) {
        const double w = ch.w[i] / scale;
        if (w >= r) {
            pos.push_back(i);
        } else if (w <= -r) {
            neg.push_back(i);
        }
    }
    visited += ch.w.size();
    if (pos.empty() && neg.empty()) return std::nullopt;
    return Rule(std::move(pos), std::move(neg), std::min(ch.u, 1.0));
}

}  // namespace

std::optional<Rule> extract_channel(const Channel& ch, double r)
{
    std::size_t visited = 0;
    return extract_channel_counted(ch, r, visited);
}

Extraction extract_rules(const CfModel& m, const ExtractionConfig& cfg)
{
    cfg.validate();
    Extraction out;
    out.rules.dim = m.dim();

    struct Candidate {
        Rule rule;
        std::size_t channel;
        bool alive = true;
    };
    std::vector<Candidate> candidates;
    for (std::size_t j = 0; j < m.size(); ++j) {
        const auto& ch = m.channel(j);
        auto rule = extract_channel_counted(ch, cfg.threshold, out.weights_visited);
        if (!rule) {
            out.diagnostics.push_back({j, ch.u <= 0.0 ? "dead channel: output weight is 0"
                                                      : "dead channel: all input weights are 0"});
            continue;
        }
        if (rule->cf() < cfg.low_cf_cutoff) {
            out.diagnostics.push_back({j, "low CF " + std::to_string(rule->cf()) + " below cutoff " +
                                              std::to_string(cfg.low_cf_cutoff) + ": " +
                                              to_text(*rule)});
            continue;
        }
        candidates.push_back({std::move(*rule), j});
    }

    for (std::size_t a = 0; a < candidates.size(); ++a) {
        for (std::size_t b = 0; b < candidates.size(); ++b) {
            if (a == b || !candidates[a].alive || !candidates[b].alive) continue;
            auto& ra = candidates[a];
            const auto& rb = candidates[b];
            if (ra.rule.same_premise(rb.rule)) {
                // Keep the higher CF; ties go to the earlier channel.
                if (ra.rule.cf() < rb.rule.cf() || (ra.rule.cf() == rb.rule.cf() && a > b)) {
                    ra.alive = false;
                    out.diagnostics.push_back(
                        {ra.channel, "duplicate of channel " + std::to_string(rb.channel)});
                }
            } else if (ra.rule.subsumed_by(rb.rule)) {
                ra.alive = false;
                out.diagnostics.push_back(
                    {ra.channel, "subsumed by the rule of channel " + std::to_string(rb.channel)});
            }
        }
    }

    for (auto& c : candidates) {
        if (!c.alive) continue;
        out.rules.rules.push_back(std::move(c.rule));
        out.source_channels.push_back(c.channel);
    }
    std::stable_sort(out.diagnostics.begin(), out.diagnostics.end(),
                     [](const auto& x, const auto& y) { return x.channel < y.channel; });
    return out;
}

ThresholdSelection select_threshold_detailed(const CfModel& m, std::span<const Instance> train,
                                             std::optional<std::span<const Instance>> validation,
                                             const ExtractionConfig& cfg)
{
    const auto data = validation ? *validation : train;
    ThresholdSelection sel;
    double best = 1.0;
    for (std::size_t c = 0; c < kCandidateThresholds.size(); ++c) {
        ExtractionConfig trial = cfg;
        trial.threshold = kCandidateThresholds[c];
        sel.errors[c] = rule_error(extract_rules(m, trial).rules, data);
        best = std::min(best, sel.errors[c]);
    }
    sel.threshold = kCandidateThresholds.front();
    for (std::size_t c = kCandidateThresholds.size(); c-- > 0;) {
        if (sel.errors[c] <= best + cfg.selection_slack) {
            sel.threshold = kCandidateThresholds[c];
            break;
        }
    }
    return sel;
}

double select_threshold(const CfModel& m, std::span<const Instance> train,
                        std::optional<std::span<const Instance>> validation,
                        const ExtractionConfig& cfg)
{
    return select_threshold_detailed(m, train, validation, cfg).threshold;
}

}  // namespace cfrule
