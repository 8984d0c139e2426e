#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cfrule/model.hpp"

namespace cfrule {

/// One antecedent: feature `index`, optionally negated.
struct Literal {
    std::size_t index = 0;
    bool negated = false;

    friend auto operator<=>(const Literal&, const Literal&) = default;
};

/// IF (positive antecedents) AND NOT (negated antecedents) THEN class, CF.
///
/// Antecedent lists are kept sorted and free of duplicates. A rule must have
/// at least one antecedent, the two lists must be disjoint, and 0 < cf <= 1.
class Rule {
public:
    Rule(std::vector<std::size_t> positive, std::vector<std::size_t> negated, double cf);

    const std::vector<std::size_t>& positive() const noexcept { return positive_; }
    const std::vector<std::size_t>& negated() const noexcept { return negated_; }
    double cf() const noexcept { return cf_; }

    /// All antecedents ordered by (index, negated).
    std::vector<Literal> literals() const;

    /// Largest referenced feature index.
    std::size_t max_index() const;

    /// Same antecedents, ignoring the CF.
    bool same_premise(const Rule& other) const;

    /// True if this premise is a proper superset of `other`'s, i.e. this rule
    /// can only fire when `other` fires too.
    bool subsumed_by(const Rule& other) const;

    friend bool operator==(const Rule&, const Rule&) = default;

private:
    std::vector<std::size_t> positive_;
    std::vector<std::size_t> negated_;
    double cf_;
};

struct RuleSet {
    std::vector<Rule> rules;
    std::size_t dim = 0;

    RuleSet() = default;
    RuleSet(std::vector<Rule> rules, std::size_t dim);

    bool empty() const noexcept { return rules.empty(); }
    std::size_t size() const noexcept { return rules.size(); }

    /// Throws std::invalid_argument if any antecedent index is >= dim.
    void validate() const;
};

/// Order-insensitive premise comparison of two rule sets (CFs ignored).
bool same_premises(const RuleSet& a, const RuleSet& b);

/// Order-insensitive comparison including CFs, within `cf_tol`.
bool same_rules(const RuleSet& a, const RuleSet& b, double cf_tol = 0.0);

/// x_i = 1 for every positive antecedent and x_i = -1 for every negated one.
bool matches(const Rule& r, std::span<const double> x);
inline bool matches(const Rule& r, const Instance& inst) { return matches(r, inst.x); }

/// True iff any rule matches. An empty rule set labels everything negative.
bool ruleset_label(const RuleSet& rs, std::span<const double> x);
inline bool ruleset_label(const RuleSet& rs, const Instance& inst)
{
    return ruleset_label(rs, inst.x);
}

/// Channel with bias 1, +1 on positive antecedents, -1 on negated ones, 0
/// elsewhere, and output weight equal to the rule CF. Its activation is 1 on
/// matching bipolar instances and 0 on all others.
Channel encode_rule(const Rule& r, std::size_t dim);

/// One encoded channel per rule. Throws on an empty rule set.
CfModel encode_ruleset(const RuleSet& rs);

/// Default feature names x1..xd.
std::vector<std::string> default_feature_names(std::size_t dim);

/// "IF x1 AND NOT x2 THEN class CF=0.90"
std::string to_text(const Rule& r, std::span<const std::string> feature_names);
std::string to_text(const Rule& r);

}  // namespace cfrule
