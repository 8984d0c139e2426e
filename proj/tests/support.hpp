#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "cfrule/model.hpp"
#include "cfrule/random.hpp"
#include "cfrule/rule.hpp"

// Shared generators and oracles for the unit tests.
namespace testing {

inline std::vector<double> bipolar(cfrule::Rng& rng, std::size_t d)
{
    std::vector<double> x(d);
    for (auto& v : x) v = rng.sign();
    return x;
}

inline cfrule::Instance bipolar_instance(cfrule::Rng& rng, std::size_t d, bool label = false)
{
    return {bipolar(rng, d), label};
}

/// Random rule over `d` features with 1..max_lits antecedents.
inline cfrule::Rule random_rule(cfrule::Rng& rng, std::size_t d, std::size_t max_lits, double cf)
{
    std::vector<std::size_t> idx(d);
    std::iota(idx.begin(), idx.end(), 0);
    rng.shuffle(idx);
    const std::size_t n = 1 + rng.index(std::min(max_lits, d));
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < n; ++i) (rng.sign() > 0 ? pos : neg).push_back(idx[i]);
    return cfrule::Rule(pos, neg, cf);
}

/// Random rule set with no rule subsuming another and no repeated premise.
inline cfrule::RuleSet random_ruleset(cfrule::Rng& rng, std::size_t d, std::size_t max_rules,
                                      std::size_t max_lits, double cf_lo = 0.2)
{
    const std::size_t want = 1 + rng.index(max_rules);
    std::vector<cfrule::Rule> rules;
    for (std::size_t tries = 0; rules.size() < want && tries < 100; ++tries) {
        auto r = random_rule(rng, d, max_lits, rng.uniform(cf_lo, 1.0));
        const bool clash = std::any_of(rules.begin(), rules.end(), [&](const cfrule::Rule& o) {
            return o.same_premise(r) || o.subsumed_by(r) || r.subsumed_by(o);
        });
        if (!clash) rules.push_back(std::move(r));
    }
    return cfrule::RuleSet(std::move(rules), d);
}

/// |a - b| relative to the larger magnitude, with a floor so that two values
/// that are both essentially zero compare as equal.
inline double relative_error(double a, double b)
{
    return std::abs(a - b) / std::max({1e-6, std::abs(a), std::abs(b)});
}

}  // namespace testing
