#include "cfrule/rule.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace cfrule {

namespace {

void sort_unique(std::vector<std::size_t>& v)
{
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
}

}  // namespace

Rule::Rule(std::vector<std::size_t> positive, std::vector<std::size_t> negated, double cf)
    : positive_(std::move(positive)), negated_(std::move(negated)), cf_(cf)
{
    sort_unique(positive_);
    sort_unique(negated_);
    if (positive_.empty() && negated_.empty()) {
        throw std::invalid_argument("rule premise must not be empty");
    }
    std::vector<std::size_t> both;
    std::set_intersection(positive_.begin(), positive_.end(), negated_.begin(), negated_.end(),
                          std::back_inserter(both));
    if (!both.empty()) {
        throw std::invalid_argument("feature " + std::to_string(both.front()) +
                                    " is both a positive and a negated antecedent");
    }
    if (!(cf_ > 0.0 && cf_ <= 1.0)) {
        throw std::invalid_argument("rule CF must lie in (0, 1], got " + std::to_string(cf_));
    }
}

std::vector<Literal> Rule::literals() const
{
    std::vector<Literal> out;
    out.reserve(positive_.size() + negated_.size());
    for (auto i : positive_) out.push_back({i, false});
    for (auto i : negated_) out.push_back({i, true});
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t Rule::max_index() const
{
    std::size_t m = 0;
    if (!positive_.empty()) m = std::max(m, positive_.back());
    if (!negated_.empty()) m = std::max(m, negated_.back());
    return m;
}

bool Rule::same_premise(const Rule& other) const
{
    return positive_ == other.positive_ && negated_ == other.negated_;
}

bool Rule::subsumed_by(const Rule& other) const
{
    const auto mine = literals();
    const auto theirs = other.literals();
    return mine.size() > theirs.size() &&
           std::includes(mine.begin(), mine.end(), theirs.begin(), theirs.end());
}

RuleSet::RuleSet(std::vector<Rule> r, std::size_t d) : rules(std::move(r)), dim(d)
{
    validate();
}

void RuleSet::validate() const
{
    for (const auto& r : rules) {
        if (r.max_index() >= dim) {
            throw std::invalid_argument("rule references feature " + std::to_string(r.max_index()) +
                                        " but dimensionality is " + std::to_string(dim));
        }
    }
}

namespace {

std::vector<std::vector<Literal>> sorted_premises(const RuleSet& rs)
{
    std::vector<std::vector<Literal>> out;
    for (const auto& r : rs.rules) out.push_back(r.literals());
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

bool same_premises(const RuleSet& a, const RuleSet& b)
{
    return sorted_premises(a) == sorted_premises(b);
}

bool same_rules(const RuleSet& a, const RuleSet& b, double cf_tol)
{
    if (a.size() != b.size()) return false;
    std::vector<bool> used(b.size(), false);
    for (const auto& ra : a.rules) {
        bool found = false;
        for (std::size_t j = 0; j < b.size() && !found; ++j) {
            if (!used[j] && ra.same_premise(b.rules[j]) &&
                std::abs(ra.cf() - b.rules[j].cf()) <= cf_tol) {
                used[j] = true;
                found = true;
            }
        }
        if (!found) return false;
    }
    return true;
}

bool matches(const Rule& r, std::span<const double> x)
{
    if (r.max_index() >= x.size()) {
        throw std::out_of_range("rule references feature " + std::to_string(r.max_index()) +
                                " of a " + std::to_string(x.size()) + "-feature instance");
    }
    for (auto i : r.positive()) {
        if (x[i] != 1.0) return false;
    }
    for (auto i : r.negated()) {
        if (x[i] != -1.0) return false;
    }
    return true;
}

bool ruleset_label(const RuleSet& rs, std::span<const double> x)
{
    return std::any_of(rs.rules.begin(), rs.rules.end(),
                       [&](const Rule& r) { return matches(r, x); });
}

Channel encode_rule(const Rule& r, std::size_t dim)
{
    if (r.max_index() >= dim) {
        throw std::invalid_argument("rule does not fit dimensionality " + std::to_string(dim));
    }
    Channel ch;
    ch.u = r.cf();
    ch.bias = 1.0;
    ch.w.assign(dim, 0.0);
    for (auto i : r.positive()) ch.w[i] = 1.0;
    for (auto i : r.negated()) ch.w[i] = -1.0;
    return ch;
}

CfModel encode_ruleset(const RuleSet& rs)
{
    if (rs.empty()) throw std::invalid_argument("cannot encode an empty rule set");
    std::vector<Channel> channels;
    channels.reserve(rs.size());
    for (const auto& r : rs.rules) channels.push_back(encode_rule(r, rs.dim));
    return CfModel(rs.dim, std::move(channels));
}

std::vector<std::string> default_feature_names(std::size_t dim)
{
    std::vector<std::string> names;
    names.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) names.push_back("x" + std::to_string(i + 1));
    return names;
}

std::string to_text(const Rule& r, std::span<const std::string> feature_names)
{
    std::string out = "IF ";
    bool first = true;
    for (const auto& lit : r.literals()) {
        if (lit.index >= feature_names.size()) {
            throw std::out_of_range("no feature name for index " + std::to_string(lit.index));
        }
        if (!first) out += " AND ";
        if (lit.negated) out += "NOT ";
        out += feature_names[lit.index];
        first = false;
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", r.cf());
    out += " THEN class CF=";
    out += buf;
    return out;
}

std::string to_text(const Rule& r)
{
    return to_text(r, default_feature_names(r.max_index() + 1));
}

}  // namespace cfrule
