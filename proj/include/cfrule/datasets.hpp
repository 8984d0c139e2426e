#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cfrule/model.hpp"
#include "cfrule/rule.hpp"

namespace cfrule {

struct Dataset {
    std::vector<Instance> instances;
    std::vector<std::string> feature_names;
    std::string provenance;

    std::size_t dim() const noexcept { return feature_names.size(); }
    std::size_t size() const noexcept { return instances.size(); }
    std::size_t positives() const noexcept;

    /// Every instance must have dim() features, each in [-1, 1].
    void validate() const;
};

/// Rows `ids` of `ds`, in that order.
Dataset subset(const Dataset& ds, std::span<const std::size_t> ids);

/// The three-rule target concept over 20 inputs used for the synthetic
/// experiments:
///   x1 AND NOT x2 AND x7,  x1 AND NOT x4 AND x5,  x6 AND x11.
RuleSet table1_rules(double cf = 0.9);

/// n instances with features uniform on {-1, +1}, labelled by the rule set.
Dataset generate_synthetic(const RuleSet& rules, std::size_t n, std::size_t dim, std::uint64_t seed);

/// Sequence position numbering for the promoter data.
struct PromoterLayout {
    int first_position = -50;
    int last_position = 7;
    bool include_zero = false;
    /// One bit per base, in this order.
    std::string bases = "AGCT";

    std::vector<int> positions() const;
};

/// UCI promoter format: one instance per line, "class, name, sequence", where
/// class is + or -, separators may be commas and/or whitespace, and the
/// sequence is case-insensitive over {a, g, c, t}. Each position becomes four
/// bipolar bits named "@<pos>=<base>".
Dataset parse_promoters(std::istream& in, const PromoterLayout& layout = {},
                        const std::string& provenance = "promoters");
Dataset load_promoters(const std::filesystem::path& path, const PromoterLayout& layout = {});

/// Cut points for continuous attributes. Attributes without an entry are
/// split into `default_bins` equal-frequency bins computed from the data.
struct DiscretizationSpec {
    std::map<std::string, std::vector<double>> cuts;
    std::size_t default_bins = 2;

    /// ALBUMIN cut at 3.7, everything else equal-frequency.
    static DiscretizationSpec defaults();
};

/// UCI hepatitis layout: 20 comma-separated columns, class first (1 = DIE,
/// 2 = LIVE), '?' for missing values. DIE is the positive class. Categorical
/// attributes are one-hot bipolar, continuous ones are binned and then
/// one-hot; a missing value sets the attribute's whole group to 0.
Dataset parse_hepatitis(std::istream& in, const DiscretizationSpec& spec = DiscretizationSpec::defaults(),
                        const std::string& provenance = "hepatitis");
Dataset load_hepatitis(const std::filesystem::path& path,
                       const DiscretizationSpec& spec = DiscretizationSpec::defaults());

struct TwoFoldSplit {
    std::vector<std::size_t> first;   ///< ceil(n/2) indices
    std::vector<std::size_t> second;  ///< floor(n/2) indices
};

TwoFoldSplit split_indices(std::size_t n, std::uint64_t seed);
std::pair<Dataset, Dataset> split_two_fold(const Dataset& ds, std::uint64_t seed);

}  // namespace cfrule
