#include "cfrule/datasets.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "cfrule/random.hpp"

namespace cfrule {

std::size_t Dataset::positives() const noexcept
{
    return static_cast<std::size_t>(
        std::count_if(instances.begin(), instances.end(), [](const Instance& i) { return i.label; }));
}

void Dataset::validate() const
{
    for (std::size_t r = 0; r < instances.size(); ++r) {
        const auto& x = instances[r].x;
        if (x.size() != dim()) {
            throw std::invalid_argument("instance " + std::to_string(r) + " has " +
                                        std::to_string(x.size()) + " features, expected " +
                                        std::to_string(dim()));
        }
        for (double v : x) {
            if (!(v >= -1.0 && v <= 1.0)) {
                throw std::invalid_argument("instance " + std::to_string(r) +
                                            " has a feature outside [-1, 1]");
            }
        }
    }
}

Dataset subset(const Dataset& ds, std::span<const std::size_t> ids)
{
    Dataset out;
    out.feature_names = ds.feature_names;
    out.provenance = ds.provenance;
    out.instances.reserve(ids.size());
    for (auto id : ids) out.instances.push_back(ds.instances.at(id));
    return out;
}

RuleSet table1_rules(double cf)
{
    return RuleSet({Rule({0, 6}, {1}, cf), Rule({0, 4}, {3}, cf), Rule({5, 10}, {}, cf)}, 20);
}

Dataset generate_synthetic(const RuleSet& rules, std::size_t n, std::size_t dim, std::uint64_t seed)
{
    if (n == 0) throw std::invalid_argument("synthetic dataset needs at least one instance");
    if (dim == 0) throw std::invalid_argument("synthetic dataset needs at least one feature");
    for (const auto& r : rules.rules) {
        if (r.max_index() >= dim) {
            throw std::invalid_argument("rule references feature " + std::to_string(r.max_index() + 1) +
                                        " beyond dimensionality " + std::to_string(dim));
        }
    }
    Rng rng(seed);
    Dataset ds;
    ds.feature_names = default_feature_names(dim);
    ds.provenance = "synthetic(n=" + std::to_string(n) + ",d=" + std::to_string(dim) +
                    ",seed=" + std::to_string(seed) + ")";
    ds.instances.resize(n);
    for (auto& inst : ds.instances) {
        inst.x.resize(dim);
        for (auto& v : inst.x) v = rng.sign();
        inst.label = ruleset_label(rules, inst.x);
    }
    return ds;
}

std::vector<int> PromoterLayout::positions() const
{
    std::vector<int> out;
    for (int p = first_position; p <= last_position; ++p) {
        if (p == 0 && !include_zero) continue;
        out.push_back(p);
    }
    return out;
}

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string format_number(double v)
{
    std::array<char, 32> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string format_position(int p)
{
    return p > 0 ? "+" + std::to_string(p) : std::to_string(p);
}

}  // namespace

Dataset parse_promoters(std::istream& in, const PromoterLayout& layout, const std::string& provenance)
{
    const auto positions = layout.positions();
    const std::size_t length = positions.size();
    const std::size_t nb = layout.bases.size();

    Dataset ds;
    ds.provenance = provenance;
    for (int p : positions) {
        for (char b : layout.bases) {
            ds.feature_names.push_back("@" + format_position(p) + "=" +
                                       static_cast<char>(std::toupper(static_cast<unsigned char>(b))));
        }
    }

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string> tokens;
        std::string cur;
        for (char c : line) {
            if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
                if (!cur.empty()) tokens.push_back(std::move(cur));
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (!cur.empty()) tokens.push_back(std::move(cur));
        const std::string where = "promoter line " + std::to_string(lineno) + ": ";
        if (tokens.size() < 3) throw std::runtime_error(where + "expected class, name and sequence");

        Instance inst;
        if (tokens[0] == "+") {
            inst.label = true;
        } else if (tokens[0] == "-") {
            inst.label = false;
        } else {
            throw std::runtime_error(where + "class must be '+' or '-', got '" + tokens[0] + "'");
        }
        std::string seq;
        for (std::size_t t = 2; t < tokens.size(); ++t) seq += tokens[t];
        if (seq.size() != length) {
            throw std::runtime_error(where + "sequence has " + std::to_string(seq.size()) +
                                     " bases, expected " + std::to_string(length));
        }
        inst.x.assign(length * nb, -1.0);
        for (std::size_t p = 0; p < length; ++p) {
            const char base = static_cast<char>(std::toupper(static_cast<unsigned char>(seq[p])));
            std::size_t hit = nb;
            for (std::size_t b = 0; b < nb; ++b) {
                if (std::toupper(static_cast<unsigned char>(layout.bases[b])) == base) hit = b;
            }
            if (hit == nb) {
                throw std::runtime_error(where + "unknown base '" + std::string(1, seq[p]) +
                                         "' at offset " + std::to_string(p));
            }
            inst.x[p * nb + hit] = 1.0;
        }
        ds.instances.push_back(std::move(inst));
    }
    return ds;
}

Dataset load_promoters(const std::filesystem::path& path, const PromoterLayout& layout)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open promoter file " + path.string());
    return parse_promoters(in, layout, path.string());
}

DiscretizationSpec DiscretizationSpec::defaults()
{
    DiscretizationSpec spec;
    spec.cuts["ALBUMIN"] = {3.7};
    return spec;
}

namespace {

struct HepatitisAttribute {
    const char* name;
    bool continuous;
    std::array<const char*, 2> values;  // codes 1 and 2 for categorical attributes
};

constexpr std::array<HepatitisAttribute, 19> kHepatitisAttributes{{
    {"AGE", true, {}},
    {"SEX", false, {"male", "female"}},
    {"STEROID", false, {"no", "yes"}},
    {"ANTIVIRALS", false, {"no", "yes"}},
    {"FATIGUE", false, {"no", "yes"}},
    {"MALAISE", false, {"no", "yes"}},
    {"ANOREXIA", false, {"no", "yes"}},
    {"LIVER BIG", false, {"no", "yes"}},
    {"LIVER FIRM", false, {"no", "yes"}},
    {"SPLEEN PALPABLE", false, {"no", "yes"}},
    {"SPIDERS", false, {"no", "yes"}},
    {"ASCITES", false, {"no", "yes"}},
    {"VARICES", false, {"no", "yes"}},
    {"BILIRUBIN", true, {}},
    {"ALK PHOSPHATE", true, {}},
    {"SGOT", true, {}},
    {"ALBUMIN", true, {}},
    {"PROTIME", true, {}},
    {"HISTOLOGY", false, {"no", "yes"}},
}};

std::vector<double> equal_frequency_cuts(std::vector<double> values, std::size_t bins)
{
    std::vector<double> cuts;
    if (values.empty() || bins < 2) return cuts;
    std::sort(values.begin(), values.end());
    for (std::size_t q = 1; q < bins; ++q) {
        const double c = values[q * values.size() / bins];
        if (c > values.front() && (cuts.empty() || c > cuts.back())) cuts.push_back(c);
    }
    return cuts;
}

std::vector<std::string> bin_names(const std::string& attr, const std::vector<double>& cuts)
{
    std::vector<std::string> names;
    if (cuts.empty()) {
        names.push_back(attr + "=any");
        return names;
    }
    names.push_back(attr + "<" + format_number(cuts.front()));
    for (std::size_t c = 1; c < cuts.size(); ++c) {
        names.push_back(format_number(cuts[c - 1]) + "<=" + attr + "<" + format_number(cuts[c]));
    }
    names.push_back(attr + ">=" + format_number(cuts.back()));
    return names;
}

std::size_t bin_of(double v, const std::vector<double>& cuts)
{
    return static_cast<std::size_t>(std::upper_bound(cuts.begin(), cuts.end(), v) - cuts.begin());
}

}  // namespace

Dataset parse_hepatitis(std::istream& in, const DiscretizationSpec& spec, const std::string& provenance)
{
    constexpr std::size_t kColumns = kHepatitisAttributes.size() + 1;

    struct Row {
        bool label;
        std::array<std::optional<double>, kHepatitisAttributes.size()> values;
    };
    std::vector<Row> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(trim(f));
        const std::string where = "hepatitis line " + std::to_string(lineno) + ": ";
        if (fields.size() != kColumns) {
            throw std::runtime_error(where + "expected " + std::to_string(kColumns) + " columns, got " +
                                     std::to_string(fields.size()));
        }
        auto parse = [&](const std::string& s) -> std::optional<double> {
            if (s == "?") return std::nullopt;
            double v = 0.0;
            auto res = std::from_chars(s.data(), s.data() + s.size(), v);
            if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
                throw std::runtime_error(where + "malformed value '" + s + "'");
            }
            return v;
        };
        Row row{};
        const auto cls = parse(fields[0]);
        if (!cls || (*cls != 1.0 && *cls != 2.0)) throw std::runtime_error(where + "class must be 1 or 2");
        row.label = *cls == 1.0;
        for (std::size_t a = 0; a < kHepatitisAttributes.size(); ++a) {
            row.values[a] = parse(fields[a + 1]);
            if (!kHepatitisAttributes[a].continuous && row.values[a] && *row.values[a] != 1.0 &&
                *row.values[a] != 2.0) {
                throw std::runtime_error(where + kHepatitisAttributes[a].name + " must be 1, 2 or ?");
            }
        }
        rows.push_back(row);
    }

    Dataset ds;
    ds.provenance = provenance;
    std::vector<std::vector<double>> cuts(kHepatitisAttributes.size());
    std::vector<std::size_t> offset(kHepatitisAttributes.size());
    std::vector<std::size_t> width(kHepatitisAttributes.size());
    for (std::size_t a = 0; a < kHepatitisAttributes.size(); ++a) {
        const auto& attr = kHepatitisAttributes[a];
        offset[a] = ds.feature_names.size();
        std::vector<std::string> names;
        if (attr.continuous) {
            if (auto it = spec.cuts.find(attr.name); it != spec.cuts.end()) {
                cuts[a] = it->second;
                std::sort(cuts[a].begin(), cuts[a].end());
                cuts[a].erase(std::unique(cuts[a].begin(), cuts[a].end()), cuts[a].end());
            } else {
                std::vector<double> observed;
                for (const auto& r : rows) {
                    if (r.values[a]) observed.push_back(*r.values[a]);
                }
                cuts[a] = equal_frequency_cuts(std::move(observed), spec.default_bins);
            }
            names = bin_names(attr.name, cuts[a]);
        } else {
            for (const char* v : attr.values) names.push_back(std::string(attr.name) + "=" + v);
        }
        width[a] = names.size();
        ds.feature_names.insert(ds.feature_names.end(), names.begin(), names.end());
    }

    for (const auto& r : rows) {
        Instance inst;
        inst.label = r.label;
        inst.x.assign(ds.feature_names.size(), 0.0);
        for (std::size_t a = 0; a < kHepatitisAttributes.size(); ++a) {
            if (!r.values[a]) continue;
            const std::size_t hit = kHepatitisAttributes[a].continuous
                                        ? bin_of(*r.values[a], cuts[a])
                                        : static_cast<std::size_t>(*r.values[a]) - 1;
            for (std::size_t b = 0; b < width[a]; ++b) {
                inst.x[offset[a] + b] = b == hit ? 1.0 : -1.0;
            }
        }
        ds.instances.push_back(std::move(inst));
    }
    return ds;
}

Dataset load_hepatitis(const std::filesystem::path& path, const DiscretizationSpec& spec)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open hepatitis file " + path.string());
    return parse_hepatitis(in, spec, path.string());
}

TwoFoldSplit split_indices(std::size_t n, std::uint64_t seed)
{
    if (n < 2) throw std::invalid_argument("two-fold split needs at least two instances");
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(perm);
    const std::size_t half = (n + 1) / 2;
    TwoFoldSplit s;
    s.first.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(half));
    s.second.assign(perm.begin() + static_cast<std::ptrdiff_t>(half), perm.end());
    return s;
}

std::pair<Dataset, Dataset> split_two_fold(const Dataset& ds, std::uint64_t seed)
{
    const auto s = split_indices(ds.size(), seed);
    return {subset(ds, s.first), subset(ds, s.second)};
}

}  // namespace cfrule
