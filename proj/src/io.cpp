#include "cfrule/io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace cfrule::io {

std::string format_double(double v)
{
    std::array<char, 32> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

namespace {

json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

json finite_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

}  // namespace

json model_to_json(const CfModel& m)
{
    json channels = json::array();
    for (const auto& ch : m.channels()) {
        channels.push_back({{"u", ch.u}, {"bias", ch.bias}, {"w", ch.w}});
    }
    return {{"version", kModelFormatVersion}, {"dim", m.dim()}, {"channels", channels}};
}

CfModel model_from_json(const json& j)
{
    try {
        if (j.at("version").get<int>() != kModelFormatVersion) {
            throw std::runtime_error("unsupported model version " + j.at("version").dump());
        }
        const auto dim = j.at("dim").get<std::size_t>();
        std::vector<Channel> channels;
        for (const auto& c : j.at("channels")) {
            Channel ch;
            ch.u = c.at("u").get<double>();
            ch.bias = c.at("bias").get<double>();
            ch.w = c.at("w").get<std::vector<double>>();
            channels.push_back(std::move(ch));
        }
        return CfModel(dim, std::move(channels));
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed model JSON: ") + e.what());
    }
}

void save_model(const std::filesystem::path& path, const CfModel& m)
{
    write_text(path, model_to_json(m).dump(2) + "\n");
}

CfModel load_model(const std::filesystem::path& path)
{
    return model_from_json(read_json(path));
}

json rules_to_json(const RuleSet& rs)
{
    json out = json::array();
    for (const auto& r : rs.rules) {
        out.push_back({{"pos", r.positive()}, {"neg", r.negated()}, {"cf", r.cf()}});
    }
    return out;
}

std::size_t rules_min_dim(const json& j)
{
    std::size_t dim = 0;
    if (!j.is_array()) throw std::runtime_error("rule file must hold a JSON array");
    for (const auto& r : j) {
        for (const char* key : {"pos", "neg"}) {
            if (!r.contains(key)) continue;
            for (const auto& i : r.at(key)) dim = std::max(dim, i.get<std::size_t>() + 1);
        }
    }
    return dim;
}

RuleSet rules_from_json(const json& j, std::size_t dim)
{
    if (!j.is_array()) throw std::runtime_error("rule file must hold a JSON array");
    std::vector<Rule> rules;
    try {
        for (const auto& r : j) {
            auto pos = r.contains("pos") ? r.at("pos").get<std::vector<std::size_t>>()
                                         : std::vector<std::size_t>{};
            auto neg = r.contains("neg") ? r.at("neg").get<std::vector<std::size_t>>()
                                         : std::vector<std::size_t>{};
            rules.emplace_back(std::move(pos), std::move(neg), r.value("cf", 1.0));
        }
    } catch (const json::exception& e) {
        throw std::runtime_error(std::string("malformed rule JSON: ") + e.what());
    }
    return RuleSet(std::move(rules), dim);
}

void save_rules(const std::filesystem::path& path, const RuleSet& rs)
{
    write_text(path, rules_to_json(rs).dump(2) + "\n");
}

RuleSet load_rules(const std::filesystem::path& path, std::size_t dim)
{
    return rules_from_json(read_json(path), dim);
}

std::string rules_to_text(const RuleSet& rs, std::span<const std::string> feature_names)
{
    std::string out;
    for (const auto& r : rs.rules) {
        out += to_text(r, feature_names);
        out += '\n';
    }
    return out;
}

void write_dataset_csv(std::ostream& out, const Dataset& ds)
{
    for (const auto& name : ds.feature_names) out << name << ',';
    out << "label\n";
    for (const auto& inst : ds.instances) {
        for (double v : inst.x) out << format_double(v) << ',';
        out << (inst.label ? '1' : '0') << '\n';
    }
}

Dataset read_dataset_csv(std::istream& in, const std::string& provenance)
{
    auto split = [](const std::string& line) {
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) {
            if (!f.empty() && f.back() == '\r') f.pop_back();
            fields.push_back(f);
        }
        return fields;
    };

    Dataset ds;
    ds.provenance = provenance;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(provenance + ": empty dataset file");
    auto header = split(line);
    if (header.size() < 2 || header.back() != "label") {
        throw std::runtime_error(provenance + ": header must end with a 'label' column");
    }
    header.pop_back();
    ds.feature_names = std::move(header);

    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        const auto fields = split(line);
        const std::string where = provenance + " line " + std::to_string(lineno) + ": ";
        if (fields.size() != ds.dim() + 1) {
            throw std::runtime_error(where + "expected " + std::to_string(ds.dim() + 1) + " columns");
        }
        Instance inst;
        inst.x.resize(ds.dim());
        for (std::size_t i = 0; i < ds.dim(); ++i) {
            const auto& f = fields[i];
            auto res = std::from_chars(f.data(), f.data() + f.size(), inst.x[i]);
            if (res.ec != std::errc{} || res.ptr != f.data() + f.size() || inst.x[i] < -1.0 ||
                inst.x[i] > 1.0) {
                throw std::runtime_error(where + "bad feature value '" + f + "'");
            }
        }
        if (fields.back() == "1") {
            inst.label = true;
        } else if (fields.back() == "0") {
            inst.label = false;
        } else {
            throw std::runtime_error(where + "label must be 0 or 1");
        }
        ds.instances.push_back(std::move(inst));
    }
    return ds;
}

Dataset load_dataset_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset " + path.string());
    return read_dataset_csv(in, path.string());
}

void write_trace_csv(std::ostream& out, const TrainTrace& trace)
{
    std::size_t k = 0;
    std::size_t d = 0;
    if (!trace.snapshots.empty()) {
        k = trace.snapshots.front().channels.size();
        d = k ? trace.snapshots.front().channels.front().dim() : 0;
    }
    out << "epoch,mse";
    for (std::size_t j = 1; j <= k; ++j) {
        for (std::size_t i = 0; i <= d; ++i) out << ",w_" << j << '_' << i;
    }
    out << '\n';

    auto snap = trace.snapshots.begin();
    for (std::size_t e = 0; e < trace.mse.size(); ++e) {
        const std::size_t epoch = e + 1;
        out << epoch << ',' << format_double(trace.mse[e]);
        const bool have = snap != trace.snapshots.end() && snap->epoch == epoch;
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t i = 0; i <= d; ++i) {
                out << ',';
                if (have) {
                    const auto& ch = snap->channels[j];
                    out << format_double(i == 0 ? ch.bias : ch.w[i - 1]);
                }
            }
        }
        if (have) ++snap;
        out << '\n';
    }
}

void write_coefficients_csv(std::ostream& out, const RegressionFit& fit)
{
    const auto c = fit.bipolar_coefficients();
    out << "index,b,c\n";
    for (std::size_t i = 0; i < fit.coefficients.size(); ++i) {
        out << i << ',' << format_double(fit.coefficients[i]) << ',' << format_double(c[i]) << '\n';
    }
}

json extraction_diagnostics_to_json(const Extraction& ex)
{
    json out = json::array();
    for (const auto& d : ex.diagnostics) out.push_back({{"channel", d.channel}, {"reason", d.reason}});
    return out;
}

json report_to_json(const EvalReport& report)
{
    json folds = json::array();
    for (const auto& f : report.folds) {
        folds.push_back({{"repeat", f.repeat},
                         {"fold", f.fold},
                         {"train_size", f.train_ids.size()},
                         {"test_size", f.test_ids.size()},
                         {"threshold", f.threshold},
                         {"train_error", f.train_error},
                         {"test_error", f.test_error},
                         {"epochs", f.epochs},
                         {"converged", f.converged},
                         {"rules", rules_to_json(f.rules)}});
    }
    json out = {{"train_error_rate", report.train_error_rate},
                {"test_error_rate", report.test_error_rate},
                {"folds", folds}};
    if (!report.rules.empty()) out["rules"] = rules_to_json(report.rules);
    return out;
}

namespace {

json outcome_to_json(const StrategyOutcome& o)
{
    return {{"train_errors", o.train_errors},
            {"test_errors", o.test_errors},
            {"mean_train_error", o.mean_train()},
            {"mean_test_error", o.mean_test()},
            {"exact_recoveries", o.exact_recoveries}};
}

json ttest_to_json(const TTestResult& t)
{
    return {{"t", finite_or_null(t.t_value)},
            {"df", t.degrees_of_freedom},
            {"significant_at", t.significant_at}};
}

std::string level(const TTestResult& t)
{
    if (t.significant_at.empty()) return "n.s.";
    return format_double(t.significant_at.back());
}

}  // namespace

json comparison_to_json(const ComparisonReport& report)
{
    return {{"mcro", outcome_to_json(report.mcro)},
            {"random", outcome_to_json(report.random)},
            {"train_t_test", ttest_to_json(report.train)},
            {"test_t_test", ttest_to_json(report.test)}};
}

std::string comparison_table(const ComparisonReport& report)
{
    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof buf, "%-22s %8s %13s %8s  %s\n", "", "MCRO", "Random Start", "t-Value",
                  "Level of Significance");
    out += buf;
    std::snprintf(buf, sizeof buf, "%-22s %8.3f %13.3f %8.2f  %s\n", "Train error rate mean",
                  report.mcro.mean_train(), report.random.mean_train(), report.train.t_value,
                  level(report.train).c_str());
    out += buf;
    std::snprintf(buf, sizeof buf, "%-22s %8.3f %13.3f %8.2f  %s\n", "Test error rate mean",
                  report.mcro.mean_test(), report.random.mean_test(), report.test.t_value,
                  level(report.test).c_str());
    out += buf;
    std::snprintf(buf, sizeof buf, "(degrees of freedom = %zu; exact rule recovery: MCRO %zu, random %zu)\n",
                  report.train.degrees_of_freedom, report.mcro.exact_recoveries,
                  report.random.exact_recoveries);
    out += buf;
    return out;
}

}  // namespace cfrule::io
