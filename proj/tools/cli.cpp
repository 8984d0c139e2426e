#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "cfrule/datasets.hpp"
#include "cfrule/eval.hpp"
#include "cfrule/extractor.hpp"
#include "cfrule/io.hpp"
#include "cfrule/mcro.hpp"
#include "cfrule/random.hpp"
#include "cfrule/trainer.hpp"

namespace cfrule::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 20000101;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Every setting a subcommand may read. Values come from the built-in
/// defaults, then an optional JSON config file, then explicit flags.
struct RunConfig {
    std::uint64_t seed = kDefaultSeed;
    std::size_t threads = 0;

    std::string data;
    std::string format = "csv";
    std::string discretization;
    std::string rules;
    std::string model;
    std::string out;
    std::string text_out;
    std::string trace_out;
    std::string coefficients_out;

    std::size_t channels = 3;
    std::string init = "mcro";
    double lr = 0.2;
    std::size_t epochs = 1000;
    double epsilon = 1e-5;
    bool shuffle = false;
    bool pin_bias = false;
    std::size_t trace_stride = 0;

    std::string threshold = "0.5";
    double low_cf = 0.1;
    double slack = 0.02;

    std::size_t n = 100;
    std::size_t d = 20;
    std::size_t repeats = 5;
    std::size_t trials = 25;
    std::size_t n_train = 100;
    std::size_t n_test = 100;
};

template <class T>
void take(const nlohmann::json& j, const char* key, T& field)
{
    if (j.contains(key)) field = j.at(key).get<T>();
}

void apply_config_file(const std::string& path, RunConfig& c)
{
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open config file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config file " + path + ": " + e.what());
    }
    if (!j.is_object()) throw UsageError("config file must hold a JSON object");
    try {
        take(j, "seed", c.seed);
        take(j, "threads", c.threads);
        take(j, "data", c.data);
        take(j, "format", c.format);
        take(j, "discretization", c.discretization);
        take(j, "rules", c.rules);
        take(j, "model", c.model);
        take(j, "out", c.out);
        take(j, "channels", c.channels);
        take(j, "init", c.init);
        take(j, "lr", c.lr);
        take(j, "epochs", c.epochs);
        take(j, "epsilon", c.epsilon);
        take(j, "shuffle", c.shuffle);
        take(j, "pin-bias", c.pin_bias);
        take(j, "trace-stride", c.trace_stride);
        if (j.contains("threshold")) {
            const auto& t = j.at("threshold");
            c.threshold = t.is_string() ? t.get<std::string>() : io::format_double(t.get<double>());
        }
        take(j, "low-cf", c.low_cf);
        take(j, "slack", c.slack);
        take(j, "n", c.n);
        take(j, "d", c.d);
        take(j, "repeats", c.repeats);
        take(j, "trials", c.trials);
        take(j, "n-train", c.n_train);
        take(j, "n-test", c.n_test);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError("config file " + path + ": " + e.what());
    }
}

Dataset load_dataset(const RunConfig& c)
{
    if (c.data.empty()) throw UsageError("--data is required");
    if (c.format == "csv") return io::load_dataset_csv(c.data);
    if (c.format == "promoters") return load_promoters(c.data);
    if (c.format == "hepatitis") {
        DiscretizationSpec spec = DiscretizationSpec::defaults();
        if (!c.discretization.empty()) {
            std::ifstream in(c.discretization);
            if (!in) throw UsageError("cannot open discretization spec " + c.discretization);
            const auto j = nlohmann::json::parse(in);
            for (const auto& [attr, cuts] : j.items()) spec.cuts[attr] = cuts.get<std::vector<double>>();
        }
        return load_hepatitis(c.data, spec);
    }
    throw UsageError("unknown dataset format '" + c.format + "' (csv, promoters, hepatitis)");
}

TrainConfig train_config(const RunConfig& c)
{
    TrainConfig t;
    t.learning_rate = c.lr;
    t.max_epochs = c.epochs;
    t.mse_delta_epsilon = c.epsilon;
    t.init_mode = parse_init_mode(c.init);
    t.pin_bias = c.pin_bias;
    t.snapshot_stride = c.trace_stride;
    if (c.shuffle) t.shuffle_seed = derive_seed(c.seed, 0x5348);
    t.validate();
    return t;
}

LearnerConfig learner_config(const RunConfig& c)
{
    LearnerConfig l;
    l.train = train_config(c);
    l.extract.low_cf_cutoff = c.low_cf;
    l.extract.selection_slack = c.slack;
    if (c.threshold == "auto") {
        l.auto_threshold = true;
    } else {
        try {
            l.extract.threshold = std::stod(c.threshold);
        } catch (const std::exception&) {
            throw UsageError("--threshold must be a number in (0,1) or 'auto'");
        }
        l.extract.validate();
    }
    return l;
}

void write_file(const std::string& path, const std::string& text)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

void require_channels(const RunConfig& c)
{
    if (c.channels == 0) throw UsageError("--channels must be at least 1");
}

int cmd_synth(const RunConfig& c, std::ostream& out)
{
    if (c.rules.empty()) throw UsageError("--rules is required");
    if (c.out.empty()) throw UsageError("--out is required");
    const auto rules = io::load_rules(c.rules, c.d);
    const auto ds = generate_synthetic(rules, c.n, c.d, c.seed);
    std::ostringstream csv;
    io::write_dataset_csv(csv, ds);
    write_file(c.out, csv.str());
    out << "wrote " << ds.size() << " instances (" << ds.positives() << " positive) over " << ds.dim()
        << " features to " << c.out << '\n';
    return kExitOk;
}

int cmd_train(const RunConfig& c, std::ostream& out)
{
    require_channels(c);
    if (c.out.empty()) throw UsageError("--out (model file) is required");
    const auto ds = load_dataset(c);
    const auto cfg = train_config(c);

    CfModel init;
    if (cfg.init_mode == InitMode::mcro) {
        const auto fit = fit_linear(ds.instances);
        if (!c.coefficients_out.empty()) {
            std::ostringstream csv;
            io::write_coefficients_csv(csv, fit);
            write_file(c.coefficients_out, csv.str());
        }
        auto seeded = mcro_init(c.channels, ds.dim(), fit, c.seed);
        for (const auto& w : seeded.warnings) out << "warning: " << w << '\n';
        init = std::move(seeded.model);
    } else {
        init = random_init(c.channels, ds.dim(), cfg, c.seed);
    }

    const auto result = train(std::move(init), ds.instances, cfg);
    io::save_model(c.out, result.model);
    if (!c.trace_out.empty()) {
        std::ostringstream csv;
        io::write_trace_csv(csv, result.trace);
        write_file(c.trace_out, csv.str());
    }
    out << "trained " << c.channels << " channels on " << ds.size() << " instances for "
        << result.epochs() << " epochs, final MSE " << io::format_double(result.trace.mse.back())
        << (result.converged ? "" : " (stopped at max epochs)") << '\n';
    return result.converged ? kExitOk : kExitNotConverged;
}

int cmd_extract(const RunConfig& c, std::ostream& out, std::ostream& err)
{
    if (c.model.empty()) throw UsageError("--model is required");
    const auto model = io::load_model(c.model);
    auto lc = learner_config(c);

    std::optional<Dataset> ds;
    if (!c.data.empty()) {
        ds = load_dataset(c);
        if (ds->dim() != model.dim()) {
            throw UsageError("dataset has " + std::to_string(ds->dim()) + " features, model expects " +
                             std::to_string(model.dim()));
        }
    }
    if (lc.auto_threshold) {
        if (!ds) throw UsageError("--threshold auto needs --data for selection");
        const auto sel = select_threshold_detailed(model, ds->instances, std::nullopt, lc.extract);
        lc.extract.threshold = sel.threshold;
        out << "# threshold " << io::format_double(sel.threshold) << " selected (errors:";
        for (std::size_t i = 0; i < kCandidateThresholds.size(); ++i) {
            out << ' ' << io::format_double(kCandidateThresholds[i]) << '=' << io::format_double(sel.errors[i]);
        }
        out << ")\n";
    }

    const auto ex = extract_rules(model, lc.extract);
    for (const auto& d : ex.diagnostics) {
        err << "diagnostic: channel " << d.channel + 1 << ": " << d.reason << '\n';
    }
    const auto names = ds ? ds->feature_names : default_feature_names(model.dim());
    const auto text = io::rules_to_text(ex.rules, names);
    for (const auto& r : ex.rules.rules) {
        if (r.cf() <= 0.5) {
            err << "diagnostic: rule CF " << io::format_double(r.cf())
                << " does not exceed the default classification threshold 0.5: " << to_text(r, names) << '\n';
        }
    }
    out << text;
    if (!c.out.empty()) io::save_rules(c.out, ex.rules);
    if (!c.text_out.empty()) write_file(c.text_out, text);
    return kExitOk;
}

int cmd_eval(const RunConfig& c, std::ostream& out)
{
    if (c.rules.empty()) throw UsageError("--rules is required");
    const auto ds = load_dataset(c);
    RuleSet rules;
    try {
        rules = io::load_rules(c.rules, ds.dim());
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
    EvalReport report;
    report.rules = rules;
    report.test_error_rate = rule_error(rules, ds);
    out << "rule error rate " << io::format_double(report.test_error_rate) << " on " << ds.size()
        << " instances\n";
    if (!c.out.empty()) write_file(c.out, io::report_to_json(report).dump(2) + "\n");
    return kExitOk;
}

int cmd_cv(const RunConfig& c, std::ostream& out)
{
    require_channels(c);
    const auto ds = load_dataset(c);
    const auto lc = learner_config(c);
    const auto report = cross_validate(ds, c.channels, lc, c.repeats, c.seed, c.threads);
    for (const auto& f : report.folds) {
        out << "repeat " << f.repeat + 1 << " fold " << f.fold + 1 << ": threshold "
            << io::format_double(f.threshold) << ", " << f.rules.size() << " rules, train error "
            << io::format_double(f.train_error) << ", test error " << io::format_double(f.test_error)
            << '\n';
    }
    out << "mean cross-validation rule error " << io::format_double(report.test_error_rate)
        << " (train " << io::format_double(report.train_error_rate) << ")\n";
    if (!c.out.empty()) write_file(c.out, io::report_to_json(report).dump(2) + "\n");
    return kExitOk;
}

int cmd_compare(const RunConfig& c, std::ostream& out)
{
    require_channels(c);
    ComparisonConfig cc;
    cc.trials = c.trials;
    cc.train_size = c.n_train;
    cc.test_size = c.n_test;
    cc.dim = c.d;
    cc.channels = c.channels;
    cc.learner = learner_config(c);
    cc.seed = c.seed;
    cc.threads = c.threads;
    const auto task = c.rules.empty() ? table1_rules() : io::load_rules(c.rules, c.d);
    const auto report = mcro_comparison(task, cc);
    out << io::comparison_table(report);
    if (!c.out.empty()) write_file(c.out, io::comparison_to_json(report).dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    RunConfig c;
    CLI::App app{"Multi-channel certainty-factor rule learning", "cfrule"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON file with default settings (flags override it)");

    auto common = [&](CLI::App* sub) {
        sub->add_option("--seed", c.seed, "Master random seed");
        sub->add_option("--threads", c.threads, "Worker threads (0 = all cores)");
    };
    auto data_opts = [&](CLI::App* sub) {
        sub->add_option("--data", c.data, "Dataset file")->check(CLI::ExistingFile);
        sub->add_option("--format", c.format, "csv, promoters or hepatitis");
        sub->add_option("--discretization", c.discretization, "JSON cut points for hepatitis")
            ->check(CLI::ExistingFile);
    };
    auto train_opts = [&](CLI::App* sub) {
        sub->add_option("--channels", c.channels, "Number of channels");
        sub->add_option("--init", c.init, "Initialisation: random or mcro");
        sub->add_option("--lr", c.lr, "Learning rate");
        sub->add_option("--epochs", c.epochs, "Maximum epochs");
        sub->add_option("--epsilon", c.epsilon, "Stop when the per-epoch MSE change is below this");
        sub->add_flag("--shuffle", c.shuffle, "Reshuffle instances every epoch");
        sub->add_flag("--pin-bias", c.pin_bias, "Keep biases at their initial values");
    };
    auto extract_opts = [&](CLI::App* sub) {
        sub->add_option("--threshold", c.threshold, "Extraction threshold in (0,1) or 'auto'");
        sub->add_option("--low-cf", c.low_cf, "Drop rules with CF below this");
        sub->add_option("--slack", c.slack, "Error slack for automatic threshold selection");
    };

    auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset from a rule file");
    common(synth);
    synth->add_option("--rules", c.rules, "Rule JSON file")->check(CLI::ExistingFile);
    synth->add_option("--n", c.n, "Number of instances");
    synth->add_option("--d", c.d, "Number of features");
    synth->add_option("--out", c.out, "Output CSV");

    auto* trn = app.add_subcommand("train", "Train a model");
    common(trn);
    data_opts(trn);
    train_opts(trn);
    trn->add_option("--out", c.out, "Output model JSON");
    trn->add_option("--trace-out", c.trace_out, "Per-epoch trace CSV");
    trn->add_option("--trace-stride", c.trace_stride, "Weight snapshot stride in the trace (0 = none)");
    trn->add_option("--coefficients-out", c.coefficients_out, "Regression coefficients CSV (mcro)");

    auto* ext = app.add_subcommand("extract", "Extract rules from a trained model");
    common(ext);
    data_opts(ext);
    extract_opts(ext);
    ext->add_option("--model", c.model, "Model JSON")->check(CLI::ExistingFile);
    ext->add_option("--out", c.out, "Output rule JSON");
    ext->add_option("--text-out", c.text_out, "Output rule text");

    auto* evl = app.add_subcommand("eval", "Exact-match rule error of a rule file on a dataset");
    common(evl);
    data_opts(evl);
    evl->add_option("--rules", c.rules, "Rule JSON file")->check(CLI::ExistingFile);
    evl->add_option("--out", c.out, "Report JSON");

    auto* cv = app.add_subcommand("cv", "Repeated two-fold cross-validation");
    common(cv);
    data_opts(cv);
    train_opts(cv);
    extract_opts(cv);
    cv->add_option("--repeats", c.repeats, "Number of two-fold repeats");
    cv->add_option("--out", c.out, "Report JSON");

    auto* cmp = app.add_subcommand("compare", "MCRO versus random start on a synthetic task");
    common(cmp);
    train_opts(cmp);
    extract_opts(cmp);
    cmp->add_option("--rules", c.rules, "Target rule JSON (default: the three-rule task)")
        ->check(CLI::ExistingFile);
    cmp->add_option("--trials", c.trials, "Trials per strategy");
    cmp->add_option("--n-train", c.n_train, "Training instances per trial");
    cmp->add_option("--n-test", c.n_test, "Test instances per trial");
    cmp->add_option("--d", c.d, "Number of features");
    cmp->add_option("--out", c.out, "Report JSON");

    try {
        // The config file supplies defaults, so it is read before the flags.
        auto it = std::find(args.begin(), args.end(), "--config");
        if (it != args.end()) {
            if (std::next(it) == args.end()) throw UsageError("--config needs a file name");
            apply_config_file(*std::next(it), c);
        }
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (synth->parsed()) return cmd_synth(c, out);
        if (trn->parsed()) return cmd_train(c, out);
        if (ext->parsed()) return cmd_extract(c, out, err);
        if (evl->parsed()) return cmd_eval(c, out);
        if (cv->parsed()) return cmd_cv(c, out);
        if (cmp->parsed()) return cmd_compare(c, out);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace cfrule::cli
