#include "cfrule/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "cfrule/mcro.hpp"
#include "cfrule/random.hpp"

namespace cfrule {

double rule_error(const RuleSet& rs, std::span<const Instance> data)
{
    if (data.empty()) return 0.0;
    std::size_t wrong = 0;
    for (const auto& inst : data) {
        if (inst.x.size() < rs.dim) {
            throw std::invalid_argument("rule set over " + std::to_string(rs.dim) +
                                        " features applied to an instance with " +
                                        std::to_string(inst.x.size()));
        }
        if (ruleset_label(rs, inst.x) != inst.label) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(data.size());
}

double rule_error(const RuleSet& rs, const Dataset& ds)
{
    if (rs.dim != ds.dim()) {
        throw std::invalid_argument("rule set dimensionality " + std::to_string(rs.dim) +
                                    " does not match dataset dimensionality " +
                                    std::to_string(ds.dim()));
    }
    return rule_error(rs, ds.instances);
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn)
{
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

LearnedRules learn_rules(std::span<const Instance> train_data, std::size_t dim, std::size_t channels,
                         const LearnerConfig& cfg, std::uint64_t seed)
{
    if (channels == 0) throw std::invalid_argument("model needs at least one channel");
    CfModel init = cfg.train.init_mode == InitMode::mcro
                       ? mcro_init(channels, dim, fit_linear(train_data), seed).model
                       : random_init(channels, dim, cfg.train, seed);
    auto trained = train(std::move(init), train_data, cfg.train);

    LearnedRules out;
    out.threshold = cfg.auto_threshold
                        ? select_threshold(trained.model, train_data, std::nullopt, cfg.extract)
                        : cfg.extract.threshold;
    ExtractionConfig ex = cfg.extract;
    ex.threshold = out.threshold;
    out.extraction = extract_rules(trained.model, ex);
    out.model = std::move(trained.model);
    out.trace = std::move(trained.trace);
    out.converged = trained.converged;
    return out;
}

EvalReport cross_validate(const Dataset& ds, std::size_t channels, const LearnerConfig& cfg,
                          std::size_t repeats, std::uint64_t seed, std::size_t threads)
{
    if (repeats < 1) throw std::invalid_argument("cross-validation needs at least one repeat");
    if (channels == 0) throw std::invalid_argument("model needs at least one channel");

    EvalReport report;
    report.folds.resize(2 * repeats);
    std::vector<TwoFoldSplit> splits;
    for (std::size_t r = 0; r < repeats; ++r) {
        splits.push_back(split_indices(ds.size(), derive_seed(seed, 3 * r)));
    }

    parallel_for(2 * repeats, threads, [&](std::size_t f) {
        const std::size_t r = f / 2;
        const std::size_t half = f % 2;
        FoldResult& fold = report.folds[f];
        fold.repeat = r;
        fold.fold = half;
        fold.train_ids = half == 0 ? splits[r].first : splits[r].second;
        fold.test_ids = half == 0 ? splits[r].second : splits[r].first;
        const Dataset train_set = subset(ds, fold.train_ids);
        const Dataset test_set = subset(ds, fold.test_ids);

        LearnerConfig local = cfg;
        if (local.train.shuffle_seed) {
            local.train.shuffle_seed = derive_seed(*cfg.train.shuffle_seed, f);
        }
        auto learned = learn_rules(train_set.instances, ds.dim(), channels, local,
                                   derive_seed(seed, 3 * r + 1 + half));
        fold.threshold = learned.threshold;
        fold.rules = std::move(learned.extraction.rules);
        fold.train_error = rule_error(fold.rules, train_set);
        fold.test_error = rule_error(fold.rules, test_set);
        fold.epochs = learned.trace.mse.size();
        fold.converged = learned.converged;
    });

    for (const auto& f : report.folds) {
        report.train_error_rate += f.train_error;
        report.test_error_rate += f.test_error;
    }
    report.train_error_rate /= static_cast<double>(report.folds.size());
    report.test_error_rate /= static_cast<double>(report.folds.size());
    return report;
}

namespace {

// One-sided upper critical values of Student's t for df = 1..200, columns
// alpha = 0.05, 0.025, 0.01.
constexpr double kCriticalT[200][3] = {
    {6.3138, 12.7062, 31.8205},
    {2.9200, 4.3027, 6.9646},
    {2.3534, 3.1824, 4.5407},
    {2.1318, 2.7764, 3.7469},
    {2.0150, 2.5706, 3.3649},
    {1.9432, 2.4469, 3.1427},
    {1.8946, 2.3646, 2.9980},
    {1.8595, 2.3060, 2.8965},
    {1.8331, 2.2622, 2.8214},
    {1.8125, 2.2281, 2.7638},
    {1.7959, 2.2010, 2.7181},
    {1.7823, 2.1788, 2.6810},
    {1.7709, 2.1604, 2.6503},
    {1.7613, 2.1448, 2.6245},
    {1.7531, 2.1314, 2.6025},
    {1.7459, 2.1199, 2.5835},
    {1.7396, 2.1098, 2.5669},
    {1.7341, 2.1009, 2.5524},
    {1.7291, 2.0930, 2.5395},
    {1.7247, 2.0860, 2.5280},
    {1.7207, 2.0796, 2.5176},
    {1.7171, 2.0739, 2.5083},
    {1.7139, 2.0687, 2.4999},
    {1.7109, 2.0639, 2.4922},
    {1.7081, 2.0595, 2.4851},
    {1.7056, 2.0555, 2.4786},
    {1.7033, 2.0518, 2.4727},
    {1.7011, 2.0484, 2.4671},
    {1.6991, 2.0452, 2.4620},
    {1.6973, 2.0423, 2.4573},
    {1.6955, 2.0395, 2.4528},
    {1.6939, 2.0369, 2.4487},
    {1.6924, 2.0345, 2.4448},
    {1.6909, 2.0322, 2.4411},
    {1.6896, 2.0301, 2.4377},
    {1.6883, 2.0281, 2.4345},
    {1.6871, 2.0262, 2.4314},
    {1.6860, 2.0244, 2.4286},
    {1.6849, 2.0227, 2.4258},
    {1.6839, 2.0211, 2.4233},
    {1.6829, 2.0195, 2.4208},
    {1.6820, 2.0181, 2.4185},
    {1.6811, 2.0167, 2.4163},
    {1.6802, 2.0154, 2.4141},
    {1.6794, 2.0141, 2.4121},
    {1.6787, 2.0129, 2.4102},
    {1.6779, 2.0117, 2.4083},
    {1.6772, 2.0106, 2.4066},
    {1.6766, 2.0096, 2.4049},
    {1.6759, 2.0086, 2.4033},
    {1.6753, 2.0076, 2.4017},
    {1.6747, 2.0066, 2.4002},
    {1.6741, 2.0057, 2.3988},
    {1.6736, 2.0049, 2.3974},
    {1.6730, 2.0040, 2.3961},
    {1.6725, 2.0032, 2.3948},
    {1.6720, 2.0025, 2.3936},
    {1.6716, 2.0017, 2.3924},
    {1.6711, 2.0010, 2.3912},
    {1.6706, 2.0003, 2.3901},
    {1.6702, 1.9996, 2.3890},
    {1.6698, 1.9990, 2.3880},
    {1.6694, 1.9983, 2.3870},
    {1.6690, 1.9977, 2.3860},
    {1.6686, 1.9971, 2.3851},
    {1.6683, 1.9966, 2.3842},
    {1.6679, 1.9960, 2.3833},
    {1.6676, 1.9955, 2.3824},
    {1.6672, 1.9949, 2.3816},
    {1.6669, 1.9944, 2.3808},
    {1.6666, 1.9939, 2.3800},
    {1.6663, 1.9935, 2.3793},
    {1.6660, 1.9930, 2.3785},
    {1.6657, 1.9925, 2.3778},
    {1.6654, 1.9921, 2.3771},
    {1.6652, 1.9917, 2.3764},
    {1.6649, 1.9913, 2.3758},
    {1.6646, 1.9908, 2.3751},
    {1.6644, 1.9905, 2.3745},
    {1.6641, 1.9901, 2.3739},
    {1.6639, 1.9897, 2.3733},
    {1.6636, 1.9893, 2.3727},
    {1.6634, 1.9890, 2.3721},
    {1.6632, 1.9886, 2.3716},
    {1.6630, 1.9883, 2.3710},
    {1.6628, 1.9879, 2.3705},
    {1.6626, 1.9876, 2.3700},
    {1.6624, 1.9873, 2.3695},
    {1.6622, 1.9870, 2.3690},
    {1.6620, 1.9867, 2.3685},
    {1.6618, 1.9864, 2.3680},
    {1.6616, 1.9861, 2.3676},
    {1.6614, 1.9858, 2.3671},
    {1.6612, 1.9855, 2.3667},
    {1.6611, 1.9853, 2.3662},
    {1.6609, 1.9850, 2.3658},
    {1.6607, 1.9847, 2.3654},
    {1.6606, 1.9845, 2.3650},
    {1.6604, 1.9842, 2.3646},
    {1.6602, 1.9840, 2.3642},
    {1.6601, 1.9837, 2.3638},
    {1.6599, 1.9835, 2.3635},
    {1.6598, 1.9833, 2.3631},
    {1.6596, 1.9830, 2.3627},
    {1.6595, 1.9828, 2.3624},
    {1.6594, 1.9826, 2.3620},
    {1.6592, 1.9824, 2.3617},
    {1.6591, 1.9822, 2.3614},
    {1.6590, 1.9820, 2.3610},
    {1.6588, 1.9818, 2.3607},
    {1.6587, 1.9816, 2.3604},
    {1.6586, 1.9814, 2.3601},
    {1.6585, 1.9812, 2.3598},
    {1.6583, 1.9810, 2.3595},
    {1.6582, 1.9808, 2.3592},
    {1.6581, 1.9806, 2.3589},
    {1.6580, 1.9804, 2.3586},
    {1.6579, 1.9803, 2.3584},
    {1.6578, 1.9801, 2.3581},
    {1.6577, 1.9799, 2.3578},
    {1.6575, 1.9798, 2.3576},
    {1.6574, 1.9796, 2.3573},
    {1.6573, 1.9794, 2.3570},
    {1.6572, 1.9793, 2.3568},
    {1.6571, 1.9791, 2.3565},
    {1.6570, 1.9790, 2.3563},
    {1.6569, 1.9788, 2.3561},
    {1.6568, 1.9787, 2.3558},
    {1.6568, 1.9785, 2.3556},
    {1.6567, 1.9784, 2.3554},
    {1.6566, 1.9782, 2.3552},
    {1.6565, 1.9781, 2.3549},
    {1.6564, 1.9780, 2.3547},
    {1.6563, 1.9778, 2.3545},
    {1.6562, 1.9777, 2.3543},
    {1.6561, 1.9776, 2.3541},
    {1.6561, 1.9774, 2.3539},
    {1.6560, 1.9773, 2.3537},
    {1.6559, 1.9772, 2.3535},
    {1.6558, 1.9771, 2.3533},
    {1.6557, 1.9769, 2.3531},
    {1.6557, 1.9768, 2.3529},
    {1.6556, 1.9767, 2.3527},
    {1.6555, 1.9766, 2.3525},
    {1.6554, 1.9765, 2.3523},
    {1.6554, 1.9763, 2.3522},
    {1.6553, 1.9762, 2.3520},
    {1.6552, 1.9761, 2.3518},
    {1.6551, 1.9760, 2.3516},
    {1.6551, 1.9759, 2.3515},
    {1.6550, 1.9758, 2.3513},
    {1.6549, 1.9757, 2.3511},
    {1.6549, 1.9756, 2.3510},
    {1.6548, 1.9755, 2.3508},
    {1.6547, 1.9754, 2.3506},
    {1.6547, 1.9753, 2.3505},
    {1.6546, 1.9752, 2.3503},
    {1.6546, 1.9751, 2.3502},
    {1.6545, 1.9750, 2.3500},
    {1.6544, 1.9749, 2.3499},
    {1.6544, 1.9748, 2.3497},
    {1.6543, 1.9747, 2.3496},
    {1.6543, 1.9746, 2.3494},
    {1.6542, 1.9745, 2.3493},
    {1.6541, 1.9744, 2.3492},
    {1.6541, 1.9744, 2.3490},
    {1.6540, 1.9743, 2.3489},
    {1.6540, 1.9742, 2.3487},
    {1.6539, 1.9741, 2.3486},
    {1.6539, 1.9740, 2.3485},
    {1.6538, 1.9739, 2.3484},
    {1.6538, 1.9739, 2.3482},
    {1.6537, 1.9738, 2.3481},
    {1.6537, 1.9737, 2.3480},
    {1.6536, 1.9736, 2.3478},
    {1.6536, 1.9735, 2.3477},
    {1.6535, 1.9735, 2.3476},
    {1.6535, 1.9734, 2.3475},
    {1.6534, 1.9733, 2.3474},
    {1.6534, 1.9732, 2.3472},
    {1.6533, 1.9732, 2.3471},
    {1.6533, 1.9731, 2.3470},
    {1.6532, 1.9730, 2.3469},
    {1.6532, 1.9729, 2.3468},
    {1.6531, 1.9729, 2.3467},
    {1.6531, 1.9728, 2.3466},
    {1.6530, 1.9727, 2.3465},
    {1.6530, 1.9727, 2.3463},
    {1.6530, 1.9726, 2.3462},
    {1.6529, 1.9725, 2.3461},
    {1.6529, 1.9725, 2.3460},
    {1.6528, 1.9724, 2.3459},
    {1.6528, 1.9723, 2.3458},
    {1.6527, 1.9723, 2.3457},
    {1.6527, 1.9722, 2.3456},
    {1.6527, 1.9721, 2.3455},
    {1.6526, 1.9721, 2.3454},
    {1.6526, 1.9720, 2.3453},
    {1.6525, 1.9720, 2.3452},
    {1.6525, 1.9719, 2.3451},
};

double mean(std::span<const double> v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

double t_critical(std::size_t df, double alpha)
{
    if (df == 0) throw std::invalid_argument("degrees of freedom must be positive");
    const std::size_t row = std::min<std::size_t>(df, 200) - 1;
    for (std::size_t c = 0; c < kSignificanceLevels.size(); ++c) {
        if (alpha == kSignificanceLevels[c]) return kCriticalT[row][c];
    }
    throw std::invalid_argument("no critical value tabulated for alpha " + std::to_string(alpha));
}

bool TTestResult::significant(double alpha) const
{
    return std::find(significant_at.begin(), significant_at.end(), alpha) != significant_at.end();
}

TTestResult t_test_one_sided(std::span<const double> a, std::span<const double> b)
{
    if (a.size() < 2 || b.size() < 2) {
        throw std::invalid_argument("t test needs at least two samples per group");
    }
    const double ma = mean(a);
    const double mb = mean(b);
    double ss = 0.0;
    for (double v : a) ss += (v - ma) * (v - ma);
    for (double v : b) ss += (v - mb) * (v - mb);

    TTestResult res;
    res.degrees_of_freedom = a.size() + b.size() - 2;
    const double pooled = ss / static_cast<double>(res.degrees_of_freedom);
    const double se = std::sqrt(pooled * (1.0 / static_cast<double>(a.size()) +
                                          1.0 / static_cast<double>(b.size())));
    const double diff = mb - ma;
    if (se == 0.0) {
        res.t_value = diff == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), diff);
    } else {
        res.t_value = diff / se;
    }
    for (double alpha : kSignificanceLevels) {
        if (res.t_value > t_critical(res.degrees_of_freedom, alpha)) res.significant_at.push_back(alpha);
    }
    return res;
}

double StrategyOutcome::mean_train() const
{
    return train_errors.empty() ? 0.0 : mean(train_errors);
}

double StrategyOutcome::mean_test() const
{
    return test_errors.empty() ? 0.0 : mean(test_errors);
}

ComparisonReport mcro_comparison(const RuleSet& task, const ComparisonConfig& cfg)
{
    if (cfg.trials < 2) throw std::invalid_argument("comparison needs at least two trials");

    struct TrialOutcome {
        double train[2];
        double test[2];
        bool exact[2];
    };
    std::vector<TrialOutcome> outcomes(cfg.trials);

    parallel_for(cfg.trials, cfg.threads, [&](std::size_t t) {
        const auto train_set = generate_synthetic(task, cfg.train_size, cfg.dim, derive_seed(cfg.seed, 4 * t));
        const auto test_set = generate_synthetic(task, cfg.test_size, cfg.dim, derive_seed(cfg.seed, 4 * t + 1));
        for (int arm = 0; arm < 2; ++arm) {
            LearnerConfig lc = cfg.learner;
            lc.train.init_mode = arm == 0 ? InitMode::mcro : InitMode::random;
            if (lc.train.shuffle_seed) lc.train.shuffle_seed = derive_seed(*lc.train.shuffle_seed, t);
            auto learned = learn_rules(train_set.instances, cfg.dim, cfg.channels, lc,
                                       derive_seed(cfg.seed, 4 * t + 2 + static_cast<std::uint64_t>(arm)));
            const auto& rules = learned.extraction.rules;
            outcomes[t].train[arm] = rule_error(rules, train_set);
            outcomes[t].test[arm] = rule_error(rules, test_set);
            outcomes[t].exact[arm] = same_premises(rules, task);
        }
    });

    ComparisonReport report;
    for (const auto& o : outcomes) {
        report.mcro.train_errors.push_back(o.train[0]);
        report.mcro.test_errors.push_back(o.test[0]);
        report.mcro.exact_recoveries += o.exact[0] ? 1 : 0;
        report.random.train_errors.push_back(o.train[1]);
        report.random.test_errors.push_back(o.test[1]);
        report.random.exact_recoveries += o.exact[1] ? 1 : 0;
    }
    report.train = t_test_one_sided(report.mcro.train_errors, report.random.train_errors);
    report.test = t_test_one_sided(report.mcro.test_errors, report.random.test_errors);
    return report;
}

}  // namespace cfrule
