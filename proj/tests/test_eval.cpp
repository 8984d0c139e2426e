#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "cfrule/datasets.hpp"
#include "cfrule/eval.hpp"
#include "support.hpp"

using namespace cfrule;

namespace {

double normal(Rng& rng)
{
    // Box-Muller; 1 - unit() keeps the logarithm finite.
    const double u1 = 1.0 - rng.unit();
    const double u2 = rng.unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

// Pooled-variance t written out directly.
double pooled_t(const std::vector<double>& a, const std::vector<double>& b)
{
    auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
    auto ss = [](const std::vector<double>& v, double m) {
        double s = 0;
        for (double x : v) s += (x - m) * (x - m);
        return s;
    };
    const double ma = mean(a), mb = mean(b);
    const double n1 = a.size(), n2 = b.size();
    const double sp2 = (ss(a, ma) + ss(b, mb)) / (n1 + n2 - 2);
    return (mb - ma) / std::sqrt(sp2 * (1 / n1 + 1 / n2));
}

}  // namespace

TEST_CASE("rule_error examples")
{
    const auto rules = table1_rules();
    const auto ds = generate_synthetic(rules, 300, 20, 81);
    CHECK(rule_error(rules, ds) == 0.0);

    Dataset all_pos = ds;
    for (auto& inst : all_pos.instances) inst.label = true;
    CHECK(rule_error(RuleSet({}, 20), all_pos) == 1.0);

    // Dropping the third rule misclassifies exactly the instances only it covers.
    const RuleSet two({rules.rules[0], rules.rules[1]}, 20);
    std::size_t only_third = 0;
    for (const auto& inst : ds.instances) {
        const bool r1 = matches(rules.rules[0], inst), r2 = matches(rules.rules[1], inst);
        only_third += matches(rules.rules[2], inst) && !r1 && !r2;
    }
    CHECK(rule_error(two, ds) == doctest::Approx(double(only_third) / 300.0));
    CHECK(only_third > 0);

    CHECK_THROWS_AS(rule_error(RuleSet({}, 21), ds), std::invalid_argument);
    CHECK(rule_error(rules, std::span<const Instance>{}) == 0.0);
}

TEST_CASE("t critical values")
{
    CHECK(t_critical(48, 0.05) == doctest::Approx(1.6772).epsilon(1e-4));
    CHECK(t_critical(48, 0.025) == doctest::Approx(2.0106).epsilon(1e-4));
    CHECK(t_critical(48, 0.01) == doctest::Approx(2.4066).epsilon(1e-4));
    CHECK(t_critical(1, 0.05) == doctest::Approx(6.3138).epsilon(1e-4));
    CHECK(t_critical(500, 0.05) == t_critical(200, 0.05));
    CHECK_THROWS_AS(t_critical(0, 0.05), std::invalid_argument);
    CHECK_THROWS_AS(t_critical(10, 0.1), std::invalid_argument);
}

TEST_CASE("t test examples")
{
    const std::vector<double> same{0.1, 0.2, 0.3, 0.05};
    const auto t0 = t_test_one_sided(same, same);
    CHECK(t0.t_value == 0.0);
    CHECK(t0.significant_at.empty());

    const std::vector<double> lo{0.0, 1e-6, 0.0};
    const std::vector<double> hi{1.0, 1.0, 1.0 + 1e-6};
    const auto big = t_test_one_sided(lo, hi);
    CHECK(big.t_value > 1e4);
    CHECK(big.significant(0.01));
    CHECK(big.degrees_of_freedom == 4);

    const auto flat = t_test_one_sided(std::vector<double>{0.0, 0.0}, std::vector<double>{0.0, 0.0});
    CHECK(flat.t_value == 0.0);

    Rng rng(82);
    std::vector<double> a(25), b(25);
    for (auto& v : a) v = rng.unit();
    for (auto& v : b) v = rng.unit() + 0.3;
    const auto r = t_test_one_sided(a, b);
    CHECK(r.degrees_of_freedom == 48);
    CHECK(r.t_value == doctest::Approx(pooled_t(a, b)).epsilon(1e-12));
    const auto swapped = t_test_one_sided(b, a);
    CHECK(swapped.t_value == doctest::Approx(-r.t_value).epsilon(1e-12));
    CHECK(swapped.significant_at.empty());

    CHECK_THROWS_AS(t_test_one_sided(std::vector<double>{1.0}, b), std::invalid_argument);
}

TEST_CASE("significance levels are nested")
{
    Rng rng(83);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> a(10), b(10);
        for (auto& v : a) v = normal(rng);
        for (auto& v : b) v = normal(rng) + 0.8;
        const auto r = t_test_one_sided(a, b);
        for (double alpha : kSignificanceLevels) {
            REQUIRE(r.significant(alpha) == (r.t_value > t_critical(18, alpha)));
        }
        if (r.significant(0.01)) REQUIRE(r.significant(0.05));
    }
}

TEST_CASE("null comparisons are rarely significant")
{
    Rng rng(84);
    int hits = 0;
    const int runs = 4000;
    for (int t = 0; t < runs; ++t) {
        std::vector<double> a(25), b(25);
        for (auto& v : a) v = normal(rng);
        for (auto& v : b) v = normal(rng);
        hits += t_test_one_sided(a, b).significant(0.05);
    }
    // Expected rate 5%; the binomial standard deviation is about 0.34%.
    CHECK(double(hits) / runs < 0.065);
    CHECK(double(hits) / runs > 0.035);
}

TEST_CASE("parallel_for visits every index once and rethrows")
{
    for (std::size_t threads : {1, 2, 8}) {
        std::vector<std::atomic<int>> seen(1000);
        parallel_for(seen.size(), threads, [&](std::size_t i) { seen[i]++; });
        for (const auto& s : seen) REQUIRE(s.load() == 1);
    }
    CHECK_THROWS_AS(parallel_for(10, 4,
                                 [](std::size_t i) {
                                     if (i == 7) throw std::runtime_error("boom");
                                 }),
                    std::runtime_error);
}

TEST_CASE("learn_rules recovers the three-rule concept")
{
    const auto rules = table1_rules();
    const auto ds = generate_synthetic(rules, 100, 20, 85);
    LearnerConfig cfg;
    cfg.auto_threshold = true;
    std::size_t exact = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto learned = learn_rules(ds.instances, 20, 3, cfg, seed);
        CHECK(learned.converged);
        CHECK(rule_error(learned.extraction.rules, ds) <= 0.03);
        exact += same_premises(learned.extraction.rules, rules);
    }
    CHECK(exact >= 3);
}

TEST_CASE("cross_validate keeps folds apart")
{
    const auto ds = generate_synthetic(table1_rules(), 200, 20, 86);
    LearnerConfig cfg;
    cfg.auto_threshold = true;
    const auto report = cross_validate(ds, 3, cfg, 2, 7, 2);
    REQUIRE(report.folds.size() == 4);
    for (std::size_t r = 0; r < 2; ++r) {
        const auto& a = report.folds[2 * r];
        const auto& b = report.folds[2 * r + 1];
        CHECK(a.repeat == r);
        CHECK(a.train_ids == b.test_ids);
        CHECK(a.test_ids == b.train_ids);
        std::set<std::size_t> train(a.train_ids.begin(), a.train_ids.end());
        for (auto id : a.test_ids) CHECK(train.count(id) == 0);
        CHECK(train.size() + a.test_ids.size() == 200);
    }
    CHECK(report.folds[0].train_ids != report.folds[2].train_ids);
    double mean = 0;
    for (const auto& f : report.folds) mean += f.test_error / 4;
    CHECK(report.test_error_rate == doctest::Approx(mean));
    CHECK(report.test_error_rate <= 0.05);

    const auto again = cross_validate(ds, 3, cfg, 2, 7, 1);
    CHECK(again.test_error_rate == report.test_error_rate);
    CHECK(again.train_error_rate == report.train_error_rate);
    for (std::size_t i = 0; i < 4; ++i) CHECK(same_rules(again.folds[i].rules, report.folds[i].rules));
    CHECK_THROWS_AS(cross_validate(ds, 3, cfg, 0, 7), std::invalid_argument);
}

TEST_CASE("a minimal comparison run")
{
    ComparisonConfig cfg;
    cfg.trials = 2;
    cfg.learner.auto_threshold = true;
    const auto report = mcro_comparison(table1_rules(), cfg);
    CHECK(report.train.degrees_of_freedom == 2);
    CHECK(report.test.degrees_of_freedom == 2);
    CHECK(report.mcro.train_errors.size() == 2);
    CHECK(report.random.test_errors.size() == 2);

    cfg.threads = 1;
    const auto serial = mcro_comparison(table1_rules(), cfg);
    CHECK(serial.mcro.train_errors == report.mcro.train_errors);
    CHECK(serial.random.test_errors == report.random.test_errors);

    cfg.trials = 1;
    CHECK_THROWS_AS(mcro_comparison(table1_rules(), cfg), std::invalid_argument);
}
