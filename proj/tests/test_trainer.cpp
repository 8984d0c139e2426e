#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "cfrule/datasets.hpp"
#include "cfrule/extractor.hpp"
#include "cfrule/mcro.hpp"
#include "cfrule/trainer.hpp"
#include "support.hpp"

using namespace cfrule;

namespace {

// A random model whose f_cf arguments all sit at least `gap` away from zero
// and whose weights stay inside the open ranges, so that small perturbations
// never cross a branch or a bound.
struct KinkFreeCase {
    CfModel model;
    Instance inst;
};

double away_from_zero(Rng& rng, double lo, double hi, double gap)
{
    for (;;) {
        const double v = rng.uniform(lo, hi);
        if (std::abs(v) >= gap) return v;
    }
}

KinkFreeCase kink_free_case(Rng& rng, double gap)
{
    for (;;) {
        const std::size_t k = 1 + rng.index(4);
        const std::size_t d = 1 + rng.index(8);
        Instance inst{testing::bipolar(rng, d), rng.sign() > 0};
        std::vector<Channel> chs(k);
        for (auto& ch : chs) {
            ch.u = rng.uniform(0.05, 0.95);
            ch.bias = away_from_zero(rng, -0.95, 0.95, gap);
            ch.w.resize(d);
            for (auto& w : ch.w) w = away_from_zero(rng, -0.95, 0.95, gap);
        }
        CfModel m(d, chs);
        const bool ok = std::all_of(m.channels().begin(), m.channels().end(), [&](const Channel& ch) {
            return std::abs(channel_activation(ch, inst)) >= gap;
        });
        if (ok) return {std::move(m), std::move(inst)};
    }
}

/// Exact-pattern channel over d features with `n_lits` literals.
Channel exact_pattern(Rng& rng, std::size_t d, std::size_t n_lits)
{
    Channel ch{rng.uniform(0.1, 1.0), 1.0, std::vector<double>(d, 0.0)};
    std::vector<std::size_t> idx(d);
    for (std::size_t i = 0; i < d; ++i) idx[i] = i;
    rng.shuffle(idx);
    for (std::size_t l = 0; l < n_lits; ++l) ch.w[idx[l]] = rng.sign();
    return ch;
}

std::size_t mismatches(const Channel& ch, const std::vector<double>& x)
{
    std::size_t n = 0;
    for (std::size_t i = 0; i < ch.dim(); ++i) n += (ch.w[i] * x[i] == -1.0);
    return n;
}

}  // namespace

TEST_CASE("instance_error examples")
{
    const CfModel one(1, {Channel{1.0, 1.0, {0.0}}});
    const CfModel half(1, {Channel{0.5, 1.0, {0.0}}});
    const CfModel off(1, {Channel{0.0, 1.0, {0.0}}});

    auto e = instance_error(one, Instance{{1.0}, true});
    CHECK(e.error == 0.0);
    CHECK(e.diff == 0.0);
    e = instance_error(half, Instance{{1.0}, false});
    CHECK(e.error == doctest::Approx(0.125));
    CHECK(e.diff == doctest::Approx(-0.5));
    e = instance_error(off, Instance{{1.0}, true});
    CHECK(e.error == doctest::Approx(0.5));
    CHECK(e.diff == doctest::Approx(1.0));
}

TEST_CASE("output_weight_gradient examples")
{
    // phi = 0.8 from the bias alone.
    const CfModel m(1, {Channel{0.5, 0.8, {0.0}}});
    CHECK(output_weight_gradient(m, 0, Instance{{1.0}, true}) == doctest::Approx(0.8));

    const CfModel dead(2, {Channel{0.4, 0.0, {0.0, 0.0}}, Channel{0.7, 0.3, {0.5, -0.2}}});
    CHECK(output_weight_gradient(dead, 0, Instance{{1.0, -1.0}, true}) == 0.0);
    CHECK_THROWS_AS(output_weight_gradient(dead, 2, Instance{{1.0, -1.0}, true}), std::out_of_range);
}

TEST_CASE("property: analytic gradients match central differences")
{
    Rng rng(41);
    const double h = 1e-6;
    for (int t = 0; t < 100; ++t) {
        auto c = kink_free_case(rng, 1e-3);
        auto& m = c.model;
        for (std::size_t j = 0; j < m.size(); ++j) {
            auto perturbed = [&](double& slot) {
                const double keep = slot;
                slot = keep + h;
                const double up = model_output(m, c.inst);
                slot = keep - h;
                const double down = model_output(m, c.inst);
                slot = keep;
                return (up - down) / (2 * h);
            };
            const double du = output_weight_gradient(m, j, c.inst);
            REQUIRE(testing::relative_error(du, perturbed(m.channel(j).u)) <= 1e-4);
            const double db = input_weight_gradient(m, j, 0, c.inst);
            REQUIRE(testing::relative_error(db, perturbed(m.channel(j).bias)) <= 1e-4);
            for (std::size_t i = 0; i < m.dim(); ++i) {
                const double dw = input_weight_gradient(m, j, i + 1, c.inst);
                REQUIRE(testing::relative_error(dw, perturbed(m.channel(j).w[i])) <= 1e-4);
            }
        }
    }
}

TEST_CASE("output_gradients agrees with the per-weight functions")
{
    Rng rng(42);
    for (int t = 0; t < 200; ++t) {
        const auto c = kink_free_case(rng, 1e-3);
        const auto g = output_gradients(c.model, c.inst.x);
        for (std::size_t j = 0; j < c.model.size(); ++j) {
            REQUIRE(g.output[j] == doctest::Approx(output_weight_gradient(c.model, j, c.inst)));
            for (std::size_t i = 0; i <= c.model.dim(); ++i) {
                REQUIRE(g.input[j][i] == doctest::Approx(input_weight_gradient(c.model, j, i, c.inst)));
            }
        }
    }
}

TEST_CASE("exact patterns only move on near misses")
{
    Rng rng(43);
    std::size_t seen[3] = {0, 0, 0};
    for (int t = 0; t < 1000; ++t) {
        const std::size_t d = 2 + rng.index(20);
        const auto ch = exact_pattern(rng, d, 1 + rng.index(std::min<std::size_t>(d, 5)));
        const auto x = testing::bipolar(rng, d);
        const std::size_t miss = mismatches(ch, x);
        ++seen[std::min<std::size_t>(miss, 2)];
        // Input weights only. The bias derivative is nonzero whenever every
        // literal is mismatched, since no matched literal zeroes its product.
        for (std::size_t i = 1; i <= d; ++i) {
            const double g = activation_gradient(ch, i, x);
            if (miss == 1) {
                if (ch.w[i - 1] * x[i - 1] == -1.0) REQUIRE(g == x[i - 1]);
            } else {
                REQUIRE(g == 0.0);
            }
        }
    }
    // The sample covers every regime.
    CHECK(seen[0] > 0);
    CHECK(seen[1] > 0);
    CHECK(seen[2] > 0);
}

TEST_CASE("train_step leaves a converged pattern alone unless it is a near miss")
{
    Rng rng(44);
    TrainConfig cfg;
    for (int t = 0; t < 300; ++t) {
        const std::size_t d = 3 + rng.index(10);
        auto ch = exact_pattern(rng, d, 1 + rng.index(3));
        ch.u = 0.6;
        CfModel m(d, {ch});
        const Instance inst = testing::bipolar_instance(rng, d, rng.sign() > 0);
        const auto miss = mismatches(ch, inst.x);
        train_step(m, inst, cfg);
        if (miss != 1) {
            REQUIRE(m.channel(0).w == ch.w);
        }
    }
}

TEST_CASE("train_step examples")
{
    TrainConfig cfg;
    const Instance pos{{1.0}, true};

    CfModel exact(1, {Channel{1.0, 1.0, {1.0}}});
    const auto before = exact;
    train_step(exact, pos, cfg);
    CHECK(exact == before);

    CfModel m(1, {Channel{0.5, 0.05, {0.05}}});
    const auto start = m.channel(0);
    train_step(m, pos, cfg);
    CHECK(m.channel(0).u > start.u);
    CHECK(m.channel(0).bias > start.bias);
    CHECK(m.channel(0).w[0] > start.w[0]);

    TrainConfig pinned = cfg;
    pinned.pin_bias = true;
    CfModel p(1, {Channel{0.5, 0.05, {0.05}}});
    train_step(p, pos, pinned);
    CHECK(p.channel(0).bias == 0.05);
    CHECK(p.channel(0).w[0] > 0.05);

    TrainConfig frozen = cfg;
    frozen.learning_rate = 0.0;
    CfModel f(1, {Channel{0.5, 0.05, {0.05}}});
    const auto f0 = f;
    train_step(f, pos, frozen);
    CHECK(f == f0);
}

TEST_CASE("property: weights stay in range after every step")
{
    Rng rng(45);
    TrainConfig cfg;
    cfg.learning_rate = 5.0;
    for (int t = 0; t < 1000; ++t) {
        auto c = kink_free_case(rng, 0.0);
        train_step(c.model, c.inst, cfg);
        for (const auto& ch : c.model.channels()) {
            REQUIRE(ch.u >= 0.0);
            REQUIRE(ch.u <= 1.0);
            REQUIRE(std::abs(ch.bias) <= 1.0);
            for (double w : ch.w) REQUIRE(std::abs(w) <= 1.0);
        }
    }
}

TEST_CASE("config validation")
{
    TrainConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.max_epochs = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.learning_rate = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.mse_delta_epsilon = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    CHECK(parse_init_mode("random") == InitMode::random);
    CHECK(to_string(InitMode::mcro) == "mcro");
    CHECK_THROWS_AS(parse_init_mode("zeros"), std::invalid_argument);
}

TEST_CASE("training loop bookkeeping")
{
    const auto ds = generate_synthetic(table1_rules(), 100, 20, 7);
    TrainConfig cfg;
    cfg.max_epochs = 1;
    auto r = train(random_init(3, 20, cfg, 1), ds.instances, cfg);
    CHECK(r.epochs() == 1);
    CHECK_FALSE(r.converged);

    cfg.max_epochs = 40;
    cfg.snapshot_stride = 7;
    r = train(random_init(3, 20, cfg, 1), ds.instances, cfg);
    CHECK(r.epochs() <= 40);
    for (double mse : r.trace.mse) CHECK(mse >= 0.0);
    REQUIRE_FALSE(r.trace.snapshots.empty());
    CHECK(r.trace.snapshots.back().epoch == r.epochs());
    for (const auto& s : r.trace.snapshots) {
        CHECK((s.epoch % 7 == 0 || s.epoch == r.epochs()));
    }
    CHECK(r.trace.snapshots.back().channels == r.model.channels());
    CHECK_THROWS_AS(train(CfModel::zeros(3, 5), ds.instances, cfg), std::invalid_argument);
    CHECK_THROWS_AS(train(CfModel::zeros(3, 20), std::span<const Instance>{}, cfg), std::invalid_argument);
}

TEST_CASE("training is deterministic")
{
    const auto ds = generate_synthetic(table1_rules(), 100, 20, 8);
    TrainConfig cfg;
    cfg.shuffle_seed = 99;
    cfg.snapshot_stride = 1;
    const auto init = mcro_init(3, 20, fit_linear(ds.instances), 5).model;
    const auto a = train(init, ds.instances, cfg);
    const auto b = train(init, ds.instances, cfg);
    CHECK(a.trace.mse == b.trace.mse);
    CHECK(a.model == b.model);
    CHECK(a.trace.snapshots.size() == b.trace.snapshots.size());
}

TEST_CASE("a model that already encodes the concept stays put")
{
    const auto rules = table1_rules(1.0);
    const auto ds = generate_synthetic(rules, 200, 20, 9);
    const auto init = encode_ruleset(rules);
    CHECK(mean_squared_error(init, ds.instances) == 0.0);
    const auto r = train(init, ds.instances, TrainConfig{});
    CHECK(r.converged);
    CHECK(r.epochs() == 1);
    CHECK(r.trace.mse.back() == 0.0);
    CHECK(r.model == init);

    // Below-one CFs still keep every input pattern recognisable.
    const auto soft = encode_ruleset(table1_rules(0.9));
    const auto s = train(soft, ds.instances, TrainConfig{});
    CHECK(s.converged);
    CHECK(s.trace.mse.back() < 1e-3);
    ExtractionConfig ec;
    CHECK(same_premises(extract_rules(s.model, ec).rules, rules));
}

TEST_CASE("random_init respects the configured ranges")
{
    TrainConfig cfg;
    const auto m = random_init(4, 30, cfg, 3);
    for (const auto& ch : m.channels()) {
        CHECK(ch.u >= cfg.random_u_min);
        CHECK(ch.u <= cfg.random_u_max);
        CHECK(std::abs(ch.bias) <= cfg.random_weight_range);
        for (double w : ch.w) CHECK(std::abs(w) <= cfg.random_weight_range);
    }
    CHECK(random_init(4, 30, cfg, 3) == m);
    CHECK_FALSE(random_init(4, 30, cfg, 4) == m);
}
