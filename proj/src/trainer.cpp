#include "cfrule/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cfrule/cf.hpp"
#include "cfrule/random.hpp"

namespace cfrule {

std::string to_string(InitMode mode)
{
    return mode == InitMode::mcro ? "mcro" : "random";
}

InitMode parse_init_mode(const std::string& s)
{
    if (s == "mcro") return InitMode::mcro;
    if (s == "random") return InitMode::random;
    throw std::invalid_argument("unknown init mode '" + s + "' (expected random or mcro)");
}

void TrainConfig::validate() const
{
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (max_epochs < 1) throw std::invalid_argument("max_epochs must be at least 1");
    if (!(mse_delta_epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (random_weight_range < 0.0 || random_weight_range > 1.0) {
        throw std::invalid_argument("random weight range must lie in [0, 1]");
    }
    if (random_u_min < 0.0 || random_u_max > 1.0 || random_u_min > random_u_max) {
        throw std::invalid_argument("random u range must be an interval inside [0, 1]");
    }
}

InstanceError instance_error(const CfModel& m, const Instance& inst)
{
    const double d = inst.target() - model_output(m, inst);
    return {0.5 * d * d, d};
}

double mean_squared_error(const CfModel& m, std::span<const Instance> data)
{
    if (data.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& inst : data) {
        const double d = inst.target() - model_output(m, inst);
        sum += d * d;
    }
    return sum / static_cast<double>(data.size());
}

OutputGradients output_gradients(const CfModel& m, std::span<const double> x)
{
    check_dim(m.dim(), x);
    const std::size_t k = m.size();
    std::vector<double> phi(k), psi(k);
    std::vector<std::vector<double>> arg_partials(k);
    for (std::size_t j = 0; j < k; ++j) {
        const auto& ch = m.channel(j);
        const auto args = ch.arguments(x);
        phi[j] = cf::cf_combine(args);
        psi[j] = ch.u * phi[j];
        arg_partials[j] = cf::cf_partials(args);
    }
    const auto out_partials = cf::cf_partials(psi);

    OutputGradients g;
    g.output.resize(k);
    g.input.resize(k);
    for (std::size_t j = 0; j < k; ++j) {
        const double u = m.channel(j).u;
        g.output[j] = out_partials[j] * phi[j];
        const double d_phi = out_partials[j] * u;
        auto& row = g.input[j];
        row.resize(m.dim() + 1);
        row[0] = d_phi * arg_partials[j][0];
        for (std::size_t i = 0; i < m.dim(); ++i) {
            row[i + 1] = d_phi * arg_partials[j][i + 1] * x[i];
        }
    }
    return g;
}

double output_weight_gradient(const CfModel& m, std::size_t j, const Instance& inst)
{
    if (j >= m.size()) throw std::out_of_range("channel index out of range");
    const auto psi = channel_influences(m, inst.x);
    return cf::cf_partial(psi, j) * channel_activation(m.channel(j), inst);
}

double activation_gradient(const Channel& ch, std::size_t i, std::span<const double> x)
{
    if (i > ch.dim()) throw std::out_of_range("weight index out of range");
    const auto args = ch.arguments(x);
    const double xi = i == 0 ? 1.0 : x[i - 1];
    return cf::cf_partial(args, i) * xi;
}

double input_weight_gradient(const CfModel& m, std::size_t j, std::size_t i, const Instance& inst)
{
    if (j >= m.size()) throw std::out_of_range("channel index out of range");
    const auto psi = channel_influences(m, inst.x);
    const double d_phi = cf::cf_partial(psi, j) * m.channel(j).u;
    return d_phi * activation_gradient(m.channel(j), i, inst.x);
}

void train_step(CfModel& m, const Instance& inst, const TrainConfig& cfg)
{
    const double diff = instance_error(m, inst).diff;
    if (diff == 0.0) return;
    const auto g = output_gradients(m, inst.x);
    const double step = cfg.learning_rate * diff;
    for (std::size_t j = 0; j < m.size(); ++j) {
        auto& ch = m.channel(j);
        ch.u = std::clamp(ch.u + step * g.output[j], 0.0, 1.0);
        if (!cfg.pin_bias) {
            ch.bias = std::clamp(ch.bias + step * g.input[j][0], -1.0, 1.0);
        }
        for (std::size_t i = 0; i < ch.w.size(); ++i) {
            ch.w[i] = std::clamp(ch.w[i] + step * g.input[j][i + 1], -1.0, 1.0);
        }
    }
}

CfModel random_init(std::size_t k, std::size_t dim, const TrainConfig& cfg, std::uint64_t seed)
{
    if (k == 0) throw std::invalid_argument("model needs at least one channel");
    Rng rng(seed);
    const double r = cfg.random_weight_range;
    std::vector<Channel> channels(k);
    for (auto& ch : channels) {
        ch.u = rng.uniform(cfg.random_u_min, cfg.random_u_max);
        ch.bias = rng.uniform(-r, r);
        ch.w.resize(dim);
        for (auto& w : ch.w) w = rng.uniform(-r, r);
    }
    return CfModel(dim, std::move(channels));
}

TrainResult train(CfModel m, std::span<const Instance> data, const TrainConfig& cfg)
{
    cfg.validate();
    if (data.empty()) throw std::invalid_argument("cannot train on an empty dataset");
    m.validate();
    for (const auto& inst : data) check_dim(m.dim(), inst.x);

    TrainResult result;
    result.trace.initial_mse = mean_squared_error(m, data);

    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::optional<Rng> shuffler;
    if (cfg.shuffle_seed) shuffler.emplace(*cfg.shuffle_seed);

    double previous = result.trace.initial_mse;
    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        if (shuffler) shuffler->shuffle(order);
        for (auto idx : order) train_step(m, data[idx], cfg);

        const double mse = mean_squared_error(m, data);
        result.trace.mse.push_back(mse);
        const bool stop = std::abs(previous - mse) < cfg.mse_delta_epsilon;
        if (cfg.snapshot_stride > 0 &&
            (epoch % cfg.snapshot_stride == 0 || stop || epoch == cfg.max_epochs)) {
            result.trace.snapshots.push_back({epoch, m.channels()});
        }
        if (stop) {
            result.converged = true;
            break;
        }
        previous = mse;
    }
    result.model = std::move(m);
    return result;
}

}  // namespace cfrule
