#include "cfrule/model.hpp"

#include <stdexcept>
#include <string>

#include "cfrule/cf.hpp"

namespace cfrule {

void check_dim(std::size_t dim, std::span<const double> x)
{
    if (x.size() != dim) {
        throw std::invalid_argument("dimension mismatch: model expects " + std::to_string(dim) +
                                    " features, instance has " + std::to_string(x.size()));
    }
}

std::vector<double> Channel::arguments(std::span<const double> x) const
{
    check_dim(w.size(), x);
    std::vector<double> args(w.size() + 1);
    args[0] = bias;
    for (std::size_t i = 0; i < w.size(); ++i) {
        args[i + 1] = w[i] * x[i];
    }
    return args;
}

void Channel::validate() const
{
    cf::checked(u, 0.0, 1.0, "output weight");
    cf::checked(bias, -1.0, 1.0, "bias weight");
    for (double wi : w) {
        cf::checked(wi, -1.0, 1.0, "input weight");
    }
}

CfModel::CfModel(std::size_t dim, std::vector<Channel> channels)
    : dim_(dim), channels_(std::move(channels))
{
    validate();
}

CfModel CfModel::zeros(std::size_t k, std::size_t dim)
{
    Channel ch;
    ch.w.assign(dim, 0.0);
    return CfModel(dim, std::vector<Channel>(k, ch));
}

void CfModel::validate() const
{
    if (dim_ == 0) throw std::invalid_argument("model dimensionality must be positive");
    if (channels_.empty()) throw std::invalid_argument("model needs at least one channel");
    for (const auto& ch : channels_) {
        if (ch.dim() != dim_) {
            throw std::invalid_argument("channel has " + std::to_string(ch.dim()) +
                                        " weights, model dimensionality is " + std::to_string(dim_));
        }
        ch.validate();
    }
}

double channel_activation(const Channel& ch, std::span<const double> x)
{
    const auto args = ch.arguments(x);
    return cf::cf_combine(args);
}

double channel_influence(const Channel& ch, std::span<const double> x)
{
    return ch.u * channel_activation(ch, x);
}

std::vector<double> channel_influences(const CfModel& m, std::span<const double> x)
{
    check_dim(m.dim(), x);
    std::vector<double> psi;
    psi.reserve(m.size());
    for (const auto& ch : m.channels()) {
        psi.push_back(channel_influence(ch, x));
    }
    return psi;
}

double model_output(const CfModel& m, std::span<const double> x)
{
    return cf::cf_combine(channel_influences(m, x));
}

bool classify(const CfModel& m, const Instance& inst, double theta)
{
    return model_output(m, inst) > theta;
}

}  // namespace cfrule
