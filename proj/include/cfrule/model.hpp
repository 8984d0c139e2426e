#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace cfrule {

/// One training or test example. Features are bipolar (+1 true, -1 false) for
/// categorical data, with 0 standing for a missing value.
struct Instance {
    std::vector<double> x;
    bool label = false;

    /// Target output: 1 for positive instances, 0 for negative ones.
    double target() const noexcept { return label ? 1.0 : 0.0; }
};

/// A single channel: output weight u in [0,1], bias in [-1,1], and one input
/// weight per feature in [-1,1].
struct Channel {
    double u = 0.0;
    double bias = 0.0;
    std::vector<double> w;

    std::size_t dim() const noexcept { return w.size(); }

    /// Arguments fed to f_cf: (bias, w_1 x_1, ..., w_d x_d).
    std::vector<double> arguments(std::span<const double> x) const;

    /// Throws std::invalid_argument if any weight is outside its range.
    void validate() const;

    friend bool operator==(const Channel&, const Channel&) = default;
};

class CfModel {
public:
    CfModel() = default;
    CfModel(std::size_t dim, std::vector<Channel> channels);

    /// k zero channels of dimension d.
    static CfModel zeros(std::size_t k, std::size_t dim);

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return channels_.size(); }

    const std::vector<Channel>& channels() const noexcept { return channels_; }
    std::vector<Channel>& channels() noexcept { return channels_; }
    const Channel& channel(std::size_t j) const { return channels_.at(j); }
    Channel& channel(std::size_t j) { return channels_.at(j); }

    /// Checks k >= 1, shared dimensionality and weight ranges.
    void validate() const;

    friend bool operator==(const CfModel&, const CfModel&) = default;

private:
    std::size_t dim_ = 0;
    std::vector<Channel> channels_;
};

/// phi_j = f_cf(w_0, w_1 x_1, ..., w_d x_d).
double channel_activation(const Channel& ch, std::span<const double> x);
inline double channel_activation(const Channel& ch, const Instance& inst)
{
    return channel_activation(ch, inst.x);
}

/// psi_j = u_j phi_j.
double channel_influence(const Channel& ch, std::span<const double> x);
inline double channel_influence(const Channel& ch, const Instance& inst)
{
    return channel_influence(ch, inst.x);
}

/// Influences of every channel, in channel order.
std::vector<double> channel_influences(const CfModel& m, std::span<const double> x);

/// M_out = f_cf(psi_1, ..., psi_k).
double model_output(const CfModel& m, std::span<const double> x);
inline double model_output(const CfModel& m, const Instance& inst)
{
    return model_output(m, inst.x);
}

/// True iff model_output > theta.
bool classify(const CfModel& m, const Instance& inst, double theta = 0.5);

/// Throws std::invalid_argument when the instance does not have `dim` features.
void check_dim(std::size_t dim, std::span<const double> x);

}  // namespace cfrule
