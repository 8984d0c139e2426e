#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cfrule/model.hpp"

namespace cfrule {

/// Least-squares fit y ~ b_0 + sum_i b_i x'_i with x' = (x + 1) / 2, so every
/// input and the 0/1 target live in [0, 1].
struct RegressionFit {
    std::vector<double> coefficients;  ///< b_0 .. b_d
    double residual_sum_squares = 0.0;
    /// Set when the normal equations were singular and the ridge term was added.
    bool ridge_used = false;

    std::size_t dim() const noexcept { return coefficients.empty() ? 0 : coefficients.size() - 1; }

    /// The same fitted plane written over bipolar inputs:
    /// c_0 = b_0 + sum_i b_i / 2, c_i = b_i / 2.
    std::vector<double> bipolar_coefficients() const;
};

inline constexpr double kRidgeLambda = 1e-8;

RegressionFit fit_linear(std::span<const Instance> data);

struct McroInit {
    CfModel model;
    /// Bipolar-space targets actually met by sum_j u_j w_ji, after any
    /// rescaling of infeasible coordinates.
    std::vector<double> targets;
    std::vector<std::string> warnings;
};

/// Output weights u_j ~ U(0.2, 0.8); every coordinate's target c_i is split
/// into random positive shares a_j (summing to 1) and w_ji = a_j c_i / u_j,
/// so sum_j u_j w_ji = c_i. Shares that would push |w_ji| past 1 are blended
/// toward u-proportional shares; a coordinate with |c_i| > sum_j u_j cannot be
/// met at all and is scaled down to that bound with a warning.
McroInit mcro_init(std::size_t k, std::size_t dim, const RegressionFit& fit, std::uint64_t seed);

/// |sum_j u_j w_ji - c_i| maximised over i (i = 0 is the bias).
double mcro_constraint_residual(const CfModel& m, std::span<const double> targets);

}  // namespace cfrule
