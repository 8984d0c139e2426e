#include "cfrule/mcro.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "cfrule/random.hpp"

namespace cfrule {

std::vector<double> RegressionFit::bipolar_coefficients() const
{
    std::vector<double> c(coefficients.size());
    if (c.empty()) return c;
    c[0] = coefficients[0];
    for (std::size_t i = 1; i < coefficients.size(); ++i) {
        c[i] = coefficients[i] / 2.0;
        c[0] += coefficients[i] / 2.0;
    }
    return c;
}

RegressionFit fit_linear(std::span<const Instance> data)
{
    if (data.empty()) throw std::invalid_argument("cannot fit a regression on an empty dataset");
    const std::size_t d = data.front().x.size();
    const auto n = static_cast<Eigen::Index>(data.size());
    const auto p = static_cast<Eigen::Index>(d + 1);

    Eigen::MatrixXd design(n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& inst = data[static_cast<std::size_t>(r)];
        check_dim(d, inst.x);
        design(r, 0) = 1.0;
        for (std::size_t i = 0; i < d; ++i) {
            design(r, static_cast<Eigen::Index>(i + 1)) = (inst.x[i] + 1.0) / 2.0;
        }
        y(r) = inst.target();
    }

    const Eigen::MatrixXd normal = design.transpose() * design;
    const Eigen::VectorXd rhs = design.transpose() * y;

    RegressionFit fit;
    Eigen::VectorXd b;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    const auto diag = ldlt.vectorD().cwiseAbs();
    const bool singular = ldlt.info() != Eigen::Success || diag.minCoeff() <= 1e-12 * diag.maxCoeff();
    if (singular) {
        Eigen::MatrixXd regularized = normal;
        regularized.diagonal().array() += kRidgeLambda;
        b = regularized.ldlt().solve(rhs);
        fit.ridge_used = true;
    } else {
        b = ldlt.solve(rhs);
    }
    if (!b.allFinite()) throw std::runtime_error("regression produced non-finite coefficients");

    fit.coefficients.assign(b.data(), b.data() + b.size());
    fit.residual_sum_squares = (y - design * b).squaredNorm();
    return fit;
}

McroInit mcro_init(std::size_t k, std::size_t dim, const RegressionFit& fit, std::uint64_t seed)
{
    if (k == 0) throw std::invalid_argument("model needs at least one channel");
    if (fit.dim() != dim) {
        throw std::invalid_argument("regression has " + std::to_string(fit.dim()) +
                                    " coefficients, model dimensionality is " + std::to_string(dim));
    }
    Rng rng(seed);
    McroInit out;
    out.targets = fit.bipolar_coefficients();

    std::vector<Channel> channels(k);
    double u_sum = 0.0;
    for (auto& ch : channels) {
        ch.u = rng.uniform(0.2, 0.8);
        ch.w.assign(dim, 0.0);
        u_sum += ch.u;
    }

    std::vector<double> share(k);
    for (std::size_t i = 0; i <= dim; ++i) {
        double total = 0.0;
        for (auto& a : share) {
            a = rng.uniform(0.1, 1.0);
            total += a;
        }
        for (auto& a : share) a /= total;

        double& c = out.targets[i];
        const double mag = std::abs(c);
        if (mag > u_sum) {
            out.warnings.push_back("coefficient " + std::to_string(i) + " (" + std::to_string(c) +
                                   ") exceeds the channel capacity " + std::to_string(u_sum) +
                                   "; scaled down");
            c = std::copysign(u_sum, c);
        }

        // Blend a -> (1 - t) a + t u/S with the smallest t that keeps every
        // a_j |c| <= u_j. The constraint is linear in t and holds at t = 1.
        double t = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double at_zero = share[j] * std::abs(c) - channels[j].u;
            const double at_one = channels[j].u / u_sum * std::abs(c) - channels[j].u;
            if (at_zero > 0.0) t = std::max(t, at_zero / (at_zero - at_one));
        }
        if (t > 0.0) {
            for (std::size_t j = 0; j < k; ++j) {
                share[j] = (1.0 - t) * share[j] + t * channels[j].u / u_sum;
            }
        }

        for (std::size_t j = 0; j < k; ++j) {
            const double w = std::clamp(share[j] * c / channels[j].u, -1.0, 1.0);
            if (i == 0) {
                channels[j].bias = w;
            } else {
                channels[j].w[i - 1] = w;
            }
        }
    }
    out.model = CfModel(dim, std::move(channels));
    return out;
}

double mcro_constraint_residual(const CfModel& m, std::span<const double> targets)
{
    if (targets.size() != m.dim() + 1) throw std::invalid_argument("target count mismatch");
    double worst = 0.0;
    for (std::size_t i = 0; i <= m.dim(); ++i) {
        double sum = 0.0;
        for (const auto& ch : m.channels()) sum += ch.u * (i == 0 ? ch.bias : ch.w[i - 1]);
        worst = std::max(worst, std::abs(sum - targets[i]));
    }
    return worst;
}

}  // namespace cfrule
