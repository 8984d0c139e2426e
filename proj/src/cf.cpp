#include "cfrule/cf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace cfrule::cf {

namespace {

// Multiplies in ascending order. Floating-point products depend on the order
// of evaluation, so a canonical order makes f_cf exactly invariant under
// permutation of its arguments.
double ordered_product(std::vector<double>& factors)
{
    std::sort(factors.begin(), factors.end());
    double prod = 1.0;
    for (double f : factors) prod *= f;
    return prod;
}

}  // namespace

CfValue::CfValue(double value) : value_(checked(value, -1.0, 1.0, "certainty factor")) {}

double checked(double x, double lo, double hi, const char* what)
{
    if (!std::isfinite(x)) {
        throw std::domain_error(std::string(what) + " is not finite");
    }
    if (x < lo) {
        if (lo - x > kSnapTolerance) {
            throw std::domain_error(std::string(what) + " " + std::to_string(x) + " below " +
                                    std::to_string(lo));
        }
        return lo;
    }
    if (x > hi) {
        if (x - hi > kSnapTolerance) {
            throw std::domain_error(std::string(what) + " " + std::to_string(x) + " above " +
                                    std::to_string(hi));
        }
        return hi;
    }
    return x;
}

double cf_positive(std::span<const double> xs)
{
    std::vector<double> factors;
    factors.reserve(xs.size());
    for (double x : xs) factors.push_back(1.0 - checked(x, 0.0, 1.0, "cf_positive argument"));
    return 1.0 - ordered_product(factors);
}

double cf_negative(std::span<const double> ys)
{
    std::vector<double> factors;
    factors.reserve(ys.size());
    for (double y : ys) factors.push_back(1.0 + checked(y, -1.0, 0.0, "cf_negative argument"));
    return -1.0 + ordered_product(factors);
}

double cf_combine(std::span<const double> zs)
{
    // Same factor order as cf_positive and cf_negative on the split sequences,
    // so the results agree bit for bit.
    std::vector<double> pos;
    std::vector<double> neg;
    pos.reserve(zs.size());
    for (double raw : zs) {
        const double z = checked(raw, -1.0, 1.0, "cf_combine argument");
        if (z >= 0.0) {
            pos.push_back(1.0 - z);
        } else {
            neg.push_back(1.0 + z);
        }
    }
    return (1.0 - ordered_product(pos)) + (-1.0 + ordered_product(neg));
}

double cf_partial(std::span<const double> zs, std::size_t j)
{
    if (j >= zs.size()) {
        throw std::out_of_range("cf_partial index " + std::to_string(j) + " out of range for " +
                                std::to_string(zs.size()) + " arguments");
    }
    const bool nonneg = checked(zs[j], -1.0, 1.0, "cf_partial argument") >= 0.0;
    double prod = 1.0;
    for (std::size_t l = 0; l < zs.size(); ++l) {
        const double z = checked(zs[l], -1.0, 1.0, "cf_partial argument");
        if (l == j) continue;
        if (nonneg && z >= 0.0) {
            prod *= 1.0 - z;
        } else if (!nonneg && z < 0.0) {
            prod *= 1.0 + z;
        }
    }
    return prod;
}

std::vector<double> cf_partials(std::span<const double> zs)
{
    const std::size_t n = zs.size();
    std::vector<double> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        z[i] = checked(zs[i], -1.0, 1.0, "cf_partials argument");
    }

    // pre_*[i] holds the products over arguments before i, split by branch.
    std::vector<double> pre_pos(n + 1, 1.0), pre_neg(n + 1, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        pre_pos[i + 1] = pre_pos[i] * (z[i] >= 0.0 ? 1.0 - z[i] : 1.0);
        pre_neg[i + 1] = pre_neg[i] * (z[i] < 0.0 ? 1.0 + z[i] : 1.0);
    }
    std::vector<double> out(n);
    double suf_pos = 1.0;
    double suf_neg = 1.0;
    for (std::size_t i = n; i-- > 0;) {
        out[i] = z[i] >= 0.0 ? pre_pos[i] * suf_pos : pre_neg[i] * suf_neg;
        if (z[i] >= 0.0) {
            suf_pos = (1.0 - z[i]) * suf_pos;
        } else {
            suf_neg = (1.0 + z[i]) * suf_neg;
        }
    }
    return out;
}

}  // namespace cfrule::cf
