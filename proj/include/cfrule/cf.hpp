#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Certainty-factor calculus: the combining function f_cf, its sign-split
// halves, and exact partial derivatives.
//
// Arguments are validated against their domain. Values that overshoot a bound
// by at most kSnapTolerance are snapped onto it; anything further out is a
// std::domain_error.
namespace cfrule::cf {

inline constexpr double kSnapTolerance = 1e-9;

/// A certainty factor in [-1, 1].
class CfValue {
public:
    CfValue() = default;
    explicit CfValue(double value);

    double value() const noexcept { return value_; }
    operator double() const noexcept { return value_; }

private:
    double value_ = 0.0;
};

/// Snap `x` into [lo, hi] if it lies within kSnapTolerance of the interval,
/// otherwise throw std::domain_error naming `what`.
double checked(double x, double lo, double hi, const char* what);

/// 1 - prod(1 - x_i) over arguments in [0, 1]. Empty input gives 0.
double cf_positive(std::span<const double> xs);

/// -1 + prod(1 + y_j) over arguments in [-1, 0]. Empty input gives 0.
double cf_negative(std::span<const double> ys);

/// f_cf: arguments >= 0 go through cf_positive, arguments < 0 through
/// cf_negative, and the two halves are summed.
double cf_combine(std::span<const double> zs);

/// d f_cf / d z_j.
///
/// For z_j >= 0 this is the product of (1 - z_l) over the other nonnegative
/// arguments; for z_j < 0 the product of (1 + z_l) over the other negative
/// arguments. f_cf has a kink at 0; the derivative there is taken from the
/// nonnegative branch. Throws std::out_of_range if j is not a valid index.
double cf_partial(std::span<const double> zs, std::size_t j);

/// All partial derivatives of f_cf at zs, in O(n) via prefix/suffix products.
/// No division is used, so zero factors stay exact zeros.
std::vector<double> cf_partials(std::span<const double> zs);

}  // namespace cfrule::cf
