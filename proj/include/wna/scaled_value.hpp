#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wna {

// A nonnegative real carried as mantissa * exp(log_scale).  Quantities of
// size n^-r with r up to n^2 live here; the scale exponent is never fed to
// exp() unless the caller explicitly asks for the collapsed value.
struct ScaledValue {
    double mantissa = 0.0;   // >= 0
    double log_scale = 0.0;  // natural log of the scale factor

    // Collapses to a plain double.  Under/overflows when |log_scale| is
    // beyond the double range; callers in the theorem bands never do this.
    double value() const { return mantissa * std::exp(log_scale); }

    double log10_value() const {
        return std::log10(mantissa) + log_scale / std::numbers::ln10;
    }

    // Mantissa re-expressed at a different scale.
    double mantissa_at(double target_log_scale) const {
        return mantissa * std::exp(log_scale - target_log_scale);
    }

    // Keeps the mantissa within [1e-3, 1e3], moving the excess to the scale.
    ScaledValue normalized() const {
        ScaledValue out = *this;
        while (out.mantissa != 0.0 && out.mantissa < 1e-3) {
            out.mantissa *= 1e3;
            out.log_scale -= std::log(1e3);
        }
        while (out.mantissa > 1e3) {
            out.mantissa *= 1e-3;
            out.log_scale += std::log(1e3);
        }
        return out;
    }
};

// Accuracy knobs for infinite-series truncation.
struct TruncationBudget {
    double tol = 1e-12;               // relative tolerance
    std::int64_t max_terms = 50'000'000;
};

// Raised when a series cannot meet its tail bound within the budget.
class TruncationError : public std::runtime_error {
  public:
    TruncationError(const std::string& what, double residual)
        : std::runtime_error(what), residual_bound(residual) {}
    double residual_bound;
};

// Raised when quadrature refinement stalls; carries the best value seen.
class AccuracyError : public std::runtime_error {
  public:
    AccuracyError(const std::string& what, double best, double gauge)
        : std::runtime_error(what), best_estimate(best), error_gauge(gauge) {}
    double best_estimate;
    double error_gauge;
};

// Raised when (r, n) lies outside the band a formula is stated for.
class RegimeError : public std::domain_error {
  public:
    using std::domain_error::domain_error;
};

}  // namespace wna
