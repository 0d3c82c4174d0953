#include "wna/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "wna/specfun.hpp"

namespace wna {

namespace {

constexpr double kPi = std::numbers::pi;

double conjugate_of(double p) {
    if (std::isinf(p)) return 1.0;
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return p / (p - 1.0);
}

// Relative slack so band membership does not flip on the last ulp of
// sqrt(n)+1 or n+1.
constexpr double kBandSlack = 1e-9;

double log_n(std::int64_t n) { return std::log(static_cast<double>(n)); }

ScaledValue band1_remainder(double r, std::int64_t n) {
    return {static_cast<double>(n) / (r * r), -r * log_n(n)};
}

ScaledValue band2_remainder(double r, std::int64_t n) {
    const double nd = static_cast<double>(n);
    return {r * std::exp(-r / nd) / (nd * nd), -r * log_n(n)};
}

}  // namespace

std::string RegimeTag::label() const {
    if (in_band1 && in_band2) return "band1+band2";
    if (in_band1) return "band1";
    if (in_band2) return "band2";
    return "outside";
}

RegimeTag regime_classify(double r, std::int64_t n) {
    const double nd = static_cast<double>(n);
    const double lo1 = std::sqrt(nd) + 1.0;
    const double hi1 = nd + 1.0;
    const double hi2 = nd * nd;
    RegimeTag tag;
    const double slack1 = kBandSlack * hi1;
    const double slack2 = kBandSlack * hi2;
    tag.in_band1 = (r >= lo1 - slack1) && (r <= hi1 + slack1);
    tag.in_band2 = (r >= hi1 - slack1) && (r <= hi2 + slack2);
    return tag;
}

ScaledValue remainder_scale(double r, std::int64_t n) {
    const RegimeTag tag = regime_classify(r, n);
    if (tag.outside()) throw RegimeError("remainder_scale: (r, n) outside both bands");
    if (tag.in_band1 && tag.in_band2) {
        const ScaledValue a = band1_remainder(r, n);
        const ScaledValue b = band2_remainder(r, n);
        return a.mantissa >= b.mantissa ? a : b;
    }
    return tag.in_band1 ? band1_remainder(r, n) : band2_remainder(r, n);
}

namespace {

// Shared engine: exponent = p' for the uniform metric, p for the L_p one.
// closed_at_infinite_exponent: the 1/(pi(1-q)) branch fires when the
// norm exponent is infinite (p = 1 uniform, p = infinity integral).
MainTermResult main_term_impl(double norm_exponent, double r, std::int64_t n,
                              const char* band1_id, const char* band2_id) {
    const RegimeTag tag = regime_classify(r, n);
    if (tag.outside()) throw RegimeError("main term: (r, n) outside both bands");
    const double nd = static_cast<double>(n);
    const double q = std::exp(-r / nd);

    double mantissa;
    if (std::isinf(norm_exponent)) {
        mantissa = 1.0 / (kPi * (-std::expm1(-r / nd)));
    } else {
        mantissa = cos_norm(norm_exponent) / kPi * f_power(norm_exponent, q);
    }

    MainTermResult out;
    out.regime = tag;
    out.main = ScaledValue{mantissa, -r * log_n(n)};
    out.remainder_scale = remainder_scale(r, n);
    out.formula_id = tag.in_band1 ? band1_id : band2_id;
    return out;
}

}  // namespace

MainTermResult main_term_C(double p, double r, std::int64_t n) {
    if (!std::isinf(p) && !(p >= 1.0))
        throw std::domain_error("main_term_C: needs p >= 1 or infinity");
    return main_term_impl(conjugate_of(p), r, n, "thm1", "thm2");
}

MainTermResult main_term_L(double p, double r, std::int64_t n) {
    if (!std::isinf(p) && !(p >= 1.0))
        throw std::domain_error("main_term_L: needs p >= 1 or infinity");
    return main_term_impl(p, r, n, "thm3", "thm4");
}

MainTermResult classical_mains(double r, std::int64_t n, ClassicalVariant variant,
                               double p) {
    const double nd = static_cast<double>(n);
    const double scale = -r * log_n(n);
    MainTermResult out;
    out.regime = regime_classify(r, n);
    switch (variant) {
        case ClassicalVariant::log_order: {
            if (!(r >= 1.0)) throw RegimeError("classical log variant: needs r >= 1");
            // (4/pi^2) ln n at scale n^-r, remainder O(1) at the same scale
            out.main = ScaledValue{4.0 / (kPi * kPi) * log_n(n), scale};
            out.remainder_scale = ScaledValue{1.0, scale};
            out.formula_id = "log4";
            break;
        }
        case ClassicalVariant::stechkin_k: {
            if (!(r >= 1.0)) throw RegimeError("stechkin K variant: needs r >= 1");
            const double q = std::exp(-r / nd);
            out.main = ScaledValue{8.0 / (kPi * kPi) * elliptic_k(q), scale};
            out.remainder_scale = ScaledValue{1.0 / r, scale};
            out.formula_id = "stechkin6";
            break;
        }
        case ClassicalVariant::high_r: {
            if (!(r >= nd + 1.0)) throw RegimeError("high-r variant: needs r >= n+1");
            out.main = ScaledValue{4.0 / kPi, scale};
            out.remainder_scale =
                ScaledValue{std::exp(-r * std::log1p(1.0 / nd)), scale};
            out.formula_id = "stechkin8";
            break;
        }
        case ClassicalVariant::general: {
            if (!(r >= nd + 1.0)) throw RegimeError("general variant: needs r >= n+1");
            out.main = ScaledValue{cos_norm(conjugate_of(p)) / kPi, scale};
            out.remainder_scale =
                ScaledValue{std::exp(-r * std::log1p(1.0 / nd)), scale};
            out.formula_id = "gen11";
            break;
        }
    }
    return out;
}

MainTermResult corollary_terms(CorollaryId which, double p, double r, std::int64_t n) {
    const double nd = static_cast<double>(n);
    const double q = std::exp(-r / nd);
    const double scale = -r * log_n(n);
    const RegimeTag tag = regime_classify(r, n);
    MainTermResult out;
    out.regime = tag;
    switch (which) {
        case CorollaryId::c1:
            // 1/(r n^{r-1}) (1/pi + O(r/n + 1/r)) rewritten at scale n^-r
            if (!tag.in_band1) throw RegimeError("corollary 1: needs band 1");
            out.main = ScaledValue{nd / (kPi * r), scale};
            out.remainder_scale = ScaledValue{(nd / r) * (r / nd + 1.0 / r), scale};
            out.formula_id = "cor1";
            break;
        case CorollaryId::c2:
            if (!tag.in_band2) throw RegimeError("corollary 2: needs band 2");
            out.main = ScaledValue{(1.0 + q) / kPi, scale};
            out.remainder_scale = ScaledValue{(r / (nd * nd) + q) * q, scale};
            out.formula_id = "cor2";
            break;
        case CorollaryId::c3_C:
            if (!tag.in_band2) throw RegimeError("corollary 3: needs band 2");
            out.main = ScaledValue{cos_norm(conjugate_of(p)) / kPi, scale};
            out.remainder_scale = ScaledValue{q, scale};
            out.formula_id = "cor3C";
            break;
        case CorollaryId::c3_L:
            if (!tag.in_band2) throw RegimeError("corollary 3: needs band 2");
            out.main = ScaledValue{cos_norm(p) / kPi, scale};
            out.remainder_scale = ScaledValue{q, scale};
            out.formula_id = "cor3L";
            break;
        case CorollaryId::eq413:
            // 1/(1 - e^{-r/n}) = n/r + O(1); dimensionless, scale 0
            out.main = ScaledValue{nd / r, 0.0};
            out.remainder_scale = ScaledValue{1.0, 0.0};
            out.formula_id = "eq413";
            break;
        case CorollaryId::eq422:
            // F^{1/s}(s/2, s/2; 1; e^{-2r/n}) = 1 + O(1) e^{-r/n}
            out.main = ScaledValue{1.0, 0.0};
            out.remainder_scale = ScaledValue{q, 0.0};
            out.formula_id = "eq422";
            break;
    }
    return out;
}

}  // namespace wna
