#include "wna/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace wna {

namespace {

constexpr double kPi = std::numbers::pi;

struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;
    void add(double term) {
        double y = term - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
};

// Streaming log-sum-exp with a running maximum.
struct LogSumExp {
    double lmax = -std::numeric_limits<double>::infinity();
    double acc = 0.0;  // sum of exp(l_i - lmax)
    void add(double l) {
        if (l > lmax) {
            acc = acc * std::exp(lmax - l) + 1.0;
            lmax = l;
        } else {
            acc += std::exp(l - lmax);
        }
    }
    double log_sum() const { return lmax + std::log(acc); }
};

// log(1 - 2q cos x + q^2) through the cancellation-free form
// (1-q)^2 + 4q sin^2(x/2).
double log_poisson_denom(double q, double x) {
    const double s = std::sin(x / 2.0);
    return std::log((1.0 - q) * (1.0 - q) + 4.0 * q * s * s);
}

}  // namespace

double hyp2f1_unit_c(double a, double b, double z, double tol) {
    if (!(a > 0.0 && b > 0.0)) throw std::domain_error("hyp2f1_unit_c: needs a, b > 0");
    if (!(z >= 0.0)) throw std::domain_error("hyp2f1_unit_c: needs z >= 0");
    if (z >= 1.0) throw std::domain_error("hyp2f1_unit_c: series diverges at z >= 1");
    if (z == 0.0) return 1.0;

    const double ratio_cap = 0.5 * (1.0 + z);
    const std::int64_t term_cap = 2'000'000;
    KahanSum sum;
    sum.add(1.0);
    double term = 1.0;
    for (std::int64_t k = 0;; ++k) {
        const double kk = static_cast<double>(k);
        const double ratio = (a + kk) * (b + kk) * z / ((kk + 1.0) * (kk + 1.0));
        term *= ratio;
        sum.add(term);
        if (ratio <= ratio_cap && term / (1.0 - ratio_cap) <= tol * sum.sum) break;
        if (k >= term_cap) {
            throw AccuracyError(
                "hyp2f1_unit_c: series stalled near z = 1; use the integral path",
                sum.sum, term / sum.sum);
        }
    }
    return sum.sum;
}

double elliptic_k(double q) {
    if (!(q >= 0.0 && q < 1.0)) throw std::domain_error("elliptic_k: needs q in [0,1)");
    double a = 1.0;
    double g = std::sqrt((1.0 - q) * (1.0 + q));
    for (int i = 0; i < 12; ++i) {
        const double an = 0.5 * (a + g);
        g = std::sqrt(a * g);
        a = an;
        if (std::fabs(a - g) <= 1e-17 * a) break;
    }
    return kPi / (2.0 * a);
}

double f_power_via_integral(double s, double q, int grid_points) {
    if (!(s >= 1.0)) throw std::domain_error("f_power_via_integral: needs s >= 1");
    if (!(q >= 0.0 && q < 1.0))
        throw std::domain_error("f_power_via_integral: needs q in [0,1)");
    if (grid_points < 64 || (grid_points & (grid_points - 1)) != 0)
        throw std::invalid_argument("f_power_via_integral: grid must be a power of two >= 64");
    // (1/2pi) int (1 - 2q cos x + q^2)^{-s/2} dx, log-domain mean over a
    // uniform grid (the integrand is smooth and periodic).
    LogSumExp lse;
    for (int i = 0; i < grid_points; ++i) {
        const double x = 2.0 * kPi * static_cast<double>(i) / grid_points;
        lse.add(-0.5 * s * log_poisson_denom(q, x));
    }
    const double log_mean = lse.log_sum() - std::log(static_cast<double>(grid_points));
    if (!std::isfinite(log_mean))
        throw AccuracyError("f_power_via_integral: log range exceeded", 0.0, 0.0);
    return std::exp(log_mean / s);
}

namespace {

// Log-domain series for F^{1/s}(s/2, s/2; 1; z): terms can overflow doubles
// for large s, their logs cannot.
double f_power_series(double s, double z, double tol) {
    if (z == 0.0) return 1.0;
    const double a = s / 2.0;
    const double ratio_cap = 0.5 * (1.0 + z);
    LogSumExp lse;
    lse.add(0.0);  // k = 0 term
    double log_term = 0.0;
    for (std::int64_t k = 0;; ++k) {
        const double kk = static_cast<double>(k);
        const double ratio = (a + kk) * (a + kk) * z / ((kk + 1.0) * (kk + 1.0));
        log_term += std::log(ratio);
        lse.add(log_term);
        if (ratio <= ratio_cap) {
            const double tail = std::exp(log_term - lse.log_sum()) * ratio_cap /
                                (1.0 - ratio_cap);
            if (tail <= tol) break;
        }
        if (k > 10'000'000)
            throw AccuracyError("f_power series stalled", std::exp(lse.log_sum() / s),
                                0.0);
    }
    return std::exp(lse.log_sum() / s);
}

}  // namespace

double f_power(double s, double q, double tol) {
    if (!(s >= 1.0)) throw std::domain_error("f_power: needs s >= 1");
    if (!(q >= 0.0 && q < 1.0)) throw std::domain_error("f_power: needs q in [0,1)");
    const double z = q * q;
    if (z <= 0.81) return f_power_series(s, z, tol);
    int grid = 1024;
    double prev = f_power_via_integral(s, q, grid);
    for (int pass = 0; pass < 11; ++pass) {
        grid *= 2;
        const double next = f_power_via_integral(s, q, grid);
        if (std::fabs(next - prev) <= tol * std::fabs(next)) return next;
        prev = next;
    }
    return prev;
}

double cos_norm(double p) {
    if (std::isinf(p)) return 1.0;
    if (!(p >= 1.0)) throw std::domain_error("cos_norm: needs p >= 1 or infinity");
    // int_{-pi}^{pi} |cos|^p = 2 sqrt(pi) Gamma((p+1)/2) / Gamma(p/2 + 1)
    const double log_integral = std::log(2.0) + 0.5 * std::log(kPi) +
                                log_gamma((p + 1.0) / 2.0) - log_gamma(p / 2.0 + 1.0);
    return std::exp(log_integral / p);
}

double log_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma: needs x > 0");
    // Lanczos, g = 7, 9 terms.
    static const double coeff[9] = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
    if (x < 0.5) {
        // reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return std::log(kPi / std::sin(kPi * x)) - log_gamma(1.0 - x);
    }
    const double xm1 = x - 1.0;
    double series = coeff[0];
    for (int i = 1; i < 9; ++i) series += coeff[i] / (xm1 + static_cast<double>(i));
    const double t = xm1 + 7.5;
    return 0.5 * std::log(2.0 * kPi) + (xm1 + 0.5) * std::log(t) - t + std::log(series);
}

ScaledValue zeta_tail(double two_r, std::int64_t n) {
    if (!(two_r > 1.0)) throw std::domain_error("zeta_tail: diverges for 2r <= 1");
    const double s = two_r;
    const double nd = static_cast<double>(n);
    // 30 direct terms keep the three-term Bernoulli tail below 1e-15 even at
    // n = 1; ten are not enough there.
    const std::int64_t direct = std::max<std::int64_t>(
        30, static_cast<std::int64_t>(std::ceil(s)));
    // mantissa at scale n^-s: sum_j (1 + j/n)^-s
    KahanSum mantissa;
    for (std::int64_t j = 0; j < direct; ++j) {
        mantissa.add(std::exp(-s * std::log1p(static_cast<double>(j) / nd)));
    }
    // Euler-Maclaurin from N = n + direct, three Bernoulli corrections:
    // sum_{k>=N} k^-s = N^{1-s}/(s-1) + N^-s/2 + s N^{-s-1}/12
    //                   - s(s+1)(s+2) N^{-s-3}/720
    //                   + s...(s+4) N^{-s-5}/30240
    const double N = nd + static_cast<double>(direct);
    const double head_log = -s * std::log(N / nd);  // (N/n)^-s
    const double head = std::exp(head_log);
    if (head > 0.0) {
        double tail = N / (s - 1.0) + 0.5;
        tail += s / (12.0 * N);
        tail -= s * (s + 1.0) * (s + 2.0) / (720.0 * N * N * N);
        tail += s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) /
                (30240.0 * N * N * N * N * N);
        mantissa.add(head * tail);
    }
    return ScaledValue{mantissa.sum, -s * std::log(nd)};
}

namespace {

// ln integral_0^inf u^{s-1} e^-u / (1 - e^{-u/n}) du via the substitution
// u = e^w; the integrand in w decays exponentially on the left and doubly
// exponentially on the right, so the trapezoid rule converges spectrally
// and the u -> 0 algebraic singularity disappears.
double log_bose_integral(double s, double n) {
    auto log_integrand = [&](double w) {
        const double u = std::exp(w);
        return s * w - u - std::log(-std::expm1(-u / n));
    };
    // peak of s w - e^w sits at w = ln s; the Bose factor only shifts it left
    double w_peak = std::log(s);
    double l_peak = log_integrand(w_peak);
    for (int i = 0; i < 60; ++i) {  // crude descent to the true maximum
        const double h = 0.05;
        const double left = log_integrand(w_peak - h);
        const double right = log_integrand(w_peak + h);
        if (left > l_peak) {
            w_peak -= h;
            l_peak = left;
        } else if (right > l_peak) {
            w_peak += h;
            l_peak = right;
        } else {
            break;
        }
    }
    const double drop = 60.0;
    double w_lo = w_peak;
    while (log_integrand(w_lo) > l_peak - drop) w_lo -= std::max(0.5, 8.0 / s);
    double w_hi = w_peak;
    while (log_integrand(w_hi) > l_peak - drop) w_hi += 0.25;

    double prev = 0.0;
    for (int points = 257;; points = 2 * points - 1) {
        const double h = (w_hi - w_lo) / static_cast<double>(points - 1);
        LogSumExp lse;
        for (int i = 0; i < points; ++i) {
            lse.add(log_integrand(w_lo + h * static_cast<double>(i)));
        }
        const double value = lse.log_sum() + std::log(h);
        if (points > 300 && std::fabs(value - prev) <= 1e-12 * std::fabs(value) + 1e-13)
            return value;
        if (points > (1 << 20))
            throw AccuracyError("log_bose_integral failed to settle", value,
                                std::fabs(value - prev));
        prev = value;
    }
}

}  // namespace

ScaledValue exact_l2_value(double r, std::int64_t n) {
    if (!(r > 0.5)) throw std::domain_error("exact_l2_value: needs r > 1/2");
    const double s = 2.0 * r;
    const ScaledValue zt = zeta_tail(s, n);
    const double series_mantissa = std::sqrt(zt.mantissa / kPi);

    // Independent route: 1/sqrt(pi Gamma(2r)) (int_0^inf t^{2r-1} e^{-nt} /
    // (1-e^{-t}) dt)^{1/2}, u = nt already substituted out of the scale.
    const double log_integral = log_bose_integral(s, static_cast<double>(n));
    const double integral_mantissa =
        std::exp(0.5 * (log_integral - std::log(kPi) - log_gamma(s)));

    const double rel = std::fabs(series_mantissa - integral_mantissa) / series_mantissa;
    if (!(rel <= 1e-10)) {
        throw AccuracyError("exact_l2_value: series and integral forms disagree",
                            series_mantissa, rel);
    }
    return ScaledValue{series_mantissa, -r * std::log(static_cast<double>(n))};
}

}  // namespace wna
