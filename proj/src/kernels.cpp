#include "wna/kernels.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace wna {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2.0;

// x - log1p(x), stable for small x.
double x_minus_log1p(double x) {
    if (x < 1e-3) {
        // x^2/2 - x^3/3 + x^4/4 - x^5/5 + x^6/6
        return x * x * (0.5 + x * (-1.0 / 3.0 + x * (0.25 + x * (-0.2 + x / 6.0))));
    }
    return x - std::log1p(x);
}

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

}  // namespace

std::string PhaseRule::format_beta(double beta) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", beta);
    return buf;
}

KernelSpec KernelSpec::weyl_nagy(double r, PhaseRule phases, std::int64_t n) {
    if (!(r > 0.5)) throw std::invalid_argument("weyl_nagy: r must exceed 1/2");
    if (n < 1) throw std::invalid_argument("weyl_nagy: n must be >= 1");
    KernelSpec spec;
    spec.family = KernelFamily::weyl_nagy;
    spec.r = r;
    spec.phases = std::move(phases);
    spec.n = n;
    return spec;
}

KernelSpec KernelSpec::poisson(double q, PhaseRule phases, std::int64_t n) {
    if (!(q > 0.0 && q < 1.0)) throw std::invalid_argument("poisson: q must lie in (0,1)");
    if (n < 1) throw std::invalid_argument("poisson: n must be >= 1");
    KernelSpec spec;
    spec.family = KernelFamily::poisson;
    spec.q = q;
    spec.phases = std::move(phases);
    spec.n = n;
    return spec;
}

double KernelSpec::decay_log_scale() const {
    return family == KernelFamily::weyl_nagy
               ? -r * std::log(static_cast<double>(n))
               : static_cast<double>(n) * std::log(q);
}

TrigTail::TrigTail(std::int64_t n, const std::vector<double>& coeff,
                   const PhaseRule& phases, double truncation_bound)
    : n_(n), truncation_bound_(truncation_bound) {
    zr_.resize(coeff.size());
    zi_.resize(coeff.size());
    KahanSum mod, sq;
    for (std::size_t j = 0; j < coeff.size(); ++j) {
        const double c = coeff[j];
        const double phase = phases(n + static_cast<std::int64_t>(j)) * kHalfPi;
        zr_[j] = c * std::cos(phase);
        zi_[j] = -c * std::sin(phase);
        mod.add(std::fabs(c));
        sq.add(c * c);
    }
    modulus_sum_ = mod.sum;
    squared_sum_ = sq.sum;
    suffix_modulus_.assign(coeff.size() + 1, 0.0);
    for (std::size_t j = coeff.size(); j-- > 0;) {
        suffix_modulus_[j] = suffix_modulus_[j + 1] + std::fabs(coeff[j]);
    }
}

std::int64_t TrigTail::effective_bandwidth(double mass_tol) const {
    const double cutoff = mass_tol * std::max(modulus_sum_, 1e-300);
    std::int64_t k = term_count() - 1;
    while (k > 0 && suffix_modulus_[static_cast<std::size_t>(k)] + truncation_bound_ <= cutoff) {
        --k;
    }
    return n_ + k;
}

double TrigTail::operator()(double t) const {
    // f(t) = Re[ e^{i n t} * sum_j z_j e^{i j t} ]
    const std::size_t count = zr_.size();
    const double ct = std::cos(t), st = std::sin(t);
    double wr = 1.0, wi = 0.0;  // e^{i j t}
    KahanSum sr, si;
    for (std::size_t j = 0; j < count; ++j) {
        if ((j & 127u) == 0u && j > 0u) {
            // resync the rotation so drift stays near 1 ulp
            const double a = static_cast<double>(j) * t;
            wr = std::cos(a);
            wi = std::sin(a);
        }
        sr.add(zr_[j] * wr - zi_[j] * wi);
        si.add(zr_[j] * wi + zi_[j] * wr);
        const double nwr = wr * ct - wi * st;
        wi = wr * st + wi * ct;
        wr = nwr;
    }
    const double a = static_cast<double>(n_) * t;
    return std::cos(a) * sr.sum - std::sin(a) * si.sum;
}

double tail_truncation_bound(double r, std::int64_t n, std::int64_t terms_taken) {
    if (!(r > 1.0)) throw std::domain_error("tail_truncation_bound: requires r > 1");
    const double nd = static_cast<double>(n);
    const double log_bound = std::log(nd / (r - 1.0)) +
                             (1.0 - r) * std::log1p(static_cast<double>(terms_taken) / nd);
    return std::exp(log_bound);
}

TrigTail make_weyl_nagy_tail(const KernelSpec& spec, const TruncationBudget& budget) {
    if (spec.family != KernelFamily::weyl_nagy)
        throw std::invalid_argument("make_weyl_nagy_tail: wrong family");
    if (!(spec.r > 1.0))
        throw std::domain_error("weyl_nagy tail: pointwise series needs r > 1");
    const double nd = static_cast<double>(spec.n);
    std::vector<double> coeff;
    coeff.reserve(256);
    KahanSum mod;
    for (std::int64_t j = 0;; ++j) {
        if (j >= budget.max_terms) {
            throw TruncationError("weyl_nagy tail: term budget exhausted",
                                  tail_truncation_bound(spec.r, spec.n, j - 1));
        }
        const double c = std::exp(-spec.r * std::log1p(static_cast<double>(j) / nd));
        coeff.push_back(c);
        mod.add(c);
        if (tail_truncation_bound(spec.r, spec.n, j) <= budget.tol * mod.sum) break;
    }
    return TrigTail(spec.n, coeff, spec.phases,
                    tail_truncation_bound(spec.r, spec.n,
                                          static_cast<std::int64_t>(coeff.size()) - 1));
}

TrigTail make_poisson_tail(const KernelSpec& spec, const TruncationBudget& budget) {
    if (spec.family != KernelFamily::poisson)
        throw std::invalid_argument("make_poisson_tail: wrong family");
    const double q = spec.q;
    std::vector<double> coeff;
    coeff.reserve(64);
    KahanSum mod;
    double c = 1.0;
    for (std::int64_t j = 0;; ++j) {
        if (j >= budget.max_terms)
            throw TruncationError("poisson tail: term budget exhausted", c * q / (1.0 - q));
        coeff.push_back(c);
        mod.add(c);
        const double residual = c * q / (1.0 - q);  // geometric tail
        if (residual <= budget.tol * mod.sum) {
            return TrigTail(spec.n, coeff, spec.phases, residual);
        }
        c *= q;
    }
}

TrigTail make_remainder_tail(double r, const PhaseRule& phases, std::int64_t n,
                             const TruncationBudget& budget) {
    if (!(r > 1.0)) throw std::domain_error("remainder tail: requires r > 1");
    const double nd = static_cast<double>(n);
    std::vector<double> coeff;
    coeff.reserve(256);
    coeff.push_back(0.0);  // the j = 0 terms of the two tails cancel exactly
    KahanSum mod;
    for (std::int64_t j = 1;; ++j) {
        if (j >= budget.max_terms)
            throw TruncationError("remainder tail: term budget exhausted",
                                  tail_truncation_bound(r, n, j - 1));
        const double c = phi(static_cast<double>(j) / nd, r);
        coeff.push_back(c);
        mod.add(c);
        // phi(j/n) <= (1+j/n)^-r, so the polynomial tail bound covers this one
        const double bound = tail_truncation_bound(r, n, j);
        if (bound <= budget.tol * std::max(mod.sum, 1e-300)) {
            return TrigTail(n, coeff, phases, bound);
        }
    }
}

double scaled_weyl_nagy_tail(const KernelSpec& spec, double t,
                             const TruncationBudget& budget) {
    return make_weyl_nagy_tail(spec, budget)(t);
}

double scaled_poisson_tail(const KernelSpec& spec, double t,
                           const TruncationBudget& budget) {
    if (spec.family != KernelFamily::poisson)
        throw std::invalid_argument("scaled_poisson_tail: wrong family");
    if (spec.phases.is_constant()) {
        // sum_{j>=0} q^j cos((n+j)t - beta pi/2) in closed geometric form
        const double q = spec.q;
        const double theta = static_cast<double>(spec.n) * t -
                             spec.phases.constant_value() * kHalfPi;
        const double half = std::sin(t / 2.0);
        const double denom = (1.0 - q) * (1.0 - q) + 4.0 * q * half * half;
        return (std::cos(theta) - q * std::cos(theta - t)) / denom;
    }
    return make_poisson_tail(spec, budget)(t);
}

double phi(double x, double r) {
    if (!(x >= 0.0)) throw std::domain_error("phi: x must be >= 0");
    if (!(r > 1.0)) throw std::domain_error("phi: r must exceed 1");
    if (x == 0.0) return 0.0;
    // (1+x)^-r - e^{-rx} = (1+x)^-r * (1 - e^{-r(x - log1p x)}); both factors
    // stay in [0, 1], so no overflow and no sign flip from rounding.
    const double d = r * x_minus_log1p(x);
    return std::exp(-r * std::log1p(x)) * (-std::expm1(-d));
}

double scaled_remainder_kernel(double r, const PhaseRule& phases, std::int64_t n,
                               double t, const TruncationBudget& budget) {
    return make_remainder_tail(r, phases, n, budget)(t);
}

}  // namespace wna
