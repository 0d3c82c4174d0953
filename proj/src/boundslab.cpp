#include "wna/boundslab.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "wna/asymptotics.hpp"
#include "wna/kernels.hpp"
#include "wna/sharp.hpp"

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

// m <= n/sqrt(r) < m+1, decided by the exact comparison m^2 r <=> n^2 so a
// half-ulp of sqrt cannot flip the split at perfect squares.
std::int64_t split_index(double r, std::int64_t n) {
    const double nd = static_cast<double>(n);
    std::int64_t m = static_cast<std::int64_t>(std::floor(nd / std::sqrt(r)));
    if (m < 0) m = 0;
    const long double n2 = static_cast<long double>(nd) * nd;
    while (static_cast<long double>(m + 1) * (m + 1) * r <= n2) ++m;
    while (m > 0 && static_cast<long double>(m) * m * r > n2) --m;
    return m;
}

}  // namespace

PhiSumResult phi_sum(double r, std::int64_t n, const TruncationBudget& budget) {
    if (!(r > 1.0)) throw std::domain_error("phi_sum: needs r > 1");
    const double nd = static_cast<double>(n);
    const double q = std::exp(-r / nd);
    PhiSumResult out;
    out.m = split_index(r, n);

    KahanSum head, tail;
    std::int64_t k = 1;
    for (; k <= out.m; ++k) head.add(phi(static_cast<double>(k) / nd, r));
    for (;; ++k) {
        if (k > budget.max_terms)
            throw TruncationError("phi_sum: term budget exhausted",
                                  tail_truncation_bound(r, n, k - 1));
        tail.add(phi(static_cast<double>(k) / nd, r));
        // polynomial-part bound plus the geometric bound on the e^{-rk/n} part
        const double residual = tail_truncation_bound(r, n, k) +
                                std::pow(q, static_cast<double>(k + 1)) / (1.0 - q);
        const double acc = head.sum + tail.sum;
        if (residual <= budget.tol * std::max(acc, 1e-300) && k > out.m) {
            out.residual_bound = residual;
            break;
        }
    }
    out.split_head = head.sum;
    out.split_tail = tail.sum;
    out.value = head.sum + tail.sum;
    return out;
}

Lemma1Report lemma1_split_check(double r, std::int64_t n) {
    const RegimeTag tag = regime_classify(r, n);
    if (!tag.in_band1) throw RegimeError("lemma1_split_check: needs band 1");
    const PhiSumResult ps = phi_sum(r, n);
    const double unit = static_cast<double>(n) / (r * r);
    Lemma1Report rep;
    rep.head = ps.split_head;
    rep.tail = ps.split_tail;
    rep.total = ps.value;
    rep.head_bound = 54.0 / std::numbers::e * unit;
    rep.tail_bound = (16.0 - 8.0 * std::sqrt(2.0)) * unit;
    rep.total_bound = 24.5518 * unit;
    rep.head_ok = ps.split_head + ps.residual_bound < rep.head_bound;
    rep.tail_ok = ps.split_tail + ps.residual_bound < rep.tail_bound;
    rep.total_ok = ps.value + ps.residual_bound < rep.total_bound;
    return rep;
}

double stechkin_sum_ratio(double r, std::int64_t n) {
    const RegimeTag tag = regime_classify(r, n);
    if (!tag.in_band2) throw RegimeError("stechkin_sum_ratio: needs band 2");
    const double nd = static_cast<double>(n);
    const PhiSumResult ps = phi_sum(r, n);
    // phi_sum * n^2 * e^{r/n} / r in the log domain
    return std::exp(std::log(ps.value) + 2.0 * std::log(nd) + r / nd - std::log(r));
}

namespace {

std::vector<double> geometric_grid(double lo, double hi, int per_decade) {
    std::vector<double> xs;
    const double step = std::pow(10.0, 1.0 / per_decade);
    for (double x = lo; x <= hi * (1.0 + 1e-12); x *= step) xs.push_back(std::min(x, hi));
    return xs;
}

InequalityCheck check_pointwise(const std::string& name,
                                const std::vector<double>& grid,
                                double (*lhs)(double), double (*rhs)(double)) {
    InequalityCheck c;
    c.name = name;
    c.ok = true;
    c.worst = -std::numeric_limits<double>::infinity();
    for (double x : grid) {
        const double v = lhs(x) - rhs(x);  // violation when positive
        if (v > c.worst) {
            c.worst = v;
            c.worst_at = x;
        }
        if (v > 1e-14 * std::fabs(rhs(x))) c.ok = false;
    }
    return c;
}

}  // namespace

bool InequalityReport::ok() const {
    for (const auto& c : checks)
        if (!c.ok) return false;
    return true;
}

InequalityReport inequality_suite() {
    InequalityReport rep;
    const std::vector<double> xs = geometric_grid(1e-3, 50.0, 50);

    rep.checks.push_back(check_pointwise(
        "exp(-x) <= 1/(1+x)", xs, [](double x) { return std::exp(-x); },
        [](double x) { return 1.0 / (1.0 + x); }));

    rep.checks.push_back(check_pointwise(
        "1/(1-exp(-x)) <= (1+x)/x", xs,
        [](double x) { return 1.0 / (-std::expm1(-x)); },
        [](double x) { return (1.0 + x) / x; }));

    rep.checks.push_back(check_pointwise(
        "exp(-x) <= 27/(e^2 (1+x)^3)", xs, [](double x) { return std::exp(-x); },
        [](double x) {
            return 27.0 / (std::numbers::e * std::numbers::e * (1.0 + x) * (1.0 + x) *
                           (1.0 + x));
        }));

    {
        // max of e^-x (1+x)^3 equals 27/e^2, attained at x = 2
        InequalityCheck c;
        c.name = "max exp(-x)(1+x)^3 = 27/e^2 at x=2";
        double best = 0.0, at = 0.0;
        for (double x : xs) {
            const double v = std::exp(-x) * (1.0 + x) * (1.0 + x) * (1.0 + x);
            if (v > best) {
                best = v;
                at = x;
            }
        }
        const double target = 27.0 / (std::numbers::e * std::numbers::e);
        c.worst = best - target;
        c.worst_at = at;
        c.ok = best <= target * (1.0 + 1e-12) && std::fabs(at - 2.0) < 0.1;
        rep.checks.push_back(c);
    }

    {
        // sum q^k k^2 = q(1+q)/(1-q)^3 against brute-force summation
        InequalityCheck c;
        c.name = "sum q^k k^2 = q(1+q)/(1-q)^3";
        c.ok = true;
        c.worst = 0.0;
        for (double q = 0.10; q <= 0.951; q += 0.05) {
            KahanSum s;
            double qk = 1.0;
            for (std::int64_t k = 1;; ++k) {
                qk *= q;
                const double term = qk * static_cast<double>(k) * static_cast<double>(k);
                s.add(term);
                if (term < 1e-18 * s.sum && k > 8) break;
            }
            const double closed = q * (1.0 + q) / ((1.0 - q) * (1.0 - q) * (1.0 - q));
            const double rel = std::fabs(s.sum - closed) / closed;
            if (rel > c.worst) {
                c.worst = rel;
                c.worst_at = q;
            }
            if (rel > 1e-12) c.ok = false;
        }
        rep.checks.push_back(c);
    }

    {
        // r^2/(r-1) (1+1/sqrt r)^{1-r} decreases on [2, 200] and peaks at
        // 8 - 4 sqrt 2 at r = 2
        InequalityCheck c;
        c.name = "max r^2/(r-1)(1+1/sqrt r)^{1-r} = 8-4sqrt2";
        auto g = [](double r) {
            return r * r / (r - 1.0) * std::exp((1.0 - r) * std::log1p(1.0 / std::sqrt(r)));
        };
        const std::vector<double> rs = geometric_grid(2.0, 200.0, 50);
        c.ok = true;
        double prev = std::numeric_limits<double>::infinity();
        double peak = 0.0, at = 0.0;
        for (double r : rs) {
            const double v = g(r);
            if (v > prev * (1.0 + 1e-13)) c.ok = false;  // must decrease
            prev = v;
            if (v > peak) {
                peak = v;
                at = r;
            }
        }
        const double target = 8.0 - 4.0 * std::sqrt(2.0);
        c.worst = std::fabs(peak - target);
        c.worst_at = at;
        if (!(c.worst <= 1e-9)) c.ok = false;
        rep.checks.push_back(c);
    }
    return rep;
}

RemainderBoundReport remainder_upper_check(double r, std::int64_t n, double norm_p,
                                           const TruncationBudget& budget) {
    const RegimeTag tag = regime_classify(r, n);
    if (tag.outside()) throw RegimeError("remainder_upper_check: needs a theorem band");
    RemainderBoundReport rep;
    rep.norm_p = norm_p;

    TrigTail tail = make_remainder_tail(r, PhaseRule::constant(0.0), n, budget);
    NormRequest req;
    req.evaluator = [&tail](double t) { return tail(t); };
    req.bandwidth_hint = tail.bandwidth();
    req.p = norm_p;
    req.tol = std::max(budget.tol, 1e-10);
    rep.lhs_norm = periodic_lp_norm(req);

    const PhiSumResult ps = phi_sum(r, n, budget);
    const double factor =
        std::isinf(norm_p) ? 1.0 : std::pow(2.0 * kPi, 1.0 / norm_p);
    rep.rhs_bound = factor * (ps.value + ps.residual_bound);
    rep.ok = rep.lhs_norm <= rep.rhs_bound * (1.0 + 1e-9);
    return rep;
}

}  // namespace wna
