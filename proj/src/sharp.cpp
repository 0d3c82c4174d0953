#include "wna/sharp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "wna/specfun.hpp"

namespace wna {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

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

// 16-point Gauss-Legendre on [-1, 1], positive half.
constexpr double kGlNode[8] = {
    0.0950125098376374401853193, 0.2816035507792589132304605,
    0.4580167776572273863424194, 0.6178762444026437484466718,
    0.7554044083550030338951012, 0.8656312023878317438804679,
    0.9445750230732325760779884, 0.9894009349916499325961542};
constexpr double kGlWeight[8] = {
    0.1894506104550684962853967, 0.1826034150449235888667637,
    0.1691565193950025381893121, 0.1495959888165767320815017,
    0.1246289712555338720524763, 0.0951585116824927848099251,
    0.0622535239386478928628438, 0.0271524594117540948517806};

using Fn = std::function<double(double)>;

double gl16(const Fn& g, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    double acc = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double d = half * kGlNode[i];
        acc += kGlWeight[i] * (g(mid - d) + g(mid + d));
    }
    return acc * half;
}

int next_pow2(std::int64_t x) {
    int m = 1;
    while (m < x) m *= 2;
    return m;
}

struct GridCache {
    int size = 0;
    double step = 0.0;
    std::vector<double> f;  // f(-pi + i * step)
    double t(int i) const { return -kPi + step * static_cast<double>(i); }
};

GridCache sample_grid(const Fn& f, int size) {
    GridCache g;
    g.size = size;
    g.step = kTwoPi / static_cast<double>(size);
    g.f.resize(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) g.f[static_cast<std::size_t>(i)] = f(g.t(i));
    return g;
}

bool is_integer(double p) { return std::isfinite(p) && p == std::floor(p); }
bool is_even_integer(double p) {
    return is_integer(p) && (static_cast<long long>(p) % 2 == 0);
}

// Bracketed root refinement (Illinois variant of false position, bisection
// step whenever the secant degenerates to an endpoint).
double refine_zero(const Fn& f, double a, double b, double fa, double fb) {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    for (int i = 0; i < 90 && std::fabs(b - a) > 1e-14; ++i) {
        double x = (a * fb - b * fa) / (fb - fa);
        if (!(x > std::min(a, b) && x < std::max(a, b))) x = 0.5 * (a + b);
        const double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0.0) == (fa > 0.0)) {
            a = x;
            fa = fx;
            fb *= 0.5;
        } else {
            b = x;
            fb = fx;
            fa *= 0.5;
        }
    }
    return std::fabs(fa) <= std::fabs(fb) ? a : b;
}

// Golden-section minimum of g over [a, b]; unimodal g assumed.
double golden_min(const Fn& g, double a, double b, double xtol, int max_iter = 300) {
    constexpr double kInvPhi = 0.6180339887498948482;
    double c = b - kInvPhi * (b - a);
    double d = a + kInvPhi * (b - a);
    double gc = g(c), gd = g(d);
    for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
        if (gc < gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - kInvPhi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + kInvPhi * (b - a);
            gd = g(d);
        }
    }
    return 0.5 * (a + b);
}

// Integral of |f|^p over one sign-constant interval [a, b] whose endpoints
// are zeros of f (unless ends_are_zeros is false).  Non-integer p gets
// geometrically graded panels toward the endpoint zeros; integer p is
// analytic there and plain panels converge spectrally.
double integrate_interval(const Fn& f, double p, double a, double b,
                          bool ends_are_zeros, int grading_levels, int mid_panels) {
    auto g = [&](double t) { return std::pow(std::fabs(f(t)), p); };
    const double len = b - a;
    KahanSum acc;
    if (!ends_are_zeros || is_integer(p)) {
        for (int k = 0; k < mid_panels; ++k) {
            const double lo = a + len * static_cast<double>(k) / mid_panels;
            const double hi = a + len * static_cast<double>(k + 1) / mid_panels;
            acc.add(gl16(g, lo, hi));
        }
        return acc.sum;
    }
    // graded half toward a, mirrored toward b; fractions 2^-L-1 .. 1/2
    const int L = grading_levels;
    double frac_prev = 0.0;
    for (int k = 0; k <= L; ++k) {
        const double frac = std::ldexp(1.0, k - L - 1);  // 2^(k-L-1)
        acc.add(gl16(g, a + len * frac_prev, a + len * frac));
        acc.add(gl16(g, b - len * frac, b - len * frac_prev));
        frac_prev = frac;
    }
    return acc.sum;
}

struct NormResult {
    double value = 0.0;
    double gauge = 0.0;
};

// One resolution pass of the finite-p norm.
double norm_pass(const Fn& f, double p, int grid_size, int grading_levels,
                 int mid_panels) {
    const GridCache grid = sample_grid(f, grid_size);

    if (is_even_integer(p)) {
        KahanSum s;
        for (double v : grid.f) {
            double w = 1.0;
            for (long long k = 0; k < static_cast<long long>(p); ++k) w *= v;
            s.add(w);
        }
        return std::pow(s.sum * grid.step, 1.0 / p);
    }

    // bracket the sign changes on the circular grid
    std::vector<double> zeros;
    for (int i = 0; i < grid.size; ++i) {
        const int j = (i + 1) % grid.size;
        const double fi = grid.f[static_cast<std::size_t>(i)];
        const double fj = grid.f[static_cast<std::size_t>(j)];
        if ((fi > 0.0 && fj < 0.0) || (fi < 0.0 && fj > 0.0)) {
            const double a = grid.t(i);
            zeros.push_back(refine_zero(f, a, a + grid.step, fi, fj));
        } else if (fi == 0.0) {
            zeros.push_back(grid.t(i));
        }
    }

    KahanSum total;
    if (zeros.empty()) {
        // no sign change: |f|^p is as smooth as f; rectangle rule
        KahanSum s;
        for (double v : grid.f) s.add(std::pow(std::fabs(v), p));
        return std::pow(s.sum * grid.step, 1.0 / p);
    }
    for (std::size_t k = 0; k < zeros.size(); ++k) {
        const double a = zeros[k];
        const double b = (k + 1 < zeros.size()) ? zeros[k + 1] : zeros[0] + kTwoPi;
        if (b - a < 1e-13) continue;
        total.add(integrate_interval(f, p, a, b, true, grading_levels, mid_panels));
    }
    return std::pow(total.sum, 1.0 / p);
}

// Max of |f|: grid scan plus golden refinement around the top local maxima.
double sup_norm_pass(const Fn& f, int grid_size) {
    const GridCache grid = sample_grid(f, grid_size);
    std::vector<std::pair<double, int>> peaks;
    for (int i = 0; i < grid.size; ++i) {
        const double prev = std::fabs(grid.f[static_cast<std::size_t>((i + grid.size - 1) % grid.size)]);
        const double cur = std::fabs(grid.f[static_cast<std::size_t>(i)]);
        const double next = std::fabs(grid.f[static_cast<std::size_t>((i + 1) % grid.size)]);
        if (cur >= prev && cur >= next) peaks.emplace_back(cur, i);
    }
    std::sort(peaks.begin(), peaks.end(),
              [](const auto& x, const auto& y) { return x.first > y.first; });
    if (peaks.size() > 5) peaks.resize(5);
    double best = 0.0;
    for (const auto& [height, i] : peaks) {
        const double lo = grid.t(i) - grid.step;
        const double hi = grid.t(i) + grid.step;
        auto neg_abs = [&](double t) { return -std::fabs(f(t)); };
        const double t_star = golden_min(neg_abs, lo, hi, 1e-13 * kTwoPi);
        best = std::max(best, std::fabs(f(t_star)));
    }
    return best;
}

int base_grid_size(const NormRequest& req) {
    const std::int64_t bh = std::max<std::int64_t>(1, req.bandwidth_hint);
    int m = req.oversample * next_pow2(bh);
    if (is_even_integer(req.p) && std::isfinite(req.p)) {
        m = std::max(m, next_pow2(static_cast<std::int64_t>(req.p) * bh + 2));
    }
    return std::max(m, 64);
}

NormResult norm_with_gauge(const NormRequest& req, const Fn& f) {
    const double tol = std::max(req.tol, 1e-13);
    int grid = base_grid_size(req);
    int levels = 14;
    int mid_panels = 4;
    double prev = std::isinf(req.p) ? sup_norm_pass(f, grid)
                                    : norm_pass(f, req.p, grid, levels, mid_panels);
    double gauge = std::numeric_limits<double>::infinity();
    for (int pass = 0; pass < 3; ++pass) {
        grid *= 2;
        levels += 6;
        mid_panels *= 2;
        const double next = std::isinf(req.p)
                                ? sup_norm_pass(f, grid)
                                : norm_pass(f, req.p, grid, levels, mid_panels);
        gauge = std::fabs(next - prev);
        const double scale = std::max(std::fabs(next), 1e-300);
        if (gauge <= tol * scale) return {next, gauge / scale};
        prev = next;
    }
    throw AccuracyError("periodic_lp_norm: no convergence after 3 doublings", prev,
                        gauge / std::max(std::fabs(prev), 1e-300));
}

}  // namespace

double conjugate_exponent(double p) {
    if (std::isinf(p)) return 1.0;
    if (!(p >= 1.0)) throw std::domain_error("conjugate_exponent: needs p >= 1");
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return p / (p - 1.0);
}

double periodic_lp_norm(const NormRequest& request) {
    if (!request.evaluator) throw std::invalid_argument("periodic_lp_norm: no evaluator");
    if (!std::isinf(request.p) && !(request.p >= 1.0))
        throw std::domain_error("periodic_lp_norm: needs p >= 1 or infinity");
    if (request.center) return centered_lp_distance(request).value;
    return norm_with_gauge(request, request.evaluator).value;
}

CenteredDistance centered_lp_distance(const NormRequest& request) {
    if (!request.evaluator) throw std::invalid_argument("centered_lp_distance: no evaluator");
    const Fn& f = request.evaluator;
    NormRequest shifted_req = request;
    shifted_req.center = false;

    if (std::isinf(request.p)) {
        // Chebyshev center: refine max f and min f separately
        const int grid_size = base_grid_size(request);
        const GridCache grid = sample_grid(f, grid_size);
        auto refine = [&](int sign) {
            int best_i = 0;
            double best = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < grid.size; ++i) {
                const double v = sign * grid.f[static_cast<std::size_t>(i)];
                if (v > best) {
                    best = v;
                    best_i = i;
                }
            }
            auto neg = [&](double t) { return -sign * f(t); };
            const double t_star = golden_min(neg, grid.t(best_i) - grid.step,
                                             grid.t(best_i) + grid.step, 1e-13 * kTwoPi);
            return sign * f(t_star);
        };
        const double hi = std::max(refine(+1), *std::max_element(grid.f.begin(), grid.f.end()));
        const double lo = std::min(refine(-1), *std::min_element(grid.f.begin(), grid.f.end()));
        return {0.5 * (hi - lo), 0.5 * (hi + lo), 0.0};
    }

    if (request.p == 2.0) {
        // the L2 minimizer is the mean (rectangle rule is exact for the
        // band-limited tails this sees)
        const int grid_size = base_grid_size(request);
        const GridCache grid = sample_grid(f, grid_size);
        KahanSum mean;
        for (double v : grid.f) mean.add(v);
        const double c = mean.sum / static_cast<double>(grid.size);
        shifted_req.evaluator = [&f, c](double t) { return f(t) - c; };
        const NormResult nr = norm_with_gauge(shifted_req, shifted_req.evaluator);
        return {nr.value, c, nr.gauge};
    }

    // other p: golden section over c on the cached grid, then a parabolic
    // polish against the full quadrature (the value is flat, second order,
    // around the convex minimum)
    const int grid_size = base_grid_size(request);
    const GridCache grid = sample_grid(f, grid_size);
    const double f_max = *std::max_element(grid.f.begin(), grid.f.end());
    const double f_min = *std::min_element(grid.f.begin(), grid.f.end());
    const double span = std::max(f_max - f_min, 1e-300);

    auto grid_norm = [&](double c) {
        KahanSum s;
        for (double v : grid.f) s.add(std::pow(std::fabs(v - c), request.p));
        return std::pow(s.sum * grid.step, 1.0 / request.p);
    };
    const double norm_scale = std::max(grid_norm(0.0), 1e-300);
    const double c_tol = std::max(1e-3 * request.tol * norm_scale, 1e-14 * span);
    double c_hat = golden_min(grid_norm, f_min, f_max, c_tol);

    auto true_norm = [&](double c) {
        NormRequest r2 = shifted_req;
        r2.evaluator = [&f, c](double t) { return f(t) - c; };
        return norm_with_gauge(r2, r2.evaluator);
    };

    const double delta = 1e-3 * span;
    const NormResult n_mid = true_norm(c_hat);
    const NormResult n_lo = true_norm(c_hat - delta);
    const NormResult n_hi = true_norm(c_hat + delta);
    double c_star = c_hat;
    const double curvature = n_hi.value - 2.0 * n_mid.value + n_lo.value;
    if (curvature > 0.0) {
        c_star = c_hat - 0.5 * delta * (n_hi.value - n_lo.value) / curvature;
        c_star = std::clamp(c_star, c_hat - delta, c_hat + delta);
    }
    NormResult best = true_norm(c_star);
    if (n_mid.value < best.value) {
        best = n_mid;
        c_star = c_hat;
    }
    if (n_lo.value < best.value) {
        best = n_lo;
        c_star = c_hat - delta;
    }
    if (n_hi.value < best.value) {
        best = n_hi;
        c_star = c_hat + delta;
    }
    return {best.value, c_star, best.gauge};
}

namespace {

// Coefficient-space Parseval route for the p = 2 Weyl-Nagy value: the sum
// of squared coefficients is sum_j (1+j/n)^{-2r}, summed directly when the
// exponent decays fast enough and by the Euler-Maclaurin tail otherwise.
double weyl_nagy_l2_mantissa(double r, std::int64_t n, double tol) {
    const double s = 2.0 * r;
    if (s >= 3.0) {
        const double nd = static_cast<double>(n);
        KahanSum acc;
        for (std::int64_t j = 0;; ++j) {
            acc.add(std::exp(-s * std::log1p(static_cast<double>(j) / nd)));
            if (tail_truncation_bound(s, n, j) <= 0.1 * tol * acc.sum) break;
            if (j > 100'000'000)
                throw TruncationError("weyl_nagy_l2: runaway summation",
                                      tail_truncation_bound(s, n, j));
        }
        return std::sqrt(acc.sum / kPi);
    }
    return std::sqrt(zeta_tail(s, n).mantissa / kPi);
}

EValue e_value_impl(const KernelSpec& kernel, double class_p, double norm_exponent,
                    Metric metric, const TruncationBudget& budget) {
    if (!std::isinf(class_p) && !(class_p >= 1.0))
        throw std::domain_error("e_value: class exponent must be >= 1 or infinity");
    EValue out;
    out.metric = metric;
    out.class_p = class_p;
    out.kernel = kernel;

    const double scale = kernel.decay_log_scale();
    const double tol = std::clamp(budget.tol, 1e-13, 1e-2);

    if (kernel.family == KernelFamily::weyl_nagy && norm_exponent == 2.0) {
        out.value = ScaledValue{weyl_nagy_l2_mantissa(kernel.r, kernel.n, tol), scale};
        out.centering_constant = 0.0;
        out.quad_error_gauge = tol;
        return out;
    }

    // The pointwise build cost explodes as exp(c / (r-1)); below 1e-11 the
    // extra coefficients only slow the quadrature down without moving it.
    TruncationBudget build = budget;
    build.tol = std::clamp(budget.tol, 1e-11, 1e-2);
    TrigTail tail = (kernel.family == KernelFamily::weyl_nagy)
                        ? make_weyl_nagy_tail(kernel, build)
                        : make_poisson_tail(kernel, build);
    NormRequest req;
    req.evaluator = [&tail](double t) { return tail(t); };
    req.bandwidth_hint = tail.effective_bandwidth();
    req.p = norm_exponent;
    req.center = true;
    req.tol = tol;
    const CenteredDistance dist = centered_lp_distance(req);
    out.value = ScaledValue{dist.value / kPi, scale};
    out.centering_constant = dist.center;
    out.quad_error_gauge = dist.error_gauge;
    return out;
}

}  // namespace

EValue e_value_C(const KernelSpec& kernel, double class_p, const TruncationBudget& budget) {
    return e_value_impl(kernel, class_p, conjugate_exponent(class_p), Metric::uniform_c,
                        budget);
}

EValue e_value_L(const KernelSpec& kernel, double target_p, const TruncationBudget& budget) {
    return e_value_impl(kernel, target_p, target_p, Metric::integral_lp, budget);
}

}  // namespace wna
