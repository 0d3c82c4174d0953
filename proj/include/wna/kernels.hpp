#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wna/scaled_value.hpp"

namespace wna {

// Phase shift rule beta_k for the cosine arguments cos(kt - beta_k*pi/2).
// Constant rules unlock closed forms; sequences are arbitrary index maps.
class PhaseRule {
  public:
    PhaseRule() : PhaseRule(constant(0.0)) {}

    static PhaseRule constant(double beta) {
        PhaseRule p(0);
        p.is_constant_ = true;
        p.beta_ = beta;
        p.desc_ = format_beta(beta);
        return p;
    }

    static PhaseRule sequence(std::function<double(std::int64_t)> rule,
                              std::string description = "seq") {
        PhaseRule p(0);
        p.is_constant_ = false;
        p.rule_ = std::move(rule);
        p.desc_ = std::move(description);
        return p;
    }

    double operator()(std::int64_t k) const {
        return is_constant_ ? beta_ : rule_(k);
    }

    bool is_constant() const { return is_constant_; }
    double constant_value() const { return beta_; }
    const std::string& description() const { return desc_; }

  private:
    PhaseRule(int) {}
    static std::string format_beta(double beta);

    bool is_constant_ = true;
    double beta_ = 0.0;
    std::function<double(std::int64_t)> rule_;
    std::string desc_ = "0";
};

enum class KernelFamily { weyl_nagy, poisson };

// Which kernel tail to evaluate: k^-r decay (Weyl-Nagy) or q^k (Poisson),
// phases, and the tail start index n.
struct KernelSpec {
    KernelFamily family = KernelFamily::weyl_nagy;
    double r = 0.0;  // Weyl-Nagy smoothness exponent
    double q = 0.0;  // Poisson decay
    PhaseRule phases;
    std::int64_t n = 1;

    static KernelSpec weyl_nagy(double r, PhaseRule phases, std::int64_t n);
    static KernelSpec poisson(double q, PhaseRule phases, std::int64_t n);

    // Natural log of the factored-out tail size: -r ln n, resp. n ln q.
    double decay_log_scale() const;
};

// A truncated scaled tail sum_{j=0}^{J-1} c_j cos((n+j)t - beta_{n+j} pi/2),
// with the truncation residual bound recorded by the builder.  Evaluation
// runs an incremental complex rotation with periodic resync and Kahan
// accumulation, so J in the tens of thousands stays at ~1 ulp drift.
class TrigTail {
  public:
    TrigTail(std::int64_t n, const std::vector<double>& coeff,
             const PhaseRule& phases, double truncation_bound);

    double operator()(double t) const;

    std::int64_t base_frequency() const { return n_; }
    std::int64_t term_count() const { return static_cast<std::int64_t>(zr_.size()); }
    std::int64_t bandwidth() const { return n_ + term_count() - 1; }
    double modulus_sum() const { return modulus_sum_; }
    double squared_modulus_sum() const { return squared_sum_; }
    double truncation_bound() const { return truncation_bound_; }

    // Top frequency that still carries coefficient mass: the smallest n+K
    // whose dropped modulus (suffix sum plus truncation bound) is below
    // mass_tol times the total.  Sizes quadrature grids; slowly decaying
    // tails keep far more terms than they have resolvable structure.
    std::int64_t effective_bandwidth(double mass_tol = 1e-3) const;

  private:
    std::int64_t n_;
    std::vector<double> zr_, zi_;  // c_j * exp(-i beta pi/2)
    std::vector<double> suffix_modulus_;
    double modulus_sum_ = 0.0;
    double squared_sum_ = 0.0;
    double truncation_bound_ = 0.0;
};

// Builders choose the truncation index adaptively: summation stops once the
// analytic tail bound drops below tol times the accumulated modulus sum.
TrigTail make_weyl_nagy_tail(const KernelSpec& spec, const TruncationBudget& budget);
TrigTail make_poisson_tail(const KernelSpec& spec, const TruncationBudget& budget);
TrigTail make_remainder_tail(double r, const PhaseRule& phases, std::int64_t n,
                             const TruncationBudget& budget);

/// n^r * B_{r,beta,n}(t): the Weyl-Nagy tail with the n^-r factor removed.
double scaled_weyl_nagy_tail(const KernelSpec& spec, double t,
                             const TruncationBudget& budget = {});

/// q^-n * P_{q,beta,n}(t); closed geometric form for constant phases.
double scaled_poisson_tail(const KernelSpec& spec, double t,
                           const TruncationBudget& budget = {});

/// phi(x) = (1+x)^-r - e^{-rx}, computed so the result is >= 0 and finite
/// for r up to n^2.
double phi(double x, double r);

/// n^r * R_n(r; beta)(t) = sum_{j>=1} phi(j/n) cos((n+j)t - beta_{n+j} pi/2).
double scaled_remainder_kernel(double r, const PhaseRule& phases, std::int64_t n,
                               double t, const TruncationBudget& budget = {});

/// Integral-comparison bound (n/(r-1)) (1+K/n)^(1-r) >= sum_{j>K} (1+j/n)^-r.
double tail_truncation_bound(double r, std::int64_t n, std::int64_t terms_taken);

}  // namespace wna
