#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wna/scaled_value.hpp"

namespace wna {

// sum_{k>=1} phi(k/n) split at m = floor(n/sqrt(r)).
struct PhiSumResult {
    double value = 0.0;
    double split_head = 0.0;  // k <= m
    double split_tail = 0.0;  // k > m
    std::int64_t m = 0;
    double residual_bound = 0.0;
};

PhiSumResult phi_sum(double r, std::int64_t n, const TruncationBudget& budget = {});

struct Lemma1Report {
    double head = 0.0, tail = 0.0, total = 0.0;
    double head_bound = 0.0, tail_bound = 0.0, total_bound = 0.0;
    bool head_ok = false, tail_ok = false, total_ok = false;
    bool ok() const { return head_ok && tail_ok && total_ok; }
    double margin() const { return total_bound - total; }
};

/// Checks the split bounds (54/e) n/r^2 and (16 - 8 sqrt 2) n/r^2 and the
/// combined 24.5518 n/r^2 at one band-1 point.
Lemma1Report lemma1_split_check(double r, std::int64_t n);

/// phi_sum * n^2 * e^{r/n} / r, evaluated in the log domain; finite on all
/// of band 2, where the sum is O(1) r n^-2 e^{-r/n}.
double stechkin_sum_ratio(double r, std::int64_t n);

struct InequalityCheck {
    std::string name;
    double worst = 0.0;     // worst signed violation / deviation seen
    double worst_at = 0.0;  // grid point where it occurred
    bool ok = false;
};

struct InequalityReport {
    std::vector<InequalityCheck> checks;
    bool ok() const;
};

/// Dense-grid verification of the elementary inequalities and identities the
/// proofs lean on: e^-x <= 1/(1+x); 1/(1-e^-x) <= (1+x)/x;
/// e^-x <= 27/(e^2 (1+x)^3) with maximum at x = 2; the q(1+q)/(1-q)^3
/// identity; and max_{r>=2} r^2/(r-1) (1+1/sqrt r)^{1-r} = 8 - 4 sqrt 2.
InequalityReport inequality_suite();

struct RemainderBoundReport {
    double norm_p = 2.0;
    double lhs_norm = 0.0;   // || scaled remainder kernel ||_{norm_p}
    double rhs_bound = 0.0;  // (2 pi)^{1/norm_p} * phi_sum
    bool ok = false;
};

/// The Hoelder/triangle step: the L_{norm_p} norm of the scaled remainder
/// kernel never exceeds (2 pi)^{1/norm_p} * sum phi(k/n).
RemainderBoundReport remainder_upper_check(double r, std::int64_t n, double norm_p,
                                           const TruncationBudget& budget = {});

}  // namespace wna
