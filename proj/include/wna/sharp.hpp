#pragma once

#include <cstdint>
#include <functional>

#include "wna/kernels.hpp"
#include "wna/scaled_value.hpp"

namespace wna {

// One periodic L_p norm computation.  The evaluator must be 2pi-periodic;
// bandwidth_hint is the top retained frequency (n + truncation index) and
// sizes the uniform grid.
struct NormRequest {
    std::function<double(double)> evaluator;
    std::int64_t bandwidth_hint = 1;
    double p = 2.0;  // >= 1, or infinity
    bool center = false;
    double tol = 1e-10;
    int oversample = 8;
};

/// ||f||_p over [-pi, pi).  Even integer p: uniform-grid rectangle rule.
/// Other finite p: sign changes bracketed on the grid, |f|^p integrated per
/// sign-constant subinterval by composite Gauss-Legendre (graded toward the
/// interval's zeros for non-integer p).  p = infinity: grid max refined by
/// golden section around the top grid maxima.  Accuracy is gauged by
/// doubling refinement; three failed doublings raise AccuracyError.
double periodic_lp_norm(const NormRequest& request);

struct CenteredDistance {
    double value;   // min_c ||f - c||_p
    double center;  // the argmin c
    double error_gauge;
};

/// min over constants c of ||f - c||_p.  p = 2 uses the mean; p = infinity
/// the Chebyshev center (max+min)/2; otherwise golden section over c (the
/// map is convex) with a parabolic polish against the full-accuracy norm.
CenteredDistance centered_lp_distance(const NormRequest& request);

enum class Metric { uniform_c, integral_lp };

struct EValue {
    ScaledValue value;  // scale -r ln n (Weyl-Nagy) or n ln q (Poisson)
    Metric metric = Metric::uniform_c;
    double class_p = 2.0;
    KernelSpec kernel;
    double centering_constant = 0.0;
    double quad_error_gauge = 0.0;
};

/// Worst-case Fourier-sum error in the uniform metric on the class with
/// exponent class_p: (1/pi) * centered L_{p'} distance of the scaled tail,
/// 1/p + 1/p' = 1.
EValue e_value_C(const KernelSpec& kernel, double class_p,
                 const TruncationBudget& budget = {});

/// Worst-case error of the unit-L1 class in the L_{target_p} metric:
/// (1/pi) * centered L_{target_p} distance of the scaled tail.  Exact at
/// target_p = 2; a remainder-scale surrogate elsewhere.
EValue e_value_L(const KernelSpec& kernel, double target_p,
                 const TruncationBudget& budget = {});

/// Hoelder conjugate: 1/p + 1/p' = 1, with 1 <-> infinity.
double conjugate_exponent(double p);

}  // namespace wna
