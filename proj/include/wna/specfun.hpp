#pragma once

#include <cstdint>

#include "wna/scaled_value.hpp"

namespace wna {

/// Gauss hypergeometric F(a, b; 1; z) for a, b > 0, z in [0, 1), by the
/// defining series with a geometric tail bound.
double hyp2f1_unit_c(double a, double b, double z, double tol = 1e-13);

/// Complete elliptic integral of the first kind, modulus q in [0, 1),
/// via the arithmetic-geometric mean.
double elliptic_k(double q);

/// F^{1/s}(s/2, s/2; 1; q^2) as the normalized L_s mean of
/// (1 - 2q cos x + q^2)^{-1/2} over one period; log-domain throughout.
/// grid_points must be a power of two >= 64.
double f_power_via_integral(double s, double q, int grid_points);

/// F^{1/s}(s/2, s/2; 1; q^2) with automatic path selection: log-domain
/// series for q^2 <= 0.81, refined periodic quadrature above.
double f_power(double s, double q, double tol = 1e-12);

/// ||cos||_p over [-pi, pi); p = infinity gives exactly 1.
double cos_norm(double p);

/// ln Gamma(x) for x > 0 (Lanczos, g = 7).
double log_gamma(double x);

/// sum_{k>=n} k^{-2r}, Euler-Maclaurin with three Bernoulli corrections,
/// returned at scale n^{-2r}.
ScaledValue zeta_tail(double two_r, std::int64_t n);

/// The exact p = 2 value (1/sqrt(pi)) (sum_{k>=n} k^{-2r})^{1/2}, verified
/// against the independent Gamma-integral representation; scale -r ln n.
ScaledValue exact_l2_value(double r, std::int64_t n);

}  // namespace wna
