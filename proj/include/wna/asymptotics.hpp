#pragma once

#include <cstdint>
#include <string>

#include "wna/scaled_value.hpp"

namespace wna {

enum class RatioClass { unspecified, to_zero, bounded, to_infinity };

// Band membership of (r, n).  The point r = n+1 belongs to both bands.
struct RegimeTag {
    bool in_band1 = false;  // sqrt(n)+1 <= r <= n+1
    bool in_band2 = false;  // n+1 <= r <= n^2
    RatioClass ratio = RatioClass::unspecified;

    bool outside() const { return !in_band1 && !in_band2; }
    std::string label() const;
};

RegimeTag regime_classify(double r, std::int64_t n);

struct MainTermResult {
    ScaledValue main;             // shared scale -r ln n
    ScaledValue remainder_scale;  // same scale
    std::string formula_id;
    RegimeTag regime;
};

/// Main term of the uniform-metric formulas: p = 1 closed branch
/// 1/(pi (1 - e^{-r/n})), otherwise (||cos||_{p'}/pi) F^{1/p'}(p'/2, p'/2; 1;
/// e^{-2r/n}); remainder n/r^2 in band 1, r e^{-r/n}/n^2 in band 2.
MainTermResult main_term_C(double p, double r, std::int64_t n);

/// Mirror with exponent p in place of p' (L_p metric on unit-L1 classes);
/// the closed branch sits at p = infinity.
MainTermResult main_term_L(double p, double r, std::int64_t n);

/// Remainder magnitude of the theorem in force at (r, n); the band boundary
/// takes the max of the two scales.
ScaledValue remainder_scale(double r, std::int64_t n);

enum class ClassicalVariant { log_order, stechkin_k, high_r, general };

/// Historical main terms: (4/pi^2) ln n, (8/pi^2) K(e^{-r/n}) with O(1/r),
/// 4/pi with O((1+1/n)^-r), and the general ||cos||_{p'}/pi form.
MainTermResult classical_mains(double r, std::int64_t n, ClassicalVariant variant,
                               double p = 2.0);

enum class CorollaryId { c1, c2, c3_C, c3_L, eq413, eq422 };

MainTermResult corollary_terms(CorollaryId which, double p, double r, std::int64_t n);

}  // namespace wna
