#pragma once

#include <cmath>

namespace bpre {

inline constexpr double kSqrt2Pi = 2.5066282746310005024157652848110;
inline constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

// e^{x^2} erfc(x), stable for large positive x.
double erfcx(double x);

inline double norm_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

inline double norm_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

// 1 - Phi(x), without cancellation for large x.
inline double norm_sf(double x) { return 0.5 * std::erfc(x * kInvSqrt2); }

// e^{w^2/2} (1 - Phi(w)); tends to the Mills ratio 1/(w sqrt(2 pi)) as w -> +inf.
inline double scaled_sf(double w) { return 0.5 * erfcx(w * kInvSqrt2); }

// e^{w^2/2} Phi(w); the mirror image of scaled_sf.
inline double scaled_cdf(double w) { return 0.5 * erfcx(-w * kInvSqrt2); }

// Quantile of the standard normal law.
double inv_norm_cdf(double p);

}  // namespace bpre
