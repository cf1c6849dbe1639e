#pragma once

// Standard normal helpers with sane behaviour in the far tails. Everything the
// post-selection math needs goes through these so that extreme thresholds give
// 0 or 1 instead of NaN.

namespace cvdistill::special {

inline constexpr double kSqrt2 = 1.41421356237309504880;
inline constexpr double kInvSqrt2Pi = 0.39894228040143267794;
inline constexpr double kLogSqrt2Pi = 0.91893853320467274178;

double normal_pdf(double z);
double log_normal_pdf(double z);

/// P(Z <= z)
double normal_cdf(double z);

/// P(Z > z), computed as erfc(z/sqrt2)/2 without cancellation.
double normal_sf(double z);

/// log P(Z > z). Finite for every finite z; -inf only at z = +inf.
double log_normal_sf(double z);

/// Mills ratio Q(z)/phi(z). Continued fraction for large z.
double mills_ratio(double z);

/// Hazard phi(z)/Q(z) (inverse Mills ratio). Zero at z = -inf.
double normal_hazard(double z);

}  // namespace cvdistill::special
