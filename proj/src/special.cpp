#include "cvdistill/special.hpp"

#include <cmath>
#include <limits>

namespace cvdistill::special {

namespace {

// Beyond this, erfc(z/sqrt2) heads for the subnormal range and the
// continued fraction is both cheaper and exact to double precision.
constexpr double kTailSwitch = 30.0;

// Q(z)/phi(z) = 1/(z + 1/(z + 2/(z + 3/(z + ...)))), evaluated bottom-up.
double mills_continued_fraction(double z) {
  double tail = z;
  for (int k = 40; k >= 1; --k) tail = z + k / tail;
  return 1.0 / tail;
}

}  // namespace

double normal_pdf(double z) { return kInvSqrt2Pi * std::exp(-0.5 * z * z); }

double log_normal_pdf(double z) { return -0.5 * z * z - kLogSqrt2Pi; }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / kSqrt2); }

double normal_sf(double z) { return 0.5 * std::erfc(z / kSqrt2); }

double log_normal_sf(double z) {
  if (z == std::numeric_limits<double>::infinity()) return -std::numeric_limits<double>::infinity();
  if (z <= kTailSwitch) return std::log(normal_sf(z));
  return log_normal_pdf(z) + std::log(mills_continued_fraction(z));
}

double mills_ratio(double z) {
  if (z == std::numeric_limits<double>::infinity()) return 0.0;
  if (z <= kTailSwitch) {
    if (z < -kTailSwitch) return std::numeric_limits<double>::infinity();
    return normal_sf(z) / normal_pdf(z);
  }
  return mills_continued_fraction(z);
}

double normal_hazard(double z) {
  if (z == -std::numeric_limits<double>::infinity()) return 0.0;
  if (z <= kTailSwitch) {
    // phi(z)/Q(z) via logs keeps z << 0 from producing 0/1 underflow noise.
    return std::exp(log_normal_pdf(z) - log_normal_sf(z));
  }
  return 1.0 / mills_continued_fraction(z);
}

}  // namespace cvdistill::special
