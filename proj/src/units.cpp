#include "cvdistill/units.hpp"

#include <cmath>

#include <fmt/format.h>

#include "cvdistill/errors.hpp"

namespace cvdistill {

double db_to_snu(double db) { return std::pow(10.0, db / 10.0); }

double snu_to_db(double variance) {
  if (!(variance > 0.0)) {
    throw DomainError(fmt::format("cannot express variance {} in dB", variance));
  }
  return 10.0 * std::log10(variance);
}

}  // namespace cvdistill
