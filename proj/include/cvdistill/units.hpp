#pragma once

namespace cvdistill {

// Variances are in shot-noise units (vacuum = 1). Decibels are only used at
// I/O boundaries: V_dB = 10 log10(V_snu).

double db_to_snu(double db);

/// Throws DomainError for variance <= 0 (or NaN).
double snu_to_db(double variance);

}  // namespace cvdistill
