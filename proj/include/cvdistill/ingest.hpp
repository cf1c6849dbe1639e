#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "cvdistill/montecarlo.hpp"

namespace cvdistill {

// Two-channel record files hold already demodulated per-sample quadrature
// values. Layout (text, '#' header lines first):
//
//   # format: cvdistill-record v1
//   # sample_rate_hz: 10000000
//   # bin_length_us: 1.0
//   # toggle_hz: 500000
//   # toggle_phase_samples: 0
//   # value_scale: 3.0518e-4
//   index,tap_raw,signal_raw
//   0,123,-456
//
// Sample n is taken with the modulation on iff floor((n - phase) / half_period)
// is even, half_period = sample_rate / (2 toggle_hz) samples.

struct RecordHeader {
  std::int64_t sample_rate_hz = 10'000'000;
  double bin_length_us = 1.0;
  double toggle_hz = 500'000.0;
  std::int64_t toggle_phase_samples = 0;
  double value_scale = 1.0;

  /// Samples averaged into one bin. Throws DomainError if not a positive integer.
  std::int64_t samples_per_bin() const;
  /// Samples per modulation half-period. Throws DomainError if not a positive integer.
  std::int64_t half_period_samples() const;
  /// Checks that the half-period is a whole number of bins.
  void validate_strict() const;
  bool modulation_on(std::int64_t sample_index) const;
};

struct RawSample {
  double tap = 0.0;
  double signal = 0.0;
};

struct Record {
  RecordHeader header;
  std::vector<RawSample> samples;
};

/// Throws ParseError (with line number) on any malformed line.
Record read_record_file(std::istream& in);
void write_record_file(std::ostream& out, const Record& record);

/// Record holding simulated pairs verbatim: one sample per bin, unit scale.
Record record_from_samples(const PairedSamples& samples);

struct BinnedRecord {
  std::int64_t bin_index = 0;
  double tap_value = 0.0;
  double signal_value = 0.0;
  bool modulation_on = false;
};

struct BinOptions {
  /// Accept half-periods that are not whole bins and anchor bins at sample 0
  /// rather than at the toggle phase. Bins straddling an edge are dropped.
  bool permissive = false;
};

struct BinningResult {
  std::vector<BinnedRecord> bins;
  std::size_t rejected = 0;
  std::size_t candidates = 0;
};

/// Averages each channel over consecutive bins and labels the modulation
/// state. Throws EmptySelection when not even one complete bin fits.
BinningResult bin_and_sync(const RecordHeader& header, const std::vector<RawSample>& samples,
                           const BinOptions& options = {});

enum class ModulationFilter { all, on_only, off_only };

/// Throws EmptySelection if nothing survives the filter.
PairedSamples records_to_pairs(const std::vector<BinnedRecord>& records, ModulationFilter filter);

}  // namespace cvdistill
