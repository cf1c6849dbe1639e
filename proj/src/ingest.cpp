#include "cvdistill/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "cvdistill/errors.hpp"
#include "text.hpp"

namespace cvdistill {

namespace {

constexpr std::string_view kFormatTag = "cvdistill-record v1";
constexpr std::string_view kColumns = "index,tap_raw,signal_raw";

std::int64_t floor_div(std::int64_t a, std::int64_t b) {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

std::int64_t exact_count(double value, const char* what) {
  const double rounded = std::round(value);
  if (!std::isfinite(value) || rounded < 1.0 || std::abs(value - rounded) > 1e-9 * std::max(1.0, value)) {
    throw DomainError(fmt::format("{} = {} is not a positive whole number of samples", what, value));
  }
  return static_cast<std::int64_t>(rounded);
}

// Decimal form that keeps a ".0" on integral values, e.g. "1.0".
std::string format_real(double v) {
  auto s = text::format_double(v);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

}  // namespace

std::int64_t RecordHeader::samples_per_bin() const {
  return exact_count(static_cast<double>(sample_rate_hz) * bin_length_us / 1e6, "sample_rate * bin_length");
}

std::int64_t RecordHeader::half_period_samples() const {
  if (!(toggle_hz > 0.0)) throw DomainError(fmt::format("toggle frequency {} must be positive", toggle_hz));
  return exact_count(static_cast<double>(sample_rate_hz) / (2.0 * toggle_hz), "toggle half-period");
}

void RecordHeader::validate_strict() const {
  const auto bin = samples_per_bin();
  const auto half = half_period_samples();
  if (half % bin != 0) {
    throw DomainError(fmt::format("toggle half-period of {} samples is not a whole number of {}-sample bins", half, bin));
  }
}

bool RecordHeader::modulation_on(std::int64_t sample_index) const {
  return floor_div(sample_index - toggle_phase_samples, half_period_samples()) % 2 == 0;
}

Record read_record_file(std::istream& in) {
  Record record;
  std::map<std::string, std::string, std::less<>> fields;
  std::string line;
  std::size_t line_no = 0;
  bool saw_format = false;
  bool saw_columns = false;

  auto require = [&](std::string_view key) -> const std::string& {
    auto it = fields.find(key);
    if (it == fields.end()) throw ParseError(line_no, fmt::format("header field '{}' missing", key));
    return it->second;
  };
  auto header_number = [&](std::string_view key, auto tag) {
    using T = decltype(tag);
    auto v = text::parse_number<T>(require(key));
    if (!v) throw ParseError(line_no, fmt::format("header field '{}' is not numeric", key));
    return *v;
  };

  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = text::trim(line);
    if (!saw_columns) {
      if (trimmed.empty()) continue;
      if (trimmed.front() == '#') {
        const auto field = text::header_field(trimmed);
        if (!field) throw ParseError(line_no, "malformed header line, expected '# key: value'");
        const auto [key, value] = *field;
        if (!saw_format) {
          if (key != "format" || value != kFormatTag) {
            throw ParseError(line_no, fmt::format("first header line must be '# format: {}'", kFormatTag));
          }
          saw_format = true;
          continue;
        }
        static constexpr std::string_view kKnown[] = {"sample_rate_hz", "bin_length_us", "toggle_hz",
                                                      "toggle_phase_samples", "value_scale"};
        if (std::find(std::begin(kKnown), std::end(kKnown), key) == std::end(kKnown)) {
          throw ParseError(line_no, fmt::format("unknown header field '{}'", key));
        }
        if (!fields.emplace(std::string(key), std::string(value)).second) {
          throw ParseError(line_no, fmt::format("duplicate header field '{}'", key));
        }
        continue;
      }
      if (!saw_format) throw ParseError(line_no, "missing '# format:' header");
      if (trimmed != kColumns) throw ParseError(line_no, fmt::format("expected column header '{}'", kColumns));
      record.header.sample_rate_hz = header_number("sample_rate_hz", std::int64_t{});
      record.header.bin_length_us = header_number("bin_length_us", double{});
      record.header.toggle_hz = header_number("toggle_hz", double{});
      record.header.toggle_phase_samples = header_number("toggle_phase_samples", std::int64_t{});
      record.header.value_scale = header_number("value_scale", double{});
      saw_columns = true;
      continue;
    }
    if (trimmed.empty()) continue;
    const auto cols = text::split(trimmed);
    if (cols.size() != 3) throw ParseError(line_no, fmt::format("expected 3 columns, found {}", cols.size()));
    const auto index = text::parse_number<std::int64_t>(cols[0]);
    const auto tap = text::parse_number<double>(cols[1]);
    const auto signal = text::parse_number<double>(cols[2]);
    if (!index || !tap || !signal) throw ParseError(line_no, "non-numeric field");
    if (*index != static_cast<std::int64_t>(record.samples.size())) {
      throw ParseError(line_no, fmt::format("index {} out of sequence, expected {}", *index, record.samples.size()));
    }
    record.samples.push_back({*tap, *signal});
  }
  if (!saw_columns) throw ParseError(line_no, saw_format ? "missing column header" : "missing '# format:' header");
  return record;
}

void write_record_file(std::ostream& out, const Record& record) {
  const auto& h = record.header;
  out << "# format: " << kFormatTag << '\n';
  out << "# sample_rate_hz: " << h.sample_rate_hz << '\n';
  out << "# bin_length_us: " << format_real(h.bin_length_us) << '\n';
  out << "# toggle_hz: " << text::format_double(h.toggle_hz) << '\n';
  out << "# toggle_phase_samples: " << h.toggle_phase_samples << '\n';
  out << "# value_scale: " << text::format_double(h.value_scale) << '\n';
  out << kColumns << '\n';
  for (std::size_t i = 0; i < record.samples.size(); ++i) {
    out << i << ',' << text::format_double(record.samples[i].tap) << ','
        << text::format_double(record.samples[i].signal) << '\n';
  }
}

Record record_from_samples(const PairedSamples& samples) {
  Record record;
  record.header.sample_rate_hz = 1'000'000;
  record.header.bin_length_us = 1.0;
  record.header.toggle_hz = 500'000.0;
  record.header.toggle_phase_samples = 0;
  record.header.value_scale = 1.0;
  record.samples.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    record.samples.push_back({samples.tap_values[i], samples.signal_values[i]});
  }
  return record;
}

BinningResult bin_and_sync(const RecordHeader& header, const std::vector<RawSample>& samples,
                           const BinOptions& options) {
  const auto per_bin = header.samples_per_bin();
  const auto half = header.half_period_samples();
  std::int64_t offset = 0;
  if (!options.permissive) {
    header.validate_strict();
    offset = header.toggle_phase_samples % per_bin;
    if (offset < 0) offset += per_bin;
  }
  const auto total = static_cast<std::int64_t>(samples.size());
  const std::int64_t candidates = total > offset ? (total - offset) / per_bin : 0;
  if (candidates == 0) {
    throw EmptySelection(fmt::format("no complete bins: {} samples, {} per bin", samples.size(), per_bin));
  }

  BinningResult result;
  result.candidates = static_cast<std::size_t>(candidates);
  result.bins.reserve(result.candidates);
  const double scale = header.value_scale / static_cast<double>(per_bin);
  for (std::int64_t b = 0; b < candidates; ++b) {
    const std::int64_t start = offset + b * per_bin;
    const std::int64_t next_edge = header.toggle_phase_samples + (floor_div(start - header.toggle_phase_samples, half) + 1) * half;
    if (next_edge < start + per_bin) {
      ++result.rejected;
      continue;
    }
    double tap = 0.0;
    double signal = 0.0;
    for (std::int64_t i = start; i < start + per_bin; ++i) {
      tap += samples[static_cast<std::size_t>(i)].tap;
      signal += samples[static_cast<std::size_t>(i)].signal;
    }
    result.bins.push_back({b, tap * scale, signal * scale, header.modulation_on(start)});
  }
  return result;
}

PairedSamples records_to_pairs(const std::vector<BinnedRecord>& records, ModulationFilter filter) {
  PairedSamples out;
  for (const auto& r : records) {
    if (filter == ModulationFilter::on_only && !r.modulation_on) continue;
    if (filter == ModulationFilter::off_only && r.modulation_on) continue;
    out.signal_values.push_back(r.signal_value);
    out.tap_values.push_back(r.tap_value);
    out.component_labels.push_back(PairedSamples::kNoLabel);
  }
  if (out.size() == 0) throw EmptySelection("no binned records pass the modulation filter");
  return out;
}

}  // namespace cvdistill
