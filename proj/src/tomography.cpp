#include "cvdistill/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include <fftw3.h>
#include <fmt/format.h>

#include "cvdistill/errors.hpp"
#include "cvdistill/rng.hpp"
#include "text.hpp"

namespace cvdistill {

namespace {

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double m = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double k = static_cast<double>(i);
    out[i] = (lo * (m - k) + hi * k) / m;
  }
  out.back() = hi;
  return out;
}

std::vector<double> symmetric_edges(std::size_t bins, double half_range) {
  return linspace(-half_range, half_range, bins + 1);
}

void check_grid(const GridSpec& g) {
  if (g.nx < 2 || g.np < 2 || !(g.x_max > g.x_min) || !(g.p_max > g.p_min)) {
    throw DomainError("grid needs at least 2 points per axis and increasing bounds");
  }
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Interpolated filtered projection at position s; zero outside the bin centers.
double sample_projection(const std::vector<double>& q, double first_center, double inv_width, double s) {
  const double u = (s - first_center) * inv_width;
  const double fl = std::floor(u);
  const auto i = static_cast<std::int64_t>(fl);
  const double frac = u - fl;
  const auto n = static_cast<std::int64_t>(q.size());
  const double lo = (i >= 0 && i < n) ? q[static_cast<std::size_t>(i)] : 0.0;
  const double hi = (i + 1 >= 0 && i + 1 < n) ? q[static_cast<std::size_t>(i + 1)] : 0.0;
  return lo + frac * (hi - lo);
}

struct BackprojectPlan {
  std::vector<double> cosines, sines;
  double first_center, inv_width, scale;
};

BackprojectPlan make_backproject_plan(const std::vector<double>& angles, const std::vector<double>& edges) {
  BackprojectPlan plan;
  for (double a : angles) {
    plan.cosines.push_back(std::cos(a));
    plan.sines.push_back(std::sin(a));
  }
  const double width = (edges.back() - edges.front()) / static_cast<double>(edges.size() - 1);
  plan.first_center = edges.front() + 0.5 * width;
  plan.inv_width = 1.0 / width;
  plan.scale = std::numbers::pi / static_cast<double>(angles.size());
  return plan;
}

void backproject_row(const BackprojectPlan& plan, const std::vector<std::vector<double>>& filtered,
                     WignerGrid& grid, std::size_t ip) {
  const double p = grid.p_axis[ip];
  for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
    const double x = grid.x_axis[ix];
    double acc = 0.0;
    for (std::size_t k = 0; k < filtered.size(); ++k) {
      acc += sample_projection(filtered[k], plan.first_center, plan.inv_width,
                               x * plan.cosines[k] + p * plan.sines[k]);
    }
    grid.at(ix, ip) = acc * plan.scale;
  }
}

void check_backprojection_inputs(const std::vector<std::vector<double>>& filtered, const std::vector<double>& angles,
                                 const std::vector<double>& edges, const GridSpec& spec) {
  check_grid(spec);
  if (filtered.size() != angles.size() || angles.empty()) {
    throw DomainError("one filtered projection per angle required");
  }
  if (edges.size() < 2) throw DomainError("projection bins missing");
  const double half = std::max(std::abs(edges.front()), std::abs(edges.back()));
  if (spec.corner_radius() > half * (1.0 + 1e-12)) {
    throw DomainError(fmt::format("grid corner radius {:.6g} exceeds the projection half-range {:.6g}; "
                                  "widen the histograms or shrink the grid",
                                  spec.corner_radius(), half));
  }
}

}  // namespace

double ProjectionSet::bin_width() const {
  return (bin_edges.back() - bin_edges.front()) / static_cast<double>(bins());
}

void ProjectionSet::validate() const {
  if (angles.size() < 2) throw DomainError("projection set needs at least 2 angles");
  for (std::size_t i = 1; i < angles.size(); ++i) {
    if (!(angles[i] > angles[i - 1])) throw DomainError("projection angles must be strictly increasing");
  }
  if (bin_edges.size() < 2) throw DomainError("projection set has no bins");
  for (std::size_t i = 1; i < bin_edges.size(); ++i) {
    if (!(bin_edges[i] > bin_edges[i - 1])) throw DomainError("bin edges must be strictly increasing");
  }
  if (histograms.size() != angles.size()) throw DomainError("one histogram per angle required");
  for (const auto& h : histograms) {
    if (h.size() != bins()) throw DomainError("all histograms must share the bin edges");
  }
}

ProjectionSet& ProjectionSet::operator+=(const ProjectionSet& other) {
  if (other.angles != angles || other.bin_edges != bin_edges) {
    throw DomainError("projection sets differ in angles or bins");
  }
  for (std::size_t k = 0; k < histograms.size(); ++k) {
    for (std::size_t b = 0; b < histograms[k].size(); ++b) histograms[k][b] += other.histograms[k][b];
  }
  samples_per_angle += other.samples_per_angle;
  return *this;
}

std::vector<double> equally_spaced_angles(std::size_t n_angles) {
  std::vector<double> out(n_angles);
  for (std::size_t k = 0; k < n_angles; ++k) {
    out[k] = static_cast<double>(k) * std::numbers::pi / static_cast<double>(n_angles);
  }
  return out;
}

ProjectionSet collect_projections(const MixtureState& state, const ProjectionOptions& options) {
  if (options.n_angles < 2) throw DomainError("need at least 2 projection angles");
  if (options.bins < 8) throw DomainError("need at least 8 histogram bins");
  if (options.samples_per_angle == 0) throw DomainError("need at least one sample per angle");
  if (!(options.half_range > 0.0)) throw DomainError("histogram range must be positive");

  ProjectionSet set;
  set.angles = equally_spaced_angles(options.n_angles);
  set.bin_edges = symmetric_edges(options.bins, options.half_range);
  set.samples_per_angle = options.samples_per_angle;
  set.histograms.assign(options.n_angles, std::vector<double>(options.bins, 0.0));

  std::vector<double> cumulative;
  double acc = 0.0;
  for (double w : state.weights()) cumulative.push_back(acc += w);
  cumulative.back() = 1.0;

  const double width = set.bin_width();
  const double norm = 1.0 / (static_cast<double>(options.samples_per_angle) * width);
  std::vector<std::size_t> outside(options.n_angles, 0);
  const auto n_angles = static_cast<std::int64_t>(options.n_angles);

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t sk = 0; sk < n_angles; ++sk) {
    const auto k = static_cast<std::size_t>(sk);
    const QuadratureAngle angle(set.angles[k]);
    std::vector<QuadratureMoments> proj;
    for (const auto& c : state.components()) {
      auto m = c.project(angle);
      m.variance = std::sqrt(m.variance);  // store the standard deviation
      proj.push_back(m);
    }
    rng::NormalSource normal(rng::Xoshiro256::substream(options.seed, k));
    std::vector<std::size_t> counts(options.bins, 0);
    for (std::size_t i = 0; i < options.samples_per_angle; ++i) {
      std::size_t c = 0;
      if (proj.size() > 1) {
        const double u = normal.uniform();
        while (c + 1 < proj.size() && u >= cumulative[c]) ++c;
      }
      const double q = proj[c].mean + proj[c].variance * normal();
      const double pos = (q + options.half_range) / width;
      if (pos >= 0.0 && pos < static_cast<double>(options.bins)) {
        ++counts[static_cast<std::size_t>(pos)];
      } else {
        ++outside[k];
      }
    }
    for (std::size_t b = 0; b < options.bins; ++b) set.histograms[k][b] = static_cast<double>(counts[b]) * norm;
  }

  for (std::size_t k = 0; k < options.n_angles; ++k) {
    const double frac = static_cast<double>(outside[k]) / static_cast<double>(options.samples_per_angle);
    if (frac > 0.01) {
      set.warnings.push_back(fmt::format("angle {:.6g} rad: {:.2f}% of draws fall outside +-{}", set.angles[k],
                                         100.0 * frac, options.half_range));
    }
  }
  return set;
}

ProjectionSet projections_from_samples(const std::vector<double>& angles,
                                       const std::vector<std::vector<double>>& samples, std::size_t bins,
                                       double half_range) {
  if (angles.size() != samples.size()) throw DomainError("one sample vector per angle required");
  if (bins < 8) throw DomainError("need at least 8 histogram bins");
  if (!(half_range > 0.0)) throw DomainError("histogram range must be positive");
  ProjectionSet set;
  set.angles = angles;
  set.bin_edges = symmetric_edges(bins, half_range);
  const double width = set.bin_width();
  set.samples_per_angle = samples.empty() ? 0 : samples.front().size();
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const auto& v = samples[k];
    if (v.empty()) throw DomainError(fmt::format("no samples at angle index {}", k));
    set.samples_per_angle = std::min(set.samples_per_angle, v.size());
    std::vector<double> h(bins, 0.0);
    std::size_t outside = 0;
    for (double q : v) {
      const double pos = (q + half_range) / width;
      if (pos >= 0.0 && pos < static_cast<double>(bins)) {
        h[static_cast<std::size_t>(pos)] += 1.0;
      } else {
        ++outside;
      }
    }
    const double norm = 1.0 / (static_cast<double>(v.size()) * width);
    for (double& x : h) x *= norm;
    set.histograms.push_back(std::move(h));
    const double frac = static_cast<double>(outside) / static_cast<double>(v.size());
    if (frac > 0.01) {
      set.warnings.push_back(
          fmt::format("angle {:.6g} rad: {:.2f}% of samples fall outside +-{}", angles[k], 100.0 * frac, half_range));
    }
  }
  set.validate();
  return set;
}

double GridSpec::corner_radius() const {
  const double x = std::max(std::abs(x_min), std::abs(x_max));
  const double p = std::max(std::abs(p_min), std::abs(p_max));
  return std::hypot(x, p);
}

WignerGrid WignerGrid::zeros(const GridSpec& spec) {
  check_grid(spec);
  WignerGrid g;
  g.x_axis = linspace(spec.x_min, spec.x_max, spec.nx);
  g.p_axis = linspace(spec.p_min, spec.p_max, spec.np);
  g.values.assign(spec.nx * spec.np, 0.0);
  return g;
}

double WignerGrid::cell_area() const {
  const double dx = (x_axis.back() - x_axis.front()) / static_cast<double>(nx() - 1);
  const double dp = (p_axis.back() - p_axis.front()) / static_cast<double>(np() - 1);
  return dx * dp;
}

double WignerGrid::mass() const {
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum * cell_area();
}

double WignerGrid::max_value() const { return *std::max_element(values.begin(), values.end()); }

std::vector<std::vector<double>> filter_projections(const ProjectionSet& projections,
                                                    const ReconstructionOptions& options) {
  projections.validate();
  if (!(options.filter_cutoff > 0.0 && options.filter_cutoff <= 1.0)) {
    throw DomainError(fmt::format("filter cutoff {} must lie in (0, 1]", options.filter_cutoff));
  }
  const std::size_t n = projections.bins();
  const std::size_t len = next_pow2(2 * n);
  const std::size_t n_freq = len / 2 + 1;
  const double width = projections.bin_width();

  // Band-limited ramp: transform of the spatial Ram-Lak kernel (exact DC term).
  std::vector<double> kernel(len, 0.0);
  for (std::size_t j = 0; j < len; ++j) {
    const auto m = static_cast<std::int64_t>(j <= len / 2 ? j : j - len);
    if (m == 0) {
      kernel[j] = 0.25;
    } else if (m % 2 != 0) {
      kernel[j] = -1.0 / (std::numbers::pi * std::numbers::pi * static_cast<double>(m * m));
    }
  }
  std::vector<double> buffer(len);
  auto* spectrum = fftw_alloc_complex(n_freq);
  fftw_plan forward = fftw_plan_dft_r2c_1d(static_cast<int>(len), buffer.data(), spectrum, FFTW_ESTIMATE);
  fftw_plan inverse = fftw_plan_dft_c2r_1d(static_cast<int>(len), spectrum, buffer.data(), FFTW_ESTIMATE);

  std::copy(kernel.begin(), kernel.end(), buffer.begin());
  fftw_execute(forward);
  std::vector<double> response(n_freq);
  const double cutoff = 0.5 * options.filter_cutoff;  // cycles per bin
  for (std::size_t k = 0; k < n_freq; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(len);
    const double window = f <= cutoff ? 0.5 * (1.0 + std::cos(std::numbers::pi * f / cutoff)) : 0.0;
    // Kernel is in 1/bin^2; one factor of the width comes from the convolution
    // integral, leaving 1/width. FFTW's inverse is unnormalized.
    response[k] = spectrum[k][0] * window / (width * static_cast<double>(len));
  }

  std::vector<std::vector<double>> filtered;
  filtered.reserve(projections.histograms.size());
  for (const auto& h : projections.histograms) {
    std::fill(buffer.begin(), buffer.end(), 0.0);
    std::copy(h.begin(), h.end(), buffer.begin());
    fftw_execute(forward);
    for (std::size_t k = 0; k < n_freq; ++k) {
      spectrum[k][0] *= response[k];
      spectrum[k][1] *= response[k];
    }
    fftw_execute(inverse);
    filtered.emplace_back(buffer.begin(), buffer.begin() + static_cast<std::ptrdiff_t>(n));
  }
  fftw_destroy_plan(forward);
  fftw_destroy_plan(inverse);
  fftw_free(spectrum);
  return filtered;
}

namespace serial {

WignerGrid backproject(const std::vector<std::vector<double>>& filtered, const std::vector<double>& angles,
                       const std::vector<double>& bin_edges, const GridSpec& spec) {
  check_backprojection_inputs(filtered, angles, bin_edges, spec);
  auto grid = WignerGrid::zeros(spec);
  const auto plan = make_backproject_plan(angles, bin_edges);
  for (std::size_t ip = 0; ip < grid.np(); ++ip) backproject_row(plan, filtered, grid, ip);
  return grid;
}

}  // namespace serial

WignerGrid backproject(const std::vector<std::vector<double>>& filtered, const std::vector<double>& angles,
                       const std::vector<double>& bin_edges, const GridSpec& spec) {
  check_backprojection_inputs(filtered, angles, bin_edges, spec);
  auto grid = WignerGrid::zeros(spec);
  const auto plan = make_backproject_plan(angles, bin_edges);
  const auto rows = static_cast<std::int64_t>(grid.np());
#pragma omp parallel for schedule(static)
  for (std::int64_t ip = 0; ip < rows; ++ip) backproject_row(plan, filtered, grid, static_cast<std::size_t>(ip));
  return grid;
}

WignerGrid inverse_radon(const ProjectionSet& projections, const GridSpec& grid,
                         const ReconstructionOptions& options) {
  projections.validate();
  check_backprojection_inputs(projections.histograms, projections.angles, projections.bin_edges, grid);
  return backproject(filter_projections(projections, options), projections.angles, projections.bin_edges, grid);
}

WignerGrid analytic_wigner_grid(const MixtureState& state, const GridSpec& spec) {
  auto grid = WignerGrid::zeros(spec);
  for (std::size_t ip = 0; ip < grid.np(); ++ip) {
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) {
      grid.at(ix, ip) = wigner_density(state, grid.x_axis[ix], grid.p_axis[ip]);
    }
  }
  return grid;
}

GridDistance grid_distance(const WignerGrid& a, const WignerGrid& b) {
  if (a.x_axis != b.x_axis || a.p_axis != b.p_axis || a.values.size() != b.values.size()) {
    throw DomainError("grids must share identical axes");
  }
  GridDistance d;
  double sum = 0.0;
  double peak = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double diff = std::abs(a.values[i] - b.values[i]);
    d.l_inf = std::max(d.l_inf, diff);
    sum += diff;
    peak = std::max(peak, std::abs(b.values[i]));
  }
  d.l1 = sum * a.cell_area();
  if (peak > 0.0) {
    d.peak_ratio = d.l_inf / peak;
  } else {
    d.peak_ratio = d.l_inf == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return d;
}

std::vector<GridPeak> local_maxima(const WignerGrid& grid, double min_fraction) {
  const double floor_value = min_fraction * grid.max_value();
  std::vector<GridPeak> peaks;
  for (std::size_t ip = 1; ip + 1 < grid.np(); ++ip) {
    for (std::size_t ix = 1; ix + 1 < grid.nx(); ++ix) {
      const double v = grid.at(ix, ip);
      if (v < floor_value) continue;
      bool is_max = true;
      for (int dp = -1; dp <= 1 && is_max; ++dp) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dp == 0) continue;
          if (grid.at(ix + dx, ip + dp) >= v) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) peaks.push_back({grid.x_axis[ix], grid.p_axis[ip], v});
    }
  }
  std::sort(peaks.begin(), peaks.end(), [](const GridPeak& a, const GridPeak& b) { return a.value > b.value; });
  return peaks;
}

GridSpec auto_grid(const MixtureState& state, double sigmas, std::size_t points) {
  GridSpec g;
  g.x_min = g.p_min = std::numeric_limits<double>::infinity();
  g.x_max = g.p_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state.weight(i) == 0.0) continue;
    const auto& c = state.component(i);
    g.x_min = std::min(g.x_min, c.mean_x - sigmas * std::sqrt(c.var_x));
    g.x_max = std::max(g.x_max, c.mean_x + sigmas * std::sqrt(c.var_x));
    g.p_min = std::min(g.p_min, c.mean_p - sigmas * std::sqrt(c.var_p));
    g.p_max = std::max(g.p_max, c.mean_p + sigmas * std::sqrt(c.var_p));
  }
  g.nx = g.np = points;
  return g;
}

double auto_half_range(const MixtureState& state, const GridSpec& grid, double sigmas) {
  double half = grid.corner_radius();
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state.weight(i) == 0.0) continue;
    const auto& c = state.component(i);
    half = std::max(half, std::hypot(c.mean_x, c.mean_p) + sigmas * std::sqrt(std::max(c.var_x, c.var_p)));
  }
  return half;
}

void write_wigner_csv(std::ostream& out, const WignerGrid& grid) {
  out << "p\\x";
  for (double x : grid.x_axis) out << ',' << text::format_double(x);
  out << '\n';
  for (std::size_t ip = 0; ip < grid.np(); ++ip) {
    out << text::format_double(grid.p_axis[ip]);
    for (std::size_t ix = 0; ix < grid.nx(); ++ix) out << ',' << text::format_double(grid.at(ix, ip));
    out << '\n';
  }
}

WignerGrid read_wigner_csv(std::istream& in) {
  WignerGrid grid;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError(1, "empty Wigner grid file");
  ++line_no;
  auto header = text::split(text::trim(line));
  if (header.size() < 3 || text::trim(header[0]) != "p\\x") throw ParseError(line_no, "expected 'p\\x,<x axis>' header");
  for (std::size_t i = 1; i < header.size(); ++i) {
    auto v = text::parse_number<double>(header[i]);
    if (!v) throw ParseError(line_no, fmt::format("bad x axis value '{}'", header[i]));
    grid.x_axis.push_back(*v);
  }
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto fields = text::split(text::trim(line));
    if (fields.size() != grid.x_axis.size() + 1) {
      throw ParseError(line_no, fmt::format("expected {} columns, found {}", grid.x_axis.size() + 1, fields.size()));
    }
    for (std::size_t i = 0; i < fields.size(); ++i) {
      auto v = text::parse_number<double>(fields[i]);
      if (!v) throw ParseError(line_no, fmt::format("non-numeric field '{}'", fields[i]));
      if (i == 0) {
        grid.p_axis.push_back(*v);
      } else {
        grid.values.push_back(*v);
      }
    }
  }
  if (grid.p_axis.size() < 2) throw ParseError(line_no, "Wigner grid needs at least two rows");
  return grid;
}

void write_projection_csv(std::ostream& out, const ProjectionSet& set) {
  out << "# format: cvdistill-projections v1\n";
  out << "# angles: " << set.angles.size() << '\n';
  out << "# bins: " << set.bins() << '\n';
  out << "# bin_min: " << text::format_double(set.bin_edges.front()) << '\n';
  out << "# bin_max: " << text::format_double(set.bin_edges.back()) << '\n';
  out << "# samples_per_angle: " << set.samples_per_angle << '\n';
  for (const auto& w : set.warnings) out << "# warning: " << w << '\n';
  out << "angle_rad";
  for (std::size_t b = 0; b < set.bins(); ++b) out << ",bin_" << b;
  out << '\n';
  for (std::size_t k = 0; k < set.angles.size(); ++k) {
    out << text::format_double(set.angles[k]);
    for (double v : set.histograms[k]) out << ',' << text::format_double(v);
    out << '\n';
  }
}

ProjectionSet read_projection_csv(std::istream& in) {
  ProjectionSet set;
  std::string line;
  std::size_t line_no = 0;
  std::size_t n_angles = 0, bins = 0;
  double bin_min = 0.0, bin_max = 0.0;
  bool saw_format = false, saw_columns = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    if (!saw_columns && trimmed.front() == '#') {
      const auto field = text::header_field(trimmed);
      if (!field) throw ParseError(line_no, "malformed header line");
      const auto [key, value] = *field;
      auto need_int = [&]() {
        auto v = text::parse_number<std::size_t>(value);
        if (!v) throw ParseError(line_no, fmt::format("bad integer for '{}'", key));
        return *v;
      };
      auto need_double = [&]() {
        auto v = text::parse_number<double>(value);
        if (!v) throw ParseError(line_no, fmt::format("bad number for '{}'", key));
        return *v;
      };
      if (key == "format") {
        if (value != "cvdistill-projections v1") throw ParseError(line_no, "unsupported format");
        saw_format = true;
      } else if (key == "angles") {
        n_angles = need_int();
      } else if (key == "bins") {
        bins = need_int();
      } else if (key == "bin_min") {
        bin_min = need_double();
      } else if (key == "bin_max") {
        bin_max = need_double();
      } else if (key == "samples_per_angle") {
        set.samples_per_angle = need_int();
      } else if (key == "warning") {
        set.warnings.emplace_back(value);
      } else {
        throw ParseError(line_no, fmt::format("unknown header field '{}'", key));
      }
      continue;
    }
    if (!saw_columns) {
      if (!saw_format) throw ParseError(line_no, "missing '# format:' header");
      if (bins == 0 || !(bin_max > bin_min)) throw ParseError(line_no, "bin layout missing from header");
      if (text::split(trimmed).size() != bins + 1) throw ParseError(line_no, "column header does not match bins");
      saw_columns = true;
      set.bin_edges = linspace(bin_min, bin_max, bins + 1);
      continue;
    }
    const auto fields = text::split(trimmed);
    if (fields.size() != bins + 1) {
      throw ParseError(line_no, fmt::format("expected {} columns, found {}", bins + 1, fields.size()));
    }
    std::vector<double> h;
    for (std::size_t i = 0; i < fields.size(); ++i) {
      auto v = text::parse_number<double>(fields[i]);
      if (!v) throw ParseError(line_no, fmt::format("non-numeric field '{}'", fields[i]));
      if (i == 0) {
        set.angles.push_back(*v);
      } else {
        h.push_back(*v);
      }
    }
    set.histograms.push_back(std::move(h));
  }
  if (!saw_columns) throw ParseError(line_no, "no column header found");
  if (set.angles.size() != n_angles) {
    throw ParseError(line_no, fmt::format("header promises {} angles, file has {}", n_angles, set.angles.size()));
  }
  return set;
}

}  // namespace cvdistill
