#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "cvdistill/states.hpp"

namespace cvdistill {

/// Binned quadrature marginals at equally spaced angles over [0, pi).
/// Histograms are densities sharing `bin_edges`.
struct ProjectionSet {
  std::vector<double> angles;
  std::vector<double> bin_edges;
  std::vector<std::vector<double>> histograms;
  std::size_t samples_per_angle = 0;
  std::vector<std::string> warnings;

  std::size_t bins() const noexcept { return bin_edges.empty() ? 0 : bin_edges.size() - 1; }
  double bin_width() const;
  double half_range() const { return bin_edges.back(); }

  /// Throws DomainError on shape violations.
  void validate() const;

  /// Element-wise histogram sum; angles and bins must match.
  ProjectionSet& operator+=(const ProjectionSet& other);
};

struct ProjectionOptions {
  std::size_t n_angles = 128;
  std::size_t samples_per_angle = 200000;
  std::size_t bins = 256;
  double half_range = 8.0;  // histograms span [-half_range, half_range]
  std::uint64_t seed = 1;
};

/// k * pi / n for k = 0..n-1.
std::vector<double> equally_spaced_angles(std::size_t n_angles);

/// Samples every angle's marginal exactly (component draw + 1-D Gaussian).
/// Angles are sampled in parallel, each from its own RNG substream. A warning
/// is attached when more than 1% of an angle's draws fall outside the range.
ProjectionSet collect_projections(const MixtureState& state, const ProjectionOptions& options);

/// Bins externally produced samples, one vector per angle.
ProjectionSet projections_from_samples(const std::vector<double>& angles,
                                       const std::vector<std::vector<double>>& samples, std::size_t bins,
                                       double half_range);

struct GridSpec {
  double x_min = -6.0;
  double x_max = 6.0;
  std::size_t nx = 101;
  double p_min = -6.0;
  double p_max = 6.0;
  std::size_t np = 101;

  static GridSpec symmetric(double half_extent, std::size_t points) {
    return {-half_extent, half_extent, points, -half_extent, half_extent, points};
  }

  double corner_radius() const;
};

/// Values on a uniform grid, row-major with one row per p value:
/// at(ix, ip) = values[ip * nx + ix].
struct WignerGrid {
  std::vector<double> x_axis;
  std::vector<double> p_axis;
  std::vector<double> values;

  static WignerGrid zeros(const GridSpec& spec);

  std::size_t nx() const noexcept { return x_axis.size(); }
  std::size_t np() const noexcept { return p_axis.size(); }
  double& at(std::size_t ix, std::size_t ip) { return values[ip * nx() + ix]; }
  double at(std::size_t ix, std::size_t ip) const { return values[ip * nx() + ix]; }
  double cell_area() const;
  double mass() const;
  double max_value() const;
};

struct ReconstructionOptions {
  double filter_cutoff = 0.7;  // fraction of Nyquist where the Hann window reaches zero
};

/// Filtered back-projection. Each projection is convolved with a ramp filter
/// (band-limited Ram-Lak kernel, Hann-windowed at the cutoff), then smeared
/// back across the grid and averaged over angles. Output is in density units.
/// Throws DomainError if the cutoff is outside (0, 1] or if a grid point would
/// project outside the histogram range.
WignerGrid inverse_radon(const ProjectionSet& projections, const GridSpec& grid,
                         const ReconstructionOptions& options = {});

WignerGrid analytic_wigner_grid(const MixtureState& state, const GridSpec& grid);

struct GridDistance {
  double l_inf = 0.0;
  double l1 = 0.0;
  double peak_ratio = 0.0;
};

/// Distances of `a` from reference `b`; axes must match exactly.
GridDistance grid_distance(const WignerGrid& a, const WignerGrid& b);

struct GridPeak {
  double x = 0.0;
  double p = 0.0;
  double value = 0.0;
};

/// Strict 8-neighbour local maxima whose value is at least
/// `min_fraction` of the grid maximum, highest first.
std::vector<GridPeak> local_maxima(const WignerGrid& grid, double min_fraction);

/// Grid covering every component to +-`sigmas` standard deviations.
GridSpec auto_grid(const MixtureState& state, double sigmas, std::size_t points);

/// Histogram half-range covering the grid corners and every projection's
/// component spread to +-`sigmas`.
double auto_half_range(const MixtureState& state, const GridSpec& grid, double sigmas);

// CSV serialization.
void write_wigner_csv(std::ostream& out, const WignerGrid& grid);
WignerGrid read_wigner_csv(std::istream& in);
void write_projection_csv(std::ostream& out, const ProjectionSet& set);
ProjectionSet read_projection_csv(std::istream& in);

namespace serial {

/// Single-threaded back-projection of already filtered projections. Used as
/// the reference for the parallel kernel.
WignerGrid backproject(const std::vector<std::vector<double>>& filtered, const std::vector<double>& angles,
                       const std::vector<double>& bin_edges, const GridSpec& grid);

}  // namespace serial

/// Ramp-filtered projections (same bin layout as the input histograms).
std::vector<std::vector<double>> filter_projections(const ProjectionSet& projections,
                                                    const ReconstructionOptions& options);

/// OpenMP back-projection; bit-identical to serial::backproject.
WignerGrid backproject(const std::vector<std::vector<double>>& filtered, const std::vector<double>& angles,
                       const std::vector<double>& bin_edges, const GridSpec& grid);

}  // namespace cvdistill
