#pragma once

#include <cstddef>
#include <vector>

namespace cvdistill {

/// Angle of a measured quadrature, q(theta) = x cos(theta) + p sin(theta),
/// counted from the amplitude (squeezed) axis. Stored normalized into [0, 2pi).
class QuadratureAngle {
 public:
  constexpr QuadratureAngle() = default;
  explicit QuadratureAngle(double radians);

  static QuadratureAngle from_degrees(double degrees);
  static QuadratureAngle amplitude() { return QuadratureAngle(0.0); }
  static QuadratureAngle phase();

  double radians() const noexcept { return theta_; }
  double degrees() const noexcept;
  double cos() const noexcept { return cos_; }
  double sin() const noexcept { return sin_; }

 private:
  double theta_ = 0.0;
  double cos_ = 1.0;
  double sin_ = 0.0;
};

/// Mean and variance of a one-dimensional quadrature distribution (SNU).
struct QuadratureMoments {
  double mean = 0.0;
  double variance = 1.0;
};

/// One Gaussian constituent with diagonal covariance in (x, p).
/// Invariants: var_x, var_p > 0 and var_x * var_p >= 1.
struct GaussianComponent {
  double mean_x = 0.0;
  double mean_p = 0.0;
  double var_x = 1.0;
  double var_p = 1.0;

  /// Throws DomainError if the invariants do not hold.
  void validate() const;

  QuadratureMoments project(QuadratureAngle angle) const noexcept;
  double density(double x, double p) const noexcept;

  static GaussianComponent vacuum() { return {}; }
};

/// Convex combination of Gaussian components. Weights are non-negative and sum
/// to one within 1e-12; construction validates everything.
class MixtureState {
 public:
  MixtureState(std::vector<GaussianComponent> components, std::vector<double> weights);

  static MixtureState single(const GaussianComponent& component);

  std::size_t size() const noexcept { return components_.size(); }
  const std::vector<GaussianComponent>& components() const noexcept { return components_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const GaussianComponent& component(std::size_t i) const { return components_.at(i); }
  double weight(std::size_t i) const { return weights_.at(i); }

  /// The mixture rotated counter-clockwise in phase space by quarter_turns * 90
  /// degrees. Quarter turns are the rotations that keep components diagonal.
  MixtureState rotated_quarter_turns(int quarter_turns) const;

 private:
  std::vector<GaussianComponent> components_;
  std::vector<double> weights_;
};

/// Squeezed state corrupted by a random displacement: weight 1-gamma at the
/// origin, weight gamma displaced by `displacement` along `displacement_angle`.
/// Both components share (var_sq, var_anti) as (var_x, var_p).
MixtureState make_noisy_state(double var_sq, double var_anti, double gamma,
                              double displacement, double displacement_angle);

/// Same as above with the displacement given as its (x, p) components.
MixtureState make_noisy_state_xp(double var_sq, double var_anti, double gamma,
                                 double displaced_x, double displaced_p);

QuadratureMoments quadrature_stats(const MixtureState& state, QuadratureAngle angle);

double wigner_density(const MixtureState& state, double x, double p);

double marginal_pdf(const MixtureState& state, QuadratureAngle angle, double q);

}  // namespace cvdistill
