#include "cvdistill/states.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include <fmt/format.h>

#include "cvdistill/errors.hpp"
#include "cvdistill/special.hpp"

namespace cvdistill {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Relative slack on var_x * var_p >= 1 so exact vacuum passes after rounding.
constexpr double kUncertaintySlack = 1e-12;

}  // namespace

QuadratureAngle::QuadratureAngle(double radians) {
  if (!std::isfinite(radians)) throw DomainError("quadrature angle must be finite");
  double t = std::fmod(radians, kTwoPi);
  if (t < 0.0) t += kTwoPi;
  if (t >= kTwoPi) t = 0.0;
  theta_ = t;
  cos_ = std::cos(t);
  sin_ = std::sin(t);
  // Cardinal axes exactly, so that measuring p gives cos == 0 rather than 6e-17.
  if (t == 0.5 * std::numbers::pi || t == 1.5 * std::numbers::pi) cos_ = 0.0;
  if (t == std::numbers::pi) sin_ = 0.0;
}

QuadratureAngle QuadratureAngle::from_degrees(double degrees) {
  QuadratureAngle a(degrees * std::numbers::pi / 180.0);
  const double wrapped = std::fmod(std::fmod(degrees, 360.0) + 360.0, 360.0);
  if (wrapped == 0.0) { a.cos_ = 1.0; a.sin_ = 0.0; }
  if (wrapped == 90.0) { a.cos_ = 0.0; a.sin_ = 1.0; }
  if (wrapped == 180.0) { a.cos_ = -1.0; a.sin_ = 0.0; }
  if (wrapped == 270.0) { a.cos_ = 0.0; a.sin_ = -1.0; }
  return a;
}

QuadratureAngle QuadratureAngle::phase() { return from_degrees(90.0); }

double QuadratureAngle::degrees() const noexcept { return theta_ * 180.0 / std::numbers::pi; }

void GaussianComponent::validate() const {
  if (!std::isfinite(mean_x) || !std::isfinite(mean_p)) {
    throw DomainError("component means must be finite");
  }
  if (!(var_x > 0.0) || !(var_p > 0.0) || !std::isfinite(var_x) || !std::isfinite(var_p)) {
    throw DomainError(fmt::format("component variances must be positive (var_x={}, var_p={})", var_x, var_p));
  }
  if (var_x * var_p < 1.0 - kUncertaintySlack) {
    throw DomainError(
        fmt::format("uncertainty relation violated: var_x * var_p = {} < 1", var_x * var_p));
  }
}

QuadratureMoments GaussianComponent::project(QuadratureAngle angle) const noexcept {
  const double c = angle.cos();
  const double s = angle.sin();
  return {mean_x * c + mean_p * s, var_x * c * c + var_p * s * s};
}

double GaussianComponent::density(double x, double p) const noexcept {
  const double dx = x - mean_x;
  const double dp = p - mean_p;
  const double exponent = -0.5 * (dx * dx / var_x + dp * dp / var_p);
  return std::exp(exponent) / (kTwoPi * std::sqrt(var_x * var_p));
}

MixtureState::MixtureState(std::vector<GaussianComponent> components, std::vector<double> weights)
    : components_(std::move(components)), weights_(std::move(weights)) {
  if (components_.empty()) throw DomainError("mixture needs at least one component");
  if (components_.size() != weights_.size()) {
    throw DomainError(fmt::format("mixture has {} components but {} weights", components_.size(),
                                  weights_.size()));
  }
  for (const auto& c : components_) c.validate();
  for (double w : weights_) {
    if (!(w >= 0.0 && w <= 1.0)) throw DomainError(fmt::format("mixture weight {} outside [0, 1]", w));
  }
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError(fmt::format("mixture weights sum to {}, not 1", total));
  }
}

MixtureState MixtureState::single(const GaussianComponent& component) {
  return MixtureState({component}, {1.0});
}

MixtureState MixtureState::rotated_quarter_turns(int quarter_turns) const {
  const int turns = ((quarter_turns % 4) + 4) % 4;
  std::vector<GaussianComponent> out = components_;
  for (auto& c : out) {
    for (int k = 0; k < turns; ++k) {
      // (x, p) -> (-p, x)
      c = GaussianComponent{-c.mean_p, c.mean_x, c.var_p, c.var_x};
    }
  }
  return MixtureState(std::move(out), weights_);
}

MixtureState make_noisy_state(double var_sq, double var_anti, double gamma, double displacement,
                              double displacement_angle) {
  return make_noisy_state_xp(var_sq, var_anti, gamma, displacement * std::cos(displacement_angle),
                             displacement * std::sin(displacement_angle));
}

MixtureState make_noisy_state_xp(double var_sq, double var_anti, double gamma, double displaced_x,
                                 double displaced_p) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw DomainError(fmt::format("displacement probability gamma = {} outside [0, 1]", gamma));
  }
  const GaussianComponent origin{0.0, 0.0, var_sq, var_anti};
  const GaussianComponent shifted{displaced_x, displaced_p, var_sq, var_anti};
  return MixtureState({origin, shifted}, {1.0 - gamma, gamma});
}

QuadratureMoments quadrature_stats(const MixtureState& state, QuadratureAngle angle) {
  double mean = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    mean += state.weight(i) * state.component(i).project(angle).mean;
  }
  // Within-component variance plus spread of the projected means; same value
  // as sum w (v + m^2) - mean^2 without the cancellation.
  double variance = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    const auto m = state.component(i).project(angle);
    const double d = m.mean - mean;
    variance += state.weight(i) * (m.variance + d * d);
  }
  return {mean, variance};
}

double wigner_density(const MixtureState& state, double x, double p) {
  double w = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state.weight(i) > 0.0) w += state.weight(i) * state.component(i).density(x, p);
  }
  return w;
}

double marginal_pdf(const MixtureState& state, QuadratureAngle angle, double q) {
  double density = 0.0;
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state.weight(i) == 0.0) continue;
    const auto m = state.component(i).project(angle);
    const double sd = std::sqrt(m.variance);
    density += state.weight(i) * special::normal_pdf((q - m.mean) / sd) / sd;
  }
  return density;
}

}  // namespace cvdistill
