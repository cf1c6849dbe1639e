#pragma once

#include <span>
#include <vector>

#include "cvdistill/states.hpp"

namespace cvdistill {

/// Tap beam splitter. The signal port transmits T, the tap port reflects R.
///   signal: x_s = sqrt(T) x + sqrt(R) x_v
///   tap:    x_t = sqrt(R) x - sqrt(T) x_v
/// (same for p). The minus sign on the tap vacuum is the fixed convention that
/// the Monte Carlo sampler reproduces.
class TapSplitter {
 public:
  /// Throws DomainError unless 0 < reflectance < 1.
  explicit TapSplitter(double reflectance);

  double reflectance() const noexcept { return r_; }
  double transmittance() const noexcept { return t_; }

 private:
  double r_;
  double t_;
};

/// Homodyne efficiency modelled as a loss beam splitter mixing in vacuum:
/// V -> eta V + (1 - eta), mean -> sqrt(eta) mean. eta = 1 is lossless.
class DetectorModel {
 public:
  DetectorModel() = default;
  explicit DetectorModel(double efficiency);

  double efficiency() const noexcept { return eta_; }
  bool lossless() const noexcept { return eta_ == 1.0; }

  QuadratureMoments apply(QuadratureMoments m) const noexcept;

 private:
  double eta_ = 1.0;
};

enum class KeepSide { above, below };

struct PostSelectionRule {
  QuadratureAngle tap_angle = QuadratureAngle::phase();
  double threshold = 0.0;
  KeepSide keep_side = KeepSide::above;

  bool accepts(double tap_value) const noexcept {
    return keep_side == KeepSide::above ? tap_value > threshold : tap_value < threshold;
  }
};

struct DistillationResult {
  double distilled_mean = 0.0;
  double distilled_variance = 0.0;
  double success_probability = 0.0;
  double standard_error = 0.0;  // of the variance; 0 for closed-form results
};

struct SplitComponent {
  GaussianComponent signal;
  GaussianComponent tap;
  double cross_cov_x = 0.0;
  double cross_cov_p = 0.0;
};

SplitComponent split_component_stats(const GaussianComponent& component, const TapSplitter& splitter);

/// Joint Gaussian statistics of one component's measured signal projection and
/// measured tap projection.
struct JointProjection {
  double signal_mean = 0.0;
  double signal_variance = 1.0;
  double tap_mean = 0.0;
  double tap_variance = 1.0;
  double cross_covariance = 0.0;
};

/// Projects a split component onto the verification and tap angles, applying
/// detector loss independently on each port.
JointProjection joint_projection(const GaussianComponent& component, const TapSplitter& splitter,
                                 const DetectorModel& detector, QuadratureAngle verification_angle,
                                 QuadratureAngle tap_angle);

/// Probability that a Gaussian tap outcome passes the threshold,
/// 1/2 erfc((threshold - mean) / sqrt(2 var)) for keep-above.
double filter_weight(double threshold, double projected_tap_mean, double tap_variance, KeepSide keep_side);

struct TruncatedMoments {
  double mean = 0.0;
  double variance = 0.0;
  double weight = 0.0;
};

/// Moments of the signal conditioned on the correlated tap passing the
/// threshold (truncated bivariate normal, inverse-Mills-ratio form).
/// Throws DomainError for tap_variance <= 0 or an impossible covariance, and
/// EmptySelection when the selection weight underflows below 1e-300.
TruncatedMoments conditional_truncated_stats(const JointProjection& joint, double threshold,
                                             KeepSide keep_side);

/// Closed-form distilled statistics for diagonal-component mixtures when the
/// measured tap and signal projections are uncorrelated within each
/// component (e.g. tap measures p, signal measures x). Mixture reweighting by
/// filter weights g_i; for two components this is
///   V = V_s + T x1^2 r / (1 + r)^2,  r = (1 - gamma) g0 / (gamma g1).
/// Throws DomainError when a component has correlated projections; use
/// conditional_distilled_stats for those geometries.
DistillationResult distilled_stats(const MixtureState& state, const TapSplitter& splitter,
                                   const PostSelectionRule& rule, QuadratureAngle verification_angle,
                                   const DetectorModel& detector = {});

/// General-geometry version: each component goes through
/// conditional_truncated_stats before mixing. Agrees with distilled_stats
/// whenever the latter applies.
DistillationResult conditional_distilled_stats(const MixtureState& state, const TapSplitter& splitter,
                                               const PostSelectionRule& rule,
                                               QuadratureAngle verification_angle,
                                               const DetectorModel& detector = {});

/// One-dimensional Gaussian mixture: the verification marginal after
/// post-selection (independent-projection geometry only).
struct ConditionedMarginal {
  std::vector<double> weights;
  std::vector<double> means;
  std::vector<double> variances;
  double success_probability = 0.0;

  double pdf(double q) const;
};

ConditionedMarginal conditioned_signal_marginal(const MixtureState& state, const TapSplitter& splitter,
                                                const PostSelectionRule& rule,
                                                QuadratureAngle verification_angle,
                                                const DetectorModel& detector = {});

/// Transmitted (signal-port) mixture marginal with no selection.
QuadratureMoments transmitted_stats(const MixtureState& state, const TapSplitter& splitter,
                                    QuadratureAngle angle, const DetectorModel& detector = {});

/// Tap-port mixture marginal with no selection; its mean is the "center of the
/// marginal distribution" that relative thresholds are measured from.
QuadratureMoments tap_stats(const MixtureState& state, const TapSplitter& splitter, QuadratureAngle angle,
                            const DetectorModel& detector = {});

struct SweepRow {
  double parameter = 0.0;  // threshold or tap angle (radians)
  DistillationResult result;
};

/// distilled_stats per threshold; rows sorted by threshold.
std::vector<SweepRow> threshold_sweep(const MixtureState& state, const TapSplitter& splitter,
                                      const PostSelectionRule& rule_template,
                                      QuadratureAngle verification_angle, const DetectorModel& detector,
                                      std::span<const double> thresholds);

/// conditional_distilled_stats per tap angle (radians); rows sorted by angle.
std::vector<SweepRow> angle_sweep(const MixtureState& state, const TapSplitter& splitter,
                                  const PostSelectionRule& rule_template, QuadratureAngle verification_angle,
                                  const DetectorModel& detector, std::span<const double> tap_angles);

}  // namespace cvdistill
