#include "cvdistill/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "cvdistill/errors.hpp"
#include "cvdistill/special.hpp"

namespace cvdistill {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Relative size of a within-component signal/tap covariance that still counts
// as uncorrelated. Covers rounding in cos(pi/2)-type projections.
constexpr double kIndependenceTolerance = 1e-9;

struct LogTerm {
  double log_weight = kNegInf;
  double mean = 0.0;
  double variance = 0.0;
};

double log_filter_weight(double threshold, double mean, double variance, KeepSide side) {
  const double z = (threshold - mean) / std::sqrt(variance);
  return side == KeepSide::above ? special::log_normal_sf(z) : special::log_normal_sf(-z);
}

TruncatedMoments truncated_log(const JointProjection& j, double threshold, KeepSide side) {
  if (!(j.tap_variance > 0.0)) {
    throw DomainError(fmt::format("tap variance {} must be positive", j.tap_variance));
  }
  if (!(j.signal_variance > 0.0)) {
    throw DomainError(fmt::format("signal variance {} must be positive", j.signal_variance));
  }
  const double bound = std::sqrt(j.signal_variance * j.tap_variance);
  if (std::abs(j.cross_covariance) > bound * (1.0 + 1e-12)) {
    throw DomainError(fmt::format("cross covariance {} exceeds sqrt(var_s var_t) = {}", j.cross_covariance, bound));
  }
  const double sd_t = std::sqrt(j.tap_variance);
  // Keep-below is keep-above on the mirrored tap variable.
  const double sign = side == KeepSide::above ? 1.0 : -1.0;
  const double alpha = sign * (threshold - j.tap_mean) / sd_t;
  const double cov = sign * j.cross_covariance;

  TruncatedMoments out{j.signal_mean, j.signal_variance, special::log_normal_sf(alpha)};
  if (cov == 0.0 || out.weight == kNegInf) return out;

  const double lambda = special::normal_hazard(alpha);
  if (lambda == 0.0) return out;
  const double shrink = std::clamp(lambda * (lambda - alpha), 0.0, 1.0);
  out.mean = j.signal_mean + cov / sd_t * lambda;
  out.variance = j.signal_variance - cov * cov / j.tap_variance * shrink;
  return out;
}

struct MixedMoments {
  double mean = 0.0;
  double variance = 0.0;
  double log_success = kNegInf;
  std::vector<double> posterior;
};

MixedMoments mix(const std::vector<LogTerm>& terms) {
  double top = kNegInf;
  for (const auto& t : terms) top = std::max(top, t.log_weight);
  if (top == kNegInf) throw EmptySelection("post-selection keeps no probability mass");

  double total = 0.0;
  for (const auto& t : terms) total += std::exp(t.log_weight - top);
  MixedMoments m;
  m.log_success = top + std::log(total);
  m.posterior.reserve(terms.size());
  for (const auto& t : terms) m.posterior.push_back(std::exp(t.log_weight - m.log_success));
  for (std::size_t i = 0; i < terms.size(); ++i) m.mean += m.posterior[i] * terms[i].mean;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double d = terms[i].mean - m.mean;
    m.variance += m.posterior[i] * (terms[i].variance + d * d);
  }
  return m;
}

DistillationResult to_result(const MixedMoments& m) {
  return {m.mean, m.variance, std::min(1.0, std::exp(m.log_success)), 0.0};
}

std::vector<LogTerm> independent_terms(const MixtureState& state, const TapSplitter& splitter,
                                       const PostSelectionRule& rule, QuadratureAngle verification_angle,
                                       const DetectorModel& detector) {
  std::vector<LogTerm> terms;
  terms.reserve(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state.weight(i) == 0.0) continue;
    const auto j = joint_projection(state.component(i), splitter, detector, verification_angle, rule.tap_angle);
    if (std::abs(j.cross_covariance) > kIndependenceTolerance * std::sqrt(j.signal_variance * j.tap_variance)) {
      throw DomainError(fmt::format(
          "component {} has correlated signal/tap projections (covariance {:.6g}) at tap angle {:.6g} rad and "
          "verification angle {:.6g} rad; use conditional_distilled_stats (conditional_truncated_stats per "
          "component)",
          i, j.cross_covariance, rule.tap_angle.radians(), verification_angle.radians()));
    }
    terms.push_back({std::log(state.weight(i)) +
                         log_filter_weight(rule.threshold, j.tap_mean, j.tap_variance, rule.keep_side),
                     j.signal_mean, j.signal_variance});
  }
  return terms;
}

QuadratureMoments port_stats(const MixtureState& state, const TapSplitter& splitter, QuadratureAngle angle,
                             const DetectorModel& detector, bool signal_port) {
  std::vector<GaussianComponent> port;
  port.reserve(state.size());
  for (const auto& c : state.components()) {
    const auto split = split_component_stats(c, splitter);
    port.push_back(signal_port ? split.signal : split.tap);
  }
  const auto raw = quadrature_stats(MixtureState(std::move(port), state.weights()), angle);
  if (detector.lossless()) return raw;
  // Loss acts on the mixture the same way as on each component: the mean
  // scales by sqrt(eta) and the variance by eta, plus 1 - eta of vacuum.
  return detector.apply(raw);
}

}  // namespace

TapSplitter::TapSplitter(double reflectance) : r_(reflectance), t_(1.0 - reflectance) {
  if (!(reflectance > 0.0 && reflectance < 1.0)) {
    throw DomainError(fmt::format("tap reflectance R = {} must lie in (0, 1)", reflectance));
  }
}

DetectorModel::DetectorModel(double efficiency) : eta_(efficiency) {
  if (!(efficiency > 0.0 && efficiency <= 1.0)) {
    throw DomainError(fmt::format("detector efficiency {} must lie in (0, 1]", efficiency));
  }
}

QuadratureMoments DetectorModel::apply(QuadratureMoments m) const noexcept {
  if (lossless()) return m;
  return {std::sqrt(eta_) * m.mean, eta_ * m.variance + (1.0 - eta_)};
}

SplitComponent split_component_stats(const GaussianComponent& c, const TapSplitter& splitter) {
  const double t = splitter.transmittance();
  const double r = splitter.reflectance();
  const double st = std::sqrt(t);
  const double sr = std::sqrt(r);
  SplitComponent out;
  out.signal = {st * c.mean_x, st * c.mean_p, t * c.var_x + r, t * c.var_p + r};
  out.tap = {sr * c.mean_x, sr * c.mean_p, r * c.var_x + t, r * c.var_p + t};
  const double cross = std::sqrt(t * r);
  out.cross_cov_x = cross * (c.var_x - 1.0);
  out.cross_cov_p = cross * (c.var_p - 1.0);
  return out;
}

JointProjection joint_projection(const GaussianComponent& component, const TapSplitter& splitter,
                                 const DetectorModel& detector, QuadratureAngle verification_angle,
                                 QuadratureAngle tap_angle) {
  const auto split = split_component_stats(component, splitter);
  const auto sig = detector.apply(split.signal.project(verification_angle));
  const auto tap = detector.apply(split.tap.project(tap_angle));
  // x-p covariances vanish for diagonal components, leaving the like-quadrature terms.
  double cov = split.cross_cov_x * verification_angle.cos() * tap_angle.cos() +
               split.cross_cov_p * verification_angle.sin() * tap_angle.sin();
  if (!detector.lossless()) cov *= detector.efficiency();
  return {sig.mean, sig.variance, tap.mean, tap.variance, cov};
}

double filter_weight(double threshold, double projected_tap_mean, double tap_variance, KeepSide keep_side) {
  if (!(tap_variance > 0.0)) {
    throw DomainError(fmt::format("tap variance {} must be positive", tap_variance));
  }
  const double z = (threshold - projected_tap_mean) / std::sqrt(tap_variance);
  return keep_side == KeepSide::above ? special::normal_sf(z) : special::normal_sf(-z);
}

TruncatedMoments conditional_truncated_stats(const JointProjection& joint, double threshold, KeepSide keep_side) {
  auto m = truncated_log(joint, threshold, keep_side);
  m.weight = std::exp(m.weight);
  if (m.weight < 1e-300) {
    throw EmptySelection(fmt::format("selection probability {:.3g} underflows (threshold {}, tap mean {})", m.weight,
                                     threshold, joint.tap_mean));
  }
  return m;
}

ConditionedMarginal conditioned_signal_marginal(const MixtureState& state, const TapSplitter& splitter,
                                                const PostSelectionRule& rule, QuadratureAngle verification_angle,
                                                const DetectorModel& detector) {
  const auto terms = independent_terms(state, splitter, rule, verification_angle, detector);
  const auto mixed = mix(terms);
  ConditionedMarginal out;
  out.weights = mixed.posterior;
  for (const auto& t : terms) {
    out.means.push_back(t.mean);
    out.variances.push_back(t.variance);
  }
  out.success_probability = std::min(1.0, std::exp(mixed.log_success));
  return out;
}

double ConditionedMarginal::pdf(double q) const {
  double density = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double sd = std::sqrt(variances[i]);
    density += weights[i] * special::normal_pdf((q - means[i]) / sd) / sd;
  }
  return density;
}

DistillationResult distilled_stats(const MixtureState& state, const TapSplitter& splitter,
                                   const PostSelectionRule& rule, QuadratureAngle verification_angle,
                                   const DetectorModel& detector) {
  return to_result(mix(independent_terms(state, splitter, rule, verification_angle, detector)));
}

DistillationResult conditional_distilled_stats(const MixtureState& state, const TapSplitter& splitter,
                                               const PostSelectionRule& rule, QuadratureAngle verification_angle,
                                               const DetectorModel& detector) {
  std::vector<LogTerm> terms;
  terms.reserve(state.size());
  for (std::size_t i = 0; i < state.size(); ++i) {
    if (state.weight(i) == 0.0) continue;
    const auto j = joint_projection(state.component(i), splitter, detector, verification_angle, rule.tap_angle);
    const auto t = truncated_log(j, rule.threshold, rule.keep_side);
    terms.push_back({std::log(state.weight(i)) + t.weight, t.mean, t.variance});
  }
  return to_result(mix(terms));
}

QuadratureMoments transmitted_stats(const MixtureState& state, const TapSplitter& splitter, QuadratureAngle angle,
                                    const DetectorModel& detector) {
  return port_stats(state, splitter, angle, detector, true);
}

QuadratureMoments tap_stats(const MixtureState& state, const TapSplitter& splitter, QuadratureAngle angle,
                            const DetectorModel& detector) {
  return port_stats(state, splitter, angle, detector, false);
}

std::vector<SweepRow> threshold_sweep(const MixtureState& state, const TapSplitter& splitter,
                                      const PostSelectionRule& rule_template, QuadratureAngle verification_angle,
                                      const DetectorModel& detector, std::span<const double> thresholds) {
  std::vector<double> sorted(thresholds.begin(), thresholds.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<SweepRow> rows;
  rows.reserve(sorted.size());
  for (double th : sorted) {
    auto rule = rule_template;
    rule.threshold = th;
    rows.push_back({th, distilled_stats(state, splitter, rule, verification_angle, detector)});
  }
  return rows;
}

std::vector<SweepRow> angle_sweep(const MixtureState& state, const TapSplitter& splitter,
                                  const PostSelectionRule& rule_template, QuadratureAngle verification_angle,
                                  const DetectorModel& detector, std::span<const double> tap_angles) {
  std::vector<double> sorted(tap_angles.begin(), tap_angles.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<SweepRow> rows;
  rows.reserve(sorted.size());
  for (double beta : sorted) {
    auto rule = rule_template;
    rule.tap_angle = QuadratureAngle(beta);
    rows.push_back({beta, conditional_distilled_stats(state, splitter, rule, verification_angle, detector)});
  }
  return rows;
}

}  // namespace cvdistill
