#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cvdistill/protocol.hpp"
#include "cvdistill/states.hpp"

namespace cvdistill {

struct SimulationConfig {
  MixtureState state = MixtureState::single(GaussianComponent::vacuum());
  TapSplitter splitter{0.1};
  PostSelectionRule rule;
  QuadratureAngle verification_angle;
  DetectorModel detector;
  std::size_t sample_count = 1;
  std::uint64_t seed = 0;
};

/// Simultaneously recorded (signal, tap) projections. component_labels holds
/// the generating mixture component for simulated data and kNoLabel for
/// measured data.
struct PairedSamples {
  static constexpr int kNoLabel = -1;

  std::vector<double> signal_values;
  std::vector<double> tap_values;
  std::vector<int> component_labels;

  std::size_t size() const noexcept { return signal_values.size(); }
};

/// Draws per RNG substream. Part of the reproducibility contract.
inline constexpr std::size_t kSamplesPerBlock = 4096;

/// Phase-space simulation of the full protocol: component choice, Gaussian
/// draw, beam splitter with fresh vacuum, per-port detector loss, projection
/// onto the verification and tap angles. OpenMP-parallel over blocks; output
/// is bit-identical to serial::sample_protocol for any thread count.
PairedSamples sample_protocol(const SimulationConfig& config);

enum class StdErrorMethod {
  bootstrap,      // resampled variance spread
  normal_theory,  // var * sqrt(2 / (k - 1))
  fourth_moment,  // sqrt((m4 - var^2 (k - 3) / (k - 1)) / k)
};

struct EstimatorOptions {
  StdErrorMethod method = StdErrorMethod::bootstrap;
  std::size_t bootstrap_resamples = 200;
  std::uint64_t bootstrap_seed = 0x5eed;
};

/// Keeps signal values whose paired tap value passes the rule and estimates
/// mean, unbiased variance, acceptance fraction and the variance's standard
/// error. Throws InsufficientSamples if fewer than two are kept.
DistillationResult postselect_estimate(const PairedSamples& samples, const PostSelectionRule& rule,
                                       const EstimatorOptions& options = {});

struct McSweepRow {
  double threshold = 0.0;
  std::size_t accepted = 0;
  double acceptance_fraction = 0.0;
  std::optional<DistillationResult> result;  // empty when fewer than 2 kept
};

/// One sample set, post-selected at every threshold (sorted ascending).
std::vector<McSweepRow> mc_sweep(const SimulationConfig& config, std::span<const double> thresholds,
                                 const EstimatorOptions& options = {});

/// Same, on an existing sample set.
std::vector<McSweepRow> mc_sweep(const PairedSamples& samples, const PostSelectionRule& rule_template,
                                 std::span<const double> thresholds, const EstimatorOptions& options = {});

namespace serial {

/// Single-threaded reference for sample_protocol.
PairedSamples sample_protocol(const SimulationConfig& config);

}  // namespace serial

}  // namespace cvdistill
