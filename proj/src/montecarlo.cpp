#include "cvdistill/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "cvdistill/errors.hpp"
#include "cvdistill/rng.hpp"

namespace cvdistill {

namespace {

struct SamplerPlan {
  std::vector<double> cumulative;  // component selection thresholds
  std::vector<GaussianComponent> components;
  std::vector<double> sd_x, sd_p;
  double sqrt_t, sqrt_r;
  double cos_v, sin_v, cos_t, sin_t;
  bool lossless;
  double sqrt_eta, sqrt_loss;
};

SamplerPlan make_plan(const SimulationConfig& config) {
  SamplerPlan plan;
  plan.components = config.state.components();
  double acc = 0.0;
  for (double w : config.state.weights()) {
    acc += w;
    plan.cumulative.push_back(acc);
  }
  plan.cumulative.back() = 1.0;
  for (const auto& c : plan.components) {
    plan.sd_x.push_back(std::sqrt(c.var_x));
    plan.sd_p.push_back(std::sqrt(c.var_p));
  }
  plan.sqrt_t = std::sqrt(config.splitter.transmittance());
  plan.sqrt_r = std::sqrt(config.splitter.reflectance());
  plan.cos_v = config.verification_angle.cos();
  plan.sin_v = config.verification_angle.sin();
  plan.cos_t = config.rule.tap_angle.cos();
  plan.sin_t = config.rule.tap_angle.sin();
  plan.lossless = config.detector.lossless();
  plan.sqrt_eta = std::sqrt(config.detector.efficiency());
  plan.sqrt_loss = std::sqrt(1.0 - config.detector.efficiency());
  return plan;
}

void sample_block(const SamplerPlan& plan, std::uint64_t seed, std::size_t block, std::size_t begin,
                  std::size_t end, PairedSamples& out) {
  rng::NormalSource normal(rng::Xoshiro256::substream(seed, block));
  const std::size_t n_components = plan.components.size();
  for (std::size_t i = begin; i < end; ++i) {
    std::size_t k = 0;
    if (n_components > 1) {
      const double u = normal.uniform();
      while (k + 1 < n_components && u >= plan.cumulative[k]) ++k;
    }
    const auto& c = plan.components[k];
    const double x = c.mean_x + plan.sd_x[k] * normal();
    const double p = c.mean_p + plan.sd_p[k] * normal();
    const double xv = normal();
    const double pv = normal();

    const double sig_x = plan.sqrt_t * x + plan.sqrt_r * xv;
    const double sig_p = plan.sqrt_t * p + plan.sqrt_r * pv;
    const double tap_x = plan.sqrt_r * x - plan.sqrt_t * xv;
    const double tap_p = plan.sqrt_r * p - plan.sqrt_t * pv;

    double s = sig_x * plan.cos_v + sig_p * plan.sin_v;
    double t = tap_x * plan.cos_t + tap_p * plan.sin_t;
    if (!plan.lossless) {
      s = plan.sqrt_eta * s + plan.sqrt_loss * normal();
      t = plan.sqrt_eta * t + plan.sqrt_loss * normal();
    }
    out.signal_values[i] = s;
    out.tap_values[i] = t;
    out.component_labels[i] = static_cast<int>(k);
  }
}

PairedSamples allocate(std::size_t n) {
  PairedSamples out;
  out.signal_values.resize(n);
  out.tap_values.resize(n);
  out.component_labels.resize(n);
  return out;
}

std::size_t block_count(std::size_t n) { return (n + kSamplesPerBlock - 1) / kSamplesPerBlock; }

struct Moments {
  double mean;
  double variance;
};

Moments sample_moments(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, ss / static_cast<double>(v.size() - 1)};
}

double bootstrap_stderr(const std::vector<double>& kept, double center, const EstimatorOptions& options) {
  const std::size_t resamples = std::max<std::size_t>(options.bootstrap_resamples, 2);
  const std::uint64_t k = kept.size();
  const double dk = static_cast<double>(k);
  std::vector<double> variances(resamples);
  const auto n_resamples = static_cast<std::int64_t>(resamples);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t r = 0; r < n_resamples; ++r) {
    auto engine = rng::Xoshiro256::substream(options.bootstrap_seed, static_cast<std::uint64_t>(r));
    double s1 = 0.0;
    double s2 = 0.0;
    for (std::uint64_t i = 0; i < k; ++i) {
      const double d = kept[engine.below(k)] - center;
      s1 += d;
      s2 += d * d;
    }
    variances[static_cast<std::size_t>(r)] = (s2 - s1 * s1 / dk) / (dk - 1.0);
  }
  return std::sqrt(sample_moments(variances).variance);
}

double fourth_moment_stderr(const std::vector<double>& kept, double mean, double variance) {
  const double k = static_cast<double>(kept.size());
  double m4 = 0.0;
  for (double x : kept) {
    const double d = (x - mean) * (x - mean);
    m4 += d * d;
  }
  m4 /= k;
  const double se2 = (m4 - variance * variance * (k - 3.0) / (k - 1.0)) / k;
  return std::sqrt(std::max(se2, 0.0));
}

}  // namespace

namespace serial {

PairedSamples sample_protocol(const SimulationConfig& config) {
  const auto plan = make_plan(config);
  auto out = allocate(config.sample_count);
  const std::size_t blocks = block_count(config.sample_count);
  for (std::size_t b = 0; b < blocks; ++b) {
    sample_block(plan, config.seed, b, b * kSamplesPerBlock,
                 std::min(config.sample_count, (b + 1) * kSamplesPerBlock), out);
  }
  return out;
}

}  // namespace serial

PairedSamples sample_protocol(const SimulationConfig& config) {
  const auto plan = make_plan(config);
  auto out = allocate(config.sample_count);
  const auto blocks = static_cast<std::int64_t>(block_count(config.sample_count));
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < blocks; ++b) {
    const auto ub = static_cast<std::size_t>(b);
    sample_block(plan, config.seed, ub, ub * kSamplesPerBlock,
                 std::min(config.sample_count, (ub + 1) * kSamplesPerBlock), out);
  }
  return out;
}

DistillationResult postselect_estimate(const PairedSamples& samples, const PostSelectionRule& rule,
                                       const EstimatorOptions& options) {
  if (samples.size() == 0) throw InsufficientSamples(0);
  std::vector<double> kept;
  kept.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (rule.accepts(samples.tap_values[i])) kept.push_back(samples.signal_values[i]);
  }
  if (kept.size() < 2) throw InsufficientSamples(kept.size());

  const auto m = sample_moments(kept);
  DistillationResult result;
  result.distilled_mean = m.mean;
  result.distilled_variance = m.variance;
  result.success_probability = static_cast<double>(kept.size()) / static_cast<double>(samples.size());
  switch (options.method) {
    case StdErrorMethod::bootstrap:
      result.standard_error = bootstrap_stderr(kept, m.mean, options);
      break;
    case StdErrorMethod::normal_theory:
      result.standard_error = m.variance * std::sqrt(2.0 / static_cast<double>(kept.size() - 1));
      break;
    case StdErrorMethod::fourth_moment:
      result.standard_error = fourth_moment_stderr(kept, m.mean, m.variance);
      break;
  }
  return result;
}

std::vector<McSweepRow> mc_sweep(const PairedSamples& samples, const PostSelectionRule& rule_template,
                                 std::span<const double> thresholds, const EstimatorOptions& options) {
  std::vector<double> sorted(thresholds.begin(), thresholds.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<McSweepRow> rows;
  rows.reserve(sorted.size());
  for (double th : sorted) {
    auto rule = rule_template;
    rule.threshold = th;
    McSweepRow row;
    row.threshold = th;
    row.accepted = static_cast<std::size_t>(
        std::count_if(samples.tap_values.begin(), samples.tap_values.end(),
                      [&](double t) { return rule.accepts(t); }));
    row.acceptance_fraction =
        samples.size() == 0 ? 0.0 : static_cast<double>(row.accepted) / static_cast<double>(samples.size());
    if (row.accepted >= 2) row.result = postselect_estimate(samples, rule, options);
    rows.push_back(row);
  }
  return rows;
}

std::vector<McSweepRow> mc_sweep(const SimulationConfig& config, std::span<const double> thresholds,
                                 const EstimatorOptions& options) {
  return mc_sweep(sample_protocol(config), config.rule, thresholds, options);
}

}  // namespace cvdistill
