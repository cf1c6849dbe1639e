#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "canonical_config.hpp"
#include "cvdistill/cli.hpp"
#include "cvdistill/config.hpp"
#include "cvdistill/errors.hpp"
#include "cvdistill/ingest.hpp"
#include "cvdistill/montecarlo.hpp"
#include "cvdistill/protocol.hpp"
#include "cvdistill/tomography.hpp"
#include "cvdistill/units.hpp"

namespace cvdistill {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError(fmt::format("error reading '{}'", path));
  return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError(fmt::format("cannot create directory '{}': {}", path.parent_path().string(), ec.message()));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << content;
  if (!out) throw IoError(fmt::format("error writing '{}'", path.string()));
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_file(path)); }

double db_or_nan(double v) { return v > 0.0 ? snu_to_db(v) : std::nan(""); }

json result_json(const DistillationResult& r) {
  json j{{"distilled_mean_snu", r.distilled_mean},
         {"distilled_variance_snu", r.distilled_variance},
         {"distilled_variance_db", db_or_nan(r.distilled_variance)},
         {"success_probability", r.success_probability},
         {"standard_error_snu", r.standard_error}};
  // Delta-method width of the variance in dB.
  j["standard_error_db"] = r.distilled_variance > 0.0 ? 10.0 / std::log(10.0) * r.standard_error / r.distilled_variance
                                                      : std::nan("");
  return j;
}

json moments_json(const QuadratureMoments& m) {
  return {{"mean_snu", m.mean}, {"variance_snu", m.variance}, {"variance_db", db_or_nan(m.variance)}};
}

/// Closed form when the projections are uncorrelated, truncated-bivariate
/// moments otherwise.
std::pair<DistillationResult, std::string> analytic_result(const MixtureState& state, const TapSplitter& splitter,
                                                           const PostSelectionRule& rule, QuadratureAngle verification,
                                                           const DetectorModel& detector) {
  try {
    return {distilled_stats(state, splitter, rule, verification, detector), "mixture-filter"};
  } catch (const DomainError&) {
    return {conditional_distilled_stats(state, splitter, rule, verification, detector), "truncated-bivariate"};
  }
}

StdErrorMethod parse_stderr(const std::string& s) {
  if (s == "bootstrap") return StdErrorMethod::bootstrap;
  if (s == "normal") return StdErrorMethod::normal_theory;
  return StdErrorMethod::fourth_moment;
}

std::vector<double> linspace(double lo, double hi, std::size_t steps) {
  std::vector<double> v(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    v[i] = steps == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
  }
  return v;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------------------

std::string threshold_table(const ExperimentConfig& cfg, const std::vector<double>& offsets, bool relative,
                            std::optional<StdErrorMethod> mc, const std::string& prefix_header = {},
                            const std::string& prefix_value = {}) {
  const auto state = cfg.state();
  const auto splitter = cfg.splitter();
  const auto detector = cfg.detector();
  const auto verification = cfg.verification_angle();
  const auto tap_center = tap_stats(state, splitter, cfg.rule().tap_angle, detector).mean;

  std::vector<double> thresholds;
  for (double o : offsets) thresholds.push_back(relative ? tap_center + o : o);
  std::sort(thresholds.begin(), thresholds.end());

  std::vector<McSweepRow> mc_rows;
  if (mc) {
    EstimatorOptions opts;
    opts.method = *mc;
    mc_rows = mc_sweep(cfg.simulation(), thresholds, opts);
  }

  std::string csv = prefix_header +
                    "threshold_snu,threshold_rel_snu,variance_snu,variance_db,mean_snu,success_probability";
  if (mc) csv += ",mc_accepted,mc_success_fraction,mc_variance_snu,mc_variance_db,mc_stderr_snu,mc_mean_snu";
  csv += "\n";
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    auto rule = cfg.rule();
    rule.threshold = thresholds[i];
    const auto [r, method] = analytic_result(state, splitter, rule, verification, detector);
    csv += prefix_value + fmt::format("{},{},{},{},{},{}", thresholds[i], thresholds[i] - tap_center,
                                      r.distilled_variance, snu_to_db(r.distilled_variance), r.distilled_mean,
                                      r.success_probability);
    if (mc) {
      const auto& row = mc_rows[i];
      csv += fmt::format(",{},{}", row.accepted, row.acceptance_fraction);
      if (row.result) {
        csv += fmt::format(",{},{},{},{}", row.result->distilled_variance, snu_to_db(row.result->distilled_variance),
                           row.result->standard_error, row.result->distilled_mean);
      } else {
        csv += ",,,,";
      }
    }
    csv += "\n";
  }
  return csv;
}

std::string angle_table(const ExperimentConfig& cfg, double threshold, bool relative, const std::vector<double>& degrees,
                        const std::string& prefix_header = {}, const std::string& prefix_value = {}) {
  const auto state = cfg.state();
  const auto splitter = cfg.splitter();
  const auto detector = cfg.detector();
  const auto verification = cfg.verification_angle();
  std::string csv =
      prefix_header + "tap_angle_deg,threshold_snu,variance_snu,variance_db,mean_snu,success_probability\n";
  auto sorted = degrees;
  std::sort(sorted.begin(), sorted.end());
  for (double deg : sorted) {
    auto rule = cfg.rule();
    rule.tap_angle = QuadratureAngle::from_degrees(deg);
    rule.threshold = relative ? tap_stats(state, splitter, rule.tap_angle, detector).mean + threshold : threshold;
    const auto r = conditional_distilled_stats(state, splitter, rule, verification, detector);
    csv += prefix_value + fmt::format("{},{},{},{},{},{}\n", deg, rule.threshold, r.distilled_variance,
                                      snu_to_db(r.distilled_variance), r.distilled_mean, r.success_probability);
  }
  return csv;
}

std::string to_csv(const WignerGrid& g) {
  std::ostringstream ss;
  write_wigner_csv(ss, g);
  return ss.str();
}

json peaks_json(const std::vector<GridPeak>& peaks) {
  json arr = json::array();
  for (const auto& p : peaks) arr.push_back({{"x", p.x}, {"p", p.p}, {"value", p.value}});
  return arr;
}

// Moderate-anti-squeezing stand-in for the canonical state: the +27 dB state
// spans roughly +-80 SNU in p, which no reasonable square grid resolves
// together with the 0.7 SNU x width. Anti-squeezing drops to 10 SNU and p is
// scaled so the displacement keeps its size in standard deviations.
ExperimentConfig tomography_demo_config(const ExperimentConfig& canonical) {
  ExperimentConfig demo = canonical;
  const double old_anti = db_to_snu(canonical.var_anti_db);
  demo.var_anti_db = 10.0;  // dB, i.e. 10 SNU
  demo.displacement_p = canonical.displacement_p * std::sqrt(db_to_snu(demo.var_anti_db) / old_anti);
  return demo;
}

GridSpec demo_grid() { return {-3.0, 5.0, 81, -10.0, 18.0, 141}; }

// ---------------------------------------------------------------------------

struct Options {
  std::string config_path;
  // simulate
  std::string stderr_method = "bootstrap";
  std::size_t resamples = 200;
  std::string record_out;
  // sweeps
  double min = -15.0, max = 30.0;
  std::size_t steps = 46;
  bool relative = false;
  bool with_mc = false;
  double threshold = 0.0;
  double min_deg = 0.0, max_deg = 180.0;
  std::string out;
  // tomo
  std::size_t angles = 128;
  std::size_t per_angle = 200000;
  std::size_t bins = 256;
  double cutoff = 0.7;
  std::size_t grid_points = 101;
  double sigmas = 4.0;
  bool analytic = false;
  // ingest
  std::string record_path;
  std::string keep = "above";
  std::string filter = "all";
  bool permissive = false;
  // reproduce
  int fig = 0;
  std::optional<std::size_t> samples;
};

int cmd_analyze(const Options& o, std::ostream& out) {
  const auto cfg = load_config(o.config_path);
  const auto state = cfg.state();
  const auto [r, method] =
      analytic_result(state, cfg.splitter(), cfg.rule(), cfg.verification_angle(), cfg.detector());
  json j{{"command", "analyze"},
         {"method", method},
         {"config", config_to_json(cfg)},
         {"input", moments_json(quadrature_stats(state, cfg.verification_angle()))},
         {"unselected_signal",
          moments_json(transmitted_stats(state, cfg.splitter(), cfg.verification_angle(), cfg.detector()))},
         {"tap", moments_json(tap_stats(state, cfg.splitter(), cfg.rule().tap_angle, cfg.detector()))},
         {"result", result_json(r)}};
  out << dump(j);
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const auto cfg = load_config(o.config_path);
  const auto sim = cfg.simulation();
  const auto samples = sample_protocol(sim);
  EstimatorOptions opts;
  opts.method = parse_stderr(o.stderr_method);
  opts.bootstrap_resamples = o.resamples;
  opts.bootstrap_seed = cfg.seed ^ 0xB007B007ULL;
  const auto r = postselect_estimate(samples, sim.rule, opts);
  if (!o.record_out.empty()) {
    std::ostringstream ss;
    write_record_file(ss, record_from_samples(samples));
    write_file(o.record_out, ss.str());
  }
  json j{{"command", "simulate"},
         {"config", config_to_json(cfg)},
         {"samples", samples.size()},
         {"accepted", static_cast<std::size_t>(std::llround(r.success_probability * static_cast<double>(samples.size())))},
         {"stderr_method", o.stderr_method},
         {"result", result_json(r)}};
  out << dump(j);
  return kExitOk;
}

int cmd_sweep_threshold(const Options& o, std::ostream& out) {
  const auto cfg = load_config(o.config_path);
  if (o.steps < 1) throw ConfigError("--steps", "must be at least 1");
  const auto csv = threshold_table(cfg, linspace(o.min, o.max, o.steps), o.relative,
                                   o.with_mc ? std::optional(parse_stderr(o.stderr_method)) : std::nullopt);
  write_file(o.out, csv);
  out << dump({{"command", "sweep-threshold"}, {"rows", o.steps}, {"out", o.out}});
  return kExitOk;
}

int cmd_sweep_angle(const Options& o, std::ostream& out) {
  const auto cfg = load_config(o.config_path);
  if (o.steps < 1) throw ConfigError("--steps", "must be at least 1");
  write_file(o.out, angle_table(cfg, o.threshold, o.relative, linspace(o.min_deg, o.max_deg, o.steps)));
  out << dump({{"command", "sweep-angle"}, {"rows", o.steps}, {"out", o.out}});
  return kExitOk;
}

int cmd_tomo(const Options& o, std::ostream& out) {
  const auto cfg = load_config(o.config_path);
  const auto state = cfg.state();
  const auto grid = auto_grid(state, o.sigmas, o.grid_points);
  const auto analytic = analytic_wigner_grid(state, grid);
  json j{{"command", "tomo"},
         {"grid", {{"x_min", grid.x_min}, {"x_max", grid.x_max}, {"p_min", grid.p_min}, {"p_max", grid.p_max},
                   {"points", o.grid_points}}},
         {"out", o.out}};
  if (o.analytic) {
    write_file(o.out, to_csv(analytic));
    j["mode"] = "analytic";
    j["mass"] = analytic.mass();
  } else {
    ProjectionOptions popts;
    popts.n_angles = o.angles;
    popts.samples_per_angle = o.per_angle;
    popts.bins = o.bins;
    popts.half_range = auto_half_range(state, grid, o.sigmas);
    popts.seed = cfg.seed;
    const auto projections = collect_projections(state, popts);
    ReconstructionOptions ropts;
    ropts.filter_cutoff = o.cutoff;
    const auto recon = inverse_radon(projections, grid, ropts);
    write_file(o.out, to_csv(recon));
    const auto d = grid_distance(recon, analytic);
    j["mode"] = "reconstruction";
    j["mass"] = recon.mass();
    j["distance_to_analytic"] = {{"l_inf", d.l_inf}, {"l1", d.l1}, {"peak_ratio", d.peak_ratio}};
    j["peaks"] = peaks_json(local_maxima(recon, 0.25));
    j["warnings"] = projections.warnings;
  }
  out << dump(j);
  return kExitOk;
}

int cmd_ingest(const Options& o, std::ostream& out) {
  std::istringstream in(read_file(o.record_path));
  const auto record = read_record_file(in);
  BinOptions bopts;
  bopts.permissive = o.permissive;
  const auto binned = bin_and_sync(record.header, record.samples, bopts);
  const auto filter = o.filter == "on" ? ModulationFilter::on_only
                      : o.filter == "off" ? ModulationFilter::off_only
                                          : ModulationFilter::all;
  const auto pairs = records_to_pairs(binned.bins, filter);
  PostSelectionRule rule;
  rule.threshold = o.threshold;
  rule.keep_side = o.keep == "below" ? KeepSide::below : KeepSide::above;
  EstimatorOptions opts;
  opts.method = parse_stderr(o.stderr_method);
  opts.bootstrap_resamples = o.resamples;
  const auto r = postselect_estimate(pairs, rule, opts);
  json j{{"command", "ingest"},
         {"record", o.record_path},
         {"raw_samples", record.samples.size()},
         {"candidate_bins", binned.candidates},
         {"rejected_bins", binned.rejected},
         {"pairs", pairs.size()},
         {"filter", o.filter},
         {"threshold_snu", o.threshold},
         {"keep_side", o.keep},
         {"result", result_json(r)}};
  if (!o.out.empty()) write_file(o.out, dump(j));
  out << dump(j);
  return kExitOk;
}

// ---------------------------------------------------------------------------

void reproduce_fig2(const ExperimentConfig& cfg, const fs::path& dir, json& summary) {
  const auto state = cfg.state();
  const auto splitter = cfg.splitter();
  const auto detector = cfg.detector();
  const auto rule = cfg.rule();
  const auto verification = cfg.verification_angle();
  const auto samples = sample_protocol(cfg.simulation());

  const auto tap = tap_stats(state, splitter, rule.tap_angle, detector);
  const double tap_half = std::abs(tap.mean) + 5.0 * std::sqrt(tap.variance);
  const auto noisy = transmitted_stats(state, splitter, verification, detector);
  const double sig_half = std::abs(noisy.mean) + 5.0 * std::sqrt(noisy.variance);
  const auto distilled = conditioned_signal_marginal(state, splitter, rule, verification, detector);

  constexpr std::size_t kBins = 200;
  auto histogram = [&](const std::vector<double>& v, const std::vector<bool>* keep, double lo, double hi) {
    std::vector<double> h(kBins, 0.0);
    const double width = (hi - lo) / kBins;
    std::size_t total = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (keep && !(*keep)[i]) continue;
      ++total;
      const double pos = (v[i] - lo) / width;
      if (pos >= 0.0 && pos < kBins) h[static_cast<std::size_t>(pos)] += 1.0;
    }
    for (double& x : h) x /= std::max<std::size_t>(total, 1) * width;
    return h;
  };
  std::vector<bool> kept(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) kept[i] = rule.accepts(samples.tap_values[i]);

  const double tap_lo = tap.mean - tap_half, tap_hi = tap.mean + tap_half;
  const auto tap_hist = histogram(samples.tap_values, nullptr, tap_lo, tap_hi);
  std::string tap_csv = "tap_snu,tap_pdf,tap_mc_density,accepted\n";
  for (std::size_t b = 0; b < kBins; ++b) {
    const double q = tap_lo + (static_cast<double>(b) + 0.5) * (tap_hi - tap_lo) / kBins;
    double pdf = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
      const auto t = detector.apply(split_component_stats(state.component(i), splitter).tap.project(rule.tap_angle));
      pdf += state.weight(i) * std::exp(-0.5 * (q - t.mean) * (q - t.mean) / t.variance) /
             std::sqrt(2.0 * M_PI * t.variance);
    }
    tap_csv += fmt::format("{},{},{},{}\n", q, pdf, tap_hist[b], rule.accepts(q) ? 1 : 0);
  }
  write_file(dir / "fig2_tap.csv", tap_csv);

  const double lo = noisy.mean - sig_half, hi = noisy.mean + sig_half;
  const auto noisy_hist = histogram(samples.signal_values, nullptr, lo, hi);
  const auto dist_hist = histogram(samples.signal_values, &kept, lo, hi);
  std::string sig_csv = "signal_snu,vacuum_pdf,noisy_pdf,distilled_pdf,noisy_mc_density,distilled_mc_density\n";
  for (std::size_t b = 0; b < kBins; ++b) {
    const double q = lo + (static_cast<double>(b) + 0.5) * (hi - lo) / kBins;
    double noisy_pdf = 0.0;
    for (std::size_t i = 0; i < state.size(); ++i) {
      const auto s = detector.apply(split_component_stats(state.component(i), splitter).signal.project(verification));
      noisy_pdf += state.weight(i) * std::exp(-0.5 * (q - s.mean) * (q - s.mean) / s.variance) /
                   std::sqrt(2.0 * M_PI * s.variance);
    }
    const double vacuum = std::exp(-0.5 * q * q) / std::sqrt(2.0 * M_PI);
    sig_csv += fmt::format("{},{},{},{},{},{}\n", q, vacuum, noisy_pdf, distilled.pdf(q), noisy_hist[b], dist_hist[b]);
  }
  write_file(dir / "fig2_signal.csv", sig_csv);
  summary["fig2"] = {{"files", {"fig2_tap.csv", "fig2_signal.csv"}},
                     {"tap", moments_json(tap)},
                     {"noisy_signal", moments_json(noisy)},
                     {"threshold_snu", rule.threshold}};
}

void reproduce_fig3(const ExperimentConfig& cfg, const fs::path& dir, json& summary) {
  const auto tap = tap_stats(cfg.state(), cfg.splitter(), cfg.rule().tap_angle, cfg.detector());
  const double sd = std::sqrt(tap.variance);
  const auto offsets = linspace(-2.0 * sd, 4.0 * sd, 31);
  std::string csv;
  bool first = true;
  for (double scale : {1.0, 0.75}) {
    auto scaled = cfg;
    scaled.displacement_x *= scale;
    scaled.displacement_p *= scale;
    auto table = threshold_table(scaled, offsets, true, StdErrorMethod::fourth_moment, "displacement_scale,",
                                 fmt::format("{},", scale));
    if (!first) table.erase(0, table.find('\n') + 1);
    csv += table;
    first = false;
  }
  write_file(dir / "fig3.csv", csv);
  summary["fig3"] = {{"files", {"fig3.csv"}}, {"displacement_scales", {1.0, 0.75}}, {"tap_sd_snu", sd}};
}

void reproduce_fig4(const ExperimentConfig& cfg, const fs::path& dir, json& summary) {
  std::string csv;
  bool first = true;
  for (double rel : {1.3, 5.3}) {
    auto table = angle_table(cfg, rel, true, linspace(0.0, 180.0, 91), "threshold_rel_snu,", fmt::format("{},", rel));
    if (!first) table.erase(0, table.find('\n') + 1);
    csv += table;
    first = false;
  }
  write_file(dir / "fig4.csv", csv);
  summary["fig4"] = {{"files", {"fig4.csv"}}, {"relative_thresholds_snu", {1.3, 5.3}}};
}

void reproduce_fig5(const ExperimentConfig& cfg, const Options& o, const fs::path& dir, json& summary) {
  const auto demo = tomography_demo_config(cfg);
  const auto state = demo.state();
  const auto grid = demo_grid();
  const double half = 22.0;

  const auto analytic = analytic_wigner_grid(state, grid);
  ProjectionOptions popts;
  popts.n_angles = o.angles;
  popts.samples_per_angle = o.per_angle;
  popts.bins = o.bins;
  popts.half_range = half;
  popts.seed = demo.seed;
  const auto noisy = inverse_radon(collect_projections(state, popts), grid, {o.cutoff});

  // Distilled state: one protocol run per verification angle, post-selected on
  // the tap, histogrammed, and reconstructed like the input.
  auto sim = demo.simulation();
  const auto tap = tap_stats(state, sim.splitter, sim.rule.tap_angle, sim.detector);
  sim.rule.threshold = tap.mean + std::sqrt(tap.variance);
  sim.sample_count = o.per_angle;
  const auto angles = equally_spaced_angles(o.angles);
  std::vector<std::vector<double>> kept(angles.size());
  for (std::size_t k = 0; k < angles.size(); ++k) {
    sim.verification_angle = QuadratureAngle(angles[k]);
    sim.seed = demo.seed + 1000 + k;
    const auto s = sample_protocol(sim);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (sim.rule.accepts(s.tap_values[i])) kept[k].push_back(s.signal_values[i]);
    }
  }
  const auto distilled = inverse_radon(projections_from_samples(angles, kept, o.bins, half), grid, {o.cutoff});

  write_file(dir / "fig5_noisy_analytic.csv", to_csv(analytic));
  write_file(dir / "fig5_noisy_reconstructed.csv", to_csv(noisy));
  write_file(dir / "fig5_distilled_reconstructed.csv", to_csv(distilled));
  const auto d = grid_distance(noisy, analytic);
  summary["fig5"] = {
      {"files", {"fig5_noisy_analytic.csv", "fig5_noisy_reconstructed.csv", "fig5_distilled_reconstructed.csv"}},
      {"state", config_to_json(demo)},
      {"tap_threshold_snu", sim.rule.threshold},
      {"noisy_vs_analytic", {{"l_inf", d.l_inf}, {"l1", d.l1}, {"peak_ratio", d.peak_ratio}}},
      {"noisy_peaks", peaks_json(local_maxima(noisy, 0.25))},
      {"distilled_peaks", peaks_json(local_maxima(distilled, 0.25))}};
}

int cmd_reproduce(const Options& o, std::ostream& out) {
  auto cfg = o.config_path.empty() ? parse_config(canonical_config_text()) : load_config(o.config_path);
  if (o.samples) cfg.samples = *o.samples;
  const fs::path dir = o.out;
  json summary{{"command", "reproduce"}, {"figure", o.fig}, {"out", o.out}, {"config", config_to_json(cfg)}};
  switch (o.fig) {
    case 2: reproduce_fig2(cfg, dir, summary); break;
    case 3: reproduce_fig3(cfg, dir, summary); break;
    case 4: reproduce_fig4(cfg, dir, summary); break;
    case 5: reproduce_fig5(cfg, o, dir, summary); break;
    default: throw ConfigError("--fig", "must be 2, 3, 4 or 5");
  }
  write_file(dir / fmt::format("fig{}_summary.json", o.fig), dump(summary));
  out << dump(summary);
  return kExitOk;
}

}  // namespace

const std::string& canonical_config_text() {
  static const std::string text = kCanonicalConfigJson;
  return text;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Squeezing distillation from non-Gaussian mixtures: analysis, simulation, tomography", "cvdistill"};
  app.require_subcommand(1);
  Options o;

  const std::vector<std::string> stderr_choices{"bootstrap", "normal", "moment"};

  auto* analyze = app.add_subcommand("analyze", "Closed-form distilled statistics (JSON to stdout)");
  analyze->add_option("config", o.config_path, "Experiment config (JSON)")->required();

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo run with post-selection (JSON to stdout)");
  simulate->add_option("config", o.config_path, "Experiment config (JSON)")->required();
  simulate->add_option("--stderr", o.stderr_method, "Variance standard error method")
      ->check(CLI::IsMember(stderr_choices));
  simulate->add_option("--resamples", o.resamples, "Bootstrap resamples")->check(CLI::Range(2, 100000));
  simulate->add_option("--record", o.record_out, "Also export the samples as a record file");

  auto* sweep_t = app.add_subcommand("sweep-threshold", "Distilled variance and success probability vs threshold");
  sweep_t->add_option("config", o.config_path, "Experiment config (JSON)")->required();
  sweep_t->add_option("--min", o.min, "Lowest threshold (SNU)");
  sweep_t->add_option("--max", o.max, "Highest threshold (SNU)");
  sweep_t->add_option("--steps", o.steps, "Number of thresholds");
  sweep_t->add_flag("--relative", o.relative, "Thresholds relative to the tap marginal center");
  sweep_t->add_flag("--mc", o.with_mc, "Add Monte Carlo columns (one sample set)");
  sweep_t->add_option("--stderr", o.stderr_method, "MC standard error method")->check(CLI::IsMember(stderr_choices));
  sweep_t->add_option("--out", o.out, "Output CSV")->required();

  auto* sweep_a = app.add_subcommand("sweep-angle", "Distilled variance and success probability vs tap angle");
  sweep_a->add_option("config", o.config_path, "Experiment config (JSON)")->required();
  sweep_a->add_option("--threshold", o.threshold, "Tap threshold (SNU)")->required();
  sweep_a->add_flag("--relative", o.relative, "Threshold relative to the tap marginal center at each angle");
  sweep_a->add_option("--min-deg", o.min_deg, "First tap angle (degrees)");
  sweep_a->add_option("--max-deg", o.max_deg, "Last tap angle (degrees)");
  sweep_a->add_option("--steps", o.steps, "Number of angles")->default_val(91);
  sweep_a->add_option("--out", o.out, "Output CSV")->required();

  auto* tomo = app.add_subcommand("tomo", "Wigner function by filtered back-projection of sampled projections");
  tomo->add_option("config", o.config_path, "Experiment config (JSON)")->required();
  tomo->add_option("--angles", o.angles, "Number of projection angles over [0, pi)")->check(CLI::Range(2, 100000));
  tomo->add_option("--per-angle", o.per_angle, "Samples per projection")->check(CLI::Range(1, 1000000000));
  tomo->add_option("--bins", o.bins, "Histogram bins")->check(CLI::Range(8, 1 << 20));
  tomo->add_option("--cutoff", o.cutoff, "Filter cutoff as a fraction of Nyquist");
  tomo->add_option("--grid-points", o.grid_points, "Grid points per axis")->check(CLI::Range(3, 4001));
  tomo->add_option("--sigmas", o.sigmas, "Grid extent in component standard deviations");
  tomo->add_flag("--analytic", o.analytic, "Write the analytic Wigner grid instead of a reconstruction");
  tomo->add_option("--out", o.out, "Output CSV")->required();

  auto* ingest = app.add_subcommand("ingest", "Bin a two-channel record file and post-select it");
  ingest->add_option("record", o.record_path, "Record file")->required();
  ingest->add_option("--threshold", o.threshold, "Tap threshold (SNU)")->required();
  ingest->add_option("--keep", o.keep, "Keep tap values above or below")->check(CLI::IsMember({"above", "below"}));
  ingest->add_option("--filter", o.filter, "Modulation filter")->check(CLI::IsMember({"all", "on", "off"}));
  ingest->add_flag("--permissive", o.permissive, "Allow bins that are not aligned with the toggle");
  ingest->add_option("--stderr", o.stderr_method, "Standard error method")->check(CLI::IsMember(stderr_choices));
  ingest->add_option("--out", o.out, "Result JSON");

  auto* reproduce = app.add_subcommand("reproduce", "Write the data behind one of the figures");
  reproduce->add_option("--fig", o.fig, "Figure number")->required()->check(CLI::IsMember({2, 3, 4, 5}));
  reproduce->add_option("--out", o.out, "Output directory")->required();
  reproduce->add_option("--config", o.config_path, "Config (default: canonical.json)");
  reproduce->add_option("--samples", o.samples, "Override Monte Carlo sample count");
  reproduce->add_option("--angles", o.angles, "Tomography angles (fig 5)")->check(CLI::Range(2, 100000));
  reproduce->add_option("--per-angle", o.per_angle, "Tomography samples per angle (fig 5)");
  reproduce->add_option("--bins", o.bins, "Tomography histogram bins (fig 5)")->check(CLI::Range(8, 1 << 20));

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }

  try {
    if (analyze->parsed()) return cmd_analyze(o, out);
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (sweep_t->parsed()) return cmd_sweep_threshold(o, out);
    if (sweep_a->parsed()) return cmd_sweep_angle(o, out);
    if (tomo->parsed()) return cmd_tomo(o, out);
    if (ingest->parsed()) return cmd_ingest(o, out);
    if (reproduce->parsed()) return cmd_reproduce(o, out);
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ConfigError& e) {
    err << "invalid configuration: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const ParseError& e) {
    err << "malformed input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return kExitInvalid;
}

}  // namespace cvdistill
