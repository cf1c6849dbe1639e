#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cvdistill/montecarlo.hpp"
#include "cvdistill/protocol.hpp"
#include "cvdistill/states.hpp"

namespace cvdistill {

/// Invalid experiment configuration; field() names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Experiment description as read from JSON. Variances in dB relative to shot
/// noise, angles in degrees, thresholds and displacements in SNU amplitude.
struct ExperimentConfig {
  double var_sq_db = -3.1;
  double var_anti_db = 27.0;
  double gamma = 0.5;
  double displacement_x = 0.0;
  double displacement_p = 0.0;
  double tap_R = 0.1104;
  double detector_eta = 1.0;
  double tap_angle_deg = 90.0;
  double verification_angle_deg = 0.0;
  double threshold = 0.0;
  KeepSide keep_side = KeepSide::above;
  std::size_t samples = 1'000'000;
  std::uint64_t seed = 1;

  MixtureState state() const;
  TapSplitter splitter() const { return TapSplitter(tap_R); }
  DetectorModel detector() const { return DetectorModel(detector_eta); }
  PostSelectionRule rule() const;
  QuadratureAngle verification_angle() const { return QuadratureAngle::from_degrees(verification_angle_deg); }
  SimulationConfig simulation() const;
};

/// Parses and validates; unknown keys and domain violations throw ConfigError.
/// Accepts // and /* */ comments.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig config_from_json(const nlohmann::json& doc);
nlohmann::json config_to_json(const ExperimentConfig& config);

}  // namespace cvdistill
