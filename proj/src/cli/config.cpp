#include "cvdistill/config.hpp"

#include <cmath>
#include <set>

#include "cvdistill/errors.hpp"
#include "cvdistill/units.hpp"

namespace cvdistill {

using nlohmann::json;

namespace {

double number(const json& doc, const std::string& key, const std::string& path) {
  const auto& v = doc.at(key);
  if (!v.is_number()) throw ConfigError(path, "must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
  return d;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(prefix + key, "unknown key");
  }
}

void require(const json& doc, const std::string& key) {
  if (!doc.contains(key)) throw ConfigError(key, "required key missing");
}

}  // namespace

MixtureState ExperimentConfig::state() const {
  return make_noisy_state_xp(db_to_snu(var_sq_db), db_to_snu(var_anti_db), gamma, displacement_x, displacement_p);
}

PostSelectionRule ExperimentConfig::rule() const {
  PostSelectionRule r;
  r.tap_angle = QuadratureAngle::from_degrees(tap_angle_deg);
  r.threshold = threshold;
  r.keep_side = keep_side;
  return r;
}

SimulationConfig ExperimentConfig::simulation() const {
  SimulationConfig sim;
  sim.state = state();
  sim.splitter = splitter();
  sim.rule = rule();
  sim.verification_angle = verification_angle();
  sim.detector = detector();
  sim.sample_count = samples;
  sim.seed = seed;
  return sim;
}

ExperimentConfig config_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("<root>", "configuration must be a JSON object");
  reject_unknown(doc,
                 {"var_sq_db", "var_anti_db", "gamma", "displacement", "tap_R", "detector_eta", "tap_angle_deg",
                  "verification_angle_deg", "threshold", "keep_side", "samples", "seed"},
                 "");
  for (const char* key : {"var_sq_db", "var_anti_db", "gamma", "displacement", "tap_R", "threshold"}) {
    require(doc, key);
  }

  ExperimentConfig c;
  c.var_sq_db = number(doc, "var_sq_db", "var_sq_db");
  c.var_anti_db = number(doc, "var_anti_db", "var_anti_db");
  c.gamma = number(doc, "gamma", "gamma");
  c.tap_R = number(doc, "tap_R", "tap_R");
  c.threshold = number(doc, "threshold", "threshold");
  if (doc.contains("detector_eta")) c.detector_eta = number(doc, "detector_eta", "detector_eta");
  if (doc.contains("tap_angle_deg")) c.tap_angle_deg = number(doc, "tap_angle_deg", "tap_angle_deg");
  if (doc.contains("verification_angle_deg")) {
    c.verification_angle_deg = number(doc, "verification_angle_deg", "verification_angle_deg");
  }

  const auto& disp = doc.at("displacement");
  if (!disp.is_object()) throw ConfigError("displacement", "must be an object");
  if (disp.contains("x") || disp.contains("p")) {
    reject_unknown(disp, {"x", "p"}, "displacement.");
    if (!disp.contains("x") || !disp.contains("p")) throw ConfigError("displacement", "needs both x and p");
    c.displacement_x = number(disp, "x", "displacement.x");
    c.displacement_p = number(disp, "p", "displacement.p");
  } else {
    reject_unknown(disp, {"magnitude", "angle_deg"}, "displacement.");
    if (!disp.contains("magnitude") || !disp.contains("angle_deg")) {
      throw ConfigError("displacement", "needs {x, p} or {magnitude, angle_deg}");
    }
    const double mag = number(disp, "magnitude", "displacement.magnitude");
    const auto angle = QuadratureAngle::from_degrees(number(disp, "angle_deg", "displacement.angle_deg"));
    c.displacement_x = mag * angle.cos();
    c.displacement_p = mag * angle.sin();
  }

  if (doc.contains("keep_side")) {
    const auto& side = doc.at("keep_side");
    if (side == "above") {
      c.keep_side = KeepSide::above;
    } else if (side == "below") {
      c.keep_side = KeepSide::below;
    } else {
      throw ConfigError("keep_side", "must be \"above\" or \"below\"");
    }
  }
  if (doc.contains("samples")) {
    const auto& s = doc.at("samples");
    if (!s.is_number_unsigned() || s.get<std::uint64_t>() < 1) throw ConfigError("samples", "must be a positive integer");
    c.samples = s.get<std::size_t>();
  }
  if (doc.contains("seed")) {
    const auto& s = doc.at("seed");
    if (!s.is_number_unsigned()) throw ConfigError("seed", "must be a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }

  // Domain invariants, reported against the key that carries them.
  if (!(c.gamma >= 0.0 && c.gamma <= 1.0)) throw ConfigError("gamma", "must lie in [0, 1]");
  if (!(c.tap_R > 0.0 && c.tap_R < 1.0)) throw ConfigError("tap_R", "must lie in (0, 1)");
  if (!(c.detector_eta > 0.0 && c.detector_eta <= 1.0)) throw ConfigError("detector_eta", "must lie in (0, 1]");
  if (c.var_sq_db + c.var_anti_db < -1e-9) {
    throw ConfigError("var_anti_db", "var_sq * var_anti < 1 violates the uncertainty relation");
  }
  try {
    (void)c.state();
  } catch (const DomainError& e) {
    throw ConfigError("var_anti_db", e.what());
  }
  return c;
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError("<json>", e.what());
  }
  return config_from_json(doc);
}

json config_to_json(const ExperimentConfig& c) {
  return json{{"var_sq_db", c.var_sq_db},
              {"var_anti_db", c.var_anti_db},
              {"gamma", c.gamma},
              {"displacement", {{"x", c.displacement_x}, {"p", c.displacement_p}}},
              {"tap_R", c.tap_R},
              {"detector_eta", c.detector_eta},
              {"tap_angle_deg", c.tap_angle_deg},
              {"verification_angle_deg", c.verification_angle_deg},
              {"threshold", c.threshold},
              {"keep_side", c.keep_side == KeepSide::above ? "above" : "below"},
              {"samples", c.samples},
              {"seed", c.seed}};
}

}  // namespace cvdistill
