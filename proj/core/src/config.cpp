#include "bubbletree/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace bubbletree {

namespace {

void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed,
                const std::string& where) {
  if (!j.is_object()) fail(ErrorCode::ConfigInvalid, where + " must be an object");
  for (const auto& item : j.items())
    if (!allowed.count(item.key()))
      fail(ErrorCode::ConfigInvalid, "unknown key '" + item.key() + "' in " + where);
}

Polynomial poly_from_json(const nlohmann::json& j, const std::string& where) {
  if (!j.is_array()) fail(ErrorCode::ConfigInvalid, where + " must be an array");
  std::vector<Complex> coeffs;
  for (const auto& c : j) {
    if (!c.is_array() || c.size() != 2)
      fail(ErrorCode::ConfigInvalid, where + " entries must be [re, im] pairs");
    coeffs.emplace_back(c[0].get<double>(), c[1].get<double>());
  }
  return Polynomial(std::move(coeffs));
}

nlohmann::ordered_json poly_to_json(const Polynomial& p) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : p.coefficients()) arr.push_back({c.real(), c.imag()});
  return arr;
}

}  // namespace

nlohmann::ordered_json rational_to_json(const RationalMap& q) {
  nlohmann::ordered_json j;
  j["numerator"] = poly_to_json(q.numerator);
  j["denominator"] = poly_to_json(q.denominator);
  std::string tag = "z";
  if (q.pre.reciprocal) tag = q.pre.conjugate ? "conj_reciprocal" : "reciprocal";
  else if (q.pre.conjugate) tag = "conj";
  j["precomposition"] = tag;
  if (q.pre.reciprocal) j["mu"] = q.pre.mu;
  return j;
}

RationalMap rational_from_json(const nlohmann::json& j) {
  check_keys(j, {"numerator", "denominator", "precomposition", "mu"}, "rational map");
  RationalMap q;
  q.numerator = poly_from_json(j.at("numerator"), "numerator");
  if (j.contains("denominator"))
    q.denominator = poly_from_json(j.at("denominator"), "denominator");
  if (q.denominator.is_zero())
    fail(ErrorCode::ConfigInvalid, "zero denominator polynomial");
  std::string tag = j.value("precomposition", "z");
  if (tag == "z") {
  } else if (tag == "conj") {
    q.pre.conjugate = true;
  } else if (tag == "reciprocal" || tag == "conj_reciprocal") {
    q.pre.reciprocal = true;
    q.pre.conjugate = tag == "conj_reciprocal";
    q.pre.mu = j.value("mu", 1.0);
  } else {
    fail(ErrorCode::ConfigInvalid, "unknown precomposition '" + tag + "'");
  }
  return q;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  check_keys(j, {"scenario", "mu_values", "delta_values", "q0", "q1", "f_choice",
                 "sigma1", "mu_bar", "cap_epsilon", "transversal_angle", "lambda1",
                 "test_space_level", "grid", "flow", "checks", "seed", "workers",
                 "out_dir"},
             "config");
  ExperimentConfig c;
  c.scenario = j.value("scenario", c.scenario);
  if (c.scenario != "same_orientation" && c.scenario != "opposite_orientation" &&
      c.scenario != "transversal")
    fail(ErrorCode::ConfigInvalid, "unknown scenario '" + c.scenario + "'");
  if (j.contains("mu_values")) c.mu_values = j.at("mu_values").get<std::vector<double>>();
  if (j.contains("delta_values"))
    c.delta_values = j.at("delta_values").get<std::vector<double>>();
  if (j.contains("q0")) c.q0 = rational_from_json(j.at("q0"));
  if (j.contains("q1")) c.q1 = rational_from_json(j.at("q1"));
  c.f_choice = j.value("f_choice", c.f_choice);
  if (c.f_choice != "log_mu" && c.f_choice != "mu_power")
    fail(ErrorCode::ConfigInvalid, "unknown f_choice '" + c.f_choice + "'");
  c.sigma1 = j.value("sigma1", c.sigma1);
  c.mu_bar = j.value("mu_bar", c.mu_bar);
  c.cap_epsilon = j.value("cap_epsilon", c.cap_epsilon);
  c.transversal_angle = j.value("transversal_angle", c.transversal_angle);
  c.lambda1 = j.value("lambda1", c.lambda1);
  c.test_space_level = j.value("test_space_level", c.test_space_level);
  if (j.contains("grid")) {
    check_keys(j.at("grid"), {"n_r", "n_theta"}, "grid");
    c.grid.n_r = j.at("grid").value("n_r", c.grid.n_r);
    c.grid.n_theta = j.at("grid").value("n_theta", c.grid.n_theta);
  }
  if (j.contains("flow")) {
    check_keys(j.at("flow"),
               {"n_r", "n_theta", "r_min", "dt_init", "horizon", "perturbation",
                "report_every", "resume_from"},
               "flow");
    const auto& f = j.at("flow");
    c.flow.n_r = f.value("n_r", c.flow.n_r);
    c.flow.n_theta = f.value("n_theta", c.flow.n_theta);
    c.flow.r_min = f.value("r_min", c.flow.r_min);
    c.flow.dt_init = f.value("dt_init", c.flow.dt_init);
    c.flow.horizon = f.value("horizon", c.flow.horizon);
    c.flow.perturbation = f.value("perturbation", c.flow.perturbation);
    c.flow.report_every = f.value("report_every", c.flow.report_every);
    c.flow.resume_from = f.value("resume_from", c.flow.resume_from);
  }
  if (j.contains("checks")) c.checks = j.at("checks").get<std::vector<std::string>>();
  c.seed = j.value("seed", c.seed);
  c.workers = j.value("workers", c.workers);
  if (c.workers < 1) fail(ErrorCode::ConfigInvalid, "workers must be >= 1");
  c.out_dir = j.value("out_dir", c.out_dir);
  if (c.mu_values.empty())
    fail(ErrorCode::ConfigInvalid, "mu_values must not be empty");
  return c;
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["scenario"] = c.scenario;
  j["mu_values"] = c.mu_values;
  j["delta_values"] = c.delta_values;
  j["q0"] = rational_to_json(c.q0);
  j["q1"] = rational_to_json(c.q1);
  j["f_choice"] = c.f_choice;
  j["sigma1"] = c.sigma1;
  j["mu_bar"] = c.mu_bar;
  j["cap_epsilon"] = c.cap_epsilon;
  j["transversal_angle"] = c.transversal_angle;
  j["lambda1"] = c.lambda1;
  j["test_space_level"] = c.test_space_level;
  j["grid"] = {{"n_r", c.grid.n_r}, {"n_theta", c.grid.n_theta}};
  j["flow"] = {{"n_r", c.flow.n_r},
               {"n_theta", c.flow.n_theta},
               {"r_min", c.flow.r_min},
               {"dt_init", c.flow.dt_init},
               {"horizon", c.flow.horizon},
               {"perturbation", c.flow.perturbation},
               {"report_every", c.flow.report_every},
               {"resume_from", c.flow.resume_from}};
  j["checks"] = c.checks;
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["out_dir"] = c.out_dir;
  return j;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::ConfigInvalid, "cannot open config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::ConfigInvalid, std::string("config parse error: ") + e.what());
  }
  return config_from_json(j);
}

GluingData make_gluing_data(const ExperimentConfig& config, double mu, double delta) {
  GluingData d;
  d.q0 = config.q0;
  d.q1 = config.q1;
  d.mu = mu;
  d.f_choice = config.f_choice == "mu_power" ? FChoice::MuPower : FChoice::LogMu;
  d.thresholds.sigma1 = config.sigma1;
  d.thresholds.mu_bar = config.mu_bar;
  d.thresholds.cap_epsilon = config.cap_epsilon;

  if (config.scenario == "same_orientation") {
    d.U0 = HarmonicMapDescriptor{};
    d.U1 = HarmonicMapDescriptor{};
  } else if (config.scenario == "opposite_orientation") {
    d.U0 = HarmonicMapDescriptor{};
    d.U1 = HarmonicMapDescriptor{};
    d.U1.conjugated = true;
  } else {
    d.U0 = HarmonicMapDescriptor{};
    d.U1 = HarmonicMapDescriptor{};
    d.U0.embedding = GreatSphereEmbedding::plane_rotation(1, 3, config.transversal_angle);
    d.U1.embedding = GreatSphereEmbedding::identity(4);
  }
  if (delta != 0.0) d.U1.translation = std::tan(0.5 * delta);
  return d;
}

}  // namespace bubbletree
