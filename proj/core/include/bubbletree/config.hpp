#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "bubbletree/model.hpp"

namespace bubbletree {

struct GridOptions {
  int n_r = 512;
  int n_theta = 128;
};

struct FlowOptions {
  int n_r = 96;
  int n_theta = 32;
  double r_min = 3e-4;
  double dt_init = 0.0;       // 0: stability bound
  double horizon = 1.0;
  double perturbation = 0.01;
  int report_every = 25;
  std::string resume_from;    // field dump base path; empty = fresh start
};

struct ExperimentConfig {
  std::string scenario = "same_orientation";
  std::vector<double> mu_values = {2980.9579870417283};  // e^8
  std::vector<double> delta_values = {0.05};
  RationalMap q0 = RationalMap::identity();
  RationalMap q1 = RationalMap::identity();
  std::string f_choice = "log_mu";  // or "mu_power"
  double sigma1 = 0.05;
  double mu_bar = 54.598150033144236;
  double cap_epsilon = 0.10;
  double transversal_angle = 0.7853981633974483;  // pi/4
  double lambda1 = 10.0;
  int test_space_level = 1;
  GridOptions grid;
  FlowOptions flow;
  std::vector<std::string> checks;  // empty: run every family
  uint64_t seed = 1;
  int workers = 1;
  std::string out_dir = "out";
};

// Strict parse: every field defaulted, unknown keys rejected.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config_file(const std::string& path);

nlohmann::ordered_json rational_to_json(const RationalMap& q);
RationalMap rational_from_json(const nlohmann::json& j);

// Scenario data at one (mu, delta) grid point. delta is realised by
// translating U1, so the two descriptor values at 0 sit at distance delta.
GluingData make_gluing_data(const ExperimentConfig& config, double mu, double delta);

}  // namespace bubbletree
