#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "bubbletree/config.hpp"
#include "bubbletree/io.hpp"
#include "helpers.hpp"

using namespace bubbletree;
namespace fs = std::filesystem;

namespace {

std::string tmp_dir() {
  static int counter = 0;
  const fs::path p = fs::temp_directory_path() /
                     ("btlab_test_" + std::to_string(++counter) + "_" +
                      std::to_string(::getpid()));
  fs::create_directories(p);
  return p.string();
}

std::string write_config(const std::string& dir, const std::string& body) {
  const std::string path = dir + "/config.json";
  std::ofstream out(path);
  out << body;
  return path;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(BTLAB_BINARY) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("config defaults and round trip") {
  const ExperimentConfig def;
  const auto j = config_to_json(def);
  const ExperimentConfig back = config_from_json(j);
  CHECK(back.scenario == def.scenario);
  CHECK(back.mu_values == def.mu_values);
  CHECK(back.grid.n_r == def.grid.n_r);
  CHECK(back.flow.horizon == def.flow.horizon);
  CHECK(config_to_json(back) == j);

  // empty object picks every default
  const ExperimentConfig empty = config_from_json(nlohmann::json::object());
  CHECK(empty.scenario == "same_orientation");
  CHECK(empty.workers == 1);
}

TEST_CASE("unknown keys are rejected") {
  nlohmann::json j;
  j["scenario"] = "same_orientation";
  j["not_a_key"] = 1;
  CHECK_THROWS_WITH_AS(config_from_json(j), doctest::Contains("unknown key"), Error);

  nlohmann::json g;
  g["grid"] = {{"n_r", 128}, {"bogus", true}};
  CHECK_THROWS_AS(config_from_json(g), Error);
}

TEST_CASE("rational map serialization") {
  RationalMap q;
  q.numerator = Polynomial({0.0, Complex(1.0, 0.25), Complex(-0.5, 0.0)});
  q.denominator = Polynomial({1.0, Complex(0.0, 0.125)});
  const auto j = rational_to_json(q);
  const RationalMap back = rational_from_json(j);
  auto gen = testutil::rng(71);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int k = 0; k < 10; ++k) {
    const Complex z(u(gen), u(gen));
    CHECK(std::abs(evaluate(q, z) - evaluate(back, z)) == 0.0);
  }
}

TEST_CASE("field dump round trip") {
  GridParams gp = testutil::small_grid_params(96, 32);
  auto grid = RadialGrid::make(gp);
  Field f = Field::sample(grid, 3, [](Chart, Complex z) {
    return Ambient(stereo_project(z));
  }, "round trip test");
  const std::string dir = tmp_dir();
  dump_field(f, dir + "/field");
  const Field g = load_field(dir + "/field");
  CHECK(g.metadata() == f.metadata());
  CHECK(g.raw(Chart::Inner) == f.raw(Chart::Inner));
  CHECK(g.raw(Chart::Outer) == f.raw(Chart::Outer));
}

TEST_CASE("cli exit codes and outputs") {
  const std::string dir = tmp_dir();

  SUBCASE("build-model on a valid config") {
    const std::string cfg = write_config(
        dir, R"({"scenario": "opposite_orientation", "mu_values": [2980.958],
                 "delta_values": [0.0], "grid": {"n_r": 192, "n_theta": 32},
                 "out_dir": ")" + dir + R"("})");
    CHECK(run_cli("build-model --config " + cfg) == 0);
    const auto j = nlohmann::json::parse(slurp(dir + "/model_summary.json"));
    CHECK(j.contains("delta"));
    CHECK(j.contains("tension"));
    CHECK(j.contains("nu_bar"));
    CHECK(j.contains("radii"));
    CHECK(j.contains("defect"));
  }

  SUBCASE("mu below the separation threshold exits 2") {
    const std::string cfg = write_config(
        dir, R"({"mu_values": [20.0], "out_dir": ")" + dir + R"("})");
    CHECK(run_cli("build-model --config " + cfg) == 2);
  }

  SUBCASE("invalid json exits 2") {
    const std::string cfg = write_config(dir, "{ not json");
    CHECK(run_cli("build-model --config " + cfg) == 2);
  }

  SUBCASE("unknown key exits 2") {
    const std::string cfg = write_config(dir, R"({"nope": 1})");
    CHECK(run_cli("build-model --config " + cfg) == 2);
  }

  SUBCASE("assembly failure exits 3") {
    // q0 with a pole inside the gluing region
    const std::string cfg = write_config(
        dir, R"({"q0": {"numerator": [[0,0],[1,0]],
                        "denominator": [[1,0],[0,-100]]},
                 "out_dir": ")" + dir + R"("})");
    CHECK(run_cli("build-model --config " + cfg) == 3);
  }

  SUBCASE("verify with a filtered check family") {
    const std::string cfg = write_config(
        dir, R"({"mu_values": [403.4287934927351, 2980.9579870417283],
                 "out_dir": ")" + dir + R"("})");
    CHECK(run_cli("verify --config " + cfg + " --checks dominant_index") == 0);
    const auto report = nlohmann::json::parse(slurp(dir + "/verify_report.json"));
    REQUIRE(report.is_array());
    for (const auto& rec : report) CHECK(rec.at("check").get<std::string>().substr(0, 14) == "dominant_index");
  }

  SUBCASE("verify is deterministic") {
    const std::string cfg = write_config(
        dir, R"({"out_dir": ")" + dir + R"("})");
    CHECK(run_cli("verify --config " + cfg + " --checks dominant_index,Ij_H") == 0);
    const std::string first = slurp(dir + "/verify_report.json");
    CHECK(run_cli("verify --config " + cfg + " --checks dominant_index,Ij_H") == 0);
    CHECK(slurp(dir + "/verify_report.json") == first);
  }

  SUBCASE("scan writes a csv with the documented columns") {
    const std::string cfg = write_config(
        dir, R"({"mu_values": [2980.9579870417283],
                 "delta_values": [0.02, 0.05],
                 "grid": {"n_r": 192, "n_theta": 32},
                 "test_space_level": 0,
                 "workers": 2,
                 "out_dir": ")" + dir + R"("})");
    CHECK(run_cli("scan --config " + cfg) == 0);
    const std::string csv = slurp(dir + "/scan.csv");
    CHECK(csv.substr(0, csv.find('\n')) ==
          "mu,delta,nu,E,E_star,defect,tension_l2,dual_norm_lb,c_mu,Q,error");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows
    const auto fits = nlohmann::json::parse(slurp(dir + "/fit_summary.json"));
    CHECK(fits.contains("defect_fits"));
  }

  SUBCASE("empty sweep exits 2") {
    const std::string cfg = write_config(
        dir, R"({"delta_values": [], "out_dir": ")" + dir + R"("})");
    CHECK(run_cli("scan --config " + cfg) == 2);
  }

  SUBCASE("flow with zero horizon writes a header-only csv") {
    const std::string cfg = write_config(
        dir, R"({"flow": {"horizon": 0.0, "n_r": 64, "n_theta": 32},
                 "out_dir": ")" + dir + R"("})");
    CHECK(run_cli("flow --config " + cfg) == 0);
    const std::string csv = slurp(dir + "/flow_history.csv");
    CHECK(csv == "t,E,tension_l2_sq,rate_estimate\n");
  }

  SUBCASE("flow resume reproduces the continuation") {
    const std::string cfg1 = write_config(
        dir, R"({"flow": {"horizon": 0.004, "n_r": 64, "n_theta": 32,
                          "report_every": 5},
                 "seed": 7, "out_dir": ")" + dir + R"("})");
    CHECK(run_cli("flow --config " + cfg1) == 0);
    const std::string full_run = slurp(dir + "/flow_summary.json");

    // run half, resume from the dump, compare the final state
    const std::string dir_a = tmp_dir();
    const std::string cfg_half = write_config(
        dir_a, R"({"flow": {"horizon": 0.002, "n_r": 64, "n_theta": 32,
                            "report_every": 5},
                   "seed": 7, "out_dir": ")" + dir_a + R"("})");
    CHECK(run_cli("flow --config " + cfg_half) == 0);
    const std::string dir_b = tmp_dir();
    const std::string cfg_resume = write_config(
        dir_b, R"({"flow": {"horizon": 0.002, "n_r": 64, "n_theta": 32,
                            "report_every": 5,
                            "resume_from": ")" + dir_a + R"(/flow_final"},
                   "seed": 7, "out_dir": ")" + dir_b + R"("})");
    CHECK(run_cli("flow --config " + cfg_resume) == 0);
    // resuming twice is bit-identical; the split run agrees with the full
    // run up to the horizon quantisation of the final step
    const std::string dir_c = tmp_dir();
    const std::string cfg_resume2 = write_config(
        dir_c, R"({"flow": {"horizon": 0.002, "n_r": 64, "n_theta": 32,
                            "report_every": 5,
                            "resume_from": ")" + dir_a + R"(/flow_final"},
                   "seed": 7, "out_dir": ")" + dir_c + R"("})");
    CHECK(run_cli("flow --config " + cfg_resume2) == 0);
    CHECK(slurp(dir_b + "/flow_history.csv") == slurp(dir_c + "/flow_history.csv"));
    const auto full = nlohmann::json::parse(full_run);
    const auto resumed = nlohmann::json::parse(slurp(dir_b + "/flow_summary.json"));
    CHECK(resumed.at("energy_final").get<double>() ==
          doctest::Approx(full.at("energy_final").get<double>()).epsilon(1e-7));
  }

  SUBCASE("environment variable overrides the output directory") {
    const std::string env_dir = tmp_dir();
    const std::string cfg = write_config(
        dir, R"({"out_dir": ")" + dir + R"("})");
    const std::string cmd = "BTLAB_OUT=" + env_dir + " " + std::string(BTLAB_BINARY) +
                            " verify --config " + cfg +
                            " --checks dominant_index > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    CHECK(fs::exists(env_dir + "/verify_report.json"));
  }
}
