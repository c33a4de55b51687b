#pragma once

#include <vector>

#include "bubbletree/energy.hpp"
#include "bubbletree/grid.hpp"

namespace bubbletree {

struct FlowParams {
  double dt_init = 0.0;       // 0: derive from the stability bound
  double cfl_safety = 0.4;
  double horizon = 1.0;
  double energy_slack = 1e-10;
  long max_steps = 2000000;
  int report_every = 25;
  double e_infinity = 4.0 * M_PI;  // known limit energy for the rate fit
};

struct FlowHistoryRow {
  double t = 0.0;
  double energy = 0.0;
  double tension_sq = 0.0;  // |tau_{S^2}|_{L^2(S^2)}^2 at this time
};

struct FlowState {
  Field u;
  double t = 0.0;
  double dt = 0.0;
  double dt_cap = 0.0;  // stability bound; dt creeps back up to it
  std::vector<FlowHistoryRow> history;
  long rejected_steps = 0;
};

struct RateFit {
  double rate = 0.0;       // slope of log(E - E_inf)
  double r_squared = 0.0;
  bool valid = false;
};

// Grid with physically uniform radial spacing near the poles; the right
// setting for explicit stepping.
GridPtr make_flow_grid(int n_r = 96, int n_theta = 32, double r_min = 3e-4);

// Explicit stability bound for the projected Euler step on this grid with
// the polar spectral filter active.
double flow_stable_dt(const RadialGrid& grid, double safety);

// Sphere-gauge tension with the polar filter applied, plus its L^2 norm.
Field flow_tension(const Field& u, double* tension_sq = nullptr);

// One projected Euler step u <- pi(u + dt tau). Returns false (and halves
// dt) when the energy rose beyond the slack; the state advances otherwise.
bool flow_step(FlowState& state, const FlowParams& params);

FlowState run_flow(Field initial, const FlowParams& params);

// Log-linear fit of E(t) - E_inf over the trailing half of the history.
RateFit fit_rate(const std::vector<FlowHistoryRow>& history, double e_infinity);

}  // namespace bubbletree
