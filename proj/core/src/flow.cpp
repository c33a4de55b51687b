#include "bubbletree/flow.hpp"

#include <cmath>

#include "bubbletree/fft.hpp"

namespace bubbletree {

namespace {

// Smooth pole filter: modes beyond the locally representable band are
// physically absent for smooth maps of the sphere and only limit the step
// size, so they are damped row by row.
double mode_cutoff(const RadialGrid& grid, Chart c, int i) {
  const double r = grid.radius(c, i);
  const double sin_theta = 2.0 * r / (1.0 + r * r);
  const double m = 1.25 * 0.5 * grid.n_theta() * sin_theta;
  // no floor: near the pole every nonzero mode is both unphysical for
  // smooth maps and explosively stiff, so the filter removes them all
  return std::max(0.25, std::min(m, 0.5 * grid.n_theta()));
}

std::vector<double> filter_multiplier(const RadialGrid& grid, Chart c, int i) {
  const double mc = mode_cutoff(grid, c, i);
  std::vector<double> mult(grid.n_theta() / 2 + 1);
  for (int m = 0; m <= grid.n_theta() / 2; ++m)
    mult[m] = std::exp(-36.0 * std::pow(m / mc, 16.0));
  return mult;
}

void filter_field(Field& f) {
  const auto& grid = *f.grid();
  const int nt = grid.n_theta();
  std::vector<double> row(nt);
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < grid.n_r(); ++i) {
      const auto mult = filter_multiplier(grid, Chart(c), i);
      for (int k = 0; k < f.ncomp(); ++k) {
        for (int j = 0; j < nt; ++j) row[j] = f.value(Chart(c), i, j, k);
        spectral_theta_filter(row.data(), nt, mult);
        for (int j = 0; j < nt; ++j) f.value(Chart(c), i, j, k) = row[j];
      }
    }
}

}  // namespace

GridPtr make_flow_grid(int n_r, int n_theta, double r_min) {
  GridParams gp;
  gp.n_r = n_r;
  gp.n_theta = n_theta;
  gp.r_min = r_min;
  gp.r_max = 12.0;
  gp.spacing = RadialSpacing::PolarArc;
  return RadialGrid::make(gp);
}

double flow_stable_dt(const RadialGrid& grid, double safety) {
  double lambda_max = 0.0;
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < grid.n_r(); ++i) {
      const double r = grid.radius(Chart(c), i);
      const double conf = 0.25 * (1.0 + r * r) * (1.0 + r * r);
      const double k_s = M_PI * grid.density(Chart(c), i) / grid.sigma_spacing(Chart(c));
      // integer modes beyond 0.9 m_c are filtered to oblivion every step, so
      // only the retained band constrains the step size
      const double k_t = std::floor(0.9 * mode_cutoff(grid, Chart(c), i));
      lambda_max = std::max(lambda_max, conf * (k_s * k_s + k_t * k_t) / (r * r));
    }
  return safety * 2.0 / lambda_max;
}

Field flow_tension(const Field& u, double* tension_sq) {
  const auto& grid = *u.grid();
  FieldDerivatives du(u);
  Field tau(u.grid(), u.ncomp(), "tension");
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < grid.n_r(); ++i) {
      const double r = grid.radius(Chart(c), i);
      const double conf = 0.25 * (1.0 + r * r) * (1.0 + r * r);
      for (int j = 0; j < grid.n_theta(); ++j) {
        const Ambient t = du.laplacian_chart(Chart(c), i, j) +
                          du.grad_squared_chart(Chart(c), i, j) *
                              u.node_value(Chart(c), i, j);
        tau.set_node_value(Chart(c), i, j, conf * t);
      }
    }
  filter_field(tau);
  if (tension_sq) {
    std::array<std::vector<double>, 2> vals;
    for (int c = 0; c < 2; ++c) {
      vals[c].assign(grid.nodes_per_chart(), 0.0);
      for (int i = 0; i < grid.n_r(); ++i) {
        const double r = grid.radius(Chart(c), i);
        const double inv_conf = 4.0 / ((1.0 + r * r) * (1.0 + r * r));
        for (int j = 0; j < grid.n_theta(); ++j)
          vals[c][size_t(i) * grid.n_theta() + j] =
              inv_conf * tau.node_value(Chart(c), i, j).squaredNorm();
      }
    }
    *tension_sq = integrate_conformal_values(grid, vals);
  }
  return tau;
}

bool flow_step(FlowState& state, const FlowParams& params) {
  const auto& grid = *state.u.grid();
  double tension_sq = 0.0;
  const Field tau = flow_tension(state.u, &tension_sq);

  // Only the update is filtered: re-filtering u itself would not be the
  // identity at dt -> 0 and would defeat the energy-descent guard.
  Field next(state.u.grid(), state.u.ncomp(), state.u.metadata());
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < grid.n_r(); ++i)
      for (int j = 0; j < grid.n_theta(); ++j)
        next.set_node_value(Chart(c), i, j,
                            project_to_target(state.u.node_value(Chart(c), i, j) +
                                              state.dt * tau.node_value(Chart(c), i, j)));

  const double e_old = state.history.empty() ? dirichlet_energy(state.u)
                                             : state.history.back().energy;
  const double e_new = dirichlet_energy(next);
  if (e_new > e_old + params.energy_slack) {
    state.dt *= 0.5;
    ++state.rejected_steps;
    return false;
  }
  if (state.history.empty()) state.history.push_back({state.t, e_old, tension_sq});
  state.u = std::move(next);
  state.t += state.dt;
  state.history.push_back({state.t, e_new, tension_sq});
  // recover the step size after transient rejections
  state.dt = std::min(1.02 * state.dt, state.dt_cap > 0.0 ? state.dt_cap : state.dt);
  return true;
}

namespace {

std::vector<FlowHistoryRow> downsample(const std::vector<FlowHistoryRow>& rows,
                                       int every) {
  std::vector<FlowHistoryRow> out;
  for (size_t i = 0; i < rows.size(); ++i)
    if (i % size_t(every) == 0 || i + 1 == rows.size()) out.push_back(rows[i]);
  return out;
}

}  // namespace

FlowState run_flow(Field initial, const FlowParams& params) {
  FlowState state;
  state.u = std::move(initial);
  state.dt = params.dt_init > 0.0 ? params.dt_init
                                  : flow_stable_dt(*state.u.grid(), params.cfl_safety);
  state.dt_cap = state.dt;
  const double dt_floor = 1e-12 * state.dt;

  long steps = 0;
  while (state.t < params.horizon && steps < params.max_steps) {
    if (!flow_step(state, params)) {
      if (state.dt < dt_floor)
        fail(ErrorCode::StepRejected, "time step collapsed below the floor");
      continue;
    }
    ++steps;
  }
  state.history = downsample(state.history, params.report_every);
  return state;
}

RateFit fit_rate(const std::vector<FlowHistoryRow>& history, double e_infinity) {
  std::vector<double> ts, ys;
  for (const auto& row : history) {
    const double gap = row.energy - e_infinity;
    if (gap > 0.0) {
      ts.push_back(row.t);
      ys.push_back(std::log(gap));
    }
  }
  RateFit fit;
  if (ts.size() < 4) return fit;
  const size_t start = ts.size() / 2;
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = double(ts.size() - start);
  for (size_t i = start; i < ts.size(); ++i) {
    sx += ts[i];
    sy += ys[i];
    sxx += ts[i] * ts[i];
    sxy += ts[i] * ys[i];
    syy += ys[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) return fit;
  fit.rate = (n * sxy - sx * sy) / denom;
  const double ss_tot = syy - sy * sy / n;
  const double ss_res = ss_tot - fit.rate * (sxy - sx * sy / n);
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.valid = true;
  return fit;
}

}  // namespace bubbletree
