#include "bubbletree/testspace.hpp"

#include <cmath>

namespace bubbletree {

Field direction_field(const VariationDirection& dir, const Field& z_field) {
  const auto& grid = *z_field.grid();
  Field out(z_field.grid(), z_field.ncomp(), dir.kind_name());
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < grid.n_r(); ++i)
      for (int j = 0; j < grid.n_theta(); ++j) {
        const Complex z = grid.plane_point(Chart(c), i, j);
        const Ambient v = dir.deriv_map(z);
        // the finite-difference derivative is tangent to O(h^4); project the
        // residue away so downstream tangency contracts hold exactly
        out.set_node_value(Chart(c), i, j,
                           tangent_project(z_field.node_value(Chart(c), i, j), v));
      }
  return out;
}

namespace {

Field bump_mode_field(const Field& z_field, double center_s, double width, int mode,
                      bool sine, int axis) {
  const auto& grid = *z_field.grid();
  const int n = z_field.ncomp();
  Field out(z_field.grid(), n, "bump");
  for (int c = 0; c < 2; ++c)
    for (int i = 0; i < grid.n_r(); ++i)
      for (int j = 0; j < grid.n_theta(); ++j) {
        const Complex z = grid.plane_point(Chart(c), i, j);
        const double s = std::log(std::abs(z));
        const double x = (s - center_s) / width;
        double b = 0.0;
        if (std::abs(x) < 1.0) {
          const double cc = std::cos(0.5 * M_PI * x);
          const double ang = std::arg(z) * mode;
          b = cc * cc * (sine ? std::sin(ang) : std::cos(ang));
        }
        Ambient e(n);
        e.setZero();
        e(axis) = 1.0;
        out.set_node_value(Chart(c), i, j,
                           b * tangent_project(z_field.node_value(Chart(c), i, j), e));
      }
  return out;
}

}  // namespace

TestSpace build_test_space(const SingularityModel& model, const Field& z_field,
                           const std::vector<VariationDirection>& basis,
                           const TestSpaceOptions& options) {
  TestSpace out;
  if (options.include_tangent_basis) {
    for (const auto& dir : basis) out.fields.push_back(direction_field(dir, z_field));
    out.tangent_count = int(out.fields.size());
  }

  const Radii& r = model.radii();
  const double s1 = std::log(r.r1), s0 = std::log(r.r0), sh = std::log(r.r_hat);
  std::vector<double> centers = {sh};
  if (options.level >= 1) {
    centers.push_back(s1 + std::log(4.0));
    centers.push_back(s0 - std::log(4.0));
  }
  if (options.level >= 2) {
    centers.push_back(0.5 * (s1 + sh));
    centers.push_back(0.5 * (sh + s0));
    centers.push_back(s0 + 1.0);
  }
  const double width = std::max(1.0, 0.25 * (s0 - s1));
  const int max_mode = (options.level >= 1) ? 2 : 1;
  const int n_axes = std::min(3, model.ambient_dim());

  for (const double c : centers)
    for (int mode = 0; mode <= max_mode; ++mode)
      for (int sine = 0; sine <= (mode > 0 ? 1 : 0); ++sine)
        for (int axis = 0; axis < n_axes; ++axis)
          out.fields.push_back(bump_mode_field(z_field, c, width, mode, sine != 0, axis));

  return out;
}

}  // namespace bubbletree
