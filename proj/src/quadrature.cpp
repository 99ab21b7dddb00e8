#include "qtoa/quadrature.hpp"

#include "qtoa/wavepacket.hpp"

#include <algorithm>
#include <numbers>

namespace qtoa {

double MomentumGrid::max_spacing() const {
  double h = 0.0;
  for (std::size_t i = 1; i < nodes.size(); ++i)
    h = std::max(h, nodes[i] - nodes[i - 1]);
  if (nodes.size() == 2)
    h = std::max(h, p_max - p_min);
  return h;
}

MomentumGrid uniform_grid(double lo, double hi, std::size_t n) {
  if (n < 2)
    throw InvalidInput("a momentum grid needs at least two nodes");
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo))
    throw InvalidInput("momentum window is empty");

  MomentumGrid g;
  g.p_min = lo;
  g.p_max = hi;
  g.nodes.resize(n);
  g.weights.assign(n, 0.0);

  if (n == 2) {
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    g.nodes = {mid - half / std::numbers::sqrt3, mid + half / std::numbers::sqrt3};
    g.weights = {half, half};
    return g;
  }

  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    g.nodes[i] = (i + 1 == n) ? hi : lo + h * static_cast<double>(i);

  // Simpson over the first `simpson_points` nodes (odd count), 3/8 rule over
  // the last three intervals when the interval count is odd.
  const std::size_t intervals = n - 1;
  const bool closing_38 = intervals % 2 == 1;
  const std::size_t simpson_intervals = closing_38 ? intervals - 3 : intervals;
  for (std::size_t i = 0; i < simpson_intervals; i += 2) {
    g.weights[i] += h / 3.0;
    g.weights[i + 1] += 4.0 * h / 3.0;
    g.weights[i + 2] += h / 3.0;
  }
  if (closing_38) {
    const std::size_t s = simpson_intervals;
    g.weights[s] += 3.0 * h / 8.0;
    g.weights[s + 1] += 9.0 * h / 8.0;
    g.weights[s + 2] += 9.0 * h / 8.0;
    g.weights[s + 3] += 3.0 * h / 8.0;
  }
  return g;
}

MomentumGrid build_momentum_grid(const Packet& packet, double width_sigmas,
                                 std::size_t nodes) {
  if (!(width_sigmas > 0.0))
    throw InvalidInput("width_sigmas must be positive");
  const double half = width_sigmas * packet.momentum_scale();
  const double hi = packet.mean_momentum() + half;
  if (!(hi > 0.0))
    throw InvalidInput("momentum window lies entirely at p <= 0");
  const double lo = std::max(0.0, packet.mean_momentum() - half);
  MomentumGrid g = uniform_grid(lo, hi, nodes);
  g.truncation_mass = packet.momentum_mass_outside(lo, hi);
  return g;
}

ResolutionCheck oscillation_resolution_check(const MomentumGrid& grid,
                                             double t_max, double x_span,
                                             double mass) {
  ResolutionCheck r{};
  r.max_phase_slope = std::abs(x_span) + grid.p_max * std::abs(t_max) / mass;
  r.spacing = grid.max_spacing();
  constexpr double budget = std::numbers::pi / 4.0;
  r.ok = r.spacing * r.max_phase_slope <= budget;
  const double width = grid.p_max - grid.p_min;
  r.required_nodes = r.ok ? grid.size()
                          : static_cast<std::size_t>(
                                std::ceil(width * r.max_phase_slope / budget)) +
                                1;
  return r;
}

double integrate_density(std::span<const double> values,
                         std::span<const double> times) {
  if (values.size() != times.size())
    throw InvalidInput("density and time arrays differ in length");
  CompensatedSum acc;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!(values[i] >= 0.0))
      throw InvalidInput("probability density must be non-negative, got " +
                         std::to_string(values[i]) + " at t = " +
                         std::to_string(times[i]));
    if (i > 0) {
      const double dt = times[i] - times[i - 1];
      if (!(dt > 0.0))
        throw InvalidInput("times must be strictly increasing");
      acc.add(0.5 * dt * (values[i] + values[i - 1]));
    }
  }
  return acc.value();
}

} // namespace qtoa
