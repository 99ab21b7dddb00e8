#pragma once

#include "qtoa/errors.hpp"

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace qtoa {

using cplx = std::complex<double>;
class Packet;

// Neumaier-compensated accumulator. Summation order is whatever the caller
// uses, so fixed loops give bit-identical results.
class CompensatedSum {
public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

class CompensatedComplexSum {
public:
  void add(cplx z) {
    re_.add(z.real());
    im_.add(z.imag());
  }
  cplx value() const { return {re_.value(), im_.value()}; }

private:
  CompensatedSum re_;
  CompensatedSum im_;
};

// Nodes and positive weights of a fixed composite rule over [p_min, p_max].
struct MomentumGrid {
  std::vector<double> nodes;
  std::vector<double> weights;
  double p_min = 0.0;
  double p_max = 0.0;
  // Packet probability outside the window (0 for grids not tied to a packet).
  double truncation_mass = 0.0;

  std::size_t size() const { return nodes.size(); }
  double max_spacing() const;
};

// Uniform nodes, composite Simpson (3/8 closing panel for even counts);
// two nodes fall back to two-point Gauss-Legendre. Exact for cubics.
MomentumGrid uniform_grid(double lo, double hi, std::size_t nodes);

// Window [max(0, p0 - w/delta), p0 + w/delta] for w = width_sigmas.
MomentumGrid build_momentum_grid(const Packet& packet, double width_sigmas,
                                 std::size_t nodes);

template <class F>
cplx integrate_complex(F&& f, const MomentumGrid& grid) {
  CompensatedComplexSum acc;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const cplx v = f(grid.nodes[i]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw IntegrandError("integrand is not finite at p = " +
                               std::to_string(grid.nodes[i]),
                           grid.nodes[i]);
    acc.add(grid.weights[i] * v);
  }
  return acc.value();
}

struct ResolutionCheck {
  bool ok;
  double max_phase_slope;  // |x_span| + p_max |t_max| / m
  double spacing;          // largest node gap
  std::size_t required_nodes;
};

// Requires spacing * max_phase_slope <= pi/4 for phases -p^2 t/2m + p x.
ResolutionCheck oscillation_resolution_check(const MomentumGrid& grid,
                                             double t_max, double x_span,
                                             double mass);

// Trapezoid rule over a strictly increasing abscissa.
double integrate_density(std::span<const double> values,
                         std::span<const double> times);

} // namespace qtoa
