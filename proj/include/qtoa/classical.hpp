#pragma once

#include "qtoa/scattering.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace qtoa {

// V(q) = V / cosh^2(q / d).
struct SmoothBarrier {
  double height;
  double width;
  double mass;

  SmoothBarrier(double height, double width, double mass);

  double potential(double q) const;
  double potential_derivative(double q) const;
  // Positive root of V(q) = E for 0 < E < V.
  double turning_distance(double energy) const;
};

double free_classical_toa(double q, double p, double x, double mass);

// Equation of time: t = sign(p) sqrt(m/2) int_q^x dq' / sqrt(H - V(q')).
// The path is the interval between q and x; x behind the mover gives t < 0.
double classical_toa(const PiecewiseBarrier& potential, double q, double p,
                     double x);
double classical_toa(const SmoothBarrier& potential, double q, double p,
                     double x);

// Two-leg arrival for a mover that turns around before reaching x: time to
// the turning point plus the return to x, which must lie on the mover's side.
struct BouncedArrival {
  double turning_point;
  double time;
};

BouncedArrival classical_reflected_toa(const PiecewiseBarrier& potential,
                                       double q, double p, double x);
BouncedArrival classical_reflected_toa(const SmoothBarrier& potential, double q,
                                       double p, double x);

enum class SeparatrixBranch { plus, minus };

// +-p_V(q), p_V(q) = sign(q) sqrt(2m (V - V(q))).
double separatrix(const SmoothBarrier& barrier, double q, SeparatrixBranch branch);

// Region of (q, p) relative to p_V (incoming partition) or -p_V (outgoing).
Channel classify_incoming(const SmoothBarrier& barrier, double q, double p);
Channel classify_outgoing(const SmoothBarrier& barrier, double q, double p);

struct PhasePoint {
  double q;
  double p;
};

struct Trajectory {
  double energy;
  Channel incoming;  // r+ or l+
  Channel outgoing;  // r- or l-
  bool reflected;
  std::vector<PhasePoint> samples;
};

struct PhasePortrait {
  std::vector<Trajectory> trajectories;
  std::vector<PhasePoint> separatrix_plus;
  std::vector<PhasePoint> separatrix_minus;
};

// Two trajectories per energy (incident from the left and from the right),
// sampled over |q| <= extent_widths * d.
PhasePortrait phase_portrait(const SmoothBarrier& barrier,
                             std::span<const double> energies,
                             std::size_t samples_per_trajectory,
                             double extent_widths = 5.0);

} // namespace qtoa
