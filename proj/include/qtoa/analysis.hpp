#pragma once

#include "qtoa/scattering.hpp"
#include "qtoa/toa.hpp"
#include "qtoa/wavepacket.hpp"

#include <optional>

namespace qtoa {

enum class ScatteringChannel { transmission, reflection };

// Where plane waves are referenced when taking the phase of T or R.
//   origin:        e^{ipq} on both sides, the convention of the engine.
//   barrier_edges: incoming wave referenced at the left edge, transmitted
//                  wave at the right edge (reflected wave at the left edge).
// The edge reference strips the free-flight term m*width/p from the delay,
// which is the quantity that saturates for opaque barriers.
enum class PhaseReference { origin, barrier_edges };

// d arg C / dE at momentum p, C = T or R. Central difference in E with step
// 1e-5 E and one Richardson step, on a locally unwrapped phase.
// Throws SingularPhase if |C| vanishes at or near p.
double wigner_delay(const PiecewiseBarrier& barrier, double p,
                    ScatteringChannel channel,
                    PhaseReference reference = PhaseReference::origin);

// d arg C / dp, taken as (1/2) d arg(C^2) / dp so that a simple zero of C
// (where arg C jumps by pi) does not spoil the derivative.
double phase_derivative_p(const PiecewiseBarrier& barrier, double p,
                          ScatteringChannel channel,
                          PhaseReference reference = PhaseReference::origin);

struct PhaseTimeReport {
  double p0;
  double wigner_delay;
  double predicted_toa;
  double reference_free_toa;
};

// reference_free_toa is the most probable arrival of the same packet with
// no barrier, computed on the default grid; predicted = reference + delay.
PhaseTimeReport phase_time_prediction(const GaussianPacket& packet,
                                      const PiecewiseBarrier& barrier,
                                      double detector_position,
                                      ScatteringChannel channel,
                                      const EngineSettings& settings = {});

struct TwoBumpCondition {
  int n_nearest;
  double residual;                // p0' a - n pi
  std::optional<double> v_star;   // empty when no positive height works
  double interior_momentum;       // p0'
};

// Requires a single square barrier and p0^2/2m > V. With target_n set, V_star
// is solved for that n instead of the nearest one.
TwoBumpCondition two_bump_condition(const PiecewiseBarrier& barrier, double p0,
                                    std::optional<int> target_n = std::nullopt);

// Fixed point of p = m (path + arg'C(p)) / t by damped iteration. path is the
// free flight length of the channel (x - q0, or the bounced length).
double stationary_phase_momentum(double t, double path,
                                 const PiecewiseBarrier& barrier,
                                 ScatteringChannel channel);

// Time at which the stationary momentum equals p.
double stationary_phase_time(double p, double path,
                             const PiecewiseBarrier& barrier,
                             ScatteringChannel channel);

// sin^2(sqrt(p(t)^2 - k_v^2) a) exp(-2 delta^2 (p(t) - p0)^2), with p(t) the
// reflection stationary momentum. Unnormalised.
double approx_reflection_profile(double t, double path,
                                 const GaussianPacket& packet,
                                 const PiecewiseBarrier& barrier);

} // namespace qtoa
