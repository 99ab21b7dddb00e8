#pragma once

#include "qtoa/quadrature.hpp"
#include "qtoa/scattering.hpp"
#include "qtoa/wavepacket.hpp"

#include <cstddef>
#include <vector>

namespace qtoa {

enum class DetectorSide { right_of_barrier, left_of_barrier };

struct Detector {
  double position;
  DetectorSide side;
};

// Throws InvalidDetector unless the position is strictly outside the support
// on the requested side. Any position is accepted for the free barrier.
Detector make_detector(const PiecewiseBarrier& barrier, double position,
                       DetectorSide side);

// Side implied by a channel: r-/l+ are detected right of the barrier,
// l-/r+ left of it.
DetectorSide detector_side_for(Channel channel);

// <p|t x s 0> = theta(s p) sqrt(p / 2 pi m) exp(i p^2 t / 2m - i p x).
cplx free_toa_eigenfunction(double t, double x, Direction s, double p,
                            double mass);

struct EngineSettings {
  double width_sigmas = 8.0;
  std::size_t momentum_nodes = 4096;
  // Keep the psi~(-p) terms of the reflection / incoming overlaps.
  bool two_term = false;
  unsigned threads = 1;
  double tail_budget = 1e-3;
  // Deep tunnelling leaves N^2 near 1e-20 for the reference packet, which is
  // still a well-defined conditional density; only a vanishing channel is empty.
  double empty_channel_floor = 1e-150;
};

// The two s-components of <t x s | P | psi>.
struct SplitAmplitude {
  cplx r;
  cplx l;
};

// Arrival amplitude of one channel at one detector, written as
//   (1/sqrt(2 pi)) int dp sqrt(p/m) g(p) exp(-i p^2 t / 2m + i s p x)
// with dE = (p/m) dp absorbed into the measure. g is the overlap of the
// packet with the channel's energy eigenstate:
//   r-: T(p) psi~(p)                    s = +1, detector right of the barrier
//   l-: R(p) psi~(p) [+ psi~(-p)]       s = -1, detector left
//   r+: psi~(p) [+ R*(p) psi~(-p)]      s = +1, detector left
//   l+: T*(p) psi~(-p)                  s = -1, detector right
// The grid-dependent part is precomputed, so evaluation is one pass over
// the momentum nodes per time.
class ArrivalAmplitude {
public:
  ArrivalAmplitude(const Packet& packet, const PiecewiseBarrier& barrier,
                   double detector_position, Channel channel,
                   const EngineSettings& settings = {});

  SplitAmplitude operator()(double t) const;
  cplx on_channel(double t) const;

  Channel channel() const { return channel_; }
  const Detector& detector() const { return detector_; }
  const MomentumGrid& grid() const { return grid_; }
  double mass() const { return mass_; }
  // N^2 = int_0^inf |g(p)|^2 dp.
  double normalization_sq() const { return normalization_sq_; }
  // Classical free-flight path from q0 to the detector for this channel.
  double path_length() const { return path_length_; }
  // Largest |d phase / dp| contributed by the position-dependent factors.
  double phase_extent() const { return phase_extent_; }

private:
  Channel channel_;
  Detector detector_;
  MomentumGrid grid_;
  double mass_;
  double normalization_sq_;
  double path_length_;
  double phase_extent_;
  std::vector<cplx> coefficients_;
};

SplitAmplitude transmission_amplitude(const Packet& packet,
                                      const PiecewiseBarrier& barrier, double x,
                                      double t, const EngineSettings& settings = {});

cplx reflection_amplitude(const Packet& packet, const PiecewiseBarrier& barrier,
                          double y, double t, bool include_direct_tail,
                          const EngineSettings& settings = {});

cplx incoming_amplitude(const Packet& packet, const PiecewiseBarrier& barrier,
                        double y, double t, Channel channel,
                        bool include_direct_tail,
                        const EngineSettings& settings = {});

struct NormalizationReport {
  double exact;                // int |g|^2 dp
  double mean_momentum_approx; // the channel probability evaluated at p0 only
};

NormalizationReport normalization_sq(const Packet& packet,
                                     const PiecewiseBarrier& barrier,
                                     Channel channel,
                                     const EngineSettings& settings = {});

struct TimeGrid {
  double t_min;
  double t_max;
  std::size_t points;

  std::vector<double> times() const;
  double step() const;
};

inline constexpr std::size_t kDefaultTimePoints = 4001;

// [0.25, 2.5] x the free transit time, widened to cover +-6 arrival-time
// spreads (+-8 when the transit time is not positive).
TimeGrid default_time_grid(const Packet& packet, const PiecewiseBarrier& barrier,
                           double detector_position, Channel channel,
                           std::size_t points = kDefaultTimePoints);

struct ToaDistribution {
  Channel channel;
  Detector detector;
  std::vector<double> times;
  std::vector<double> density; // conditional: |amplitude|^2 / N^2
  double normalization_sq;
  double mean_toa;
  double most_probable_toa;
  double captured_mass;        // integral of density over the window
  double off_channel_max;      // largest |amplitude| of the other s; zero
};

ToaDistribution toa_distribution(const Packet& packet,
                                 const PiecewiseBarrier& barrier,
                                 double detector_position, Channel channel,
                                 const TimeGrid& time_grid,
                                 const EngineSettings& settings = {});

// Argmax of samples refined by the vertex of the three-point parabola.
double refined_peak(const std::vector<double>& times,
                    const std::vector<double>& values);

// <t s | t' s'> = (1/2 pi) i delta_ss' / (t' - t + i eps).
cplx eigenstate_overlap(double t, double t_prime, Direction s,
                        Direction s_prime, double epsilon = 1e-6);

// (1/2 pi) int_0^{E_max} dE exp(-i E (t - t' - i eps)), by quadrature.
cplx eigenstate_overlap_numerical(double t, double t_prime, Direction s,
                                  Direction s_prime, double epsilon,
                                  double energy_max, std::size_t nodes);

} // namespace qtoa
